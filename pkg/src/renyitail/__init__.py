"""Heavy-tail modeling through scaled iid log-spacings.

A heavy-tailed ordered sample is represented as w_k = C exp(x_k) where
x_k = sum_{j<=k} z_j/(n+1-j) for iid nonnegative spacings z with mean
gamma; 1/gamma plays the role of the tail index.  The package provides the
spacing laws, the construction and its exact finite-n oracles, tail-index
estimators with confidence intervals, large-deviation rates, and a seeded
Monte Carlo experiment harness with a CLI front end.
"""

from .estimators import (
    EstimateWithCI,
    ci_hill_self,
    ci_quantile,
    ci_spacing,
    empirical_quantile,
    h_function,
    h_minimizer,
    hill,
    hill_trajectory,
    ml_uniform,
    normal_quantile,
    quantile_estimator,
    spacing_sigma,
)
from .experiments import (
    DEFAULT_SEED,
    ExperimentConfig,
    ReportTable,
    run_coverage,
    run_exponential_limit,
    run_experiment,
    run_hill_plot,
    run_ld_check,
    run_variance_curve,
)
from .gof import ks_critical, ks_critical_two_sample, ks_statistic, ks_statistic_two_sample
from .large_deviations import (
    MCTailResult,
    RateQuery,
    exact_hill_tail,
    gamma_family_rates,
    iid_comparison_rates,
    log_gammaincc,
    mc_tail_logprob,
    rate_function,
)
from .likelihood import (
    DensityModel,
    conditional_log_likelihood,
    ml_fit,
    ordered_density,
    permuted_density,
)
from .rand_models import (
    DistributionSpec,
    SeedSpec,
    bernoulli,
    cf,
    draw,
    exponential,
    gamma_law,
    hall_class,
    mgf,
    mgf_domain,
    moment,
    parse_spec,
    quantile,
    random_permutation,
    sample,
    strict_pareto,
    uniform,
)
from .renyi import (
    HeavySample,
    RenyiSample,
    cross_moment_recursion,
    generalized_renyi,
    heavy_sample,
    heavy_sample_from_sorted,
    moment_recursion,
    permuted_view,
    psi_n,
    scaled_log_spacings,
)

__version__ = "0.1.0"
