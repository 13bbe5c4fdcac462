"""Point estimators of the mean spacing gamma and their confidence intervals.

The Hill estimator is the average of the top-k scaled log-spacings; the
quantile estimator reads gamma off a single empirical log-quantile and pays
the variance multiplier h(s); the uniform-spacings ML estimator is half the
largest top-k spacing.  Interval half-widths follow the normal-limit
formulas with the requested variance proxy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .renyi import HeavySample, RenyiSample, scaled_log_spacings

__all__ = [
    "EstimateWithCI",
    "hill",
    "hill_trajectory",
    "quantile_estimator",
    "empirical_quantile",
    "h_function",
    "h_minimizer",
    "spacing_sigma",
    "ml_uniform",
    "normal_quantile",
    "ci_spacing",
    "ci_hill_self",
    "ci_quantile",
]


@dataclass(frozen=True)
class EstimateWithCI:
    """Point estimate with an optional symmetric confidence interval."""

    gamma_hat: float
    lower: float
    upper: float
    k_used: int
    level: float
    method: str  # hill | quantile | ml_uniform
    interval_method: str  # spacing_variance | hill_self | quantile_h | none

    def __post_init__(self):
        if not (self.lower <= self.gamma_hat <= self.upper):
            raise ValueError("interval must contain the point estimate")


def _check_k(n: int, k: int, minimum: int = 1) -> None:
    if not minimum <= k <= n:
        raise ValueError(f"k must lie in {minimum}..{n}, got {k}")


def hill(h: HeavySample, k: int) -> float:
    """Average of the top-k scaled log-spacings,
    (1/k) sum_{j=1..k} j (log w_{n-j+1} - log w_{n-j}), with w_0 = C.
    """
    _check_k(h.n, k)
    zhat = scaled_log_spacings(h)
    return float(np.mean(zhat[h.n - k:]))


def hill_trajectory(h: HeavySample) -> np.ndarray:
    """hill(h, k) for every k = 1..n in one pass."""
    zhat = scaled_log_spacings(h)
    return np.cumsum(zhat[::-1]) / np.arange(1, h.n + 1)


def _ceil_index(n: int, s: float) -> int:
    """Smallest integer >= n*s, snapping to an integer within 1e-9."""
    ns = n * s
    nearest = round(ns)
    if abs(ns - nearest) < 1e-9:
        return int(nearest)
    return int(math.ceil(ns))


def quantile_estimator(r: RenyiSample, s: float) -> float:
    """gamma_tilde(s) = x_{ceil(ns)} / (-log(1-s))."""
    return empirical_quantile(r, s, which="log") / (-math.log1p(-s))


def empirical_quantile(r: RenyiSample, s: float, which: str = "log") -> float:
    """Empirical quantile of the sample: on log scale (x itself) or level scale e^x."""
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    idx = _ceil_index(r.n, s)
    if idx < 1:
        raise ValueError(f"ceil(n*s) = {idx} must be at least 1")
    q1 = float(r.x[idx - 1])
    if which == "log":
        return q1
    if which == "level":
        return math.exp(q1)
    raise ValueError(f"unknown quantile scale {which!r}")


def h_function(s: float) -> float:
    """Variance multiplier h(s) = s / ((1-s) log(1-s)^2) of the quantile estimator."""
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    return s / ((1.0 - s) * math.log1p(-s) ** 2)


def h_minimizer() -> tuple[float, float]:
    """Locate the unique minimum of h: the root of log(1/(1-s)) = 2s in (0, 1).

    Bisection to 1e-10; returns (s0, h(s0)).
    """
    f = lambda s: -math.log1p(-s) - 2.0 * s
    lo, hi = 0.5, 0.999  # f < 0 at 0.5, > 0 near 1; the root at 0 is excluded
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    s0 = 0.5 * (lo + hi)
    return s0, h_function(s0)


def spacing_sigma(h: HeavySample, k: int) -> float:
    """Empirical standard deviation of the first k scaled log-spacings (1/(k-1) divisor)."""
    if k < 2:
        raise ValueError("spacing variance needs k >= 2")
    _check_k(h.n, k)
    zhat = scaled_log_spacings(h)[:k]
    return float(np.std(zhat, ddof=1))


def ml_uniform(h: HeavySample, k: int) -> float:
    """ML estimate of gamma under uniform(0, 2*gamma) spacings:
    half the maximum of the top-k scaled log-spacings.
    """
    _check_k(h.n, k)
    zhat = scaled_log_spacings(h)
    return 0.5 * float(np.max(zhat[h.n - k:]))


def normal_quantile(p: float) -> float:
    """Standard normal quantile, rational approximation plus one Newton step.

    Accurate to better than 1e-8 over (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    a = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
    b = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01)
    c = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
    d = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
         3.754408661907416e+00)
    plow = 0.02425
    if p < plow:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
             / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    elif p <= 1.0 - plow:
        q = p - 0.5
        r = q * q
        x = ((((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
             / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = -((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
              / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    # one Halley-refined Newton step on Phi(x) - p
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def _x_eps(eps: float) -> float:
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    return normal_quantile(1.0 - eps / 2.0)


def ci_spacing(gamma_hat: float, sigma_hat: float, k: int, eps: float) -> EstimateWithCI:
    """Interval gamma_hat +- sigma_hat * x_eps / sqrt(k)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    half = sigma_hat * _x_eps(eps) / math.sqrt(k)
    return EstimateWithCI(gamma_hat, gamma_hat - half, gamma_hat + half,
                          k, 1.0 - eps, "hill", "spacing_variance")


def ci_hill_self(gamma_hat: float, k: int, eps: float) -> EstimateWithCI:
    """Interval gamma_hat +- gamma_hat * x_eps / sqrt(k) (iid-style self-normalized)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    half = gamma_hat * _x_eps(eps) / math.sqrt(k)
    return EstimateWithCI(gamma_hat, gamma_hat - half, gamma_hat + half,
                          k, 1.0 - eps, "hill", "hill_self")


def ci_quantile(gamma_tilde: float, sigma_hat: float, s: float, n: int,
                eps: float) -> EstimateWithCI:
    """Interval gamma_tilde +- sigma_hat * sqrt(h(s)) * x_eps / sqrt(n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    half = sigma_hat * math.sqrt(h_function(s)) * _x_eps(eps) / math.sqrt(n)
    return EstimateWithCI(gamma_tilde, gamma_tilde - half, gamma_tilde + half,
                          n, 1.0 - eps, "quantile", "quantile_h")
