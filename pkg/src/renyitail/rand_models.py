"""Probability laws used across the package.

Two families live here: spacing laws with mean ``gamma`` (exponential,
uniform on (0, 2*gamma), Bernoulli, gamma with shape r and rate r/gamma)
and iid comparison laws for sorted heavy-tailed samples (strict Pareto and
the Hall-class perturbed Pareto, the latter defined only through its
quantile function).

Sampling is reproducible: every draw comes from a counter-based Philox
stream keyed by ``(master_seed, stream_index)``, so distinct stream
indices never share state and results are independent of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import gammaincinv

__all__ = [
    "DistributionSpec",
    "SeedSpec",
    "exponential",
    "uniform",
    "bernoulli",
    "gamma_law",
    "strict_pareto",
    "hall_class",
    "parse_spec",
    "draw",
    "sample",
    "quantile",
    "moment",
    "mgf",
    "mgf_domain",
    "cf",
    "support",
    "random_permutation",
]

SPACING_KINDS = ("exp", "unif", "bern", "gamma")
IID_KINDS = ("pareto", "hall")

_HALL_GAMMA = 0.5  # tail index 1/2 is built into Q(1-u) = u^{-1/2}(1 + u/2)
_HALL_MEAN = 7.0 / 3.0


@dataclass(frozen=True)
class DistributionSpec:
    """Tagged description of a law: ``kind`` plus its parameters.

    ``gamma`` is the mean for spacing laws and the tail parameter for the
    Pareto-type comparison laws; ``r`` is the gamma-law shape; ``c`` the
    Pareto scale.
    """

    kind: str
    gamma: float | None = None
    r: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in SPACING_KINDS + IID_KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "hall":
            if self.gamma not in (None, _HALL_GAMMA) or self.r is not None or self.c is not None:
                raise ValueError("hall law takes no parameters")
            object.__setattr__(self, "gamma", _HALL_GAMMA)
            return
        if self.gamma is None or not (self.gamma > 0):
            raise ValueError(f"{self.kind}: gamma must be positive")
        if self.kind == "bern" and not (0 < self.gamma <= 1):
            raise ValueError("bern: gamma must lie in (0, 1]")
        if self.kind == "gamma":
            if self.r is None or not (self.r > 0):
                raise ValueError("gamma: shape r must be positive")
        elif self.r is not None:
            raise ValueError(f"{self.kind}: unexpected parameter r")
        if self.kind == "pareto":
            if self.c is None or not (self.c > 0):
                raise ValueError("pareto: scale c must be positive")
        elif self.c is not None:
            raise ValueError(f"{self.kind}: unexpected parameter c")

    @property
    def is_spacing_law(self) -> bool:
        return self.kind in SPACING_KINDS

    @property
    def is_continuous(self) -> bool:
        return self.kind in ("exp", "unif", "gamma", "pareto", "hall")

    @property
    def mean(self) -> float:
        return moment(self, 1)

    @property
    def variance(self) -> float:
        mu1 = moment(self, 1)
        mu2 = moment(self, 2)
        if math.isinf(mu2):
            return math.inf
        return mu2 - mu1 * mu1

    def canonical(self) -> str:
        """Canonical text form, e.g. ``exp:gamma=0.5``; parse() round-trips it."""
        if self.kind == "hall":
            return "hall"
        parts = []
        if self.kind == "gamma":
            parts.append(f"r={self.r!r}")
        parts.append(f"gamma={self.gamma!r}")
        if self.kind == "pareto":
            parts.append(f"c={self.c!r}")
        return f"{self.kind}:" + ",".join(parts)

    def __str__(self) -> str:
        return self.canonical()


def exponential(gamma: float) -> DistributionSpec:
    return DistributionSpec("exp", gamma=gamma)


def uniform(gamma: float) -> DistributionSpec:
    """Uniform on (0, 2*gamma), so the mean is gamma."""
    return DistributionSpec("unif", gamma=gamma)


def bernoulli(gamma: float) -> DistributionSpec:
    return DistributionSpec("bern", gamma=gamma)


def gamma_law(r: float, gamma: float) -> DistributionSpec:
    """Gamma with shape r and rate r/gamma, so the mean is gamma."""
    return DistributionSpec("gamma", gamma=gamma, r=r)


def strict_pareto(gamma: float, c: float = 1.0) -> DistributionSpec:
    """Strict Pareto: P(X > x) = (c/x)^(1/gamma) for x >= c."""
    return DistributionSpec("pareto", gamma=gamma, c=c)


def hall_class() -> DistributionSpec:
    """Perturbed Pareto with quantile Q(1-u) = u^(-1/2) (1 + u/2)."""
    return DistributionSpec("hall")


def parse_spec(text: str) -> DistributionSpec:
    """Parse the canonical text form (case-insensitive, unknown keys rejected)."""
    body = text.strip().lower()
    if not body:
        raise ValueError("empty distribution spec")
    kind, _, params = body.partition(":")
    kwargs: dict[str, float] = {}
    if params:
        for item in params.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in ("gamma", "r", "c"):
                raise ValueError(f"bad parameter {item!r} in spec {text!r}")
            if key in kwargs:
                raise ValueError(f"duplicate parameter {key!r} in spec {text!r}")
            try:
                kwargs[key] = float(value)
            except ValueError:
                raise ValueError(f"bad numeric value in {item!r}") from None
    return DistributionSpec(kind, **kwargs)


@dataclass(frozen=True)
class SeedSpec:
    """Philox stream key: (master_seed, stream_index) -> generator state.

    The pair is the raw 128-bit Philox key, so distinct stream indices map
    to distinct states exactly, not merely with high probability.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if not 0 <= int(self.stream_index) < 2**64:
            raise ValueError("stream_index must fit in 64 unsigned bits")

    def with_stream(self, stream_index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_index)

    def generator(self) -> Generator:
        key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
        return Generator(Philox(key=key))


def draw(spec: DistributionSpec, rng: Generator, count: int) -> np.ndarray:
    """Draw ``count`` iid values from an already-open stream."""
    if count <= 0:
        raise ValueError("count must be positive")
    g = spec.gamma
    if spec.kind == "exp":
        return rng.exponential(scale=g, size=count)
    if spec.kind == "unif":
        return rng.random(count) * (2.0 * g)
    if spec.kind == "bern":
        return (rng.random(count) < g).astype(np.float64)
    if spec.kind == "gamma":
        return rng.standard_gamma(spec.r, size=count) * (g / spec.r)
    # Pareto-type laws sample by inverse transform; 1 - random() lies in (0, 1].
    u = 1.0 - rng.random(count)
    if spec.kind == "pareto":
        return spec.c * u ** (-g)
    return u ** (-0.5) * (1.0 + 0.5 * u)  # hall


def sample(spec: DistributionSpec, seed: SeedSpec, count: int) -> np.ndarray:
    """Draw ``count`` iid values; deterministic given (spec, seed, count)."""
    return draw(spec, seed.generator(), count)


def quantile(spec: DistributionSpec, u):
    """Left-continuous generalized inverse of the CDF at u in (0, 1).

    Accepts a scalar or an array; the Bernoulli case is the 0/1 step.
    """
    arr = np.asarray(u, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("quantile argument must lie in (0, 1)")
    g = spec.gamma
    if spec.kind == "exp":
        out = -g * np.log1p(-arr)
    elif spec.kind == "unif":
        out = 2.0 * g * arr
    elif spec.kind == "bern":
        out = np.where(arr <= 1.0 - g, 0.0, 1.0)
    elif spec.kind == "gamma":
        out = gammaincinv(spec.r, arr) * (g / spec.r)
    elif spec.kind == "pareto":
        out = spec.c * (1.0 - arr) ** (-g)
    else:  # hall
        v = 1.0 - arr
        out = v ** (-0.5) * (1.0 + 0.5 * v)
    return float(out) if np.isscalar(u) else out


def moment(spec: DistributionSpec, k: int) -> float:
    """Exact k-th raw moment; returns math.inf when the moment diverges."""
    if k < 1 or k != int(k):
        raise ValueError("moment order must be a positive integer")
    k = int(k)
    g = spec.gamma
    if spec.kind == "exp":
        return math.factorial(k) * g**k
    if spec.kind == "unif":
        return (2.0 * g) ** k / (k + 1)
    if spec.kind == "bern":
        return g
    if spec.kind == "gamma":
        r = spec.r
        # prod_{i=0}^{k-1} (r + i) / (r/g) each step
        out = 1.0
        for i in range(k):
            out *= (r + i) * (g / r)
        return out
    if spec.kind == "pareto":
        if k * g >= 1.0:
            return math.inf
        return spec.c**k / (1.0 - k * g)
    # hall: E X = int_0^1 u^{-1/2} (1 + u/2) du = 2 + 1/3; higher moments diverge
    return _HALL_MEAN if k == 1 else math.inf


def mgf(spec: DistributionSpec, t: float) -> float:
    """Moment generating function M(t); math.inf where M diverges."""
    g = spec.gamma
    if spec.kind == "exp":
        return 1.0 / (1.0 - g * t) if t < 1.0 / g else math.inf
    if spec.kind == "unif":
        a = 2.0 * g * t
        return float(np.expm1(a) / a) if a != 0.0 else 1.0
    if spec.kind == "bern":
        if t > 709.0:  # exp overflow: M is finite but not representable
            return math.inf
        return 1.0 - g + g * math.exp(t)
    if spec.kind == "gamma":
        r = spec.r
        return (1.0 - g * t / r) ** (-r) if t < r / g else math.inf
    if t > 0.0:
        return math.inf  # pareto/hall have no exponential moments
    if t == 0.0:
        return 1.0
    raise NotImplementedError(f"mgf of {spec.kind!r} has no closed form for t < 0")


def mgf_domain(spec: DistributionSpec) -> tuple[float, float]:
    """Open interval where M(t) is finite."""
    if spec.kind in ("exp",):
        return (-math.inf, 1.0 / spec.gamma)
    if spec.kind == "gamma":
        return (-math.inf, spec.r / spec.gamma)
    if spec.kind in ("unif", "bern"):
        return (-math.inf, math.inf)
    raise ValueError(f"{spec.kind!r} has no finite mgf in a neighborhood of 0")


def cf(spec: DistributionSpec, t: float) -> complex:
    """Characteristic function E exp(itZ) for the four spacing laws."""
    g = spec.gamma
    if spec.kind == "exp":
        return 1.0 / (1.0 - 1j * g * t)
    if spec.kind == "unif":
        a = 2.0 * g * t
        if a == 0.0:
            return 1.0 + 0.0j
        return (np.exp(1j * a) - 1.0) / (1j * a)
    if spec.kind == "bern":
        return (1.0 - g) + g * np.exp(1j * t)
    if spec.kind == "gamma":
        return (1.0 - 1j * g * t / spec.r) ** (-spec.r)
    raise NotImplementedError(f"characteristic function of {spec.kind!r} not implemented")


def support(spec: DistributionSpec) -> tuple[float, float]:
    """Closed convex hull of the support."""
    g = spec.gamma
    if spec.kind in ("exp", "gamma"):
        return (0.0, math.inf)
    if spec.kind == "unif":
        return (0.0, 2.0 * g)
    if spec.kind == "bern":
        return (0.0, 1.0)
    if spec.kind == "pareto":
        return (spec.c, math.inf)
    return (1.5, math.inf)  # hall: Q at u -> 1


def atom_mass(spec: DistributionSpec, x: float) -> float:
    """P(Z = x); nonzero only for the Bernoulli law."""
    if spec.kind == "bern":
        if x == 1.0:
            return spec.gamma
        if x == 0.0:
            return 1.0 - spec.gamma
    return 0.0


def random_permutation(n: int, seed: SeedSpec) -> np.ndarray:
    """Uniform random permutation of 1..n, deterministic given the seed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return seed.generator().permutation(n) + 1
