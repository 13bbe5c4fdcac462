"""Order statistics built from scaled iid spacings, and their exact oracles.

The central construction turns iid values z_1..z_n into the nondecreasing
sequence x_k = sum_{j<=k} z_j / (n+1-j); exponentiating and scaling gives a
heavy-tailed sample w_k = C exp(x_k) whose scaled log-spacings recover the
z's exactly.  The oracles at the bottom (psi_n, moment recursions) evaluate
finite-n expectations of a randomly reordered coordinate X_{D,n} without
any simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rand_models import DistributionSpec, cf, moment

__all__ = [
    "RenyiSample",
    "HeavySample",
    "generalized_renyi",
    "heavy_sample",
    "heavy_sample_from_sorted",
    "scaled_log_spacings",
    "permuted_view",
    "psi_n",
    "moment_recursion",
    "cross_moment_recursion",
]


@dataclass(frozen=True)
class RenyiSample:
    """A realization x_1 <= ... <= x_n together with its generating z's."""

    n: int
    z: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=np.float64))
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64))
        if self.n < 1 or len(self.z) != self.n or len(self.x) != self.n:
            raise ValueError("inconsistent sample sizes")


@dataclass(frozen=True)
class HeavySample:
    """Nondecreasing positive sample w with scale floor C (w_0 := C)."""

    scale_c: float
    w: np.ndarray

    def __post_init__(self):
        if not self.scale_c > 0:
            raise ValueError("scale C must be positive")
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or len(w) < 1:
            raise ValueError("w must be a nonempty 1-d sequence")
        if w[0] < self.scale_c or np.any(np.diff(w) < 0):
            raise ValueError("w must be nondecreasing with w[0] >= C")
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return len(self.w)


def generalized_renyi(z) -> RenyiSample:
    """Build x_k = sum_{j<=k} z_j/(n+1-j) by an index-ordered prefix sum."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or len(z) == 0:
        raise ValueError("z must be a nonempty 1-d sequence")
    n = len(z)
    x = np.cumsum(z / np.arange(n, 0, -1))
    return RenyiSample(n=n, z=z, x=x)


def heavy_sample(r: RenyiSample, scale_c: float) -> HeavySample:
    """w_k = C exp(x_k); requires nonnegative z so that w is ordered."""
    if np.any(r.z < 0):
        raise ValueError("model violation: spacings must be nonnegative")
    if not scale_c > 0:
        raise ValueError("scale C must be positive")
    return HeavySample(scale_c=scale_c, w=scale_c * np.exp(r.x))


def heavy_sample_from_sorted(w, scale_c: float) -> HeavySample:
    """Wrap an already sorted positive data column (iid comparison path)."""
    return HeavySample(scale_c=scale_c, w=np.asarray(w, dtype=np.float64))


def scaled_log_spacings(h: HeavySample) -> np.ndarray:
    """Recover zhat_k = (n-k+1)(log w_k - log w_{k-1}) with w_0 = C.

    Exact inverse of heavy_sample(generalized_renyi(z), C) up to roundoff.
    """
    if np.any(h.w <= 0):
        raise ValueError("w must be positive")
    logw = np.log(np.concatenate(([h.scale_c], h.w)))
    return np.diff(logw) * np.arange(h.n, 0, -1)


def permuted_view(r: RenyiSample, perm) -> np.ndarray:
    """Reorder x by a permutation of 1..n (1-based, as generated)."""
    perm = np.asarray(perm)
    n = r.n
    if len(perm) != n or not np.array_equal(np.sort(perm), np.arange(1, n + 1)):
        raise ValueError("perm must be a bijection on 1..n")
    return r.x[perm - 1]


def psi_n(spec: DistributionSpec, n: int, t: float) -> complex:
    """Characteristic function of X_{D,n} for a uniformly random index D.

    psi_n(t) = (1/n) sum_{m=1}^n prod_{j=1}^m phi(t/(n+1-j)), evaluated with
    a running product in O(n) complex multiplications.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    total = 0.0 + 0.0j
    prod = 1.0 + 0.0j
    for m in range(1, n + 1):
        prod *= cf(spec, t / (n + 1 - m))
        total += prod
    return total / n


def moment_recursion(spec: DistributionSpec, k_max: int, n: int) -> np.ndarray:
    """Exact moments m[k, nu] = E(X_{D,nu}^k) for k <= k_max, nu <= n.

    Recursion in nu, anchored at nu = 1 where X_{D,1} = Z_1 gives
    m_{k,1} = mu_k:

        m_{k,nu} = mu_k/nu^k + ((nu-1)/nu) m_{k,nu-1}
                   + ((nu-1)/nu) sum_{j=1}^{k-1} C(k,j) nu^{-(k-j)} mu_{k-j} m_{j,nu-1}

    Row 0 is the trivial moment 1; column 0 is unused (NaN).  Only the
    previous column is read while filling, so the work is O(k_max * n).
    """
    if k_max < 1 or n < 1:
        raise ValueError("k_max and n must be at least 1")
    mu = [1.0] + [moment(spec, k) for k in range(1, k_max + 1)]
    if any(math.isinf(m) for m in mu):
        raise ValueError(f"moments up to order {k_max} must be finite for {spec}")
    binom = [[math.comb(k, j) for j in range(k)] for k in range(k_max + 1)]
    m = np.full((k_max + 1, n + 1), np.nan)
    m[0, 1:] = 1.0
    for k in range(1, k_max + 1):
        m[k, 1] = mu[k]
    prev = m[:, 1].copy()
    for nu in range(2, n + 1):
        cur = np.empty(k_max + 1)
        cur[0] = 1.0
        frac = (nu - 1) / nu
        for k in range(1, k_max + 1):
            acc = mu[k] / nu**k + frac * prev[k]
            for j in range(1, k):
                acc += frac * binom[k][j] * nu ** (-(k - j)) * mu[k - j] * prev[j]
            cur[k] = acc
        m[:, nu] = cur
        prev = cur
    return m


def cross_moment_recursion(spec: DistributionSpec, n: int) -> np.ndarray:
    """Exact cross moments C_nu = E(X_{D1,nu} X_{D2,nu}), nu = 2..n.

    Anchored at C_2 = mu_2/4 + gamma^2/2 and advanced by

        C_nu = mu_2/nu^2 + 2 (gamma/nu)(gamma - gamma/nu) + C_{nu-1} (nu-2)/nu.

    Entries 0 and 1 of the returned array are NaN.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    g = moment(spec, 1)
    mu2 = moment(spec, 2)
    if math.isinf(mu2):
        raise ValueError(f"second moment must be finite for {spec}")
    c = np.full(n + 1, np.nan)
    c[2] = mu2 / 4.0 + g * g / 2.0
    for nu in range(3, n + 1):
        c[nu] = mu2 / nu**2 + 2.0 * (g / nu) * (g - g / nu) + c[nu - 1] * (nu - 2) / nu
    return c
