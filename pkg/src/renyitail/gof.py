"""Kolmogorov-Smirnov distances and asymptotic critical values."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "ks_statistic",
    "ks_statistic_two_sample",
    "ks_critical",
    "ks_critical_two_sample",
]


def ks_statistic(sample, cdf) -> float:
    """One-sample KS distance sup |F_n - F| against a callable CDF."""
    xs = np.sort(np.asarray(sample, dtype=np.float64))
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(xs), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_statistic_two_sample(a, b) -> float:
    """Two-sample KS distance sup |F_a - F_b|."""
    xs = np.sort(np.asarray(a, dtype=np.float64))
    ys = np.sort(np.asarray(b, dtype=np.float64))
    if len(xs) == 0 or len(ys) == 0:
        raise ValueError("empty sample")
    grid = np.concatenate([xs, ys])
    ca = np.searchsorted(xs, grid, side="right") / len(xs)
    cb = np.searchsorted(ys, grid, side="right") / len(ys)
    return float(np.max(np.abs(ca - cb)))


def _c_alpha(alpha: float) -> float:
    # inverse of the asymptotic Kolmogorov tail P(D > c/sqrt(n)) ~ 2 exp(-2c^2)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return math.sqrt(-0.5 * math.log(alpha / 2.0))


def ks_critical(alpha: float, n: int) -> float:
    """Asymptotic one-sample critical value c(alpha)/sqrt(n); c(0.01) = 1.628."""
    return _c_alpha(alpha) / math.sqrt(n)


def ks_critical_two_sample(alpha: float, n1: int, n2: int) -> float:
    return _c_alpha(alpha) * math.sqrt((n1 + n2) / (n1 * n2))
