"""Small statistics helpers used by the experiment harness and the tests."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% (by default) Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return (0.0, 1.0)
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials))
    return (max(0.0, center - half), min(1.0, center + half))


def ks_distance(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """Kolmogorov-Smirnov statistic of samples against a reference CDF."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(xs)
    if n == 0:
        raise ValueError("ks_distance needs at least one sample")
    ref = np.array([cdf(float(x)) for x in xs])
    lo = np.arange(0, n) / n
    hi = np.arange(1, n + 1) / n
    return float(np.maximum(np.abs(hi - ref), np.abs(ref - lo)).max())


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sample KS statistic (sup gap between empirical CDFs)."""
    xa = np.sort(np.asarray(a, dtype=np.float64))
    xb = np.sort(np.asarray(b, dtype=np.float64))
    grid = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, grid, side="right") / len(xa)
    fb = np.searchsorted(xb, grid, side="right") / len(xb)
    return float(np.abs(fa - fb).max())


def _gammainc_upper_reg(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x), series/continued fraction."""
    if x < 0 or s <= 0:
        raise ValueError("require x >= 0 and s > 0")
    if x == 0.0:
        return 1.0
    if x < s + 1.0:
        # lower series, then complement
        term = 1.0 / s
        total = term
        k = s
        for _ in range(500):
            k += 1.0
            term *= x / k
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        p = total * math.exp(-x + s * math.log(x) - math.lgamma(s))
        return 1.0 - p
    # Lentz continued fraction for the upper function
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + s * math.log(x) - math.lgamma(s))


def chi_square_pvalue(stat: float, df: int) -> float:
    """Survival function of the chi-square distribution."""
    if df <= 0:
        raise ValueError("df must be positive")
    return _gammainc_upper_reg(df / 2.0, stat / 2.0)


def chi_square_gof(observed: Sequence[float], expected: Sequence[float]) -> tuple[float, float]:
    """Goodness-of-fit test; returns (statistic, p-value), df = cells - 1."""
    obs = np.asarray(observed, dtype=np.float64)
    exp = np.asarray(expected, dtype=np.float64)
    if obs.shape != exp.shape or (exp <= 0).any():
        raise ValueError("shapes must match and expected counts be positive")
    stat = float(((obs - exp) ** 2 / exp).sum())
    return stat, chi_square_pvalue(stat, len(obs) - 1)


def chi_square_two_sample(a: Sequence[int], b: Sequence[int]) -> tuple[float, float]:
    """Homogeneity test of two count vectors over the same categories.

    Cells empty in both samples are dropped; df = kept cells - 1 (equal
    totals are assumed, which is how the simulator comparisons call it).
    """
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if xa.shape != xb.shape:
        raise ValueError("category vectors must align")
    keep = (xa + xb) > 0
    xa, xb = xa[keep], xb[keep]
    ra = math.sqrt(xb.sum() / xa.sum())
    stat = float((((xa * ra - xb / ra) ** 2) / (xa + xb)).sum())
    return stat, chi_square_pvalue(stat, len(xa) - 1)
