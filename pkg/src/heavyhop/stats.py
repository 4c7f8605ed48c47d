"""Small statistical helpers shared by the experiment driver and the CLI."""

from __future__ import annotations

import math

import numpy as np


def wilson_interval(successes: int, total: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Unlike the plain normal interval it stays inside [0, 1] and behaves at
    the extremes, and it always contains the point estimate successes/total.
    """
    if total <= 0:
        raise ValueError("total must be positive")
    if not 0 <= successes <= total:
        raise ValueError(f"successes {successes} out of range 0..{total}")
    p = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z2 / (4 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def ks_distance(samples, cdf) -> float:
    """Exact sup-distance between the empirical CDF of samples and ``cdf``.

    ``cdf`` is evaluated at every sorted sample, and both one-sided gaps are
    taken, so this is the usual Kolmogorov-Smirnov statistic.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    if n == 0:
        raise ValueError("need at least one sample")
    f = np.asarray([cdf(v) for v in x], dtype=np.float64)
    hi = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


def ks_distance_two_sample(a, b) -> float:
    """Sup-distance between the empirical CDFs of two samples."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("need at least one sample on each side")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


def total_variation(p: dict, q: dict) -> float:
    """Total variation distance between two pmfs given as dicts."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
