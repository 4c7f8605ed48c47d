"""Limit distributions of the top degree ratios.

With i.i.d. degrees whose tail is P(D > k) = k ** (1 - tau), the points
D_(i) / u_N (largest first, u_N = N ** (1 / (tau - 1))) converge to the
points of a Poisson random measure whose intensity above x is x ** (1 - tau).
The k-th largest limit ratio therefore has CDF

    P(xi_k < x) = exp(-x ** (1 - tau)) * sum_{r=0}^{k-1} x ** ((1 - tau) r) / r!

(a Poisson(x ** (1 - tau)) tail sum; k = 1 is the Frechet case), and the
joint CDF of the top k ratios at descending levels y_1 > ... > y_k follows
by splitting the Poisson counts over the layers (y_i, y_{i-1}].
"""

from __future__ import annotations

import math

import numpy as np

MAX_JOINT_RANKS = 8  # factorials stay exactly representable, enumeration stays tiny


def _check_tau(tau: float):
    if not 1.0 < tau < 2.0:
        raise ValueError(f"tau must lie in (1, 2), got {tau}")


def order_ratio_cdf(tau: float, rank: int, x: float) -> float:
    """CDF of the rank-th largest limiting degree ratio at x.

    Args:
        tau: tail exponent in (1, 2).
        rank: 1 for the maximum, 2 for the runner-up, and so on.
        x: evaluation point, x > 0.

    Returns:
        P(xi_rank < x), a Poisson tail sum in x ** (1 - tau).
    """
    _check_tau(tau)
    if rank < 1:
        raise ValueError(f"rank must be a positive integer, got {rank}")
    if x <= 0.0:
        return 0.0
    lam = x ** (1.0 - tau)
    # iterate the Poisson weights; for the ranks used here this is exact
    # to machine precision and avoids overflowing factorials
    term = math.exp(-lam)
    total = term
    for r in range(1, rank):
        term *= lam / r
        total += term
    return min(total, 1.0)


def order_ratio_cdf_by_rank(tau: float, x: float, max_rank: int) -> np.ndarray:
    """CDF values P(xi_k < x) for k = 1 .. max_rank at a fixed point x.

    The returned array is non-decreasing in k and tends to 1: deep ranks
    fall below any fixed level eventually.
    """
    _check_tau(tau)
    if max_rank < 1:
        raise ValueError(f"max_rank must be positive, got {max_rank}")
    if x <= 0.0:
        return np.zeros(max_rank)
    lam = x ** (1.0 - tau)
    term = math.exp(-lam)
    out = np.empty(max_rank)
    total = term
    out[0] = total
    for r in range(1, max_rank):
        term *= lam / r
        total += term
        out[r] = min(total, 1.0)
    return out


def _layered_tuples(k: int):
    """Weakly increasing tuples (r_1 .. r_k) with r_i <= i - 1.

    r_i is the cumulative number of limit points above level y_i; the event
    {xi_i < y_i for all i} allows at most i - 1 points above y_i.
    """
    tuples = []

    def extend(prefix):
        i = len(prefix)
        if i == k:
            tuples.append(tuple(prefix))
            return
        lo = prefix[-1] if prefix else 0
        for r in range(lo, i + 1):  # r_{i+1} <= i
            extend(prefix + [r])

    extend([])
    return tuples


def order_ratio_joint_cdf(tau: float, levels) -> float:
    """Joint CDF of the top-k limiting ratios at strictly descending levels.

    Args:
        tau: tail exponent in (1, 2).
        levels: y_1 > y_2 > ... > y_k > 0, one level per rank, k <= 8.

    Returns:
        P(xi_1 < y_1, ..., xi_k < y_k).  Computed by enumerating how the
        Poisson layer counts between consecutive levels can stack while the
        cumulative count above y_i stays below i.
    """
    _check_tau(tau)
    y = [float(v) for v in levels]
    k = len(y)
    if k < 1:
        raise ValueError("need at least one level")
    if k > MAX_JOINT_RANKS:
        raise ValueError(f"joint CDF supports at most {MAX_JOINT_RANKS} ranks, got {k}")
    if any(v <= 0.0 for v in y):
        return 0.0
    if any(a <= b for a, b in zip(y, y[1:])):
        raise ValueError("levels must be strictly descending")

    rho = [v ** (1.0 - tau) for v in y]  # increasing: smaller level, more mass above
    increments = [rho[0]] + [rho[i] - rho[i - 1] for i in range(1, k)]
    total = 0.0
    for tup in _layered_tuples(k):
        term = 1.0
        prev = 0
        for inc, r in zip(increments, tup):
            n_i = r - prev
            term *= inc**n_i / math.factorial(n_i)
            prev = r
        total += term
    return total * math.exp(-rho[-1])
