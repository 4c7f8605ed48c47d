"""Limit-law unit tests.

The rank-k ratio CDF is a Poisson partial sum in lambda = x ** (1 - tau),
so scipy's Poisson CDF is an independent oracle for the marginals.  The
joint CDF is cross-checked three ways: the hand-expanded k=2 closed form,
marginalization (sending the leading level to infinity), and Monte Carlo
draws from the explicit limit construction xi_k = (E_1 + ... + E_k) ** (1
/ (1 - tau)) with standard exponentials E_i.
"""

import math

import numpy as np
import pytest
from scipy import stats as sps

from heavyhop.limit_laws import (
    MAX_JOINT_RANKS,
    order_ratio_cdf,
    order_ratio_cdf_by_rank,
    order_ratio_joint_cdf,
)


def limit_ratio_samples(tau: float, k: int, size: int, seed: int) -> np.ndarray:
    """Exact draws of the first k limit ratios, shape (size, k), descending."""
    rng = np.random.default_rng(seed)
    gaps = rng.exponential(size=(size, k))
    return np.cumsum(gaps, axis=1) ** (1.0 / (1.0 - tau))


class TestMarginals:
    def test_frozen_values(self):
        assert order_ratio_cdf(1.8, 1, 1.0) == pytest.approx(math.exp(-1.0))
        assert order_ratio_cdf(1.8, 2, 1.0) == pytest.approx(2.0 / math.e)
        assert order_ratio_cdf(1.8, 1, 2.0) == pytest.approx(math.exp(-(2.0 ** -0.8)))
        assert order_ratio_cdf(1.5, 1, 4.0) == pytest.approx(math.exp(-0.5))

    @pytest.mark.parametrize("tau", [1.2, 1.5, 1.8])
    @pytest.mark.parametrize("x", [0.3, 0.7, 1.0, 2.5])
    def test_matches_poisson_partial_sum(self, tau, x):
        lam = x ** (1.0 - tau)
        for rank in range(1, 6):
            assert order_ratio_cdf(tau, rank, x) == pytest.approx(
                sps.poisson.cdf(rank - 1, lam), rel=1e-12)

    def test_by_rank_agrees_with_scalar(self):
        vals = order_ratio_cdf_by_rank(1.8, 0.9, 5)
        for rank in range(1, 6):
            assert vals[rank - 1] == pytest.approx(order_ratio_cdf(1.8, rank, 0.9))

    def test_limits_and_monotonicity(self):
        tau = 1.8
        assert order_ratio_cdf(tau, 1, 1e-3) < 1e-100
        assert order_ratio_cdf(tau, 1, 1e3) > 0.996
        grid = np.linspace(0.05, 5.0, 60)
        for rank in (1, 2, 3):
            vals = [order_ratio_cdf(tau, rank, x) for x in grid]
            assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_rank_ordering(self):
        # the k-th largest is below x whenever the (k+1)-th largest is not,
        # so the CDF grows with the rank at fixed x
        for x in (0.4, 1.0, 3.0):
            vals = order_ratio_cdf_by_rank(1.5, x, 6)
            assert all(b >= a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("rank", [1, 2, 4])
    def test_monte_carlo_agreement(self, rank):
        tau = 1.8
        draws = limit_ratio_samples(tau, rank, 1_000_000, seed=100 + rank)[:, rank - 1]
        for x in (0.5, 1.0, 2.0):
            p = order_ratio_cdf(tau, rank, x)
            se = math.sqrt(p * (1 - p) / draws.size)
            assert abs((draws <= x).mean() - p) < 3 * se + 1e-6

    def test_guards(self):
        with pytest.raises(ValueError):
            order_ratio_cdf(1.8, 0, 1.0)
        with pytest.raises(ValueError):
            order_ratio_cdf(2.3, 1, 1.0)
        assert order_ratio_cdf(1.8, 1, 0.0) == 0.0
        assert order_ratio_cdf(1.8, 1, -1.0) == 0.0


class TestJoint:
    def test_two_level_closed_form(self):
        tau = 1.8
        for y1, y2 in ((2.0, 1.0), (1.5, 0.4), (5.0, 0.1)):
            r1, r2 = y1 ** (1 - tau), y2 ** (1 - tau)
            expected = math.exp(-r2) * (1.0 + r2 - r1)
            assert order_ratio_joint_cdf(tau, [y1, y2]) == pytest.approx(expected, rel=1e-12)

    def test_single_level_is_the_marginal(self):
        assert order_ratio_joint_cdf(1.8, [1.0]) == pytest.approx(math.exp(-1.0))

    def test_marginalization(self):
        # a huge leading level frees the constraint on the maximum, leaving
        # the rank-2 marginal
        tau = 1.6
        for x in (0.5, 1.0, 2.0):
            joint = order_ratio_joint_cdf(tau, [1e12, x])
            assert joint == pytest.approx(order_ratio_cdf(tau, 2, x), abs=1e-6)

    def test_never_exceeds_marginals(self):
        tau = 1.8
        for y1, y2, y3 in ((2.0, 1.0, 0.5), (1.2, 1.1, 1.0), (4.0, 0.6, 0.5)):
            joint = order_ratio_joint_cdf(tau, [y1, y2, y3])
            assert joint <= order_ratio_cdf(tau, 1, y1) + 1e-12
            assert joint <= order_ratio_cdf(tau, 2, y2) + 1e-12
            assert joint <= order_ratio_cdf(tau, 3, y3) + 1e-12

    def test_monotone_in_every_level(self):
        tau = 1.5
        base = order_ratio_joint_cdf(tau, [2.0, 1.0, 0.5])
        assert order_ratio_joint_cdf(tau, [2.5, 1.0, 0.5]) >= base
        assert order_ratio_joint_cdf(tau, [2.0, 1.2, 0.5]) >= base
        assert order_ratio_joint_cdf(tau, [2.0, 1.0, 0.7]) >= base

    @pytest.mark.parametrize("levels", [(2.0, 1.0), (3.0, 1.5, 0.8)])
    def test_monte_carlo_agreement(self, levels):
        tau = 1.8
        k = len(levels)
        draws = limit_ratio_samples(tau, k, 1_000_000, seed=31 * k)
        hit = np.ones(draws.shape[0], dtype=bool)
        for i, y in enumerate(levels):
            hit &= draws[:, i] <= y
        p = order_ratio_joint_cdf(tau, list(levels))
        se = math.sqrt(p * (1 - p) / draws.shape[0])
        assert abs(hit.mean() - p) < 3 * se + 1e-6

    def test_guards(self):
        with pytest.raises(ValueError):
            order_ratio_joint_cdf(1.8, [])
        with pytest.raises(ValueError):
            order_ratio_joint_cdf(1.8, [1.0, 1.0])  # not strictly descending
        with pytest.raises(ValueError):
            order_ratio_joint_cdf(1.8, [1.0, 2.0])
        # non-positive levels are not an error: the ratios are positive, so
        # the CDF is exactly zero there
        assert order_ratio_joint_cdf(1.8, [-1.0]) == 0.0
        assert order_ratio_joint_cdf(1.8, [2.0, -0.5]) == 0.0
        too_many = [float(x) for x in range(MAX_JOINT_RANKS + 1, 0, -1)]
        with pytest.raises(ValueError):
            order_ratio_joint_cdf(1.8, too_many)
        # the bound itself is fine
        ok = [float(x) for x in range(MAX_JOINT_RANKS, 0, -1)]
        assert 0.0 < order_ratio_joint_cdf(1.8, ok) < 1.0
