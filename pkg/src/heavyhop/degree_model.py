"""Power-law degree laws with infinite mean, and degree-sequence sampling.

The default law draws integer degrees D = ceil(U ** (-1 / (tau - 1))) for
uniform U, which gives the pure power tail P(D > k) = k ** (1 - tau) for
every integer k >= 1.  With tau in (1, 2) the mean is infinite, so the sum
of N draws is of the same order as the maximum.  A law may optionally be
truncated: degrees are conditioned to stay strictly below n_nodes ** alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DEFAULT_DEGREE_CAP = 2**53


@dataclass(frozen=True)
class DegreeLaw:
    """An integer degree distribution with a power tail of exponent tau - 1.

    Args:
        tau: tail exponent, must lie strictly inside (1, 2).
        truncation: optional alpha > 0.  When set, sampling at size N
            conditions the law on D < N ** alpha.  ``math.inf`` is accepted
            as an explicit "no truncation" sentinel and behaves exactly like
            the default law.
        inverse_cdf: optional custom monotone map from (0, 1) to positive
            integers, replacing the default sampler.  Tail and scale
            computations are only available for the default law.
        degree_cap: hard numerical cap on a single degree; draws above it
            are clamped and counted so a replica can be flagged.
    """

    tau: float
    truncation: float | None = None
    inverse_cdf: Callable | None = None
    degree_cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        if not 1.0 < self.tau < 2.0:
            raise ValueError(f"tau must lie in (1, 2), got {self.tau}")
        if self.truncation is not None and not self.truncation > 0:
            raise ValueError(f"truncation exponent must be positive, got {self.truncation}")
        if self.degree_cap < 2:
            raise ValueError("degree_cap must be at least 2")

    @property
    def is_truncated(self) -> bool:
        return self.truncation is not None and math.isfinite(self.truncation)

    def max_degree(self, n_nodes: int) -> int | None:
        """Largest admissible degree at size n_nodes, or None if unbounded.

        Combines the truncation support (strictly below n_nodes ** alpha)
        with the numerical degree cap.
        """
        bound = self.degree_cap
        if self.is_truncated:
            cutoff = float(n_nodes) ** self.truncation
            # support is the integers strictly below n_nodes ** alpha
            top = math.ceil(cutoff) - 1 if math.isfinite(cutoff) else None
            if top is not None:
                if top < 1:
                    raise ValueError(
                        f"truncated support is empty: n_nodes**alpha = {cutoff} leaves no degree >= 1"
                    )
                bound = min(bound, top)
        return bound


@dataclass
class DegreeSequence:
    """A concrete degree sequence with an even stub total.

    Attributes:
        degrees: int64 array, one entry per node, every entry >= 1.
        parity_corrected: True when one degree was bumped by +1 to make the
            stub total even.
        cap_hits: number of raw draws clamped at the law's degree cap.
    """

    degrees: np.ndarray
    parity_corrected: bool = False
    cap_hits: int = 0

    def __post_init__(self):
        self.degrees = np.asarray(self.degrees, dtype=np.int64)
        if self.degrees.ndim != 1 or self.degrees.size == 0:
            raise ValueError("degrees must be a non-empty 1-d array")
        if self.degrees.min() < 1:
            raise ValueError("every degree must be >= 1")
        if int(self.degrees.sum()) % 2 != 0:
            raise ValueError("degree sum must be even; apply a parity correction first")

    @property
    def n(self) -> int:
        return int(self.degrees.size)

    @property
    def total(self) -> int:
        """Total number of stubs (twice the number of edges)."""
        return int(self.degrees.sum())

    def degree_of(self, node: int) -> int:
        """Degree of a 1-based node id."""
        return int(self.degrees[node - 1])


def _raw_degree(tau: float, u) -> np.ndarray:
    # wide float keeps u near 0 from overflowing; ceil happens before the cast
    return np.ceil(np.asarray(u, dtype=np.float64) ** (-1.0 / (tau - 1.0)))


def sample_degree(law: DegreeLaw, u: float) -> int:
    """Map one uniform variate through the law's inverse CDF.

    Args:
        law: an untruncated degree law.
        u: a number strictly inside (0, 1).

    Returns:
        The integer degree, clamped at the law's degree cap.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie strictly inside (0, 1), got {u}")
    if law.is_truncated:
        raise ValueError("sample_degree expects an untruncated law; use sample_degree_conditioned")
    if law.inverse_cdf is not None:
        d = int(law.inverse_cdf(u))
        if d < 1:
            raise ValueError(f"custom inverse_cdf returned {d}, expected a positive integer")
    else:
        raw = float(_raw_degree(law.tau, u))
        d = int(min(raw, law.degree_cap)) if math.isfinite(raw) else law.degree_cap
    return min(d, law.degree_cap)


def sample_degree_conditioned(law: DegreeLaw, n_nodes: int, rng: np.random.Generator) -> int:
    """Draw one degree conditioned on the truncated support at size n_nodes.

    Rejection sampling against the base law: redraw until the degree falls
    strictly below n_nodes ** alpha.  With an infinite truncation exponent
    every draw is accepted, so the stream consumption matches the
    unconditioned sampler exactly.
    """
    if law.truncation is None:
        raise ValueError("law has no truncation; use sample_degree instead")
    support_top = None
    if law.is_truncated:
        support_top = math.ceil(float(n_nodes) ** law.truncation) - 1
        if support_top < 1:
            raise ValueError("truncated support is empty")
    while True:
        u = rng.uniform()
        if law.inverse_cdf is not None:
            raw = float(law.inverse_cdf(u))
        else:
            raw = float(_raw_degree(law.tau, u))
        if support_top is not None and not raw <= support_top:
            continue  # reject against the true support, not the numerical cap
        return int(min(raw, law.degree_cap))


def sample_sequence(law: DegreeLaw, n_nodes: int, rng: np.random.Generator) -> DegreeSequence:
    """Sample a full i.i.d. degree sequence and fix its parity.

    If the raw draws sum to an odd number, the last degree that can absorb
    a +1 without leaving the admissible range is incremented (that is the
    final node except in the rare case where it already sits at the
    truncation bound or the cap).

    Args:
        law: the degree law, truncated or not.
        n_nodes: number of nodes, at least 2.
        rng: numpy Generator; consumed deterministically.

    Returns:
        A DegreeSequence of length n_nodes with an even stub total.
    """
    if n_nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {n_nodes}")
    support_top = None
    if law.is_truncated:
        cutoff = float(n_nodes) ** law.truncation
        support_top = math.ceil(cutoff) - 1
        if support_top < 1:
            raise ValueError(
                f"truncated support is empty: n_nodes**alpha = {cutoff} leaves no degree >= 1"
            )

    u = rng.uniform(size=n_nodes)
    if law.inverse_cdf is not None:
        try:
            raw = np.asarray(law.inverse_cdf(u), dtype=np.float64)
        except (TypeError, ValueError):
            raw = np.array([float(law.inverse_cdf(x)) for x in u], dtype=np.float64)
        if raw.shape != (n_nodes,) or (raw < 1).any():
            raise ValueError("custom inverse_cdf must map each u to a positive integer")
    else:
        raw = _raw_degree(law.tau, u)

    if support_top is not None:
        # rejection against the truncated support, redrawing only the misses
        bad = ~(raw <= support_top)
        while bad.any():
            u2 = rng.uniform(size=int(bad.sum()))
            if law.inverse_cdf is not None:
                fresh = np.array([float(law.inverse_cdf(x)) for x in u2], dtype=np.float64)
            else:
                fresh = _raw_degree(law.tau, u2)
            raw[bad] = fresh
            bad = ~(raw <= support_top)

    over = ~(raw <= law.degree_cap)  # catches inf as well
    cap_hits = int(over.sum())
    if cap_hits:
        raw[over] = law.degree_cap
    degrees = raw.astype(np.int64)

    parity_corrected = False
    if int(degrees.sum()) % 2 != 0:
        top = law.max_degree(n_nodes)
        i = n_nodes - 1
        while i >= 0 and top is not None and degrees[i] + 1 > top:
            i -= 1
        if i < 0:
            raise ValueError("cannot fix parity: every degree sits at the admissible maximum")
        degrees[i] += 1
        parity_corrected = True

    return DegreeSequence(degrees, parity_corrected=parity_corrected, cap_hits=cap_hits)


def tail(law: DegreeLaw, k: int, n_nodes: int | None = None) -> float:
    """P(D > k) under the law, for integer k >= 1.

    For the default law this is k ** (1 - tau).  For a truncated law the
    horizon n_nodes is required and the conditioned tail
    (P(D > k) - P(D >= N**alpha))+ / P(D < N**alpha) is returned.
    """
    if law.inverse_cdf is not None:
        raise ValueError("tail is only available for the default power law")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    base = float(k) ** (1.0 - law.tau)
    if not law.is_truncated:
        return base
    if n_nodes is None:
        raise ValueError("a truncated law needs n_nodes to evaluate its tail")
    top = math.ceil(float(n_nodes) ** law.truncation) - 1  # largest degree in the support
    if top < 1:
        raise ValueError("truncated support is empty")
    p_above = float(top) ** (1.0 - law.tau)  # P(D >= N**alpha) = P(D > top)
    keep = 1.0 - p_above
    return max(base - p_above, 0.0) / keep


def conditioned_pmf(law: DegreeLaw, k: int, n_nodes: int) -> float:
    """Exact pmf of the truncated law at integer k, zero off the support."""
    if not law.is_truncated:
        raise ValueError("law has no truncation")
    top = math.ceil(float(n_nodes) ** law.truncation) - 1
    if k < 1 or k > top:
        return 0.0
    tau = law.tau
    f_k = (float(k - 1) ** (1.0 - tau) if k > 1 else 1.0) - float(k) ** (1.0 - tau)
    keep = 1.0 - float(top) ** (1.0 - tau)
    return f_k / keep


def tail_quantile(law: DegreeLaw, epsilon: float) -> int:
    """Smallest integer k with tail(law, k) < epsilon / 8.

    This is the degree threshold used by the bounded-endpoint event: with
    probability at least 1 - epsilon / 4 both measured endpoints have
    degree at most this value.  Always evaluated against the base (pure
    power) tail, which dominates the truncated one.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if law.inverse_cdf is not None:
        raise ValueError("tail_quantile is only available for the default power law")
    target = epsilon / 8.0
    # closed-form seed, then walk to the exact boundary to dodge float error
    k = max(1, math.floor(target ** (-1.0 / (law.tau - 1.0))) - 2)
    while float(k) ** (1.0 - law.tau) >= target:
        k += 1
    while k > 1 and float(k - 1) ** (1.0 - law.tau) < target:
        k -= 1
    return k


def max_degree_scale(law: DegreeLaw, n_nodes: int) -> float:
    """The scale u_N = N ** (1 / (tau - 1)) of the largest degree.

    Chosen so that n_nodes * tail(u_N) = 1 under the continuous version of
    the power tail; the maximum degree divided by this scale converges to a
    Frechet limit.  Always computed from the base law's exponent, also when
    the law is truncated (the truncated model has no diverging maximum, but
    the base scale is still the natural ratio denominator).
    """
    if law.inverse_cdf is not None:
        raise ValueError("max_degree_scale is only available for the default power law")
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be positive, got {n_nodes}")
    return float(n_nodes) ** (1.0 / (law.tau - 1.0))
