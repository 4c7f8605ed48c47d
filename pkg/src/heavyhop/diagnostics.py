"""Structural diagnostics: degree order statistics, giant nodes, and the
certificate events behind the 2-or-3-hops picture.

"Giants" are the handful of highest-degree nodes.  When (a) both measured
endpoints attach exclusively to giants, (b) the giants form a complete
minor among themselves, and (c) the endpoint degrees are modest, the
endpoints are provably within three hops of each other: endpoint, giant,
giant, endpoint.  These flags turn that proof sketch into per-replica
booleans that a Monte Carlo run can count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .degree_model import DegreeLaw, DegreeSequence, max_degree_scale, tail_quantile
from .matching import Matching


@dataclass(frozen=True)
class OrderStats:
    """Top-of-the-degree-sequence summary.

    Attributes:
        top_degrees: the m largest degrees, descending.
        scale: the ratio denominator u_N = N ** (1 / (tau - 1)).
        total: stub total L_N.
        ratios: top_degrees / scale.
        total_ratio: L_N / scale.
    """

    top_degrees: np.ndarray
    scale: float
    total: int
    ratios: np.ndarray
    total_ratio: float


def order_stats(seq: DegreeSequence, law: DegreeLaw, m: int = 2) -> OrderStats:
    """Largest m degrees and their ratios to the natural scale u_N."""
    if not 1 <= m <= seq.n:
        raise ValueError(f"m must lie in 1..{seq.n}, got {m}")
    scale = max_degree_scale(law, seq.n)
    top = np.sort(np.partition(seq.degrees, seq.n - m)[seq.n - m:])[::-1].copy()
    total = seq.total
    return OrderStats(
        top_degrees=top,
        scale=scale,
        total=total,
        ratios=top / scale,
        total_ratio=total / scale,
    )


def giants_topk(seq: DegreeSequence, k: int) -> set[int]:
    """Ids (1-based) of the k largest-degree nodes; ties go to smaller ids."""
    if not 1 <= k <= seq.n:
        raise ValueError(f"k must lie in 1..{seq.n}, got {k}")
    # stable sort on (-degree, id): lexsort's last key is primary
    ids = np.lexsort((np.arange(seq.n), -seq.degrees))
    return {int(i) + 1 for i in ids[:k]}


def beta_exponent(tau: float, alpha: float) -> float:
    """Lower giant exponent beta = (1 + alpha (4 - tau)) / 4.

    Sits strictly between (1 + alpha (2 - tau)) / 2 and alpha whenever
    1 / tau < alpha < 1 / (tau - 1), separating the top-degree window
    N ** beta .. N ** alpha from the crowd below.
    """
    return (1.0 + alpha * (4.0 - tau)) / 4.0


def giants_beta(seq: DegreeSequence, law: DegreeLaw) -> set[int]:
    """Ids of nodes in the truncated-regime giant window (N**beta, N**alpha).

    The window is calibrated for 1/tau < alpha < 1/(tau - 1); outside that
    range a warning is issued but the thresholds are still applied.
    """
    if not law.is_truncated:
        raise ValueError("giants_beta needs a truncated law (finite alpha)")
    alpha, tau = law.truncation, law.tau
    if not 1.0 / tau < alpha < 1.0 / (tau - 1.0):
        warnings.warn(
            f"alpha={alpha} is outside (1/tau, 1/(tau-1)) = "
            f"({1.0 / tau:.4f}, {1.0 / (tau - 1.0):.4f}); "
            "the beta window is uncalibrated here",
            stacklevel=2,
        )
    n = seq.n
    lo = float(n) ** beta_exponent(tau, alpha)
    hi = float(n) ** alpha
    ids = np.nonzero((seq.degrees > lo) & (seq.degrees < hi))[0]
    return {int(i) + 1 for i in ids}


@dataclass(frozen=True)
class EventFlags:
    """Per-replica certificate flags.

    endpoints_to_giants: every stub of both endpoints matched a giant's stub.
    giants_complete: every pair of distinct giants shares at least one edge.
    endpoints_bounded: both endpoint degrees are at most ``degree_bound``.
    certified: conjunction of the three; it implies hopcount <= 3 outright.
    """

    endpoints_to_giants: bool
    giants_complete: bool
    endpoints_bounded: bool
    certified: bool
    giants: frozenset[int]
    degree_bound: int


def _giants_complete_eager(m: Matching, giant_list: list[int]) -> bool:
    """Do all giant pairs share an edge?  Vectorized scan with early exit.

    Partner stubs are classified against the giants' stub ranges in chunks;
    a giant's scan stops as soon as it has met every other giant, which on
    heavy-tailed graphs happens after a tiny prefix of its stubs.
    """
    k = len(giant_list)
    if k == 1:
        return True
    g0 = np.asarray(giant_list, dtype=np.int64) - 1
    starts = m.stub_offsets[g0]
    ends = m.stub_offsets[g0 + 1]
    bounds = np.empty(2 * k, dtype=np.int64)
    bounds[0::2] = starts
    bounds[1::2] = ends
    met = {g: set() for g in giant_list}
    partner = m._partner
    for gi, g in enumerate(giant_list):
        pending = set(giant_list) - met[g] - {g}
        if not pending:
            continue
        lo, hi = int(starts[gi]), int(ends[gi])
        for chunk_lo in range(lo, hi, 8192):
            p = np.asarray(partner[chunk_lo:min(chunk_lo + 8192, hi)], dtype=np.int64)
            idx = np.searchsorted(bounds, p, side="right")
            inside = (idx % 2) == 1
            for j in np.unique(idx[inside] // 2):
                h = giant_list[j]
                if h != g:
                    met[g].add(h)
                    met[h].add(g)
            pending = set(giant_list) - met[g] - {g}
            if not pending:
                break
        if pending:
            return False
    return True


def _giants_complete_lazy(m: Matching, giant_list: list[int]) -> bool:
    met = {g: set() for g in giant_list}
    giant_set = set(giant_list)
    for g in giant_list:
        if not (giant_set - met[g] - {g}):
            continue
        for w in m.neighbors(g):
            w = int(w)
            if w != g and w in giant_set:
                met[g].add(w)
                met[w].add(g)
        if giant_set - met[g] - {g}:
            return False
    return True


def event_flags(m: Matching, seq: DegreeSequence, law: DegreeLaw,
                giants: set[int], epsilon: float,
                endpoints: tuple[int, int] = (1, 2)) -> EventFlags:
    """Evaluate the certificate events on one replica.

    On a lazy matching the stubs of the endpoints and of every giant are
    revealed here.  ``giants`` must be non-empty: an empty certificate set
    is a usage error, not a false flag.
    """
    if not giants:
        raise ValueError("giants must be non-empty")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    a, b = endpoints

    giant_list = sorted(giants)
    giant_arr = np.asarray(giant_list, dtype=np.int64)
    to_giants = True
    for v in (a, b):
        nbrs = m.neighbors(v)
        if not np.isin(nbrs, giant_arr).all():
            to_giants = False
            break

    if m.mode == "eager":
        complete = _giants_complete_eager(m, giant_list)
    else:
        complete = _giants_complete_lazy(m, giant_list)

    bound = tail_quantile(law, epsilon)
    bounded = seq.degree_of(a) <= bound and seq.degree_of(b) <= bound

    return EventFlags(
        endpoints_to_giants=to_giants,
        giants_complete=complete,
        endpoints_bounded=bounded,
        certified=to_giants and complete and bounded,
        giants=frozenset(giants),
        degree_bound=bound,
    )


def giant_mass_fraction(seq: DegreeSequence, giants: set[int]) -> float:
    """Share of all stubs owned by the giant set."""
    if not giants:
        raise ValueError("giants must be non-empty")
    ids = np.fromiter((g - 1 for g in giants), dtype=np.int64)
    if ids.min() < 0 or ids.max() >= seq.n:
        raise ValueError("giant ids out of range")
    return float(seq.degrees[ids].sum()) / float(seq.total)
