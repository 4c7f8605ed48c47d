"""Hop counting between node pairs of a stub matching, with a depth cutoff.

Searches run level by level so the reported hop count is an exact shortest
path length whenever it is at most the cutoff.  Beyond the cutoff only the
fact "more than cutoff hops" is reported, and a provably unreachable target
is reported as infinite.  On a lazy matching the search reveals pairs as it
expands, which is how huge graphs stay affordable: the bidirectional variant
usually settles a pair after revealing a few dozen stubs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matching import Matching, _owner_array

DEFAULT_CUTOFF = 10


@dataclass(frozen=True)
class Hopcount:
    """Outcome of a hop-count query.

    value holds the exact hop count when the search settled it, math.inf
    when the source component was exhausted without reaching the target,
    and the cutoff itself when ``exceeded`` is set (read: "more than
    value hops").
    """

    value: float
    exceeded: bool = False

    @classmethod
    def exact(cls, hops: int) -> "Hopcount":
        return cls(float(hops))

    @classmethod
    def infinite(cls) -> "Hopcount":
        return cls(math.inf)

    @classmethod
    def exceeds(cls, cutoff: int) -> "Hopcount":
        return cls(float(cutoff), exceeded=True)

    @property
    def is_exact(self) -> bool:
        return not self.exceeded and math.isfinite(self.value)

    @property
    def is_infinite(self) -> bool:
        return not self.exceeded and math.isinf(self.value)

    @property
    def hops(self) -> int:
        if not self.is_exact:
            raise ValueError(f"no exact hop count in {self}")
        return int(self.value)

    def is_at_most(self, k: int) -> bool:
        return self.is_exact and self.value <= k

    @property
    def label(self) -> str:
        """Bucket label: "3", ">10", or "inf"."""
        if self.exceeded:
            return f">{int(self.value)}"
        if self.is_infinite:
            return "inf"
        return str(int(self.value))


def _check_query(m: Matching, a: int, b: int, cutoff: int):
    for node in (a, b):
        if not 1 <= node <= m.n:
            raise ValueError(f"node id {node} out of range 1..{m.n}")
    if cutoff < 1:
        raise ValueError(f"cutoff must be at least 1, got {cutoff}")


def _concat_ranges(starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Concatenate ranges [starts[i], starts[i] + lengths[i]) into one array."""
    keep = lengths > 0
    starts, lengths = starts[keep], lengths[keep]
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    out = np.ones(total, dtype=np.int64)
    out[0] = starts[0]
    ends = np.cumsum(lengths)
    out[ends[:-1]] = starts[1:] - (starts[:-1] + lengths[:-1]) + 1
    return np.cumsum(out)


def _expand_eager(m: Matching, frontier0: np.ndarray) -> np.ndarray:
    """All 0-based neighbors (with multiplicity) of a 0-based node frontier."""
    stubs = _concat_ranges(m.stub_offsets[frontier0], m.degrees[frontier0])
    partners = np.asarray(m._partner[stubs], dtype=np.int64)
    return _owner_array(m.stub_offsets, partners)


def _reveal(m: Matching, stub: int) -> int:
    if m.is_revealed(stub):
        return m.partner_of(stub)
    return m.reveal_partner(stub)


def hopcount(m: Matching, a: int, b: int, cutoff: int = DEFAULT_CUTOFF) -> Hopcount:
    """Breadth-first hop count from a to b, both 1-based.

    Returns the exact shortest path length when it is at most ``cutoff``,
    Hopcount.exceeds(cutoff) when depth ``cutoff`` was reached with the
    frontier still alive and b unseen, and Hopcount.infinite() when a's
    component was exhausted first.  On a lazy matching this mutates the
    matching by revealing every stub it touches.
    """
    _check_query(m, a, b, cutoff)
    if a == b:
        return Hopcount.exact(0)
    if m.mode == "eager":
        return _hopcount_eager(m, a, b, cutoff)
    return _hopcount_lazy(m, a, b, cutoff)


def _hopcount_eager(m: Matching, a: int, b: int, cutoff: int) -> Hopcount:
    a0, b0 = a - 1, b - 1
    visited = np.zeros(m.n, dtype=bool)
    visited[a0] = True
    front = np.array([a0], dtype=np.int64)
    depth = 0
    while front.size and depth < cutoff:
        nbr = _expand_eager(m, front)
        depth += 1
        if (nbr == b0).any():
            return Hopcount.exact(depth)
        nbr = np.unique(nbr)
        front = nbr[~visited[nbr]]
        visited[front] = True
    return Hopcount.exceeds(cutoff) if front.size else Hopcount.infinite()


def _hopcount_lazy(m: Matching, a: int, b: int, cutoff: int) -> Hopcount:
    visited = {a}
    front = [a]
    depth = 0
    while front and depth < cutoff:
        depth += 1
        nxt = []
        for v in front:
            for s in m.stubs_of(v):
                w = m.stub_node(_reveal(m, s))
                if w == b:
                    return Hopcount.exact(depth)
                if w not in visited:
                    visited.add(w)
                    nxt.append(w)
        front = nxt
    return Hopcount.exceeds(cutoff) if front else Hopcount.infinite()


def bidirectional_hopcount(m: Matching, a: int, b: int,
                           cutoff: int = DEFAULT_CUTOFF) -> Hopcount:
    """Same contract as hopcount, searching from both endpoints.

    The side whose frontier carries fewer pending stubs is expanded first,
    so on heavy-tailed graphs the expensive interior is rarely entered: two
    short expansions around the endpoints usually meet in a shared
    high-degree node.  Exactness argument: a side's level-by-level
    expansion settles true distances within its ball, every source-target
    path of length at most depthA + depthB passes through nodes settled by
    both sides, and the search only stops once no undiscovered path could
    beat the best meeting seen so far.
    """
    _check_query(m, a, b, cutoff)
    if a == b:
        return Hopcount.exact(0)
    if m.mode == "eager":
        return _bidirectional_eager(m, a, b, cutoff)
    return _bidirectional_lazy(m, a, b, cutoff)


def _finish(best: float, cutoff: int) -> Hopcount:
    if best <= cutoff:
        return Hopcount.exact(int(best))
    return Hopcount.exceeds(cutoff)


def _bidirectional_lazy(m: Matching, a: int, b: int, cutoff: int) -> Hopcount:
    dist = ({a: 0}, {b: 0})
    fronts: list[list[int]] = [[a], [b]]
    depths = [0, 0]
    best = math.inf

    def pending_stubs(front):
        return sum(int(m.degrees[v - 1]) for v in front)

    while True:
        if best <= depths[0] + depths[1] + 1:
            return _finish(best, cutoff)
        if not fronts[0] or not fronts[1]:
            return _finish(best, cutoff) if math.isfinite(best) else Hopcount.infinite()
        if depths[0] + depths[1] >= cutoff:
            return Hopcount.exceeds(cutoff)

        side = 0 if pending_stubs(fronts[0]) <= pending_stubs(fronts[1]) else 1
        mine, other = dist[side], dist[1 - side]
        reach = depths[side] + 1
        settled = depths[0] + depths[1]  # fully settled depth budget during this level
        nxt = []
        for v in fronts[side]:
            for s in m.stubs_of(v):
                w = m.stub_node(_reveal(m, s))
                d_other = other.get(w)
                if d_other is not None and reach + d_other < best:
                    best = reach + d_other
                    if best <= settled + 1:
                        return _finish(best, cutoff)
                if w not in mine:
                    mine[w] = reach
                    nxt.append(w)
        fronts[side] = nxt
        depths[side] = reach


def _bidirectional_eager(m: Matching, a: int, b: int, cutoff: int) -> Hopcount:
    dist = (np.full(m.n, -1, dtype=np.int64), np.full(m.n, -1, dtype=np.int64))
    dist[0][a - 1] = 0
    dist[1][b - 1] = 0
    fronts = [np.array([a - 1], dtype=np.int64), np.array([b - 1], dtype=np.int64)]
    depths = [0, 0]
    best = math.inf

    while True:
        if best <= depths[0] + depths[1] + 1:
            return _finish(best, cutoff)
        if not (fronts[0].size and fronts[1].size):
            return _finish(best, cutoff) if math.isfinite(best) else Hopcount.infinite()
        if depths[0] + depths[1] >= cutoff:
            return Hopcount.exceeds(cutoff)

        masses = [int(m.degrees[f].sum()) for f in fronts]
        side = 0 if masses[0] <= masses[1] else 1
        mine, other = dist[side], dist[1 - side]
        reach = depths[side] + 1

        nbr = _expand_eager(m, fronts[side])
        met = other[nbr]
        hits = met >= 0
        if hits.any():
            best = min(best, reach + int(met[hits].min()))
        nbr = np.unique(nbr)
        new = nbr[mine[nbr] < 0]
        mine[new] = reach
        fronts[side] = new
        depths[side] = reach
