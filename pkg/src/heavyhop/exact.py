"""Exhaustive enumeration over all stub matchings of a tiny degree sequence.

For L stubs there are (L - 1)!! perfect matchings, each equally likely under
the uniform model, so exact hopcount distributions and matching frequencies
can be tabulated by brute force.  Everything here is exact rational
arithmetic; it is the oracle the samplers are tested against.  Practical only
for L <= 12 (10395 matchings).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

import numpy as np

from .distance import DEFAULT_CUTOFF, hopcount
from .matching import Matching

MAX_ORACLE_STUBS = 12


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def enumerate_matchings(degrees) -> Iterator[list[tuple[int, int]]]:
    """Yield every perfect matching of the stubs as a list of (s, t) pairs.

    Pairs always match the lowest unmatched stub first, so each matching is
    produced exactly once; the count is (L - 1)!! for L stubs.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    if degrees.size and degrees.min() < 1:
        raise ValueError("every degree must be >= 1")
    total = int(degrees.sum())
    if total % 2 != 0:
        raise ValueError(f"stub total {total} is odd; no perfect matching exists")
    if total > MAX_ORACLE_STUBS:
        raise ValueError(
            f"enumeration is limited to {MAX_ORACLE_STUBS} stubs, got {total}"
        )

    free = list(range(total))

    def recurse(chosen):
        if not free:
            yield list(chosen)
            return
        s = free.pop(0)
        for i in range(len(free)):
            t = free.pop(i)
            chosen.append((s, t))
            yield from recurse(chosen)
            chosen.pop()
            free.insert(i, t)
        free.insert(0, s)

    yield from recurse([])


def matching_census(degrees) -> dict[tuple[tuple[int, int], ...], Fraction]:
    """Exact probability of each distinct edge multiset.

    Keys are sorted tuples of 1-based node pairs (u, v) with u <= v,
    repeated edges repeated; values sum to 1 exactly.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    counts: dict[tuple[tuple[int, int], ...], int] = {}
    total = 0
    for pairs in enumerate_matchings(degrees):
        m = Matching.from_pairs(degrees, pairs)
        key = tuple(sorted(m.edges()))
        counts[key] = counts.get(key, 0) + 1
        total += 1
    return {k: Fraction(v, total) for k, v in sorted(counts.items())}


def exact_hopcount_pmf(degrees, a: int = 1, b: int = 2,
                       cutoff: int = DEFAULT_CUTOFF) -> dict[str, Fraction]:
    """Exact hopcount distribution between two nodes, by full enumeration.

    Returns a map from bucket label ("1", "2", ..., ">c", "inf") to the
    exact probability; values sum to 1.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    counts: dict[str, int] = {}
    total = 0
    for pairs in enumerate_matchings(degrees):
        m = Matching.from_pairs(degrees, pairs)
        label = hopcount(m, a, b, cutoff=cutoff).label
        counts[label] = counts.get(label, 0) + 1
        total += 1
    return {k: Fraction(v, total) for k, v in sorted(counts.items())}
