"""Uniform stub matchings: the configuration multigraph over a degree sequence.

Every node gets as many stubs (half-edges) as its degree; a uniform perfect
matching of the stubs defines the multigraph.  Self-loops and multiple edges
are kept.  Two equivalent constructions are provided:

* eager: shuffle all stubs at once and pair them consecutively (O(L) work
  and memory for L stubs);
* lazy: pair stubs only when asked, drawing each partner uniformly from the
  unrevealed pool.  Revealing in any order that depends only on what has
  already been revealed leaves the overall matching uniform, so a search can
  explore a huge graph while touching a vanishing fraction of it.

Node ids are 1-based on the public surface; stub indices are 0-based and
contiguous per node in node order.
"""

from __future__ import annotations

import math
from typing import IO, Iterator

import numpy as np

from .degree_model import DegreeSequence

DEFAULT_STUB_CAP = 2**31


class StubCapError(RuntimeError):
    """The degree sequence asks for more stubs than the configured cap."""


def _owner_array(offsets: np.ndarray, stubs: np.ndarray) -> np.ndarray:
    """0-based owning node of each stub index."""
    return np.searchsorted(offsets, stubs, side="right") - 1


class Matching:
    """A (possibly partially revealed) uniform stub matching.

    Attributes:
        n: number of nodes.
        degrees: int64 degree array (index 0 is node 1).
        stub_offsets: int64 prefix sums; node i+1 owns stubs
            [stub_offsets[i], stub_offsets[i+1]).
        mode: "eager" or "lazy".
    """

    def __init__(self, degrees: np.ndarray, mode: str, partner: np.ndarray | None = None,
                 rng: np.random.Generator | None = None):
        self.degrees = np.asarray(degrees, dtype=np.int64)
        self.n = int(self.degrees.size)
        self.stub_offsets = np.concatenate(([0], np.cumsum(self.degrees, dtype=np.int64)))
        self.n_stubs = int(self.stub_offsets[-1])
        if self.n_stubs % 2 != 0:
            raise ValueError("total stub count must be even")
        self.mode = mode
        self._partner = partner
        self._rng = rng
        if mode == "lazy":
            self._revealed: dict[int, int] = {}
            self._pool_slot: dict[int, int] = {}
            self._pool_pos: dict[int, int] = {}
            self._pool_size = self.n_stubs

    # -- stub bookkeeping ------------------------------------------------

    def stubs_of(self, node: int) -> range:
        """Stub indices owned by a 1-based node id."""
        if not 1 <= node <= self.n:
            raise ValueError(f"node id {node} out of range 1..{self.n}")
        return range(int(self.stub_offsets[node - 1]), int(self.stub_offsets[node]))

    def stub_node(self, stub: int) -> int:
        """1-based owner of a stub index."""
        if not 0 <= stub < self.n_stubs:
            raise ValueError(f"stub index {stub} out of range 0..{self.n_stubs - 1}")
        return int(np.searchsorted(self.stub_offsets, stub, side="right"))

    def is_revealed(self, stub: int) -> bool:
        if self.mode == "eager":
            return True
        return stub in self._revealed

    @property
    def is_fully_revealed(self) -> bool:
        return self.mode == "eager" or self._pool_size == 0

    # -- lazy pool: implicit Fisher-Yates over [0, n_stubs) ---------------

    def _pool_remove_at(self, pos: int) -> int:
        slot, pos_of = self._pool_slot, self._pool_pos
        stub = slot.pop(pos, pos)
        pos_of.pop(stub, None)
        last = self._pool_size - 1
        if pos != last:
            # plug the hole with whatever sits in the final slot
            last_stub = slot.pop(last, last)
            slot[pos] = last_stub
            pos_of[last_stub] = pos
        self._pool_size = last
        return stub

    def _pool_remove_stub(self, stub: int) -> None:
        pos = self._pool_pos.get(stub, stub)
        self._pool_remove_at(pos)

    def reveal_partner(self, stub: int) -> int:
        """Reveal and return the partner stub of ``stub`` (lazy mode only).

        The partner is uniform over all currently unrevealed stubs other
        than ``stub`` itself.  Revealing an already revealed stub is a
        usage error: earlier reveals are never contradicted.
        """
        if self.mode == "eager":
            raise ValueError("eager matchings are fully revealed at build time")
        if stub in self._revealed:
            raise ValueError(f"stub {stub} is already revealed")
        if not 0 <= stub < self.n_stubs:
            raise ValueError(f"stub index {stub} out of range 0..{self.n_stubs - 1}")
        self._pool_remove_stub(stub)
        j = int(self._rng.integers(self._pool_size))
        other = self._pool_remove_at(j)
        self._revealed[stub] = other
        self._revealed[other] = stub
        return other

    def partner_of(self, stub: int) -> int:
        """Partner stub of a revealed stub."""
        if self.mode == "eager":
            if not 0 <= stub < self.n_stubs:
                raise ValueError(f"stub index {stub} out of range 0..{self.n_stubs - 1}")
            return int(self._partner[stub])
        try:
            return self._revealed[stub]
        except KeyError:
            raise ValueError(f"stub {stub} has not been revealed yet") from None

    # -- graph view --------------------------------------------------------

    def neighbors(self, node: int) -> np.ndarray:
        """Multiset of neighbor node ids (1-based), one entry per stub.

        A self-loop contributes the node itself twice.  In lazy mode any
        unrevealed stub of the node is revealed first.
        """
        stubs = self.stubs_of(node)
        if self.mode == "eager":
            partners = self._partner[stubs.start:stubs.stop]
            return _owner_array(self.stub_offsets, np.asarray(partners, dtype=np.int64)) + 1
        out = np.empty(len(stubs), dtype=np.int64)
        for i, s in enumerate(stubs):
            t = self._revealed.get(s)
            if t is None:
                t = self.reveal_partner(s)
            out[i] = t
        return _owner_array(self.stub_offsets, out) + 1

    def revealed_pairs(self) -> Iterator[tuple[int, int]]:
        """All revealed stub pairs (s, t) with s < t, ascending in s."""
        if self.mode == "eager":
            for s in range(self.n_stubs):
                t = int(self._partner[s])
                if s < t:
                    yield s, t
                elif s == t:
                    raise AssertionError("stub matched to itself")
        else:
            for s in sorted(self._revealed):
                t = self._revealed[s]
                if s < t:
                    yield s, t

    def edges(self) -> Iterator[tuple[int, int]]:
        """Revealed edges as 1-based node pairs (u, v) with u <= v."""
        for s, t in self.revealed_pairs():
            u, v = self.stub_node(s), self.stub_node(t)
            yield (u, v) if u <= v else (v, u)

    def write_edge_list(self, out: IO[str]) -> int:
        """Write the revealed edges as "u v" lines; returns the line count.

        Self-loops appear as "u u".  For an eager matching this is the full
        edge multiset, L / 2 lines.
        """
        count = 0
        for u, v in self.edges():
            out.write(f"{u} {v}\n")
            count += 1
        return count

    @classmethod
    def from_pairs(cls, degrees, pairs) -> "Matching":
        """Build a fixed, fully revealed matching from explicit stub pairs.

        Mainly for tests and exact enumeration: ``pairs`` must form a
        perfect matching of the stub indices 0 .. sum(degrees) - 1.
        """
        degrees = np.asarray(degrees, dtype=np.int64)
        total = int(degrees.sum())
        partner = np.full(total, -1, dtype=np.int64)
        seen = 0
        for s, t in pairs:
            if s == t:
                raise ValueError(f"stub {s} cannot match itself")
            if partner[s] != -1 or partner[t] != -1:
                raise ValueError("duplicate stub in pair list")
            partner[s], partner[t] = t, s
            seen += 2
        if seen != total:
            raise ValueError(f"pairs cover {seen} stubs, expected {total}")
        return cls(degrees, "eager", partner=partner)


def build_eager(seq: DegreeSequence, rng: np.random.Generator,
                stub_cap: int = DEFAULT_STUB_CAP) -> Matching:
    """Draw the full uniform matching: one shuffle, consecutive pairs.

    Args:
        seq: degree sequence with an even stub total.
        rng: numpy Generator.
        stub_cap: refuse sequences with more stubs than this (the partner
            array is materialized, so huge heavy-tail draws must fail loudly
            rather than exhaust memory).

    Raises:
        StubCapError: when the stub total exceeds ``stub_cap``.
    """
    total = seq.total
    if total > stub_cap:
        raise StubCapError(
            f"degree sequence needs {total} stubs, above the stub cap {stub_cap}; "
            "raise the cap or use the lazy builder"
        )
    dtype = np.int32 if total < 2**31 else np.int64
    perm = rng.permutation(np.arange(total, dtype=dtype))
    partner = np.empty(total, dtype=dtype)
    partner[perm[0::2]] = perm[1::2]
    partner[perm[1::2]] = perm[0::2]
    return Matching(seq.degrees, "eager", partner=partner)


def build_lazy(seq: DegreeSequence, rng: np.random.Generator) -> Matching:
    """Create an unrevealed matching whose pairs are drawn on demand.

    The generator is stored and consumed as reveals happen, so the replica
    stays reproducible as long as reveals are requested in a deterministic
    order.  The stub total must fit the generator's integer range.
    """
    if seq.total >= 2**63:
        raise StubCapError(
            f"degree sequence needs {seq.total} stubs, beyond the lazy sampler's 2**63 range"
        )
    return Matching(seq.degrees, "lazy", rng=rng)
