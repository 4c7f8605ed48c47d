"""Stub matching unit tests.

Uniformity is checked against exact enumeration: for a degree sequence
with L stubs there are (L-1)!! equally likely perfect matchings, and the
tiny cases can be tabulated by hand.  Both build modes must hit the exact
probabilities within Monte Carlo noise, and the lazy mode must produce the
same matchings whatever order the stubs are revealed in.
"""

import io
from fractions import Fraction

import numpy as np
import pytest

from heavyhop.degree_model import DegreeSequence
from heavyhop.exact import matching_census
from heavyhop.matching import Matching, StubCapError, build_eager, build_lazy


def census_key(m: Matching) -> tuple:
    return tuple(sorted(m.edges()))


def build(seq, mode, seed):
    rng = np.random.default_rng(seed)
    if mode == "lazy":
        m = build_lazy(seq, rng)
        for s in range(m.n_stubs):
            if not m.is_revealed(s):
                m.reveal_partner(s)
        return m
    return build_eager(seq, rng)


class TestExactTables:
    def test_path_pair_census(self):
        census = matching_census([1, 1, 2])
        assert census == {
            ((1, 2), (3, 3)): Fraction(1, 3),
            ((1, 3), (2, 3)): Fraction(2, 3),
        }

    def test_single_edge(self):
        assert matching_census([1, 1]) == {((1, 2),): Fraction(1, 1)}

    def test_two_deg2_nodes(self):
        # three matchings of 4 stubs: two wire the double edge, one closes
        # both self-loops
        assert matching_census([2, 2]) == {
            ((1, 1), (2, 2)): Fraction(1, 3),
            ((1, 2), (1, 2)): Fraction(2, 3),
        }

    def test_four_leaves(self):
        census = matching_census([1, 1, 1, 1])
        assert census == {
            ((1, 2), (3, 4)): Fraction(1, 3),
            ((1, 3), (2, 4)): Fraction(1, 3),
            ((1, 4), (2, 3)): Fraction(1, 3),
        }


@pytest.mark.parametrize("mode", ["eager", "lazy"])
class TestUniformity:
    def test_four_leaves_frequencies(self, mode):
        seq = DegreeSequence(np.array([1, 1, 1, 1]))
        counts = {}
        trials = 30_000
        for seed in range(trials):
            key = census_key(build(seq, mode, seed))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 3
        for c in counts.values():
            # 1/3 each; 5 sigma ~ 0.0136
            assert abs(c / trials - 1 / 3) < 0.015

    def test_census_match_with_multiedges(self, mode):
        seq = DegreeSequence(np.array([2, 2]))
        exact = matching_census(seq.degrees)
        counts = {k: 0 for k in exact}
        trials = 30_000
        for seed in range(trials):
            counts[census_key(build(seq, mode, seed + 10_000_000))] += 1
        for key, frac in exact.items():
            assert abs(counts[key] / trials - float(frac)) < 0.015


class TestInvariants:
    @pytest.mark.parametrize("mode", ["eager", "lazy"])
    @pytest.mark.parametrize("degrees", [[3, 1, 2, 2], [2, 2, 2], [5, 1, 1, 1, 4]])
    def test_perfect_involution(self, mode, degrees):
        seq = DegreeSequence(np.array(degrees))
        m = build(seq, mode, 77)
        partners = [m.partner_of(s) for s in range(m.n_stubs)]
        for s, t in enumerate(partners):
            assert t != s
            assert partners[t] == s

    @pytest.mark.parametrize("mode", ["eager", "lazy"])
    def test_handshake(self, mode):
        seq = DegreeSequence(np.array([4, 3, 2, 2, 1]))
        m = build(seq, mode, 5)
        edges = list(m.edges())
        assert len(edges) == seq.total // 2
        incidence = {v: 0 for v in range(1, seq.n + 1)}
        for u, v in edges:
            incidence[u] += 1
            incidence[v] += 1  # a self-loop counts twice on purpose
        for v in range(1, seq.n + 1):
            assert incidence[v] == seq.degree_of(v)

    def test_neighbors_have_multiplicity(self):
        seq = DegreeSequence(np.array([3, 2, 1]))
        for seed in range(20):
            m = build(seq, "eager", seed)
            for v in range(1, 4):
                assert len(m.neighbors(v)) == seq.degree_of(v)

    def test_stub_ownership(self):
        seq = DegreeSequence(np.array([2, 1, 3]))
        m = build_lazy(seq, np.random.default_rng(0))
        assert list(m.stubs_of(1)) == [0, 1]
        assert list(m.stubs_of(2)) == [2]
        assert list(m.stubs_of(3)) == [3, 4, 5]
        assert [m.stub_node(s) for s in range(6)] == [1, 1, 2, 3, 3, 3]


class TestLazyProtocol:
    def test_reveal_is_consistent(self):
        seq = DegreeSequence(np.array([3, 3, 2]))
        m = build_lazy(seq, np.random.default_rng(123))
        t = m.reveal_partner(0)
        assert m.is_revealed(0) and m.is_revealed(t)
        assert m.partner_of(t) == 0
        with pytest.raises(ValueError, match="already revealed"):
            m.reveal_partner(0)
        with pytest.raises(ValueError):
            m.reveal_partner(99)

    def test_unrevealed_partner_query_fails(self):
        seq = DegreeSequence(np.array([1, 1]))
        m = build_lazy(seq, np.random.default_rng(0))
        assert not m.is_fully_revealed
        with pytest.raises(ValueError, match="not been revealed"):
            m.partner_of(0)

    def test_full_reveal_any_order(self):
        # revealing in scrambled order still yields a perfect matching
        seq = DegreeSequence(np.array([2, 3, 1, 2]))
        for seed in range(50):
            m = build_lazy(seq, np.random.default_rng(seed))
            order = np.random.default_rng(seed + 1).permutation(m.n_stubs)
            for s in order:
                if not m.is_revealed(int(s)):
                    m.reveal_partner(int(s))
            assert m.is_fully_revealed
            partners = [m.partner_of(s) for s in range(m.n_stubs)]
            assert sorted(partners) == list(range(m.n_stubs))

    def test_eager_is_born_revealed(self):
        seq = DegreeSequence(np.array([1, 1]))
        m = build_eager(seq, np.random.default_rng(0))
        assert m.is_fully_revealed
        with pytest.raises(ValueError, match="eager"):
            m.reveal_partner(0)


class TestEdgeList:
    def test_format_and_count(self):
        seq = DegreeSequence(np.array([2, 1, 1]))
        m = build(seq, "eager", 9)
        buf = io.StringIO()
        count = m.write_edge_list(buf)
        lines = buf.getvalue().splitlines()
        assert count == len(lines) == 2
        for line, (u, v) in zip(lines, m.edges()):
            assert line == f"{u} {v}"
            assert u <= v


class TestGuards:
    def test_stub_cap(self):
        seq = DegreeSequence(np.array([2, 2, 2]))
        with pytest.raises(StubCapError, match="4"):
            build_eager(seq, np.random.default_rng(0), stub_cap=4)
        # at the cap is fine
        build_eager(seq, np.random.default_rng(0), stub_cap=6)

    def test_from_pairs_validation(self):
        with pytest.raises(ValueError):
            Matching.from_pairs(np.array([1, 1]), [(0, 0)])  # fixed point
        with pytest.raises(ValueError):
            Matching.from_pairs(np.array([1, 1, 1, 1]), [(0, 1), (1, 2)])
        m = Matching.from_pairs(np.array([1, 1]), [(0, 1)])
        assert list(m.edges()) == [(1, 2)]
