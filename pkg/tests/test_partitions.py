from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensorclt import partitions as pt
from tensorclt.errors import CapExceededError, DomainError
from tensorclt.free_moments import catalan

from strategies import pairings, set_partitions


def double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def bell(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


class TestParsing:
    def test_roundtrip_text(self):
        pi = pt.Partition.parse(" 2,4 | 1, 3 ")
        assert pi.blocks == ((1, 3), (2, 4))
        assert str(pi) == "1,3|2,4"

    @pytest.mark.parametrize("text", ["1,1|2,3", "1,3|2", "1,2|4,5", "a,b", "1,2|2,3"])
    def test_rejects_malformed(self, text):
        with pytest.raises(DomainError):
            pt.as_pairing(pt.Partition.parse(text))

    def test_pair_partition_rejects_triples(self):
        with pytest.raises(DomainError):
            pt.PairPartition.from_blocks([[1, 2, 3]])

    def test_pairing_equals_plain_partition(self):
        a = pt.Partition.parse("1,2|3,4")
        b = pt.as_pairing(a)
        assert a == b and hash(a) == hash(b)

    @given(set_partitions())
    def test_str_parse_roundtrip(self, pi):
        assert pt.Partition.parse(str(pi)) == pi

    @given(set_partitions(), st.integers(-10, 10))
    def test_rotation_composes(self, pi, s):
        assert pi.rotate(s).rotate(-s) == pi
        assert pi.rotate(pi.p) == pi


class TestEnumeration:
    @pytest.mark.parametrize("p", range(0, 13, 2))
    def test_pairing_count(self, p):
        pis = list(pt.enumerate_pair_partitions(p))
        assert len(pis) == double_factorial(p - 1)
        assert len(set(pis)) == len(pis)

    def test_odd_size_is_a_domain_error(self):
        with pytest.raises(DomainError):
            next(pt.enumerate_pair_partitions(5))

    @pytest.mark.parametrize("p", range(0, 9))
    def test_set_partition_count_is_bell(self, p):
        assert sum(1 for _ in pt.enumerate_set_partitions(p)) == bell(p)

    def test_min_block_size(self):
        got = {str(pi) for pi in pt.enumerate_set_partitions(4, min_block_size=2)}
        assert got == {"1,2,3,4", "1,2|3,4", "1,3|2,4", "1,4|2,3"}

    @pytest.mark.parametrize("p", range(0, 10))
    def test_noncrossing_count_is_catalan_of_set_partitions(self, p):
        ncs = list(pt.enumerate_noncrossing_partitions(p))
        assert len(ncs) == catalan(p)
        brute = [pi for pi in pt.enumerate_set_partitions(p) if pt.is_noncrossing(pi)]
        assert set(ncs) == set(brute)

    def test_caps(self):
        with pytest.raises(CapExceededError):
            next(pt.enumerate_pair_partitions(18))
        with pytest.raises(CapExceededError):
            next(pt.enumerate_set_partitions(13))
        with pytest.raises(CapExceededError):
            next(pt.enumerate_pair_partitions(10, cap=8))


class TestCrossing:
    def test_four_point_rule(self):
        assert pt.blocks_cross((1, 3), (2, 4))
        assert not pt.blocks_cross((1, 4), (2, 3))
        assert not pt.blocks_cross((1, 2), (3, 4))
        assert pt.blocks_cross((1, 3, 5), (2, 6))

    @given(st.sets(st.integers(1, 9), min_size=1, max_size=4), st.sets(st.integers(1, 9), min_size=1, max_size=4))
    def test_cross_matches_definition(self, u, v):
        if u & v:
            return
        brute = any(
            i < k < j < l
            for i, j in combinations(sorted(u), 2)
            for k, l in combinations(sorted(v), 2)
        ) or any(
            i < k < j < l
            for i, j in combinations(sorted(v), 2)
            for k, l in combinations(sorted(u), 2)
        )
        assert pt.blocks_cross(sorted(u), sorted(v)) == brute

    def test_stats_of_known_pairings(self):
        s = pt.stats(pt.Partition.parse("1,3|2,4"))
        assert (s.num_blocks, s.cr, s.ncr, s.cc) == (2, 2, 0, 1)
        s = pt.stats(pt.Partition.parse("1,4|2,5|3,6"))
        assert (s.cr, s.cc) == (3, 1)
        assert not pt.is_bipartite(pt.Partition.parse("1,4|2,5|3,6"))
        s = pt.stats(pt.Partition.parse("1,2|3,5|4,6"))
        assert (s.cr, s.ncr, s.cc) == (2, 1, 2)

    @given(pairings(max_pairs=6))
    def test_stats_consistency(self, pi):
        s = pt.stats(pi)
        assert s.cr + s.ncr == s.num_blocks == len(pi)
        assert 1 <= s.cc <= s.num_blocks
        assert (s.cr == 0) == pt.is_noncrossing(pi)


class TestClosure:
    @given(set_partitions())
    def test_roundtrip(self, pi):
        dec = pt.noncrossing_closure(pi)
        assert dec.reassemble() == pi
        assert pt.is_noncrossing(dec.closure)
        assert len(dec.closure) == pt.stats(pi).cc
        for support, comp in dec.components.items():
            assert comp.p == len(support)
            assert pt.is_connected(comp)

    def test_example(self):
        dec = pt.noncrossing_closure(pt.Partition.parse("1,3|2,4|5,6"))
        assert str(dec.closure) == "1,2,3,4|5,6"
        assert str(dec.components[(1, 2, 3, 4)]) == "1,3|2,4"

    @given(pairings(max_pairs=6))
    def test_connected_definitions_agree(self, pi):
        assert pt.is_connected(pi) == pt.is_connected_by_intervals(pi)


class TestCounts:
    def test_connected(self):
        assert [pt.count_connected(p) for p in (2, 4, 6, 8, 10)] == [1, 1, 4, 27, 248]
        assert [pt.count_connected_by_intervals(p) for p in (2, 4, 6, 8, 10)] == [1, 1, 4, 27, 248]

    def test_bipartite_connected_two_ways(self):
        fast = [pt.count_bipartite_connected(p) for p in range(2, 13, 2)]
        slow = [pt.count_bipartite_connected_by_filter(p) for p in range(2, 13, 2)]
        assert fast == slow == [1, 1, 3, 14, 80, 518]

    @pytest.mark.parametrize("p", [4, 6, 8, 10])
    def test_profile_matches_filter(self, p):
        brute = {}
        for pi in pt.enumerate_pair_partitions(p):
            if pt.is_bipartite(pi):
                s = pt.stats(pi)
                brute[(s.cc, s.cr)] = brute.get((s.cc, s.cr), 0) + 1
        assert pt.bipartite_profile(p) == brute

    def test_profile_parallel_matches_serial(self):
        pt.bipartite_profile.cache_clear() if hasattr(pt.bipartite_profile, "cache_clear") else None
        assert pt.bipartite_profile(10, workers=2) == pt.bipartite_profile(10, workers=1)
