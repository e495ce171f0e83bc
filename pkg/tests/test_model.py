import random

import pytest

from ebmatch.errors import (
    DisconnectedMatchingGraph,
    IsolatedArrivalVertex,
    OutOfRangeEdge,
    StructureError,
)
from ebmatch.model import (
    associated_digraph,
    build_bm,
    build_gm,
    build_structure,
    check_bi_separable,
    detect_model_kind,
    enumerate_independent_sets,
    is_strongly_connected,
    random_bm,
    random_gm,
)

from .conftest import CHAIN_E, RESTRICTED_F, SEPARABLE_BM


class TestBuildStructure:
    def test_neighborhoods(self, chain_bm):
        assert chain_bm.S(1) == (1, 2)
        assert chain_bm.S(2) == (2, 3)
        assert chain_bm.S(3) == (3,)
        assert chain_bm.C(1) == (1,)
        assert chain_bm.C(2) == (1, 2)
        assert chain_bm.C(3) == (2, 3)

    def test_neighborhood_sets(self, chain_bm):
        assert chain_bm.S_of_set({1, 3}) == frozenset({1, 2, 3})
        assert chain_bm.C_of_set({1}) == frozenset({1})

    def test_compatible(self, chain_bm):
        assert chain_bm.compatible(1, 2)
        assert not chain_bm.compatible(3, 1)

    def test_bm_has_complete_arrivals(self, chain_bm):
        assert len(chain_bm.F) == 9

    def test_out_of_range_edge(self):
        with pytest.raises(OutOfRangeEdge):
            build_bm(3, 3, [(1, 1), (4, 2)])

    def test_disconnected_rejected(self):
        with pytest.raises(DisconnectedMatchingGraph):
            build_bm(2, 2, [(1, 1), (2, 2)])

    def test_isolated_arrival_class_rejected(self):
        with pytest.raises(IsolatedArrivalVertex):
            build_structure(2, 2, [(1, 1), (1, 2), (2, 2)], [(1, 1), (1, 2)])

    def test_empty_edge_set_rejected(self):
        with pytest.raises(StructureError):
            build_structure(2, 2, [], [(1, 1)])


class TestGm:
    def test_pairing_arrivals(self):
        # Two paired classes: arrivals happen along the pairing.
        gm = build_gm(2, [(1, 2)])
        assert detect_model_kind(gm) == "gm"
        # each class arrives with its own server copy
        assert gm.F == frozenset({(1, 1), (2, 2)})
        # compatibility is the symmetrized reduced edge
        assert (1, 2) in gm.E and (2, 1) in gm.E

    def test_detect_kinds(self, chain_bm, restricted):
        assert detect_model_kind(chain_bm) == "bm"
        assert detect_model_kind(restricted) == "ebm"


class TestDigraph:
    def test_chain_bm_strongly_connected(self, chain_bm):
        assert is_strongly_connected(associated_digraph(chain_bm))

    def test_restricted_strongly_connected(self, restricted):
        assert is_strongly_connected(associated_digraph(restricted))

    def test_random_bm_strongly_connected(self):
        rng = random.Random(7)
        for _ in range(20):
            st = random_bm(rng.randint(2, 5), rng.randint(2, 5), rng)
            assert is_strongly_connected(associated_digraph(st))

    def test_random_gm_strongly_connected(self):
        rng = random.Random(11)
        for _ in range(20):
            st = random_gm(rng.randint(3, 7), rng)
            assert is_strongly_connected(associated_digraph(st))


class TestIndependentSets:
    def test_restricted_has_two_sided_sets(self, restricted):
        two_sided = [
            ind
            for ind in enumerate_independent_sets(restricted)
            if ind.A and ind.B
        ]
        assert any(
            ind.A == frozenset({3}) and ind.B == frozenset({1})
            for ind in two_sided
        )

    def test_no_compatible_pairs_inside(self, restricted):
        for ind in enumerate_independent_sets(restricted):
            for c in ind.A:
                for s in ind.B:
                    assert not restricted.compatible(c, s)


class TestSeparability:
    @pytest.mark.parametrize("n_c,n_s,edges", SEPARABLE_BM)
    def test_reference_graphs_are_separable(self, n_c, n_s, edges):
        st = build_bm(n_c, n_s, edges)
        part = check_bi_separable(st)
        assert part is not None
        assert part.order == 3

    def test_parts_cover_all_classes(self):
        n_c, n_s, edges = SEPARABLE_BM[1]
        part = check_bi_separable(build_bm(n_c, n_s, edges))
        customers = sorted(c for p in part.parts for c in p.A)
        servers = sorted(s for p in part.parts for s in p.B)
        assert customers == list(range(1, n_c + 1))
        assert servers == list(range(1, n_s + 1))

    def test_chain_not_separable(self, chain_bm):
        assert check_bi_separable(chain_bm) is None
