import pytest
from hypothesis import given, settings, strategies as st

from decomp import (
    DecompError,
    DiGraph,
    NotCograph,
    NotConnected,
    RequiresUndirected,
    TooLarge,
    cotree,
    count_modules,
    count_modules_via_tree,
    cut_rank,
    equiv_classes,
    graph_from_cotree,
    graph_from_modular,
    graph_from_skeleton,
    graph_from_split,
    is_bijoin,
    is_module,
    is_split,
    modular_decomposition,
    modules_set_system,
    rank_width_of,
    skeleton,
    split_decomposition,
)
from decomp.bitset import bits, mask_of, popcount
from decomp.graphdec import CotreeLabel, bijoin_family, smallest_module, split_family
from decomp.oracle import (
    all_digraphs,
    enumerate_bijoins,
    enumerate_modules,
    enumerate_splits,
    random_connected_digraph,
    random_connected_graph,
    random_digraph,
    random_graph,
)
from tests.helpers import grow_distance_hereditary

K3 = DiGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)], directed=False)
P4 = DiGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)], directed=False)
TT3 = DiGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


class TestModules:
    def test_trivial_modules(self):
        assert is_module(K3, {0, 1, 2})
        assert is_module(K3, {1})
        assert is_module(K3, set())

    def test_k3_pair(self):
        assert is_module(K3, {0, 1})

    def test_p4_middle_pair(self):
        assert not is_module(P4, {1, 2})

    def test_smallest_module_grows(self):
        assert smallest_module(P4, 1, 2) == mask_of({0, 1, 2, 3})

    def test_edgeless_all_subsets(self):
        g = DiGraph.from_edges(3, [], directed=False)
        assert len(modules_set_system(g).family) == 7

    def test_p4_trivial_only(self):
        assert len(modules_set_system(P4).family) == 5

    def test_generator_matches_scan(self):
        for seed in range(25):
            g = random_digraph(2 + seed % 6, 0.5, seed)
            assert modules_set_system(g) == enumerate_modules(g)

    def test_guard(self):
        with pytest.raises(TooLarge):
            modules_set_system(DiGraph.from_edges(17, [], directed=False), guard=16)


class TestModularDecomposition:
    def test_single_vertex(self):
        dec = modular_decomposition(DiGraph(1, (0,)))
        assert dec.tree.size == 1 and not dec.m_edges

    def test_k3(self):
        dec = modular_decomposition(K3)
        assert dec.tree.size == 4
        assert dec.m_edges == frozenset({(a, b) for a in range(3) for b in range(3) if a != b})

    def test_transitive_tournament(self):
        dec = modular_decomposition(TT3)
        assert dec.m_edges == frozenset({(0, 1), (1, 2), (0, 2)})

    def test_no_m_edges_gives_edgeless(self):
        dec = modular_decomposition(DiGraph.from_edges(3, [], directed=False))
        assert graph_from_modular(dec).edges() == []

    @settings(deadline=None, max_examples=40)
    @given(st.integers(0, 10_000))
    def test_roundtrip_random(self, seed):
        g = random_digraph(2 + seed % 9, 0.4, seed)
        assert graph_from_modular(modular_decomposition(g)) == g

    def test_counts(self):
        assert count_modules(DiGraph(1, (0,))) == 1
        assert count_modules(DiGraph.from_edges(3, [], directed=False)) == 7
        assert count_modules(P4) == 5
        for seed in range(20):
            g = random_digraph(2 + seed % 5, 0.5, seed)
            assert count_modules(g) == count_modules_via_tree(g)


class TestCotree:
    def test_p4_not_cograph(self):
        with pytest.raises(NotCograph) as err:
            cotree(P4)
        assert err.value.witness in modular_decomposition(P4).tree.inner_nodes

    def test_k3_series(self):
        ct = cotree(K3)
        assert ct.label[ct.tree.root] is CotreeLabel.SERIES

    def test_tournament_linear(self):
        ct = cotree(TT3)
        assert ct.label[ct.tree.root] is CotreeLabel.LINEAR
        assert ct.order[ct.tree.root] == (0, 1, 2)
        assert graph_from_cotree(ct) == TT3

    def test_all_parallel_edgeless(self):
        g = DiGraph.from_edges(4, [], directed=False)
        ct = cotree(g)
        assert graph_from_cotree(ct).edges() == []

    def test_roundtrip_small_digraphs(self):
        hits = 0
        for g in all_digraphs(3):
            try:
                ct = cotree(g)
            except NotCograph:
                continue
            hits += 1
            assert graph_from_cotree(ct) == g
        assert hits > 0


class TestSplits:
    def test_trivial_sides(self):
        assert is_split(K3, {0})

    def test_c4_cross(self):
        c4 = DiGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], directed=False)
        assert is_split(c4, {0, 2})

    def test_c5_prime(self):
        c5 = DiGraph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)], directed=False)
        family = enumerate_splits(c5)
        assert all(popcount(side) in (1, 4) for side in family.family)

    def test_not_connected(self):
        with pytest.raises(NotConnected):
            is_split(DiGraph.from_edges(3, [(0, 1)], directed=False), {0})

    def test_empty_side_rejected(self):
        with pytest.raises(DecompError):
            is_split(K3, set())

    def test_k2_decomposition(self):
        k2 = DiGraph.from_edges(2, [(0, 1)], directed=False)
        dec = split_decomposition(k2)
        assert len(dec.markers) == 2 and len(dec.t_edges) == 1 and not dec.c_edges
        assert graph_from_split(dec) == k2

    def test_k1(self):
        g = DiGraph(1, (0,))
        assert graph_from_split(split_decomposition(g)) == g

    def test_star_single_component(self):
        star = DiGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)], directed=False)
        dec = split_decomposition(star)
        assert len(dec.tree.inner_nodes) == 1
        hub = dec.tree.inner_nodes[0]
        hub_markers = [k for k, (u, v) in enumerate(dec.markers) if u == hub]
        centre = [m for m in hub_markers if dec.markers[m][1] == dec.tree.leaf_of_element[0]]
        degree = {m: 0 for m in hub_markers}
        for a, b in dec.c_edges:
            degree[a] += 1
        assert all((degree[m] == 3) == (m in centre) for m in hub_markers)

    def test_path6_strong_split_count(self):
        p6 = DiGraph.from_edges(6, [(i, i + 1) for i in range(5)], directed=False)
        dec = split_decomposition(p6)
        nontrivial = [
            (u, v)
            for u, v in dec.tree.edges()
            if popcount(dec.tree.side_leafset(u, v)) not in (1, 5)
        ]
        assert len(nontrivial) == 3
        assert len(dec.tree.inner_nodes) == 4

    @settings(deadline=None, max_examples=30)
    @given(st.integers(0, 10_000))
    def test_roundtrip_random(self, seed):
        g = random_connected_digraph(3 + seed % 9, 0.4, seed)
        assert graph_from_split(split_decomposition(g)) == g

    def test_jobs_sharding_deterministic(self):
        g = random_connected_digraph(12, 0.4, 5)
        assert split_family(g, jobs=1) == split_family(g, jobs=2)


class TestBijoins:
    def test_modules_are_bijoins(self):
        for seed in range(10):
            g = random_graph(3 + seed % 5, 0.5, seed)
            for m in modules_set_system(g).family:
                if 0 < popcount(m) < g.n:
                    assert is_bijoin(g, m)

    def test_requires_undirected(self):
        with pytest.raises(RequiresUndirected):
            is_bijoin(TT3, {0})

    def test_c5_against_oracle(self):
        c5 = DiGraph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)], directed=False)
        family = enumerate_bijoins(c5)
        for side in range(1, 1 << 4):
            assert is_bijoin(c5, side << 1) == ((side << 1) in family)
        # C5 is prime for bi-joins: only trivial members
        assert all(popcount(m) in (1, 4) for m in family.family)

    def test_equiv_classes(self):
        assert equiv_classes(K3, {0, 1, 2}) == [mask_of({0, 1, 2})]
        g = random_graph(6, 0.5, 3)
        for m in modules_set_system(g).family:
            if popcount(m) >= 2:
                assert len(equiv_classes(g, m)) == 1
        for side in bijoin_family(P4).family:
            assert len(equiv_classes(P4, side)) <= 2
            assert len(equiv_classes(P4, ((1 << 4) - 1) & ~side)) <= 2

    def test_p4_bijoin_sides(self):
        assert is_bijoin(P4, {0, 3})
        assert not is_bijoin(P4, {0, 1})


class TestSkeleton:
    def test_k2(self):
        k2 = DiGraph.from_edges(2, [(0, 1)], directed=False)
        skel = skeleton(k2)
        assert len(skel.classes) == 2 and len(skel.t_edges) == 1
        assert graph_from_skeleton(skel) == k2

    def test_k1(self):
        g = DiGraph(1, (0,))
        assert graph_from_skeleton(skeleton(g)) == g

    def test_class_count_per_direction(self):
        for seed in range(10):
            g = random_connected_graph(4 + seed % 5, 0.5, seed)
            skel = skeleton(g)
            for cids in skel.by_direction.values():
                assert 1 <= len(cids) <= 2

    @settings(deadline=None, max_examples=30)
    @given(st.integers(0, 10_000))
    def test_roundtrip_random(self, seed):
        g = random_connected_graph(2 + seed % 9, 0.5, seed)
        assert graph_from_skeleton(skeleton(g)) == g

    def test_prime_graph_singleton_classes(self):
        c5 = DiGraph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)], directed=False)
        skel = skeleton(c5)
        assert all(popcount(cv.members) == 1 for cv in skel.classes)
        assert graph_from_skeleton(skel) == c5


class TestCutRank:
    def test_edgeless(self):
        g = DiGraph.from_edges(5, [], directed=False)
        assert cut_rank(g, {0, 3}) == 0

    def test_complete(self):
        g = DiGraph.from_edges(5, [(u, v) for u in range(5) for v in range(u + 1, 5)], directed=False)
        for side in (1, 2, 3):
            assert cut_rank(g, set(range(side))) == 1

    def test_p4(self):
        assert cut_rank(P4, {0, 1}) == 1

    @settings(deadline=None, max_examples=50)
    @given(st.integers(0, 10_000), st.integers(2, 20))
    def test_symmetry(self, seed, n):
        g = random_graph(n, 0.4, seed)
        x = 1 + seed % ((1 << n) - 1)
        assert cut_rank(g, x) == cut_rank(g, ((1 << n) - 1) & ~x)


class TestRankWidth:
    def test_edgeless_zero(self):
        g, tree = grow_distance_hereditary(6, 0)
        edgeless = DiGraph.from_edges(6, [], directed=False)
        assert rank_width_of(edgeless, tree) == 0

    def test_k4_cubic_tree(self):
        k4 = DiGraph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)], directed=False)
        _, tree = grow_distance_hereditary(4, 1)
        assert rank_width_of(k4, tree) == 1

    @settings(deadline=None, max_examples=25)
    @given(st.integers(0, 10_000))
    def test_distance_hereditary_width_one(self, seed):
        g, tree = grow_distance_hereditary(3 + seed % 8, seed)
        assert rank_width_of(g, tree) <= 1
