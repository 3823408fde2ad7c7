import pytest
from hypothesis import given, strategies as st

from decomp import (
    BipartitionSystem,
    DecompError,
    DiGraph,
    RootedTree,
    SetSystem,
    bipartitions_overlap,
    build_structure,
    normalize_bipartition_system,
    normalize_set_system,
    sets_overlap,
)
from decomp.bitset import mask_of


def sets_of(system):
    return {frozenset(s) for s in system.sets()}


class TestNormalizeSetSystem:
    def test_empty_input(self):
        assert sets_of(normalize_set_system([], 2)) == {frozenset({0}), frozenset({1}), frozenset({0, 1})}

    def test_adds_universe_and_singletons(self):
        got = sets_of(normalize_set_system([{0, 1}], 3))
        assert got == {frozenset({0}), frozenset({1}), frozenset({2}), frozenset({0, 1}), frozenset({0, 1, 2})}

    def test_dedup_and_completion(self):
        got = sets_of(normalize_set_system([{0}, {0, 1, 2}], 3))
        assert got == {frozenset({0}), frozenset({1}), frozenset({2}), frozenset({0, 1, 2})}

    @given(st.integers(1, 6), st.lists(st.sets(st.integers(0, 5)), max_size=8))
    def test_idempotent(self, n, raw):
        raw = [{e % n for e in s} for s in raw]
        once = normalize_set_system(raw, n)
        again = normalize_set_system(once.family, n)
        assert once == again

    def test_rejects_empty_universe(self):
        with pytest.raises(DecompError):
            normalize_set_system([], 0)


class TestOverlap:
    def test_examples(self):
        assert sets_overlap({0, 1}, {1, 2})
        assert not sets_overlap({0, 1}, {0, 1, 2})
        assert not sets_overlap({0}, {1})

    @given(st.integers(0, 255), st.integers(0, 255))
    def test_symmetric_irreflexive(self, x, y):
        assert sets_overlap(x, y) == sets_overlap(y, x)
        assert not sets_overlap(x, x)

    def test_bipartition_examples(self):
        assert bipartitions_overlap({0, 1}, {0, 2}, 4)
        assert not bipartitions_overlap({0}, {1}, 4)
        assert not bipartitions_overlap({1, 2}, {1, 2}, 4)

    @given(st.integers(1, 100), st.integers(0, 1023), st.integers(0, 1023))
    def test_side_swap_invariant(self, n, x, y):
        n = 2 + n % 9
        fm = (1 << n) - 1
        x, y = x & fm, y & fm
        base = bipartitions_overlap(x, y, n)
        assert bipartitions_overlap(fm & ~x, y, n) == base
        assert bipartitions_overlap(x, fm & ~y, n) == base


class TestDiGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(DecompError):
            DiGraph(2, (1, 0))

    def test_rejects_empty(self):
        with pytest.raises(DecompError):
            DiGraph(0, ())

    def test_undirected_flag(self):
        assert DiGraph.from_edges(2, [(0, 1)], directed=False).undirected
        assert not DiGraph.from_edges(2, [(0, 1)]).undirected

    def test_connectivity_is_weak(self):
        assert DiGraph.from_edges(2, [(0, 1)]).is_connected()
        assert not DiGraph.from_edges(3, [(0, 1)]).is_connected()


class TestBipartitionSystem:
    def test_canonical_side_avoids_zero(self):
        system = normalize_bipartition_system([{0, 1}], 4)
        assert all(not m & 1 for m in system.family)
        assert mask_of({2, 3}) in system.members

    def test_trivials_present_and_empty_excluded(self):
        system = normalize_bipartition_system([set()], 3)
        assert {frozenset(s) for s in system.sides()} == {
            frozenset({1}),
            frozenset({2}),
            frozenset({1, 2}),
        }

    def test_singleton_universe(self):
        assert normalize_bipartition_system([], 1).family == ()


class TestBuildStructure:
    def test_graph(self):
        s = build_structure(DiGraph.from_edges(2, [(0, 1)]))
        assert s.relations["edge"] == frozenset({(0, 1)})

    def test_set_system(self):
        s = build_structure(normalize_set_system([], 2))
        assert s.set_predicates["SET"] == frozenset({(1,), (2,), (3,)})

    def test_rooted_tree_ancestor(self):
        tree = RootedTree((2, 2, None), (0, 1, None))
        anc = build_structure(tree).relations["ancestor"]
        assert {(2, 2), (2, 0), (2, 1), (0, 0), (1, 1)} <= anc

    def test_ancestor_is_an_order_with_unique_top(self):
        tree = RootedTree((4, 4, 5, 5, None, 4), (0, 1, 2, 3, None, None))
        anc = build_structure(tree).relations["ancestor"]
        nodes = range(tree.size)
        assert all((v, v) in anc for v in nodes)
        assert all(not ((u, v) in anc and (v, u) in anc) for u in nodes for v in nodes if u != v)
        for u in nodes:
            for v in nodes:
                for w in nodes:
                    if (u, v) in anc and (v, w) in anc:
                        assert (u, w) in anc
        tops = [u for u in nodes if all((u, v) in anc for v in nodes)]
        assert tops == [tree.root]


class TestRootedTree:
    def test_single_node(self):
        t = RootedTree((None,), (0,))
        assert t.leaves == (0,) and t.root == 0

    def test_rejects_unary_inner(self):
        with pytest.raises(DecompError):
            RootedTree((1, None), (0, None))

    def test_leaf_labels_must_biject(self):
        with pytest.raises(DecompError):
            RootedTree((2, 2, None), (0, 0, None))
