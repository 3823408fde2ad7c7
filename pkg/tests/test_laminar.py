import pytest
from hypothesis import given, settings, strategies as st

from decomp import (
    BipartitionSystem,
    NotLaminar,
    SetSystem,
    is_laminar,
    is_laminar_bipartitions,
    laminar_tree,
    laminar_tree_bipartitions,
    normalize_bipartition_system,
    normalize_set_system,
    rooted_reduction,
    tree_to_sets,
    unrooted_tree_to_bipartitions,
)
from decomp.bitset import mask_of
from decomp.oracle import random_laminar_system, random_rooted_tree


def test_is_laminar_examples():
    assert is_laminar(normalize_set_system([{0, 1}], 2))
    assert not is_laminar(normalize_set_system([{0, 1}, {1, 2}], 3))
    assert is_laminar(normalize_set_system([], 1))


def test_laminar_tree_shape():
    system = normalize_set_system([{0, 1}], 3)
    tree = laminar_tree(system)
    assert tree.size == 5 <= 2 * 3 - 1
    inner = tree.leaf_of_element[0]
    assert tree.parent[0] == tree.parent[1] != tree.parent[2]
    root = tree.root
    assert sorted(tree.children[root]) == [2, 3]  # leaf 2 and the {0,1} node
    assert tree.leafset[3] == mask_of({0, 1})


def test_laminar_tree_two_leaves():
    tree = laminar_tree(normalize_set_system([], 2))
    assert tree.size == 3 and set(tree.children[tree.root]) == {0, 1}


def test_laminar_tree_rejects_overlap():
    with pytest.raises(NotLaminar):
        laminar_tree(normalize_set_system([{0, 1}, {1, 2}], 3))


def test_tree_to_sets_examples():
    from tests.helpers import star_tree

    single = laminar_tree(normalize_set_system([], 1))
    assert tree_to_sets(single) == normalize_set_system([], 1)
    star = star_tree(3)
    assert tree_to_sets(star) == normalize_set_system([], 3)


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 10_000))
def test_roundtrip_random_laminar(seed):
    system = random_laminar_system(2 + seed % 6, seed)
    tree = laminar_tree(system)
    assert tree_to_sets(tree) == system
    assert tree.size <= 2 * system.n - 1
    assert all(len(tree.children[v]) >= 2 for v in tree.inner_nodes)


def test_node_ids_deterministic():
    system = random_laminar_system(7, 11)
    t1, t2 = laminar_tree(system), laminar_tree(system)
    assert t1 == t2
    assert all(t1.leaf_label[v] == v for v in range(system.n))


def test_bipartition_laminarity():
    trivial = normalize_bipartition_system([], 3)
    assert is_laminar_bipartitions(trivial)
    crossed = normalize_bipartition_system([{1, 2}, {1, 3}], 4)
    assert not is_laminar_bipartitions(crossed)
    assert is_laminar_bipartitions(normalize_bipartition_system([], 2))


def test_rooted_reduction_examples():
    trivial = normalize_bipartition_system([], 3)
    got = rooted_reduction(trivial, 0)
    assert got == normalize_set_system([{1, 2}], 3)
    with_pair = normalize_bipartition_system([{2, 3}], 4)
    assert mask_of({2, 3}) in rooted_reduction(with_pair, 0).members


def test_laminar_tree_bipartitions_star():
    tree = laminar_tree_bipartitions(normalize_bipartition_system([], 3))
    assert tree.size == 4
    hub = tree.inner_nodes[0]
    assert sorted(tree.adj[hub]) == [0, 1, 2]


def test_laminar_tree_bipartitions_two_inner():
    system = normalize_bipartition_system([{2, 3}], 4)
    tree = laminar_tree_bipartitions(system)
    assert len(tree.inner_nodes) == 2
    a, b = tree.inner_nodes
    assert b in tree.adj[a]
    assert unrooted_tree_to_bipartitions(tree) == system


def _random_laminar_bipartitions(n: int, seed: int) -> BipartitionSystem:
    tree = random_rooted_tree(2 * n - 1, seed)
    sides = [tree.leafset[v] for v in range(tree.size)]
    return BipartitionSystem.from_sides(tree.n_leaves, sides)


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 10_000))
def test_bipartition_roundtrips(seed):
    system = _random_laminar_bipartitions(3 + seed % 6, seed)
    assert is_laminar_bipartitions(system)
    reduced = rooted_reduction(system, 0)
    assert is_laminar(reduced)
    tree = laminar_tree_bipartitions(system)
    assert all(len(tree.adj[v]) >= 3 for v in tree.inner_nodes)
    assert sum(len(a) for a in tree.adj) // 2 == tree.size - 1
    assert unrooted_tree_to_bipartitions(tree) == system


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 10_000))
def test_anchor_independence(seed):
    """Rooting the reduction at 0 or 1 displays the same edge-cut family."""
    system = _random_laminar_bipartitions(3 + seed % 4, seed)
    n = system.n
    fm = (1 << n) - 1
    cuts = set()
    for anchor in (0, 1):
        tree = laminar_tree(rooted_reduction(system, anchor))
        family = {
            min(tree.leafset[v], fm & ~tree.leafset[v])
            for v in range(tree.size)
            if tree.leafset[v] not in (0, fm)
        }
        cuts.add(frozenset(family))
    assert len(cuts) == 1


def test_single_element_bipartitions():
    tree = laminar_tree_bipartitions(normalize_bipartition_system([], 1))
    assert tree.size == 1
    assert unrooted_tree_to_bipartitions(tree).family == ()
