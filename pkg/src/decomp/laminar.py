"""Laminarity tests and laminar-tree construction/inversion.

Rooted trees represent laminar set systems; unrooted trees represent laminar
bipartition systems through the rooted reduction at an anchor element.
"""

from __future__ import annotations

from itertools import combinations

from .bitset import bits, full_mask, is_subset, popcount, sort_key
from .core import BipartitionSystem, RootedTree, SetSystem, UnrootedTree, bipartitions_overlap, sets_overlap
from .errors import DecompError, NotLaminar


def is_laminar(system: SetSystem) -> bool:
    """True iff no two family members overlap."""
    fam = system.family
    return not any(sets_overlap(x, y) for x, y in combinations(fam, 2))


def laminar_tree(system: SetSystem) -> RootedTree:
    """The laminar tree of a laminar set system.

    One node per family member, the root is the universe, ancestry is set
    inclusion.  Node ids are deterministic: leaf ids equal their universe
    element, inner ids follow in canonical family order.
    """
    if not is_laminar(system):
        raise NotLaminar("family contains an overlapping pair")
    n = system.n
    singles = {1 << a for a in range(n)}
    inner_sets = [m for m in system.family if m not in singles]
    node_of_set: dict[int, int] = {1 << a: a for a in range(n)}
    for i, m in enumerate(inner_sets):
        node_of_set[m] = n + i
    size = n + len(inner_sets)
    parent: list[int | None] = [None] * size
    # attach each set to its smallest proper superset; equal sizes cannot nest
    by_size = sorted(system.family, key=sort_key)
    for m in by_size:
        if m == full_mask(n):
            continue
        best = None
        for cand in by_size:
            if cand != m and is_subset(m, cand) and (best is None or popcount(cand) < popcount(best)):
                best = cand
                if popcount(cand) == popcount(m) + 1:
                    break
        parent[node_of_set[m]] = node_of_set[best]  # type: ignore[index]
    leaf_label: list[int | None] = [None] * size
    for a in range(n):
        if n == 1:
            leaf_label[node_of_set[1]] = 0
        else:
            leaf_label[a] = a
    return RootedTree(tuple(parent), tuple(leaf_label))


def tree_to_sets(tree: RootedTree) -> SetSystem:
    """The family of leaf sets of all subtrees, as a normalized set system."""
    return SetSystem.from_sets(tree.n_leaves, tree.leafset)


def is_laminar_bipartitions(system: BipartitionSystem) -> bool:
    """True iff no two member bipartitions overlap."""
    fam = system.family
    n = system.n
    return not any(bipartitions_overlap(x, y, n) for x, y in combinations(fam, 2))


def rooted_reduction(system: BipartitionSystem, anchor: int) -> SetSystem:
    """The set system of member sides avoiding the anchor, plus {anchor} and U."""
    if not 0 <= anchor < system.n:
        raise DecompError(f"anchor {anchor} outside the universe")
    sides = [m for m in system.family]
    fm = full_mask(system.n)
    avoid = []
    for m in sides:
        comp = fm & ~m
        if not m >> anchor & 1:
            avoid.append(m)
        if not comp >> anchor & 1:
            avoid.append(comp)
    avoid.append(1 << anchor)
    avoid.append(fm)
    return SetSystem.from_sets(system.n, avoid)


def laminar_tree_bipartitions(system: BipartitionSystem) -> UnrootedTree:
    """The unrooted laminar tree of a laminar bipartition system.

    Built by rooting through ``rooted_reduction(system, 0)``, removing the
    root of the resulting rooted laminar tree and splicing leaf {0} onto the
    node carrying ``U minus {0}``.  Each member bipartition is the edge cut
    of exactly one tree edge.
    """
    if not is_laminar_bipartitions(system):
        raise NotLaminar("bipartition family contains an overlapping pair")
    n = system.n
    rooted = laminar_tree(rooted_reduction(system, 0))
    if n == 1:
        return UnrootedTree(((),), (0,))
    size = rooted.size
    root = rooted.root
    # drop the root; remaining ids are compacted with leaves first
    keep = [v for v in range(size) if v != root]
    new_id = {v: i for i, v in enumerate(keep)}
    adj: list[list[int]] = [[] for _ in keep]
    for v in keep:
        p = rooted.parent[v]
        if p is not None and p != root:
            adj[new_id[v]].append(new_id[p])
            adj[new_id[p]].append(new_id[v])
    # the root of the rooted reduction has exactly the children {0} and U-{0}
    anchor_leaf = new_id[rooted.leaf_of_element[0]]
    big = full_mask(n) & ~1
    big_node = new_id[next(v for v in range(size) if rooted.leafset[v] == big and v != root)]
    adj[anchor_leaf].append(big_node)
    adj[big_node].append(anchor_leaf)
    leaf_label = tuple(rooted.leaf_label[v] for v in keep)
    return UnrootedTree(tuple(tuple(sorted(nb)) for nb in adj), leaf_label)


def unrooted_tree_to_bipartitions(tree: UnrootedTree) -> BipartitionSystem:
    """The edge-cut family of an unrooted tree with labelled leaves."""
    n = tree.n_leaves
    sides = [tree.side_leafset(u, v) for u, v in tree.edges()]
    return BipartitionSystem.from_sides(n, sides)
