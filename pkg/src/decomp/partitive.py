"""Closure-law recognition and canonical labelled trees.

Weakly-partitive set systems induce a rooted laminar tree over their strong
members whose inner nodes carry DEGENERATE / PRIME / LINEAR labels plus, per
LINEAR node, a linear order of the children; the labelled tree regenerates
the whole family.  Weakly-bipartitive bipartition systems induce the
analogous unrooted tree with cyclic neighbour orders.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Mapping

from .bitset import full_mask, popcount
from .core import BipartitionSystem, RootedTree, SetSystem, UnrootedTree, bipartitions_overlap, sets_overlap
from .errors import NotWeaklyBipartitive, NotWeaklyPartitive
from .laminar import laminar_tree, laminar_tree_bipartitions


class Label(Enum):
    DEGENERATE = "degenerate"
    PRIME = "prime"
    LINEAR = "linear"


@dataclass(frozen=True)
class WPTree:
    """Weakly-partitive tree: laminar tree of strong sets, labels, orders.

    ``order`` maps each LINEAR node to its children in canonical linear
    order (the orientation whose first child has the smaller node id).
    """

    tree: RootedTree
    label: Mapping[int, Label]
    order: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for t in self.tree.inner_nodes:
            if t not in self.label:
                raise NotWeaklyPartitive(f"inner node {t} unlabeled")
            if len(self.tree.children[t]) == 2 and self.label[t] is not Label.DEGENERATE:
                raise NotWeaklyPartitive("two-child nodes must be DEGENERATE")
        if set(self.order) != {t for t, lab in self.label.items() if lab is Label.LINEAR}:
            raise NotWeaklyPartitive("orders must exist exactly on LINEAR nodes")
        for t, seq in self.order.items():
            if sorted(seq) != sorted(self.tree.children[t]):
                raise NotWeaklyPartitive(f"order at {t} must arrange its children")


@dataclass(frozen=True)
class WBTree:
    """Weakly-bipartitive tree: unrooted laminar tree, labels, cyclic orders."""

    tree: UnrootedTree
    label: Mapping[int, Label]
    cyclic_order: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for t in self.tree.inner_nodes:
            if t not in self.label:
                raise NotWeaklyBipartitive(f"inner node {t} unlabeled")
            if len(self.tree.adj[t]) == 3 and self.label[t] is not Label.DEGENERATE:
                raise NotWeaklyBipartitive("degree-3 nodes must be DEGENERATE")
        if set(self.cyclic_order) != {t for t, lab in self.label.items() if lab is Label.LINEAR}:
            raise NotWeaklyBipartitive("cyclic orders must exist exactly on LINEAR nodes")
        for t, seq in self.cyclic_order.items():
            if sorted(seq) != sorted(self.tree.adj[t]):
                raise NotWeaklyBipartitive(f"cyclic order at {t} must arrange its neighbours")


# ---------------------------------------------------------------------------
# closure laws


def is_weakly_partitive(system: SetSystem) -> bool:
    """Overlapping members must have union, intersection and both differences
    in the family."""
    members = system.members
    for x, y in combinations(system.family, 2):
        if sets_overlap(x, y):
            if not {x | y, x & y, x & ~y, y & ~x} <= members:
                return False
    return True


def is_partitive(system: SetSystem) -> bool:
    """Weakly partitive plus closure under symmetric difference."""
    members = system.members
    for x, y in combinations(system.family, 2):
        if sets_overlap(x, y):
            if not {x | y, x & y, x & ~y, y & ~x, x ^ y} <= members:
                return False
    return True


def strong_members(system: SetSystem) -> SetSystem:
    """The laminar subfamily of members overlapping no other member."""
    fam = system.family
    strong = [x for x in fam if not any(sets_overlap(x, y) for y in fam if y != x)]
    return SetSystem.from_sets(system.n, strong)


def _bip_ops(x: int, y: int, n: int) -> list[int]:
    """Canonical sides of the four weak closure bipartitions of {X,~X},{Y,~Y}."""
    return [x | y, x & ~y, y & ~x, x & y]


def is_weakly_bipartitive(system: BipartitionSystem) -> bool:
    members = system.members
    n = system.n
    for x, y in combinations(system.family, 2):
        if bipartitions_overlap(x, y, n):
            if not set(_bip_ops(x, y, n)) <= members:
                return False
    return True


def is_bipartitive(system: BipartitionSystem) -> bool:
    members = system.members
    n = system.n
    for x, y in combinations(system.family, 2):
        if bipartitions_overlap(x, y, n):
            if not set(_bip_ops(x, y, n)) <= members or (x ^ y) not in members:
                return False
    return True


def strong_bipartitions(system: BipartitionSystem) -> BipartitionSystem:
    fam = system.family
    n = system.n
    strong = [x for x in fam if not any(bipartitions_overlap(x, y, n) for y in fam if y != x)]
    return BipartitionSystem.from_sides(n, strong)


# ---------------------------------------------------------------------------
# order reconstruction helpers


def normalize_linear_order(seq: tuple[int, ...]) -> tuple[int, ...]:
    """Of an order and its reverse, keep the one starting with the smaller id."""
    if len(seq) > 1 and seq[-1] < seq[0]:
        return tuple(reversed(seq))
    return tuple(seq)


def normalize_cyclic_order(seq: tuple[int, ...]) -> tuple[int, ...]:
    """Rotate the smallest id first, then orient towards its smaller neighbour."""
    if len(seq) <= 2:
        return tuple(seq)
    i = seq.index(min(seq))
    rotated = seq[i:] + seq[:i]
    if rotated[-1] < rotated[1]:
        rotated = (rotated[0],) + tuple(reversed(rotated[1:]))
    return tuple(rotated)


def _chain_path(items: list[int], adjacent: set[frozenset[int]], error) -> tuple[int, ...]:
    """Order ``items`` so that consecutive elements are exactly the
    ``adjacent`` pairs; they must form a Hamiltonian path."""
    if len(adjacent) != len(items) - 1:
        raise error("member pairs do not chain into a linear order")
    nbrs: dict[int, list[int]] = {c: [] for c in items}
    for pair in adjacent:
        a, b = tuple(pair)
        nbrs[a].append(b)
        nbrs[b].append(a)
    ends = [c for c in items if len(nbrs[c]) == 1]
    if len(ends) != 2 or any(len(nbrs[c]) > 2 for c in items):
        raise error("member pairs do not chain into a linear order")
    seq = [min(ends)]
    prev = None
    while len(seq) < len(items):
        nxt = [w for w in nbrs[seq[-1]] if w != prev]
        if len(nxt) != 1:
            raise error("member pairs do not chain into a linear order")
        prev = seq[-1]
        seq.append(nxt[0])
    return tuple(seq)


def _chain_cycle(items: list[int], adjacent: set[frozenset[int]], error) -> tuple[int, ...]:
    """Order ``items`` cyclically so consecutive pairs are exactly ``adjacent``."""
    if len(adjacent) != len(items):
        raise error("member pairs do not chain into a cyclic order")
    nbrs: dict[int, list[int]] = {c: [] for c in items}
    for pair in adjacent:
        a, b = tuple(pair)
        nbrs[a].append(b)
        nbrs[b].append(a)
    if any(len(v) != 2 for v in nbrs.values()):
        raise error("member pairs do not chain into a cyclic order")
    start = min(items)
    seq = [start]
    visited = {start}
    prev = None
    while len(seq) < len(items):
        nxt = [w for w in nbrs[seq[-1]] if w != prev]
        if not nxt or nxt[0] in visited:
            raise error("member pairs do not chain into a cyclic order")
        prev = seq[-1]
        seq.append(nxt[0])
        visited.add(nxt[0])
    if frozenset((seq[-1], seq[0])) not in adjacent:
        raise error("member pairs do not chain into a cyclic order")
    return tuple(seq)


# ---------------------------------------------------------------------------
# weakly-partitive trees


def weakly_partitive_tree(system: SetSystem) -> WPTree:
    """The canonical labelled tree of a weakly-partitive set system."""
    if not is_weakly_partitive(system):
        raise NotWeaklyPartitive("closure laws fail on an overlapping pair")
    strong = strong_members(system)
    tree = laminar_tree(strong)
    members = system.members
    node_of_set = {tree.leafset[v]: v for v in range(tree.size)}

    # place every non-strong member as a union of sibling subtrees
    displayed: dict[int, set[frozenset[int]]] = {t: set() for t in tree.inner_nodes}
    for m in system.family:
        if m in node_of_set:
            continue
        t = tree.root
        while True:
            inside = [c for c in tree.children[t] if tree.leafset[c] & m]
            if len(inside) == 1 and m & ~tree.leafset[inside[0]] == 0:
                t = inside[0]
                continue
            break
        group = []
        for c in tree.children[t]:
            block = tree.leafset[c]
            if block & m:
                if block & ~m:
                    raise NotWeaklyPartitive(f"member {m:#x} straddles a strong set")
                group.append(c)
        union = 0
        for c in group:
            union |= tree.leafset[c]
        if union != m:
            raise NotWeaklyPartitive(f"member {m:#x} is not a union of sibling subtrees")
        displayed[t].add(frozenset(group))

    label: dict[int, Label] = {}
    order: dict[int, tuple[int, ...]] = {}
    for t in tree.inner_nodes:
        kids = tree.children[t]
        if all(
            (tree.leafset[c1] | tree.leafset[c2]) in members
            for c1, c2 in combinations(kids, 2)
        ):
            label[t] = Label.DEGENERATE
        elif displayed[t]:
            label[t] = Label.LINEAR
            order[t] = _linear_order_at(tree, t, members, displayed[t])
        else:
            label[t] = Label.PRIME
    return WPTree(tree, label, order)


def _linear_order_at(
    tree: RootedTree, t: int, members: frozenset[int], shown: set[frozenset[int]]
) -> tuple[int, ...]:
    kids = list(tree.children[t])
    pairs = {
        frozenset((c1, c2))
        for c1, c2 in combinations(kids, 2)
        if (tree.leafset[c1] | tree.leafset[c2]) in members
    }
    seq = _chain_path(kids, pairs, NotWeaklyPartitive)
    pos = {c: i for i, c in enumerate(seq)}
    for group in shown:
        span = [pos[c] for c in group]
        if max(span) - min(span) + 1 != len(group):
            raise NotWeaklyPartitive("a displayed member is not an order interval")
    for i in range(len(seq)):
        union = 0
        for j in range(i, len(seq)):
            union |= tree.leafset[seq[j]]
            if i == 0 and j == len(seq) - 1:
                continue
            if j > i and union not in members:
                raise NotWeaklyPartitive("an order interval is missing from the family")
    return normalize_linear_order(seq)


def generate_family(wpt: WPTree) -> SetSystem:
    """All sets displayed by a weakly-partitive tree, normalized."""
    tree = wpt.tree
    out = set(tree.leafset)
    for t in tree.inner_nodes:
        lab = wpt.label[t]
        if lab is Label.DEGENERATE:
            masks = [tree.leafset[c] for c in tree.children[t]]
            # all unions over non-empty child subsets
            unions = [0]
            for mk in masks:
                unions = [u | mk for u in unions] + unions
            out.update(u for u in unions if u)
        elif lab is Label.LINEAR:
            seq = wpt.order[t]
            for i in range(len(seq)):
                union = 0
                for j in range(i, len(seq)):
                    union |= tree.leafset[seq[j]]
                    out.add(union)
    return SetSystem.from_sets(tree.n_leaves, out)


def wp_betweenness_triples(wpt: WPTree) -> frozenset[tuple[int, int, int]]:
    """Triples (x, y, z) of children with y strictly between x and z in some
    LINEAR order (either orientation)."""
    triples = set()
    for t, seq in wpt.order.items():
        pos = {c: i for i, c in enumerate(seq)}
        for x, y, z in combinations(seq, 3):
            a, b, c = sorted((x, y, z), key=pos.get)
            triples.add((a, b, c))
            triples.add((c, b, a))
    return frozenset(triples)


# ---------------------------------------------------------------------------
# weakly-bipartitive trees


def weakly_bipartitive_tree(system: BipartitionSystem) -> WBTree:
    """The canonical labelled unrooted tree of a weakly-bipartitive system."""
    if not is_weakly_bipartitive(system):
        raise NotWeaklyBipartitive("closure laws fail on an overlapping pair")
    strong = strong_bipartitions(system)
    tree = laminar_tree_bipartitions(strong)
    members = system.members
    fm = full_mask(system.n)

    def canon(mask: int) -> int:
        return fm & ~mask if mask & 1 else mask

    cut_sides = {canon(tree.side_leafset(u, v)) for u, v in tree.edges()}
    if system.n == 1:
        return WBTree(tree, {}, {})

    displayed: dict[int, set[frozenset[int]]] = {t: set() for t in tree.inner_nodes}
    for m in system.family:
        if m in cut_sides:
            continue
        home = None
        for t in tree.inner_nodes:
            group = []
            ok = True
            for s in tree.adj[t]:
                block = tree.side_leafset(t, s)
                if block & m:
                    if block & ~m:
                        ok = False
                        break
                    group.append(s)
            if ok and 2 <= len(group) <= len(tree.adj[t]) - 2:
                home = (t, frozenset(group))
                break
        if home is None:
            raise NotWeaklyBipartitive(f"member side {m:#x} fits no tree node")
        displayed[home[0]].add(home[1])

    label: dict[int, Label] = {}
    cyclic: dict[int, tuple[int, ...]] = {}
    for t in tree.inner_nodes:
        nbrs = list(tree.adj[t])
        if all(
            canon(tree.side_leafset(t, s1) | tree.side_leafset(t, s2)) in members
            for s1, s2 in combinations(nbrs, 2)
        ):
            label[t] = Label.DEGENERATE
        elif displayed[t]:
            label[t] = Label.LINEAR
            cyclic[t] = _cyclic_order_at(tree, t, members, displayed[t], canon)
        else:
            label[t] = Label.PRIME
    return WBTree(tree, label, cyclic)


def _cyclic_order_at(
    tree: UnrootedTree, t: int, members, shown: set[frozenset[int]], canon
) -> tuple[int, ...]:
    nbrs = list(tree.adj[t])
    pairs = {
        frozenset((s1, s2))
        for s1, s2 in combinations(nbrs, 2)
        if canon(tree.side_leafset(t, s1) | tree.side_leafset(t, s2)) in members
    }
    seq = _chain_cycle(nbrs, pairs, NotWeaklyBipartitive)
    pos = {s: i for i, s in enumerate(seq)}
    d = len(seq)
    for group in shown:
        span = sorted(pos[s] for s in group)
        gaps = [(span[(i + 1) % len(span)] - span[i]) % d for i in range(len(span))]
        if sorted(gaps)[:-1] != [1] * (len(span) - 1):
            raise NotWeaklyBipartitive("a displayed member is not a cyclic interval")
    for start in range(d):
        union = 0
        for length in range(1, d - 1):
            union |= tree.side_leafset(t, seq[(start + length - 1) % d])
            if length >= 2 and canon(union) not in members:
                raise NotWeaklyBipartitive("a cyclic interval is missing from the family")
    return normalize_cyclic_order(seq)


def generate_bipartition_family(wbt: WBTree) -> BipartitionSystem:
    """All bipartitions displayed by a weakly-bipartitive tree, normalized."""
    tree = wbt.tree
    n = tree.n_leaves
    sides = [tree.side_leafset(u, v) for u, v in tree.edges()]
    for t in tree.inner_nodes:
        lab = wbt.label[t]
        nbrs = tree.adj[t]
        if lab is Label.DEGENERATE:
            masks = [tree.side_leafset(t, s) for s in nbrs]
            stack = [0]
            for m in masks:
                stack = [x | m for x in stack] + stack
            sides.extend(x for x in stack if x and popcount(x) < n)
        elif lab is Label.LINEAR:
            seq = wbt.cyclic_order[t]
            d = len(seq)
            for start in range(d):
                union = 0
                for length in range(1, d):
                    union |= tree.side_leafset(t, seq[(start + length - 1) % d])
                    sides.append(union)
    return BipartitionSystem.from_sides(n, sides)


def wb_cross_tuples(wbt: WBTree) -> frozenset[tuple[int, int, int, int, int]]:
    """5-tuples (t, w, x, y, z) where chord w-y crosses chord x-z in the
    cyclic order at t."""
    out = set()
    for t, seq in wbt.cyclic_order.items():
        pos = {s: i for i, s in enumerate(seq)}
        d = len(seq)
        for w, x, y, z in _distinct_quads(seq):
            arc = set()
            i = (pos[w] + 1) % d
            while i != pos[y]:
                arc.add(seq[i])
                i = (i + 1) % d
            if (x in arc) != (z in arc):
                out.add((t, w, x, y, z))
    return frozenset(out)


def _distinct_quads(seq):
    from itertools import permutations

    return permutations(seq, 4)
