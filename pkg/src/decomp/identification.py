"""Identifying inner tree nodes by pairs of leaf representatives.

A bi-colouring (A, B) of the leaves identifies a set S of inner nodes when
there is a unique-request pair of injections (pi, sigma) from S to the leaves
with images A and B such that each s in S is the least common ancestor of
pi(s) and sigma(s).  Thin sets of inner nodes are always identifiable, and
the inner nodes of any tree split into at most four thin classes; together
this lets four bi-colourings pin down the whole tree shape from leaf data
alone, which is what the transductions exploit.

Colour sets are bitsets over universe elements; injections map tree nodes to
leaf node ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .bitset import bits, popcount
from .core import RootedTree
from .errors import Inconsistent, NodeInX, NotThin


@dataclass(frozen=True)
class BiColouring:
    """Disjoint leaf subsets (element bitsets); the A-side and B-side colours."""

    a: int
    b: int

    def __post_init__(self):
        if self.a & self.b:
            raise Inconsistent("colour sets must be disjoint")

    def swapped(self) -> "BiColouring":
        return BiColouring(self.b, self.a)


@dataclass(frozen=True)
class IdPair:
    """Injections pi, sigma from a set of inner nodes to leaf node ids."""

    domain: frozenset[int]
    pi: tuple[tuple[int, int], ...]
    sigma: tuple[tuple[int, int], ...]

    @classmethod
    def from_maps(cls, pi: dict[int, int], sigma: dict[int, int]) -> "IdPair":
        if set(pi) != set(sigma):
            raise Inconsistent("pi and sigma must share their domain")
        if len(set(pi.values())) != len(pi) or len(set(sigma.values())) != len(sigma):
            raise Inconsistent("pi and sigma must be injective")
        return cls(
            frozenset(pi),
            tuple(sorted(pi.items())),
            tuple(sorted(sigma.items())),
        )

    @property
    def pi_map(self) -> dict[int, int]:
        return dict(self.pi)

    @property
    def sigma_map(self) -> dict[int, int]:
        return dict(self.sigma)

    def colouring(self, tree: RootedTree) -> BiColouring:
        a = 0
        b = 0
        for _, leaf in self.pi:
            a |= 1 << tree.leaf_label[leaf]  # type: ignore[operator]
        for _, leaf in self.sigma:
            b |= 1 << tree.leaf_label[leaf]  # type: ignore[operator]
        return BiColouring(a, b)


@dataclass(frozen=True)
class ThinPartition:
    """Four disjoint thin classes (possibly empty) covering the inner nodes."""

    classes: tuple[frozenset[int], frozenset[int], frozenset[int], frozenset[int]]


class NodeCase(Enum):
    UNREQUESTED = "unrequested"
    REQUESTED_ONLY = "requested-only"
    IN_S = "in-S"


def is_thin(tree: RootedTree, nodes: frozenset[int] | set[int]) -> bool:
    """Thinness: no member's parent is a member, every non-root member has a
    sibling outside the set (leaves count as siblings)."""
    inner = set(tree.inner_nodes)
    if not set(nodes) <= inner:
        return False
    for x in nodes:
        p = tree.parent[x]
        if p is None:
            continue
        if p in nodes:
            return False
        if all(sib in nodes for sib in tree.children[p] if sib != x):
            return False
    return True


def thin_4_partition(tree: RootedTree) -> ThinPartition:
    """Split the inner nodes by depth parity crossed with membership in the
    set of designated children (smallest-id child of each inner node)."""
    designated = set()
    for x in tree.inner_nodes:
        c = min(tree.children[x])
        if tree.children[c]:
            designated.add(c)
    buckets: list[set[int]] = [set(), set(), set(), set()]
    for x in tree.inner_nodes:
        idx = (tree.depth[x] % 2) * 2 + (1 if x in designated else 0)
        buckets[idx].add(x)
    return ThinPartition(tuple(frozenset(b) for b in buckets))  # type: ignore[arg-type]


def _avoiding_descent(tree: RootedTree, avoided: frozenset[int] | set[int], start: int) -> int:
    v = start
    while tree.children[v]:
        v = min(c for c in tree.children[v] if c not in avoided)
    return v


def avoiding_leaf(tree: RootedTree, avoided: frozenset[int] | set[int], start: int) -> int:
    """A leaf below ``start`` whose path up to ``start`` avoids the thin set.

    Deterministic: always descends through the smallest-id child outside the
    avoided set.
    """
    if start in avoided:
        raise NodeInX(f"node {start} belongs to the avoided set")
    if not is_thin(tree, avoided):
        raise NotThin("avoided set is not thin")
    return _avoiding_descent(tree, avoided, start)


def identify_thin(tree: RootedTree, thin_set: frozenset[int] | set[int]) -> IdPair:
    """A unique-request pair identifying a thin set.

    Follows the inductive proof: per member, pick the two smallest children
    (never members, since members' parents are outside the set) and walk down
    avoiding paths to leaves.
    """
    if not is_thin(tree, thin_set):
        raise NotThin("input set is not thin")
    avoided = frozenset(thin_set)
    pi: dict[int, int] = {}
    sigma: dict[int, int] = {}
    for s in sorted(thin_set, key=lambda v: (tree.depth[v], v)):
        c_a, c_b = sorted(tree.children[s])[:2]
        pi[s] = _avoiding_descent(tree, avoided, c_a)
        sigma[s] = _avoiding_descent(tree, avoided, c_b)
    return IdPair.from_maps(pi, sigma)


def request_paths(tree: RootedTree, pair: IdPair) -> dict[int, tuple[int, ...]]:
    """Witness path of each member: the leaf-to-leaf path through the member."""
    pi, sigma = pair.pi_map, pair.sigma_map
    return {s: tree.path(pi[s], sigma[s]) for s in pair.domain}


def has_unique_request(tree: RootedTree, pair: IdPair) -> bool:
    """True iff every node lies on at most one witness path."""
    seen: set[int] = set()
    for path in request_paths(tree, pair).values():
        for v in path:
            if v in seen:
                return False
            seen.add(v)
    return True


def _child_colour_diffs(tree: RootedTree, colouring: BiColouring, x: int) -> list[int]:
    return [
        popcount(colouring.a & tree.leafset[c]) - popcount(colouring.b & tree.leafset[c])
        for c in tree.children[x]
    ]


def classify_node(tree: RootedTree, colouring: BiColouring, x: int) -> NodeCase:
    """Which of the three identification cases an inner node falls into.

    With per-child surpluses d_c = |A on child| - |B on child| the trichotomy
    is: all zero (unrequested); exactly one nonzero equal to +-1 (requested
    but outside S); exactly one +1 and one -1 on distinct children (in S).
    Any other pattern means (A, B) identifies nothing.
    """
    if not tree.children[x]:
        raise Inconsistent(f"node {x} is a leaf")
    diffs = _child_colour_diffs(tree, colouring, x)
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        return NodeCase.UNREQUESTED
    if sorted(nonzero) == [-1, 1]:
        return NodeCase.IN_S
    if nonzero in ([1], [-1]):
        return NodeCase.REQUESTED_ONLY
    raise Inconsistent(f"node {x}: colour surplus pattern {diffs} fits no case")


def decode(tree: RootedTree, colouring: BiColouring) -> IdPair:
    """Recover the unique identified set and its representative maps.

    S consists of the inner nodes classified in-S; the member represented by
    a colour leaf is its least ancestor inside S.  Raises Inconsistent when
    the colouring identifies nothing.
    """
    if popcount(colouring.a) != popcount(colouring.b):
        raise Inconsistent("colour sets must have equal cardinality")
    members = set()
    for x in tree.inner_nodes:
        if classify_node(tree, colouring, x) is NodeCase.IN_S:
            members.add(x)
    pi = _assign_representatives(tree, colouring.a, members)
    sigma = _assign_representatives(tree, colouring.b, members)
    pair = IdPair.from_maps(pi, sigma)
    for s in members:
        if tree.lca(pi[s], sigma[s]) != s:
            raise Inconsistent(f"member {s} is not the lca of its representatives")
    if not has_unique_request(tree, pair):
        raise Inconsistent("decoded pair violates unique request")
    return pair


def _assign_representatives(tree: RootedTree, colour: int, members: set[int]) -> dict[int, int]:
    mapping: dict[int, int] = {}
    for element in bits(colour):
        leaf = tree.leaf_of_element[element]
        v: int | None = leaf
        while v is not None and v not in members:
            v = tree.parent[v]
        if v is None:
            raise Inconsistent(f"colour element {element} has no ancestor in S")
        if v in mapping:
            raise Inconsistent(f"member {v} has two representatives in one colour")
        mapping[v] = leaf
    if len(mapping) != len(members):
        raise Inconsistent("some member received no representative")
    return mapping


def four_bicolourings(tree: RootedTree) -> list[tuple[BiColouring, frozenset[int]]]:
    """Four bi-colourings jointly identifying every inner node.

    One entry per thin class of the 4-partition, in class order; empty
    classes yield empty colourings so downstream indexing stays stable.
    """
    out = []
    for cls in thin_4_partition(tree).classes:
        pair = identify_thin(tree, cls)
        out.append((pair.colouring(tree), cls))
    return out
