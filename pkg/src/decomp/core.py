"""Foundational value types: graphs, trees, set systems, relational structures.

Universe elements are dense integers ``0..n-1`` throughout; subsets travel as
int bitsets (see :mod:`decomp.bitset`).  All types are immutable after
construction and validate their invariants eagerly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .bitset import bits, full_mask, is_subset, mask_of, sort_key
from .errors import DecompError


def _as_mask(x: int | Iterable[int]) -> int:
    if isinstance(x, int):
        return x
    return mask_of(x)


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class DiGraph:
    """Finite directed graph on vertices ``0..n-1`` with bit-matrix adjacency.

    ``adj[u]`` has bit ``v`` set exactly when the edge ``u -> v`` exists.
    Undirected graphs are the symmetric special case.
    """

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise DecompError("graphs must have at least one vertex")
        if len(self.adj) != self.n:
            raise DecompError("adjacency row count must equal n")
        fm = full_mask(self.n)
        for u, row in enumerate(self.adj):
            if row & ~fm:
                raise DecompError("adjacency row exceeds vertex range")
            if row >> u & 1:
                raise DecompError(f"self-loop at vertex {u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], directed: bool = True) -> "DiGraph":
        adj = [0] * n
        for u, v in edges:
            adj[u] |= 1 << v
            if not directed:
                adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @cached_property
    def radj(self) -> tuple[int, ...]:
        """Reverse adjacency: ``radj[v]`` bit ``u`` set iff ``u -> v``."""
        rows = [0] * self.n
        for u, row in enumerate(self.adj):
            for v in bits(row):
                rows[v] |= 1 << u
        return tuple(rows)

    @cached_property
    def undirected(self) -> bool:
        return self.adj == self.radj

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u])]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def is_connected(self) -> bool:
        """Weak connectivity: the underlying undirected graph is connected."""
        if self.n == 1:
            return True
        sym = [self.adj[u] | self.radj[u] for u in range(self.n)]
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for u in bits(frontier):
                nxt |= sym[u]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == full_mask(self.n)

    def is_strongly_connected(self) -> bool:
        for rows in (self.adj, self.radj):
            seen = 1
            frontier = 1
            while frontier:
                nxt = 0
                for u in bits(frontier):
                    nxt |= rows[u]
                frontier = nxt & ~seen
                seen |= frontier
            if seen != full_mask(self.n):
                return False
        return True

    def induced(self, vertices: Iterable[int] | int) -> tuple["DiGraph", tuple[int, ...]]:
        """Induced subgraph plus the map from new ids to original vertices."""
        keep = sorted(bits(_as_mask(vertices)))
        pos = {v: i for i, v in enumerate(keep)}
        adj = [0] * len(keep)
        for v in keep:
            for w in bits(self.adj[v]):
                if w in pos:
                    adj[pos[v]] |= 1 << pos[w]
        return DiGraph(len(keep), tuple(adj)), tuple(keep)


# ---------------------------------------------------------------------------
# set and bipartition systems


def sets_overlap(x: int | Iterable[int], y: int | Iterable[int]) -> bool:
    """True iff the two subsets intersect and neither contains the other."""
    xm, ym = _as_mask(x), _as_mask(y)
    return bool(xm & ym) and bool(xm & ~ym) and bool(ym & ~xm)


def bipartitions_overlap(b1: int | Iterable[int], b2: int | Iterable[int], n: int) -> bool:
    """True iff all four pairwise side intersections are non-empty.

    Each bipartition is given by one of its sides; the other side is the
    complement within the ``n``-element universe.
    """
    fm = full_mask(n)
    x, y = _as_mask(b1) & fm, _as_mask(b2) & fm
    return bool(x & y) and bool(x & ~y & fm) and bool(~x & y & fm) and bool(~x & ~y & fm)


@dataclass(frozen=True)
class SetSystem:
    """Normalized set system: family contains the universe and all singletons.

    The family is stored deduplicated in canonical order (cardinality, then
    bit representation); the empty set is never a member.
    """

    n: int
    family: tuple[int, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise DecompError("set systems need a non-empty universe")
        fm = full_mask(self.n)
        seen = set()
        prev = None
        for m in self.family:
            if m == 0 or m & ~fm:
                raise DecompError("family member out of range or empty")
            if m in seen:
                raise DecompError("family contains duplicates")
            seen.add(m)
            if prev is not None and sort_key(m) < sort_key(prev):
                raise DecompError("family not in canonical order")
            prev = m
        if fm not in seen:
            raise DecompError("universe missing from family")
        for a in range(self.n):
            if (1 << a) not in seen:
                raise DecompError(f"singleton {{{a}}} missing from family")

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[int | Iterable[int]]) -> "SetSystem":
        return normalize_set_system(sets, n)

    @cached_property
    def members(self) -> frozenset[int]:
        return frozenset(self.family)

    def __contains__(self, subset: int | Iterable[int]) -> bool:
        return _as_mask(subset) in self.members

    def sets(self) -> list[tuple[int, ...]]:
        return [tuple(bits(m)) for m in self.family]


def normalize_set_system(raw: Iterable[int | Iterable[int]], n: int) -> SetSystem:
    """Close a raw family under the set-system conventions.

    Adds the universe and all singletons, removes the empty set, deduplicates
    and sorts canonically.  Total: never fails on in-range input.
    """
    if n <= 0:
        raise DecompError("set systems need a non-empty universe")
    fm = full_mask(n)
    members = set()
    for subset in raw:
        m = _as_mask(subset)
        if m & ~fm:
            raise DecompError("subset outside the universe")
        if m:
            members.add(m)
    members.add(fm)
    members.update(1 << a for a in range(n))
    return SetSystem(n, tuple(sorted(members, key=sort_key)))


@dataclass(frozen=True)
class BipartitionSystem:
    """Normalized bipartition system over ``0..n-1``.

    Each member ``{X, U \\ X}`` is stored canonically as the side that does
    not contain element 0.  All trivial bipartitions are present and
    ``{empty, U}`` never is.
    """

    n: int
    family: tuple[int, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise DecompError("bipartition systems need a non-empty universe")
        fm = full_mask(self.n)
        seen = set()
        prev = None
        for m in self.family:
            if m == 0 or m & ~fm or m & 1:
                raise DecompError("non-canonical or out-of-range bipartition side")
            if m in seen:
                raise DecompError("family contains duplicates")
            seen.add(m)
            if prev is not None and sort_key(m) < sort_key(prev):
                raise DecompError("family not in canonical order")
            prev = m
        for a in range(1, self.n):
            if (1 << a) not in seen:
                raise DecompError(f"trivial bipartition of {a} missing")
        if self.n > 1 and fm & ~1 not in seen:
            raise DecompError("trivial bipartition of 0 missing")

    @classmethod
    def from_sides(cls, n: int, sides: Iterable[int | Iterable[int]]) -> "BipartitionSystem":
        return normalize_bipartition_system(sides, n)

    @cached_property
    def members(self) -> frozenset[int]:
        return frozenset(self.family)

    def canonical(self, side: int | Iterable[int]) -> int:
        m = _as_mask(side)
        return full_mask(self.n) & ~m if m & 1 else m

    def __contains__(self, side: int | Iterable[int]) -> bool:
        return self.canonical(side) in self.members

    def sides(self) -> list[tuple[int, ...]]:
        return [tuple(bits(m)) for m in self.family]


def normalize_bipartition_system(raw: Iterable[int | Iterable[int]], n: int) -> BipartitionSystem:
    """Canonicalize sides, drop ``{empty, U}``, add all trivial bipartitions."""
    if n <= 0:
        raise DecompError("bipartition systems need a non-empty universe")
    fm = full_mask(n)
    members = set()
    for side in raw:
        m = _as_mask(side)
        if m & ~fm:
            raise DecompError("side outside the universe")
        if m & 1:
            m = fm & ~m
        if m:
            members.add(m)
    for a in range(1, n):
        members.add(1 << a)
    if n > 1:
        members.add(fm & ~1)
    return BipartitionSystem(n, tuple(sorted(members, key=sort_key)))


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree with labelled leaves.

    ``parent[v]`` is the parent node id or None for the root; ``leaf_label[v]``
    is the universe element carried by leaf ``v`` (None on inner nodes).
    Every node is one of its own ancestors.  Inner nodes have at least two
    children, which is the laminar-tree contract.
    """

    parent: tuple[int | None, ...]
    leaf_label: tuple[int | None, ...]

    def __post_init__(self):
        size = len(self.parent)
        if size == 0 or len(self.leaf_label) != size:
            raise DecompError("malformed tree arrays")
        roots = [v for v in range(size) if self.parent[v] is None]
        if len(roots) != 1:
            raise DecompError("rooted trees need exactly one root")
        # depth computation doubles as an acyclicity check
        self.depth  # noqa: B018
        labels = [self.leaf_label[v] for v in self.leaves]
        if any(lab is None for lab in labels) or sorted(labels) != list(range(len(labels))):
            raise DecompError("leaf labels must biject onto 0..n-1")
        if any(self.leaf_label[v] is not None for v in range(size) if self.children[v]):
            raise DecompError("inner nodes must not carry leaf labels")
        for v in range(size):
            if len(self.children[v]) == 1:
                raise DecompError(f"inner node {v} has a single child")

    @property
    def size(self) -> int:
        return len(self.parent)

    @cached_property
    def root(self) -> int:
        return next(v for v in range(self.size) if self.parent[v] is None)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in range(self.size)]
        for v, p in enumerate(self.parent):
            if p is not None:
                kids[p].append(v)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d: list[int | None] = [None] * self.size
        for v in range(self.size):
            chain = []
            u: int | None = v
            while u is not None and d[u] is None:
                chain.append(u)
                u = self.parent[u]
                if len(chain) > self.size:
                    raise DecompError("parent pointers contain a cycle")
            base = 0 if u is None else d[u] + 1
            for w in reversed(chain):
                d[w] = base
                base += 1
        return tuple(d)  # type: ignore[arg-type]

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.size) if not self.children[v])

    @cached_property
    def inner_nodes(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.size) if self.children[v])

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @cached_property
    def leaf_of_element(self) -> dict[int, int]:
        return {self.leaf_label[v]: v for v in self.leaves}  # type: ignore[misc]

    @cached_property
    def leafset(self) -> tuple[int, ...]:
        """Per node, the bitset of universe elements below it (itself if leaf)."""
        masks = [0] * self.size
        for v in sorted(range(self.size), key=lambda v: -self.depth[v]):
            if not self.children[v]:
                masks[v] = 1 << self.leaf_label[v]  # type: ignore[operator]
            else:
                m = 0
                for c in self.children[v]:
                    m |= masks[c]
                masks[v] = m
        return tuple(masks)

    def is_ancestor(self, u: int, v: int) -> bool:
        """Reflexive ancestor test by walking parent pointers."""
        w: int | None = v
        while w is not None:
            if w == u:
                return True
            w = self.parent[w]
        return False

    def lca(self, u: int, v: int) -> int:
        du, dv = self.depth[u], self.depth[v]
        while du > dv:
            u = self.parent[u]  # type: ignore[assignment]
            du -= 1
        while dv > du:
            v = self.parent[v]  # type: ignore[assignment]
            dv -= 1
        while u != v:
            u = self.parent[u]  # type: ignore[assignment]
            v = self.parent[v]  # type: ignore[assignment]
        return u

    def path(self, u: int, v: int) -> tuple[int, ...]:
        """Node sequence from u to v through their least common ancestor."""
        top = self.lca(u, v)
        up = []
        w = u
        while w != top:
            up.append(w)
            w = self.parent[w]  # type: ignore[assignment]
        down = []
        w = v
        while w != top:
            down.append(w)
            w = self.parent[w]  # type: ignore[assignment]
        return tuple(up + [top] + down[::-1])


@dataclass(frozen=True)
class UnrootedTree:
    """Unrooted tree with labelled leaves and all inner degrees >= 3."""

    adj: tuple[tuple[int, ...], ...]
    leaf_label: tuple[int | None, ...]

    def __post_init__(self):
        size = len(self.adj)
        if size == 0 or len(self.leaf_label) != size:
            raise DecompError("malformed tree arrays")
        edge_count = sum(len(nb) for nb in self.adj)
        if edge_count != 2 * (size - 1):
            raise DecompError("trees have exactly size-1 edges")
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                if v not in self.adj[w]:
                    raise DecompError("adjacency is not symmetric")
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != size:
            raise DecompError("tree is not connected")
        for v in range(size):
            if len(self.adj[v]) == 2:
                raise DecompError(f"inner node {v} has degree 2")
        labels = [self.leaf_label[v] for v in self.leaves]
        if any(lab is None for lab in labels) or sorted(labels) != list(range(len(labels))):
            raise DecompError("leaf labels must biject onto 0..n-1")
        if any(self.leaf_label[v] is not None for v in self.inner_nodes):
            raise DecompError("inner nodes must not carry leaf labels")

    @property
    def size(self) -> int:
        return len(self.adj)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.size) if len(self.adj[v]) <= 1)

    @cached_property
    def inner_nodes(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.size) if len(self.adj[v]) > 1)

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @cached_property
    def leaf_of_element(self) -> dict[int, int]:
        return {self.leaf_label[v]: v for v in self.leaves}  # type: ignore[misc]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range((self.size)) for v in self.adj[u] if u < v]

    @cached_property
    def _side_cache(self) -> dict[tuple[int, int], int]:
        return {}

    def side_leafset(self, t: int, s: int) -> int:
        """Bitset of elements whose leaves lie in the component of T-t containing s."""
        key = (t, s)
        cached = self._side_cache.get(key)
        if cached is not None:
            return cached
        mask = 0
        stack = [s]
        seen = {t, s}
        while stack:
            v = stack.pop()
            lab = self.leaf_label[v]
            if lab is not None:
                mask |= 1 << lab
            for w in self.adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        self._side_cache[key] = mask
        return mask

    def path(self, u: int, v: int) -> tuple[int, ...]:
        prev = {u: None}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                break
            for w in self.adj[x]:
                if w not in prev:
                    prev[w] = x
                    stack.append(w)
        out = [v]
        while out[-1] != u:
            out.append(prev[out[-1]])  # type: ignore[arg-type]
        return tuple(reversed(out))


# ---------------------------------------------------------------------------
# extended relational structures

EDGE = "edge"
ANCESTOR = "ancestor"
T_EDGE = "t-edge"
C_EDGE = "c-edge"
R_EDGE = "r-edge"
M_EDGE = "m-edge"
SET = "SET"
BIPART = "BIPART"
STRONG_SET = "STRONGSET"


@dataclass(frozen=True, eq=True)
class ExtRelStruct:
    """Extended relational structure: relations plus set predicates.

    The universe is an explicit tuple of element ids (not necessarily dense:
    transduction copies allocate fresh ids).  Relation interpretations are
    sets of element tuples; set-predicate interpretations are sets of tuples
    of subset bitsets over the element-id space.
    """

    universe: tuple[int, ...]
    relations: Mapping[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)
    set_predicates: Mapping[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.universe)) != len(self.universe):
            raise DecompError("universe contains duplicate ids")
        if tuple(sorted(self.universe)) != self.universe:
            raise DecompError("universe ids must be sorted")
        um = self.universe_mask
        for name, tuples in self.relations.items():
            for tup in tuples:
                if any(not (um >> x & 1) for x in tup):
                    raise DecompError(f"relation {name} uses ids outside the universe")
        for name, tuples in self.set_predicates.items():
            for tup in tuples:
                if any(m & ~um for m in tup):
                    raise DecompError(f"predicate {name} uses sets outside the universe")

    @property
    def universe_mask(self) -> int:
        return mask_of(self.universe)

    @property
    def n(self) -> int:
        return len(self.universe)

    @cached_property
    def _cache(self) -> dict:
        return {}

    def with_relation(self, name: str, tuples: Iterable[tuple[int, ...]]) -> "ExtRelStruct":
        rels = dict(self.relations)
        rels[name] = frozenset(tuples)
        return ExtRelStruct(self.universe, rels, dict(self.set_predicates))

    def with_set_predicate(self, name: str, tuples: Iterable[tuple[int, ...]]) -> "ExtRelStruct":
        preds = dict(self.set_predicates)
        preds[name] = frozenset(tuples)
        return ExtRelStruct(self.universe, dict(self.relations), preds)

    def without_symbols(self, names: Iterable[str]) -> "ExtRelStruct":
        drop = set(names)
        return ExtRelStruct(
            self.universe,
            {k: v for k, v in self.relations.items() if k not in drop},
            {k: v for k, v in self.set_predicates.items() if k not in drop},
        )


def build_structure(obj) -> ExtRelStruct:
    """Model a graph, system or tree as its natural relational structure."""
    if isinstance(obj, DiGraph):
        edges = frozenset((u, v) for u, v in obj.edges())
        return ExtRelStruct(tuple(range(obj.n)), {EDGE: edges})
    if isinstance(obj, SetSystem):
        return ExtRelStruct(
            tuple(range(obj.n)),
            {},
            {SET: frozenset((m,) for m in obj.family)},
        )
    if isinstance(obj, BipartitionSystem):
        return ExtRelStruct(
            tuple(range(obj.n)),
            {},
            {BIPART: frozenset((m,) for m in obj.family)},
        )
    if isinstance(obj, RootedTree):
        pairs = set()
        for v in range(obj.size):
            w: int | None = v
            while w is not None:
                pairs.add((w, v))
                w = obj.parent[w]
        return ExtRelStruct(tuple(range(obj.size)), {ANCESTOR: frozenset(pairs)})
    if isinstance(obj, UnrootedTree):
        pairs = frozenset((u, v) for u in range(obj.size) for v in obj.adj[u])
        return ExtRelStruct(tuple(range(obj.size)), {T_EDGE: pairs})
    raise DecompError(f"cannot build a structure from {type(obj).__name__}")
