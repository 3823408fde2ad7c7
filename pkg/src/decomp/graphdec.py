"""Graph-level decompositions: modules, cotrees, splits, bi-joins, cut-rank.

Each decomposition pairs a construction with its inverse reconstruction, so
roundtrips are testable; the constructions run over the partitive machinery
on the corresponding set or bipartition families.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Mapping, Sequence

from .bitset import bits, full_mask, popcount, submasks
from .core import BipartitionSystem, DiGraph, RootedTree, SetSystem, UnrootedTree
from .errors import (
    DecompError,
    DegreeTooLarge,
    NotCograph,
    NotConnected,
    RequiresUndirected,
    TooLarge,
)
from .laminar import laminar_tree, laminar_tree_bipartitions
from .partitive import Label, strong_bipartitions, strong_members, weakly_partitive_tree

DEFAULT_GUARD = 16


def _as_mask(x) -> int:
    if isinstance(x, int):
        return x
    m = 0
    for e in x:
        m |= 1 << e
    return m


# ---------------------------------------------------------------------------
# modules and modular decomposition


def is_module(graph: DiGraph, candidate) -> bool:
    """Members must be indistinguishable from outside in both edge directions."""
    m = _as_mask(candidate)
    outside = full_mask(graph.n) & ~m
    for u in bits(outside):
        row = graph.adj[u] & m
        if row and row != m:
            return False
        row = graph.radj[u] & m
        if row and row != m:
            return False
    return True


def smallest_module(graph: DiGraph, u: int, v: int) -> int:
    """Closure of {u, v} under adding splitters (vertices distinguishing members)."""
    m = (1 << u) | (1 << v)
    fm = full_mask(graph.n)
    changed = True
    while changed:
        changed = False
        for z in bits(fm & ~m):
            row = graph.adj[z] & m
            back = graph.radj[z] & m
            if (row and row != m) or (back and back != m):
                m |= 1 << z
                changed = True
    return m


def modules_set_system(graph: DiGraph, guard: int = DEFAULT_GUARD) -> SetSystem:
    """All non-empty modules, generated from smallest modules by closing the
    weakly-partitive operations over overlapping pairs.

    The subset-scan oracle certifies equality with this generator in tests.
    """
    n = graph.n
    if n > guard:
        raise TooLarge(f"module generation capped at n <= {guard}")
    members: set[int] = {full_mask(n)}
    members.update(1 << a for a in range(n))
    queue = []
    for u, v in combinations(range(n), 2):
        m = smallest_module(graph, u, v)
        if m not in members:
            members.add(m)
            queue.append(m)
    known = list(members)
    while queue:
        x = queue.pop()
        for y in list(known):
            if x & y and x & ~y and y & ~x:
                for z in (x | y, x & y, x & ~y, y & ~x):
                    if z not in members:
                        members.add(z)
                        queue.append(z)
                        known.append(z)
    return SetSystem.from_sets(n, members)


@dataclass(frozen=True)
class ModularDecomposition:
    """Laminar tree of the strong modules plus the m-edge sibling relation."""

    tree: RootedTree
    m_edges: frozenset[tuple[int, int]]


def modular_decomposition(graph: DiGraph, guard: int = DEFAULT_GUARD) -> ModularDecomposition:
    system = modules_set_system(graph, guard)
    tree = laminar_tree(strong_members(system))
    m_edges = set()
    for t in tree.inner_nodes:
        kids = tree.children[t]
        row_or = {}
        for c in kids:
            acc = 0
            for x in bits(tree.leafset[c]):
                acc |= graph.adj[x]
            row_or[c] = acc
        for s in kids:
            for r in kids:
                if s == r:
                    continue
                target = tree.leafset[r]
                if row_or[s] & target:
                    # disjoint modules see each other all-or-nothing
                    assert all(graph.adj[x] & target == target for x in bits(tree.leafset[s]))
                    m_edges.add((s, r))
    return ModularDecomposition(tree, frozenset(m_edges))


def graph_from_modular(dec: ModularDecomposition) -> DiGraph:
    """Invert the decomposition: uv is an edge iff the children of lca(u, v)
    separating them are m-edge related."""
    tree = dec.tree
    n = tree.n_leaves
    adj = [0] * n
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            lu, lv = tree.leaf_of_element[u], tree.leaf_of_element[v]
            t = tree.lca(lu, lv)
            su = _child_above(tree, t, lu)
            sv = _child_above(tree, t, lv)
            if (su, sv) in dec.m_edges:
                adj[u] |= 1 << v
    return DiGraph(n, tuple(adj))


def _child_above(tree: RootedTree, t: int, leaf: int) -> int:
    v = leaf
    while tree.parent[v] != t:
        v = tree.parent[v]  # type: ignore[assignment]
    return v


def count_modules(graph: DiGraph, guard: int = DEFAULT_GUARD) -> int:
    """Brute-force module count over all non-empty vertex subsets."""
    from .oracle import enumerate_modules

    return len(enumerate_modules(graph, guard).family)


def count_modules_via_tree(graph: DiGraph, guard: int = DEFAULT_GUARD) -> int:
    """Module count by recurrence over the weakly-partitive tree.

    Writing m(t) for the module count of the subgraph induced by the leaves
    below t and k for the child count: leaves contribute 1; PRIME nodes give
    1 + sum over children; DEGENERATE nodes add every union of at least two
    child blocks (2^k - k - 1); LINEAR nodes add every order interval of at
    least two blocks (k(k-1)/2).  Constants calibrated against the
    subset-scan oracle.
    """
    wpt = weakly_partitive_tree(modules_set_system(graph, guard))
    tree = wpt.tree
    counts = [0] * tree.size
    for t in sorted(range(tree.size), key=lambda v: -tree.depth[v]):
        kids = tree.children[t]
        if not kids:
            counts[t] = 1
            continue
        total = sum(counts[c] for c in kids)
        k = len(kids)
        lab = wpt.label[t]
        if lab is Label.PRIME:
            counts[t] = total + 1
        elif lab is Label.DEGENERATE:
            counts[t] = total + (1 << k) - k - 1
        else:
            counts[t] = total + k * (k - 1) // 2
    return counts[tree.root]


# ---------------------------------------------------------------------------
# cotrees


class CotreeLabel(Enum):
    SERIES = "series"
    PARALLEL = "parallel"
    LINEAR = "linear"


@dataclass(frozen=True)
class Cotree:
    tree: RootedTree
    label: Mapping[int, CotreeLabel]
    order: Mapping[int, tuple[int, ...]]


def cotree(graph: DiGraph, guard: int = DEFAULT_GUARD) -> Cotree:
    """Refine the modular decomposition of a directed cograph.

    Sibling sets whose m-edge pattern is a complete digraph become SERIES,
    edgeless ones PARALLEL, transitive tournaments LINEAR (ordered source to
    sink).  Any other pattern witnesses a prime node: NotCograph.
    """
    dec = modular_decomposition(graph, guard)
    tree = dec.tree
    label: dict[int, CotreeLabel] = {}
    order: dict[int, tuple[int, ...]] = {}
    for t in tree.inner_nodes:
        kids = tree.children[t]
        forward = {(s, r) for s in kids for r in kids if s != r and (s, r) in dec.m_edges}
        pairs = [(s, r) for s, r in combinations(kids, 2)]
        if all((s, r) in forward and (r, s) in forward for s, r in pairs):
            label[t] = CotreeLabel.SERIES
        elif not forward:
            label[t] = CotreeLabel.PARALLEL
        elif all(((s, r) in forward) != ((r, s) in forward) for s, r in pairs):
            seq = sorted(kids, key=lambda c: -sum(1 for r in kids if (c, r) in forward))
            transitive = all(
                (seq[i], seq[j]) in forward for i in range(len(seq)) for j in range(i + 1, len(seq))
            )
            if not transitive:
                raise NotCograph(t)
            label[t] = CotreeLabel.LINEAR
            order[t] = tuple(seq)
        else:
            raise NotCograph(t)
    return Cotree(tree, label, order)


def graph_from_cotree(ct: Cotree) -> DiGraph:
    tree = ct.tree
    n = tree.n_leaves
    adj = [0] * n
    pos = {t: {c: i for i, c in enumerate(seq)} for t, seq in ct.order.items()}
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            lu, lv = tree.leaf_of_element[u], tree.leaf_of_element[v]
            t = tree.lca(lu, lv)
            lab = ct.label[t]
            if lab is CotreeLabel.SERIES:
                adj[u] |= 1 << v
            elif lab is CotreeLabel.LINEAR:
                su, sv = _child_above(tree, t, lu), _child_above(tree, t, lv)
                if pos[t][su] < pos[t][sv]:
                    adj[u] |= 1 << v
    return DiGraph(n, tuple(adj))


# ---------------------------------------------------------------------------
# splits


def is_split(graph: DiGraph, side) -> bool:
    """Ordered-pair split test.

    With {X, Y} the bipartition, the cross edges must factor as
    X_out x Y_in forward and Y_out x X_in backward; equivalently every
    member of X has one of at most one non-empty out-profile and one
    non-empty in-profile on Y.
    """
    if not graph.is_connected():
        raise NotConnected("splits are defined for connected graphs")
    x = _as_mask(side)
    fm = full_mask(graph.n)
    y = fm & ~x
    if not x or not y:
        raise DecompError("both sides of a split must be non-empty")
    out_profile = 0
    in_profile = 0
    for u in bits(x):
        row = graph.adj[u] & y
        if row:
            if out_profile and row != out_profile:
                return False
            out_profile = row
        row = graph.radj[u] & y
        if row:
            if in_profile and row != in_profile:
                return False
            in_profile = row
    return True


def _split_chunk(graph: DiGraph, start: int, stop: int) -> list[int]:
    return [m << 1 for m in range(start, stop) if is_split(graph, m << 1)]


def _bijoin_chunk(graph: DiGraph, start: int, stop: int) -> list[int]:
    return [m << 1 for m in range(start, stop) if is_bijoin(graph, m << 1)]


def sharded_scan(worker, graph: DiGraph, count: int, jobs: int) -> list[int]:
    """Split the candidate range across workers; merge in range order so the
    result is independent of the worker count."""
    if jobs <= 1 or count < 1 << 10:
        return worker(graph, 1, count + 1)
    from concurrent.futures import ProcessPoolExecutor

    bounds = [1 + (count * i) // jobs for i in range(jobs)] + [count + 1]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunks = pool.map(worker, [graph] * jobs, bounds[:-1], bounds[1:])
        out: list[int] = []
        for chunk in chunks:
            out.extend(chunk)
        return out


def split_family(graph: DiGraph, guard: int = DEFAULT_GUARD, jobs: int = 1) -> BipartitionSystem:
    """All splits of a connected graph, via the canonical-side scan."""
    n = graph.n
    if n > guard:
        raise TooLarge(f"split enumeration capped at n <= {guard}")
    if not graph.is_connected():
        raise NotConnected("splits are defined for connected graphs")
    sides = sharded_scan(_split_chunk, graph, (1 << (n - 1)) - 1, jobs)
    return BipartitionSystem.from_sides(n, sides)


@dataclass(frozen=True)
class SplitDecomposition:
    """Marker-vertex gadget of the canonical split decomposition.

    Marker k realizes the directed tree arc ``markers[k] = (u, v)`` and lives
    in the component of u; t-edges match the two markers of each tree edge;
    c-edges record cross-block adjacency inside a component.
    """

    tree: UnrootedTree
    markers: tuple[tuple[int, int], ...]
    c_edges: frozenset[tuple[int, int]]
    t_edges: frozenset[tuple[int, int]]

    @cached_property
    def marker_id(self) -> dict[tuple[int, int], int]:
        return {arc: k for k, arc in enumerate(self.markers)}

    def component_of(self, marker: int) -> int:
        return self.markers[marker][0]


def split_decomposition(graph: DiGraph, guard: int = DEFAULT_GUARD, jobs: int = 1) -> SplitDecomposition:
    system = split_family(graph, guard, jobs)
    tree = laminar_tree_bipartitions(strong_bipartitions(system))
    markers: list[tuple[int, int]] = []
    for u, v in tree.edges():
        markers.append((u, v))
        markers.append((v, u))
    marker_id = {arc: k for k, arc in enumerate(markers)}
    c_edges = set()
    for u in tree.inner_nodes:
        side_or = {}
        for v in tree.adj[u]:
            acc = 0
            for x in bits(tree.side_leafset(u, v)):
                acc |= graph.adj[x]
            side_or[v] = acc
        for v in tree.adj[u]:
            for w in tree.adj[u]:
                if v != w and side_or[v] & tree.side_leafset(u, w):
                    c_edges.add((marker_id[(u, v)], marker_id[(u, w)]))
    t_edges = set()
    for u, v in tree.edges():
        a, b = marker_id[(u, v)], marker_id[(v, u)]
        t_edges.add((min(a, b), max(a, b)))
    return SplitDecomposition(tree, tuple(markers), frozenset(c_edges), frozenset(t_edges))


def graph_from_split(dec: SplitDecomposition) -> DiGraph:
    """Invert the decomposition: uv is an edge iff the tree path between the
    leaf markers chains c-edges through every intermediate component (the
    alternating-path criterion specialized to simple paths)."""
    tree = dec.tree
    n = tree.n_leaves
    adj = [0] * n
    if n == 1:
        return DiGraph(1, (0,))
    mid = dec.marker_id
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            path = tree.path(tree.leaf_of_element[u], tree.leaf_of_element[v])
            ok = True
            for i in range(1, len(path) - 1):
                a = mid[(path[i], path[i - 1])]
                b = mid[(path[i], path[i + 1])]
                if (a, b) not in dec.c_edges:
                    ok = False
                    break
            if ok:
                adj[u] |= 1 << v
    return DiGraph(n, tuple(adj))


# ---------------------------------------------------------------------------
# bi-joins and the skeleton graph


def equiv_classes(graph: DiGraph, subset) -> list[int]:
    """Partition a vertex set by equality of neighbourhoods outside it."""
    m = _as_mask(subset)
    outside = full_mask(graph.n) & ~m
    groups: dict[int, int] = {}
    for x in bits(m):
        profile = graph.adj[x] & outside
        groups[profile] = groups.get(profile, 0) | (1 << x)
    return sorted(groups.values(), key=lambda g: g & -g)


def is_bijoin(graph: DiGraph, side) -> bool:
    """Cross edges must be exactly X' x Y' plus (X-X') x (Y-Y').

    Equivalently each side has at most two outside-profile classes and the
    two profiles complement each other on the far side.
    """
    if not graph.undirected:
        raise RequiresUndirected("bi-joins are defined for undirected graphs")
    x = _as_mask(side)
    fm = full_mask(graph.n)
    y = fm & ~x
    if not x or not y:
        raise DecompError("both sides of a bi-join must be non-empty")
    profiles = {graph.adj[v] & y for v in bits(x)}
    if len(profiles) == 1:
        return True
    if len(profiles) == 2:
        p, q = profiles
        return (p ^ q) == y
    return False


def bijoin_family(graph: DiGraph, guard: int = DEFAULT_GUARD, jobs: int = 1) -> BipartitionSystem:
    n = graph.n
    if n > guard:
        raise TooLarge(f"bi-join enumeration capped at n <= {guard}")
    if not graph.undirected:
        raise RequiresUndirected("bi-joins are defined for undirected graphs")
    sides = sharded_scan(_bijoin_chunk, graph, (1 << (n - 1)) - 1, jobs)
    return BipartitionSystem.from_sides(n, sides)


@dataclass(frozen=True)
class ClassVertex:
    """One outside-neighbourhood class of the leaf block in direction
    (node, neighbour); index orders the at most two classes of a direction."""

    cid: int
    node: int
    neighbour: int
    index: int
    members: int


@dataclass(frozen=True)
class Skeleton:
    """Bi-join decomposition gadget (H, F1, F2) over equivalence classes.

    Vertices of the original graph appear as the singleton classes of leaf
    directions and keep their vertex ids; they are exactly the class
    vertices incident to no t-edge (degenerate two-leaf trees excepted).
    """

    tree: UnrootedTree
    n: int
    classes: tuple[ClassVertex, ...]
    c_edges: frozenset[tuple[int, int]]
    t_edges: frozenset[tuple[int, int]]
    r_edges: frozenset[tuple[int, int]]

    @cached_property
    def by_direction(self) -> dict[tuple[int, int], tuple[int, ...]]:
        out: dict[tuple[int, int], list[int]] = {}
        for cv in self.classes:
            out.setdefault((cv.node, cv.neighbour), []).append(cv.cid)
        return {k: tuple(sorted(v, key=lambda c: self.classes[c].index)) for k, v in out.items()}


def skeleton(graph: DiGraph, guard: int = DEFAULT_GUARD, jobs: int = 1) -> Skeleton:
    """The skeleton of the bi-join decomposition of a connected graph."""
    if not graph.undirected:
        raise RequiresUndirected("the skeleton is defined for undirected graphs")
    if not graph.is_connected():
        raise NotConnected("the skeleton is defined for connected graphs")
    n = graph.n
    system = bijoin_family(graph, guard, jobs)
    tree = laminar_tree_bipartitions(strong_bipartitions(system))
    if n == 1:
        cv = ClassVertex(0, 0, 0, 1, 1)
        return Skeleton(tree, 1, (cv,), frozenset(), frozenset(), frozenset())
    if not tree.inner_nodes:
        # two leaves joined by a single tree edge: emit both vertex classes
        l0, l1 = tree.leaf_of_element[0], tree.leaf_of_element[1]
        cls = (ClassVertex(0, l1, l0, 1, 1), ClassVertex(1, l0, l1, 1, 2))
        return Skeleton(tree, 2, cls, frozenset(), frozenset({(0, 1)}), frozenset())

    classes: list[ClassVertex] = [None] * n  # type: ignore[list-item]
    for u in tree.inner_nodes:
        for v in tree.adj[u]:
            lab = tree.leaf_label[v]
            if lab is not None:
                classes[lab] = ClassVertex(lab, u, v, 1, 1 << lab)
    for u in sorted(tree.inner_nodes):
        for v in sorted(tree.adj[u]):
            if tree.leaf_label[v] is not None:
                continue
            side = tree.side_leafset(u, v)
            for idx, members in enumerate(equiv_classes(graph, side), start=1):
                classes.append(ClassVertex(len(classes), u, v, idx, members))
    skel = Skeleton(tree, n, tuple(classes), frozenset(), frozenset(), frozenset())
    by_dir = skel.by_direction

    def complete(a: ClassVertex, b: ClassVertex) -> bool:
        acc = 0
        for x in bits(a.members):
            acc |= graph.adj[x]
        return bool(acc & b.members)

    c_edges = set()
    for u in tree.inner_nodes:
        local = [cid for v in tree.adj[u] for cid in by_dir[(u, v)]]
        for a, b in combinations(local, 2):
            if classes[a].neighbour != classes[b].neighbour and complete(classes[a], classes[b]):
                c_edges.add((min(a, b), max(a, b)))
    t_edges = set()
    for u, v in tree.edges():
        for a in by_dir.get((u, v), ()):
            for b in by_dir.get((v, u), ()):
                if complete(classes[a], classes[b]):
                    t_edges.add((min(a, b), max(a, b)))
    r_edges = set()
    for cids in by_dir.values():
        if len(cids) == 2:
            a, b = cids
            r_edges.add((min(a, b), max(a, b)))
    return Skeleton(tree, n, tuple(classes), frozenset(c_edges), frozenset(t_edges), frozenset(r_edges))


def graph_from_skeleton(skel: Skeleton) -> DiGraph:
    """Invert the skeleton: vertices are the classes without t-edges, an edge
    needs a c/t-alternating chain along the tree path between the leaves."""
    n = skel.n
    if n == 1:
        return DiGraph(1, (0,))
    tree = skel.tree
    if not tree.inner_nodes:
        adj = [0, 0]
        if skel.t_edges:
            adj = [2, 1]
        return DiGraph(2, tuple(adj))
    by_dir = skel.by_direction
    c_adj: dict[int, set[int]] = {}
    t_adj: dict[int, set[int]] = {}
    for a, b in skel.c_edges:
        c_adj.setdefault(a, set()).add(b)
        c_adj.setdefault(b, set()).add(a)
    for a, b in skel.t_edges:
        t_adj.setdefault(a, set()).add(b)
        t_adj.setdefault(b, set()).add(a)
    adj = [0] * n
    for x in range(n):
        for y in range(x + 1, n):
            lx, ly = tree.leaf_of_element[x], tree.leaf_of_element[y]
            path = tree.path(lx, ly)
            comps = path[1:-1]
            states = {x}
            for i, u in enumerate(comps):
                nxt_dir = (u, comps[i + 1]) if i + 1 < len(comps) else (u, ly)
                exits = set()
                for s in states:
                    for cid in by_dir[nxt_dir]:
                        if cid in c_adj.get(s, ()):
                            exits.add(cid)
                if i + 1 < len(comps):
                    states = set()
                    for s in exits:
                        states |= t_adj.get(s, set())
                    states = {s for s in states if (skel.classes[s].node, skel.classes[s].neighbour) == (comps[i + 1], u)}
                else:
                    states = exits
                if not states:
                    break
            if states and y in states:
                adj[x] |= 1 << y
                adj[y] |= 1 << x
    return DiGraph(n, tuple(adj))


# ---------------------------------------------------------------------------
# cut-rank and rank-width


def cut_rank(graph: DiGraph, subset) -> int:
    """GF(2) rank of the X-by-complement adjacency submatrix."""
    x = _as_mask(subset)
    comp = full_mask(graph.n) & ~x
    pivots: list[int] = []
    rank = 0
    for u in bits(x):
        row = graph.adj[u] & comp
        for p in pivots:
            low = p & -p
            if row & low:
                row ^= p
        if row:
            pivots.append(row)
            pivots.sort(key=lambda r: r & -r)
            rank += 1
    return rank


def rank_width_of(
    graph: DiGraph,
    tree: UnrootedTree,
    delta: Sequence[int] | None = None,
    degree_guard: int = DEFAULT_GUARD,
) -> int:
    """Width of a given rank-decomposition: the maximum cut-rank over all
    unions of neighbour-side leaf blocks at every tree node.

    ``delta[v]`` is the leaf label carrying vertex v (identity when omitted).
    """
    n = graph.n
    if tree.n_leaves != n:
        raise DecompError("decomposition tree must have one leaf per vertex")
    if delta is None:
        delta = tuple(range(n))
    if sorted(delta) != list(range(n)):
        raise DecompError("delta must be a bijection onto the leaf labels")
    to_vertex = [0] * n
    for v, lab in enumerate(delta):
        to_vertex[lab] = v
    width = 0
    for u in range(tree.size):
        nbrs = tree.adj[u]
        if len(nbrs) > degree_guard:
            raise DegreeTooLarge(f"node {u} has degree {len(nbrs)} > {degree_guard}")
        blocks = []
        for v in nbrs:
            mask = 0
            for lab in bits(tree.side_leafset(u, v)):
                mask |= 1 << to_vertex[lab]
            blocks.append(mask)
        for pick in range(1, 1 << len(blocks)):
            union = 0
            for i in bits(pick):
                union |= blocks[i]
            width = max(width, cut_rank(graph, union))
    return width
