"""Independent brute-force ground truth for the decomposition algorithms.

Everything here is a direct transcription of a definition: subset scans,
closure checks to fixpoint, and seeded generators.  The primary algorithms
are cross-checked against these in the test suite; keeping the two code
paths independent is the point, so nothing below calls into the tree
builders.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Literal

from .bitset import bits, full_mask
from .core import BipartitionSystem, DiGraph, RootedTree, SetSystem, bipartitions_overlap, sets_overlap
from .errors import NotConnected, TooLarge
from .graphdec import is_bijoin, is_module, is_split

SCAN_GUARD = 16


def enumerate_modules(graph: DiGraph, guard: int = SCAN_GUARD) -> SetSystem:
    """All non-empty modules by full 2^n subset scan."""
    n = graph.n
    if n > guard:
        raise TooLarge(f"subset scan capped at n <= {guard}")
    found = [m for m in range(1, 1 << n) if is_module(graph, m)]
    return SetSystem.from_sets(n, found)


def enumerate_splits(graph: DiGraph, guard: int = SCAN_GUARD) -> BipartitionSystem:
    """All splits of a connected graph by scanning every bipartition."""
    n = graph.n
    if n > guard:
        raise TooLarge(f"subset scan capped at n <= {guard}")
    if not graph.is_connected():
        raise NotConnected("splits require a connected graph")
    sides = [m << 1 for m in range(1, 1 << (n - 1)) if is_split(graph, m << 1)]
    return BipartitionSystem.from_sides(n, sides)


def enumerate_bijoins(graph: DiGraph, guard: int = SCAN_GUARD) -> BipartitionSystem:
    """All bi-joins of an undirected graph by scanning every bipartition."""
    n = graph.n
    if n > guard:
        raise TooLarge(f"subset scan capped at n <= {guard}")
    sides = [m << 1 for m in range(1, 1 << (n - 1)) if is_bijoin(graph, m << 1)]
    return BipartitionSystem.from_sides(n, sides)


Law = Literal["weakly-partitive", "partitive", "weakly-bipartitive", "bipartitive"]


@dataclass(frozen=True)
class ClosureViolation:
    """First overlapping pair whose derived set or bipartition is missing."""

    law: str
    first: int
    second: int
    missing: int


def check_closure(system: SetSystem | BipartitionSystem, law: Law) -> ClosureViolation | None:
    """Scan every overlapping pair; return the first violation or None."""
    if law in ("weakly-partitive", "partitive"):
        if not isinstance(system, SetSystem):
            raise TypeError("partitive laws apply to set systems")
        members = system.members
        for x, y in combinations(system.family, 2):
            if sets_overlap(x, y):
                required = [x | y, x & y, x & ~y, y & ~x]
                if law == "partitive":
                    required.append(x ^ y)
                for z in required:
                    if z not in members:
                        return ClosureViolation(law, x, y, z)
        return None
    if not isinstance(system, BipartitionSystem):
        raise TypeError("bipartitive laws apply to bipartition systems")
    members = system.members
    n = system.n
    for x, y in combinations(system.family, 2):
        if bipartitions_overlap(x, y, n):
            required = [x | y, x & ~y, y & ~x, x & y]
            if law == "bipartitive":
                required.append(x ^ y)
            for z in required:
                if z not in members:
                    return ClosureViolation(law, x, y, z)
    return None


def weakly_partitive_closure(seeds, n: int, guard: int = SCAN_GUARD) -> SetSystem:
    """Smallest weakly-partitive family containing the seeds, normalized.

    Iterates the four operations on overlapping pairs to a fixpoint; used to
    manufacture test inputs since the definitions come without a corpus.
    """
    if n > guard:
        raise TooLarge(f"closure generation capped at n <= {guard}")
    members: set[int] = set()
    for s in seeds:
        m = s if isinstance(s, int) else sum(1 << e for e in set(s))
        if m:
            members.add(m)
    members.add(full_mask(n))
    members.update(1 << a for a in range(n))
    queue = list(members)
    known = list(members)
    while queue:
        x = queue.pop()
        for y in list(known):
            if sets_overlap(x, y):
                for z in (x | y, x & y, x & ~y, y & ~x):
                    if z not in members:
                        members.add(z)
                        queue.append(z)
                        known.append(z)
    return SetSystem.from_sets(n, members)


# ---------------------------------------------------------------------------
# seeded generators


def random_digraph(n: int, edge_prob: float, seed: int) -> DiGraph:
    rng = random.Random(seed)
    adj = [0] * n
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < edge_prob:
                adj[u] |= 1 << v
    return DiGraph(n, tuple(adj))


def random_graph(n: int, edge_prob: float, seed: int) -> DiGraph:
    rng = random.Random(seed)
    adj = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
    return DiGraph(n, tuple(adj))


_SUBSEED_STRIDE = 1_000_003


def random_connected_graph(n: int, edge_prob: float, seed: int) -> DiGraph:
    """Retry with incremented sub-seeds until the sample is connected."""
    for attempt in range(10_000):
        g = random_graph(n, edge_prob, seed * _SUBSEED_STRIDE + attempt)
        if g.is_connected():
            return g
    raise TooLarge("no connected sample found; raise the edge probability")


def random_connected_digraph(n: int, edge_prob: float, seed: int) -> DiGraph:
    for attempt in range(10_000):
        g = random_digraph(n, edge_prob, seed * _SUBSEED_STRIDE + attempt)
        if g.is_connected():
            return g
    raise TooLarge("no connected sample found; raise the edge probability")


def random_strongly_connected_digraph(n: int, edge_prob: float, seed: int) -> DiGraph:
    """Strong connectivity is where the split closure laws provably hold."""
    for attempt in range(10_000):
        g = random_digraph(n, edge_prob, seed * _SUBSEED_STRIDE + attempt)
        if g.is_strongly_connected():
            return g
    raise TooLarge("no strongly connected sample found; raise the edge probability")


def all_digraphs(n: int) -> Iterator[DiGraph]:
    """Every labelled digraph on n vertices; capped at n <= 4 (2^12 graphs)."""
    if n > 4:
        raise TooLarge("exhaustive digraph space capped at n <= 4")
    slots = [(u, v) for u in range(n) for v in range(n) if u != v]
    for code in range(1 << len(slots)):
        adj = [0] * n
        for i, (u, v) in enumerate(slots):
            if code >> i & 1:
                adj[u] |= 1 << v
        yield DiGraph(n, tuple(adj))


def all_graphs(n: int) -> Iterator[DiGraph]:
    """Every labelled undirected graph on n vertices; capped at n <= 6."""
    if n > 6:
        raise TooLarge("exhaustive graph space capped at n <= 6")
    slots = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for code in range(1 << len(slots)):
        adj = [0] * n
        for i, (u, v) in enumerate(slots):
            if code >> i & 1:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        yield DiGraph(n, tuple(adj))


def random_rooted_tree(n_nodes: int, seed: int) -> RootedTree:
    """Random rooted tree with >= 2 children per inner node and labelled leaves.

    Grown by repeatedly splitting a random leaf into 2..4 children until the
    node budget is spent, then labelling leaves in node order.
    """
    rng = random.Random(seed)
    parent: list[int | None] = [None]
    children: list[list[int]] = [[]]
    leaves = [0]
    while len(parent) + 2 <= n_nodes:
        v = leaves.pop(rng.randrange(len(leaves)))
        k = min(rng.randint(2, 4), n_nodes - len(parent))
        for _ in range(k):
            parent.append(v)
            children.append([])
            children[v].append(len(parent) - 1)
            leaves.append(len(parent) - 1)
    leaf_ids = [v for v in range(len(parent)) if not children[v]]
    labels: list[int | None] = [None] * len(parent)
    for i, v in enumerate(leaf_ids):
        labels[v] = i
    return RootedTree(tuple(parent), tuple(labels))


def random_laminar_system(n: int, seed: int) -> SetSystem:
    """Random laminar family over 0..n-1, realized as a tree leafset family."""
    rng = random.Random(seed)
    masks = {full_mask(n)}
    stack = [list(range(n))]
    while stack:
        block = stack.pop()
        if len(block) < 2 or rng.random() < 0.3:
            continue
        rng.shuffle(block)
        k = rng.randint(2, min(4, len(block)))
        cuts = sorted(rng.sample(range(1, len(block)), k - 1)) if len(block) > k - 1 else list(range(1, k))
        parts = []
        prev = 0
        for c in cuts + [len(block)]:
            if c > prev:
                parts.append(block[prev:c])
                prev = c
        for part in parts:
            masks.add(sum(1 << e for e in part))
            stack.append(part)
    return SetSystem.from_sets(n, masks)
