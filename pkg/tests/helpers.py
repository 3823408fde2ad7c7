"""Shared test utilities: exhaustive generators and reference predicates."""

from __future__ import annotations

import random
from itertools import permutations

from decomp import DiGraph, RootedTree, SetSystem, UnrootedTree
from decomp.bitset import mask_of


def set_partitions(items: list[int]):
    """All partitions of items into non-empty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def all_laminar_families(n: int):
    """Every laminar family over 0..n-1, realized as tree leafset families."""

    def families(block: list[int]):
        if len(block) == 1:
            yield frozenset({mask_of(block)})
            return
        seen = set()
        for part in set_partitions(block):
            if len(part) < 2:
                continue
            key = frozenset(frozenset(b) for b in part)
            if key in seen:
                continue
            seen.add(key)
            choices = [list(families(b)) for b in part]

            def combine(i: int, acc: frozenset):
                if i == len(choices):
                    yield acc | {mask_of(block)}
                    return
                for sub in choices[i]:
                    yield from combine(i + 1, acc | sub)

            yield from combine(0, frozenset())

    for fam in families(list(range(n))):
        yield SetSystem.from_sets(n, fam)


def has_p4(g: DiGraph) -> bool:
    """Direct search for an induced path on four vertices."""
    for a, b, c, d in permutations(range(g.n), 4):
        if (
            g.has_edge(a, b)
            and g.has_edge(b, c)
            and g.has_edge(c, d)
            and not g.has_edge(a, c)
            and not g.has_edge(a, d)
            and not g.has_edge(b, d)
        ):
            return True
    return False


def grow_distance_hereditary(n: int, seed: int) -> tuple[DiGraph, UnrootedTree]:
    """Random distance-hereditary graph built by pendant/twin additions,
    together with the width-1 rank-decomposition grown alongside."""
    rng = random.Random(seed)
    adj = [0]
    tadj: list[list[int]] = [[]]
    labels: list[int | None] = [0]
    leaf_node = {0: 0}
    for v in range(1, n):
        u = rng.randrange(v)
        kind = rng.choice(("pendant", "true-twin", "false-twin"))
        adj.append(0)
        if kind == "pendant":
            adj[v] |= 1 << u
            adj[u] |= 1 << v
        else:
            for w in range(v):
                if adj[u] >> w & 1:
                    adj[v] |= 1 << w
                    adj[w] |= 1 << v
            if kind == "true-twin":
                adj[v] |= 1 << u
                adj[u] |= 1 << v
        lu = leaf_node[u]
        if len(tadj) == 1:
            tadj.append([0])
            tadj[0] = [1]
            labels.append(v)
            leaf_node[v] = 1
            continue
        inner = len(tadj)
        tadj.append([])
        labels.append(None)
        newleaf = len(tadj)
        tadj.append([])
        labels.append(v)
        for w in list(tadj[lu]):
            tadj[w].remove(lu)
            tadj[w].append(inner)
            tadj[inner].append(w)
        tadj[lu] = [inner]
        tadj[inner].extend([lu, newleaf])
        tadj[newleaf] = [inner]
        leaf_node[v] = newleaf
    tree = UnrootedTree(tuple(tuple(sorted(x)) for x in tadj), tuple(labels))
    return DiGraph(n, tuple(adj)), tree


def star_tree(n: int) -> RootedTree:
    """Root with n leaf children."""
    parent = tuple([n] * n + [None])
    labels = tuple(list(range(n)) + [None])
    return RootedTree(parent, labels)


def binary_tree(height: int) -> RootedTree:
    """Complete binary tree; leaves labelled left to right."""
    total = (1 << (height + 1)) - 1
    parent: list[int | None] = [None] * total
    children: list[list[int]] = [[] for _ in range(total)]
    # heap layout: node i has children 2i+1, 2i+2
    for i in range(total):
        for c in (2 * i + 1, 2 * i + 2):
            if c < total:
                parent[c] = i
                children[i].append(c)
    leaves = [i for i in range(total) if not children[i]]
    labels: list[int | None] = [None] * total
    for k, v in enumerate(sorted(leaves)):
        labels[v] = k
    return RootedTree(tuple(parent), tuple(labels))
