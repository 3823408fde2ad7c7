"""File formats: graph/system/structure loading, JSON and DOT emission.

Graphs load from edge-list text (first line ``n [directed|undirected]``,
then one edge per line) or JSON ``{"n":, "directed":, "edges": [[u,v],..]}``.
Vertex tokens in edge lists may be arbitrary names; non-integer names map
through a name table in first-appearance order, reported in the output.
Set systems, bipartition systems and relational structures travel as JSON.
All decomposition JSON carries a leafset map per inner node so external
tools can verify without recomputation.
"""

from __future__ import annotations

import json
from typing import IO

from .bitset import bits
from .core import (
    BipartitionSystem,
    DiGraph,
    ExtRelStruct,
    RootedTree,
    SetSystem,
    UnrootedTree,
)
from .errors import DecompError
from .graphdec import Cotree, ModularDecomposition, Skeleton, SplitDecomposition
from .partitive import WBTree, WPTree


# ---------------------------------------------------------------------------
# loading


def load_graph_text(text: str) -> tuple[DiGraph, list[str] | None]:
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise DecompError("empty graph file")
    head = lines[0].split()
    n = int(head[0])
    directed = True
    if len(head) > 1:
        if head[1] not in ("directed", "undirected"):
            raise DecompError(f"unknown graph kind {head[1]!r}")
        directed = head[1] == "directed"
    names: dict[str, int] = {}

    def vid(token: str) -> int:
        if token not in names:
            if len(names) >= n:
                raise DecompError("more vertex names than n")
            names[token] = len(names)
        return names[token]

    # decide once whether all tokens are integer ids
    tokens = [t for ln in lines[1:] for t in ln.split()]
    all_ints = all(t.isdigit() and int(t) < n for t in tokens)
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise DecompError(f"bad edge line {ln!r}")
        if all_ints:
            edges.append((int(parts[0]), int(parts[1])))
        else:
            edges.append((vid(parts[0]), vid(parts[1])))
    table = None
    if not all_ints:
        table = [None] * n
        for tok, i in names.items():
            table[i] = tok
        table = [t if t is not None else str(i) for i, t in enumerate(table)]
    return DiGraph.from_edges(n, edges, directed=directed), table


def load_graph_json(obj: dict) -> DiGraph:
    return DiGraph.from_edges(
        int(obj["n"]), [tuple(e) for e in obj.get("edges", [])], directed=bool(obj.get("directed", True))
    )


def load_graph(stream: IO[str]) -> tuple[DiGraph, list[str] | None]:
    text = stream.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return load_graph_json(json.loads(text)), None
    return load_graph_text(text)


def load_set_system(stream: IO[str]) -> SetSystem:
    obj = json.loads(stream.read())
    return SetSystem.from_sets(int(obj["n"]), [set(s) for s in obj.get("sets", [])])


def load_bipartition_system(stream: IO[str]) -> BipartitionSystem:
    obj = json.loads(stream.read())
    return BipartitionSystem.from_sides(int(obj["n"]), [set(s) for s in obj.get("sides", [])])


def load_structure(stream: IO[str]) -> ExtRelStruct:
    obj = json.loads(stream.read())
    universe = tuple(range(int(obj["n"]))) if "n" in obj else tuple(sorted(obj["universe"]))
    relations = {
        name: frozenset(tuple(t) for t in tuples) for name, tuples in obj.get("relations", {}).items()
    }
    preds = {}
    for name, entries in obj.get("set_predicates", {}).items():
        tuples = set()
        for entry in entries:
            if entry and isinstance(entry[0], list):
                tuples.add(tuple(sum(1 << e for e in s) for s in entry))
            else:
                tuples.add((sum(1 << e for e in entry),))
        preds[name] = frozenset(tuples)
    return ExtRelStruct(universe, relations, preds)


# ---------------------------------------------------------------------------
# JSON emission


def _elems(mask: int) -> list[int]:
    return list(bits(mask))


def rooted_tree_json(tree: RootedTree) -> dict:
    return {
        "nodes": tree.size,
        "root": tree.root,
        "parent": [tree.parent[v] for v in range(tree.size)],
        "leaf_label": [tree.leaf_label[v] for v in range(tree.size)],
        "leafset": {str(v): _elems(tree.leafset[v]) for v in tree.inner_nodes},
    }


def unrooted_tree_json(tree: UnrootedTree) -> dict:
    return {
        "nodes": tree.size,
        "edges": [[u, v] for u, v in tree.edges()],
        "leaf_label": [tree.leaf_label[v] for v in range(tree.size)],
        "side_leafset": {
            f"{u}->{v}": _elems(tree.side_leafset(u, v)) for u in range(tree.size) for v in tree.adj[u]
        },
    }


def set_system_json(system: SetSystem) -> dict:
    return {"n": system.n, "sets": [list(s) for s in system.sets()]}


def bipartition_system_json(system: BipartitionSystem) -> dict:
    return {"n": system.n, "sides": [list(s) for s in system.sides()]}


def wptree_json(t: WPTree) -> dict:
    return {
        "tree": rooted_tree_json(t.tree),
        "label": {str(v): lab.value for v, lab in sorted(t.label.items())},
        "order": {str(v): list(seq) for v, seq in sorted(t.order.items())},
    }


def wbtree_json(t: WBTree) -> dict:
    return {
        "tree": unrooted_tree_json(t.tree),
        "label": {str(v): lab.value for v, lab in sorted(t.label.items())},
        "cyclic_order": {str(v): list(seq) for v, seq in sorted(t.cyclic_order.items())},
    }


def modular_json(dec: ModularDecomposition) -> dict:
    return {
        "tree": rooted_tree_json(dec.tree),
        "m_edges": sorted([s, t] for s, t in dec.m_edges),
    }


def cotree_json(ct: Cotree) -> dict:
    return {
        "tree": rooted_tree_json(ct.tree),
        "label": {str(v): lab.value for v, lab in sorted(ct.label.items())},
        "order": {str(v): list(seq) for v, seq in sorted(ct.order.items())},
    }


def split_json(dec: SplitDecomposition) -> dict:
    return {
        "tree": unrooted_tree_json(dec.tree),
        "markers": [list(arc) for arc in dec.markers],
        "c_edges": sorted([a, b] for a, b in dec.c_edges),
        "t_edges": sorted([a, b] for a, b in dec.t_edges),
    }


def skeleton_json(skel: Skeleton) -> dict:
    return {
        "n": skel.n,
        "tree": unrooted_tree_json(skel.tree),
        "classes": [
            {
                "id": cv.cid,
                "node": cv.node,
                "neighbour": cv.neighbour,
                "index": cv.index,
                "members": _elems(cv.members),
            }
            for cv in skel.classes
        ],
        "c_edges": sorted([a, b] for a, b in skel.c_edges),
        "t_edges": sorted([a, b] for a, b in skel.t_edges),
        "r_edges": sorted([a, b] for a, b in skel.r_edges),
    }


def graph_json(graph: DiGraph) -> dict:
    return {"n": graph.n, "directed": not graph.undirected, "edges": [[u, v] for u, v in graph.edges()]}


# ---------------------------------------------------------------------------
# DOT emission (t-edges dashed, r-edges dotted, c-edges solid)


def rooted_tree_dot(tree: RootedTree, label=None, order=None) -> str:
    lines = ["digraph decomposition {"]
    for v in range(tree.size):
        if tree.leaf_label[v] is not None:
            lines.append(f'  n{v} [label="{tree.leaf_label[v]}", shape=circle];')
        else:
            text = label[v].value if label and v in label else ""
            suffix = f"\\n{list(order[v])}" if order and v in order else ""
            lines.append(f'  n{v} [label="{text}{suffix}", shape=box];')
    for v in range(tree.size):
        p = tree.parent[v]
        if p is not None:
            lines.append(f"  n{p} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def unrooted_tree_dot(tree: UnrootedTree, label=None, cyclic=None) -> str:
    lines = ["graph decomposition {"]
    for v in range(tree.size):
        if tree.leaf_label[v] is not None:
            lines.append(f'  n{v} [label="{tree.leaf_label[v]}", shape=circle];')
        else:
            text = label[v].value if label and v in label else ""
            suffix = f"\\n{list(cyclic[v])}" if cyclic and v in cyclic else ""
            lines.append(f'  n{v} [label="{text}{suffix}", shape=box];')
    for u, v in tree.edges():
        lines.append(f"  n{u} -- n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def split_dot(dec: SplitDecomposition) -> str:
    lines = ["digraph split_decomposition {"]
    for k, (u, v) in enumerate(dec.markers):
        lab = dec.tree.leaf_label[u]
        if lab is not None:
            lines.append(f'  m{k} [label="{lab}", shape=circle];')
        else:
            lines.append(f'  m{k} [label="{u}>{v}", shape=point];')
    for a, b in sorted(dec.c_edges):
        lines.append(f"  m{a} -> m{b};")
    for a, b in sorted(dec.t_edges):
        lines.append(f"  m{a} -> m{b} [style=dashed, dir=none, color=blue, penwidth=2];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def skeleton_dot(skel: Skeleton) -> str:
    lines = ["graph skeleton {"]
    for cv in skel.classes:
        if cv.cid < skel.n:
            lines.append(f'  c{cv.cid} [label="{cv.cid}", shape=circle];')
        else:
            lines.append(f'  c{cv.cid} [label="{_elems(cv.members)}", shape=box];')
    for a, b in sorted(skel.c_edges):
        lines.append(f"  c{a} -- c{b};")
    for a, b in sorted(skel.t_edges):
        lines.append(f"  c{a} -- c{b} [style=dashed, color=blue, penwidth=2];")
    for a, b in sorted(skel.r_edges):
        lines.append(f"  c{a} -- c{b} [style=dotted, color=red];")
    lines.append("}")
    return "\n".join(lines) + "\n"
