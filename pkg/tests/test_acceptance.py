"""Acceptance criteria as executable checks, one test per criterion.

Each test prints a single pass line with its measured runtime and asserts
the stated budget.  Run with ``pytest tests/test_acceptance.py -v -s`` to
see the lines as they complete.
"""

import time

from decomp import (
    DiGraph,
    Label,
    cotree,
    count_modules_via_tree,
    cut_rank,
    decode,
    four_bicolourings,
    generate_family,
    graph_from_cotree,
    graph_from_modular,
    graph_from_skeleton,
    graph_from_split,
    has_unique_request,
    identify_thin,
    is_bipartitive,
    is_thin,
    is_weakly_bipartitive,
    laminar_tree,
    laminar_tree_bipartitions,
    modular_decomposition,
    modules_set_system,
    rank_width_of,
    skeleton,
    split_decomposition,
    strong_bipartitions,
    thin_4_partition,
    tree_to_sets,
    weakly_partitive_tree,
)
from decomp.bitset import popcount
from decomp.cmso import (
    ancestor_output_matches,
    modular_output_matches,
    pipeline_bipartition_laminar,
    pipeline_laminar_tree,
    pipeline_modular,
    pipeline_skeleton_guided,
    pipeline_split,
    pipeline_weakly_partitive_tree,
    sentence_even_modules,
    skeleton_output_matches,
    split_output_matches,
    unrooted_output_matches,
    wptree_output_matches,
)
from decomp.graphdec import CotreeLabel
from decomp.identification import NodeCase, classify_node
from decomp.oracle import (
    all_digraphs,
    all_graphs,
    enumerate_bijoins,
    enumerate_modules,
    enumerate_splits,
    random_connected_digraph,
    random_connected_graph,
    random_digraph,
    random_graph,
    random_laminar_system,
    random_rooted_tree,
    random_strongly_connected_digraph,
)
from tests.helpers import all_laminar_families, grow_distance_hereditary, has_p4


def _report(number: int, name: str, started: float, budget: float) -> None:
    elapsed = time.time() - started
    print(f"[acceptance] criterion {number} ({name}): PASS ({elapsed:.1f}s, budget {budget:.0f}s)")
    assert elapsed < budget, f"criterion {number} exceeded its {budget}s budget: {elapsed:.1f}s"


def test_criterion_1_laminar_roundtrip():
    started = time.time()
    for n in range(1, 7):
        for system in all_laminar_families(n):
            tree = laminar_tree(system)
            assert tree_to_sets(tree) == system
            assert tree.size <= 2 * n - 1
    for seed in range(500):
        n = 2 + seed % 9
        system = random_laminar_system(n, seed)
        tree = laminar_tree(system)
        assert tree_to_sets(tree) == system
        assert tree.size <= 2 * n - 1
    _report(1, "laminar roundtrip", started, 30)


def test_criterion_2_identification_suite():
    started = time.time()
    for seed in range(500):
        tree = random_rooted_tree(20 + (seed * 7) % 181, seed)
        part = thin_4_partition(tree)
        assert len(part.classes) <= 4
        union = set()
        for cls in part.classes:
            assert is_thin(tree, cls)
            assert not union & cls
            union |= cls
        assert union == set(tree.inner_nodes)
        for colouring, cls in four_bicolourings(tree):
            pair = identify_thin(tree, cls)
            assert has_unique_request(tree, pair)
            assert decode(tree, colouring) == pair
            both = colouring.a | colouring.b
            for x in tree.inner_nodes:
                odd = sum(1 for c in tree.children[x] if popcount(both & tree.leafset[c]) % 2)
                case = classify_node(tree, colouring, x)
                assert case is {0: NodeCase.UNREQUESTED, 1: NodeCase.REQUESTED_ONLY, 2: NodeCase.IN_S}[odd]
    _report(2, "identification suite", started, 60)


def test_criterion_3_weakly_partitive_tree():
    started = time.time()
    for g in all_digraphs(4):
        system = modules_set_system(g)
        wpt = weakly_partitive_tree(system)
        assert generate_family(wpt) == system
    for seed in range(200):
        n = 2 + seed % 7
        g = random_digraph(n, 0.45, seed)
        system = modules_set_system(g)
        wpt = weakly_partitive_tree(system)
        assert generate_family(wpt) == system
        undirected = random_graph(n, 0.45, seed)
        uw = weakly_partitive_tree(modules_set_system(undirected))
        assert Label.LINEAR not in uw.label.values()
    _report(3, "weakly-partitive tree roundtrip", started, 120)


def test_criterion_4_modular_roundtrip_and_cotree():
    started = time.time()
    for g in all_digraphs(4):
        assert graph_from_modular(modular_decomposition(g)) == g
    for seed in range(500):
        g = random_digraph(2 + seed % 9, 0.4, seed)
        assert graph_from_modular(modular_decomposition(g)) == g
    for n in range(1, 7):
        for g in all_graphs(n):
            try:
                ct = cotree(g)
                succeeded = True
                assert graph_from_cotree(ct) == g
                assert CotreeLabel.LINEAR not in ct.label.values()
            except Exception as exc:
                from decomp import NotCograph

                assert isinstance(exc, NotCograph)
                succeeded = False
            assert succeeded == (not has_p4(g))
    _report(4, "modular roundtrip and cotree", started, 120)


def test_criterion_5_split_and_skeleton():
    started = time.time()
    for seed in range(300):
        n = 3 + seed % 10
        g = random_connected_digraph(n, 0.4, seed)
        assert graph_from_split(split_decomposition(g)) == g
    for seed in range(300):
        n = 2 + seed % 11
        g = random_connected_graph(n, 0.45, seed)
        assert graph_from_skeleton(skeleton(g)) == g
    for seed in range(25):
        n = 3 + seed % 6
        sg = random_strongly_connected_digraph(n, 0.5, seed)
        assert is_weakly_bipartitive(enumerate_splits(sg))
        ug = random_graph(n, 0.5, seed)
        assert is_bipartitive(enumerate_bijoins(ug))
    _report(5, "split and skeleton roundtrips", started, 300)


def test_criterion_6_pipeline_agreement():
    started = time.time()
    # guided runs reproduce the direct constructions, universes up to 7
    for seed in range(12):
        system = random_laminar_system(2 + seed % 6, seed)
        outs = pipeline_laminar_tree(system, mode="guided")
        assert len(outs) == 1 and ancestor_output_matches(outs[0], laminar_tree(system))
    for seed in range(10):
        g = random_digraph(2 + seed % 6, 0.45, seed)
        system = modules_set_system(g)
        outs = pipeline_weakly_partitive_tree(system, mode="guided")
        assert len(outs) == 1 and wptree_output_matches(outs[0], weakly_partitive_tree(system))
        outs = pipeline_modular(g, mode="guided")
        assert len(outs) == 1 and modular_output_matches(outs[0], modular_decomposition(g))
    for seed in range(8):
        g = random_connected_digraph(3 + seed % 5, 0.4, seed)
        system = enumerate_splits(g)
        tree = laminar_tree_bipartitions(strong_bipartitions(system))
        outs = pipeline_bipartition_laminar(system, mode="guided")
        assert len(outs) == 1 and unrooted_output_matches(outs[0], tree)
        outs = pipeline_split(g, mode="guided")
        assert outs and all(split_output_matches(o, split_decomposition(g)) for o in outs)
    for seed in range(5):
        g = random_connected_graph(3 + seed % 4, 0.5, seed)
        outs = pipeline_skeleton_guided(g)
        assert outs and all(skeleton_output_matches(o, skeleton(g)) for o in outs)
    # exhaustive runs: non-empty and every output correct, universes up to 4
    for n, seed in ((3, 0), (4, 3)):
        system = random_laminar_system(n, seed)
        outs = pipeline_laminar_tree(system, mode="exhaustive")
        assert outs and all(ancestor_output_matches(o, laminar_tree(system)) for o in outs)
        g = random_digraph(n, 0.5, seed)
        msys = modules_set_system(g)
        outs = pipeline_weakly_partitive_tree(msys, mode="exhaustive")
        assert outs and all(wptree_output_matches(o, weakly_partitive_tree(msys)) for o in outs)
        outs = pipeline_modular(g, mode="exhaustive")
        assert outs and all(modular_output_matches(o, modular_decomposition(g)) for o in outs)
        cg = random_connected_digraph(n, 0.5, seed)
        splits = enumerate_splits(cg)
        tree = laminar_tree_bipartitions(strong_bipartitions(splits))
        outs = pipeline_bipartition_laminar(splits, mode="exhaustive")
        assert outs and all(unrooted_output_matches(o, tree) for o in outs)
        outs = pipeline_split(cg, mode="exhaustive")
        assert outs and all(split_output_matches(o, split_decomposition(cg)) for o in outs)
    _report(6, "pipeline/direct agreement", started, 300)


def test_criterion_7_module_parity_sentence():
    started = time.time()
    for n in range(1, 7):
        for g in all_graphs(n):
            brute = len(enumerate_modules(g).family)
            assert sentence_even_modules(g) == (brute % 2 == 0)
            assert count_modules_via_tree(g) == brute
    _report(7, "module parity sentence", started, 300)


def test_criterion_8_cut_rank_and_rank_width():
    started = time.time()
    import random as _random

    rng = _random.Random(2024)
    for trial in range(1000):
        n = rng.randint(2, 32)
        g = random_graph(n, rng.uniform(0.1, 0.9), trial)
        x = rng.randrange(1, 1 << n)
        assert cut_rank(g, x) == cut_rank(g, ((1 << n) - 1) & ~x)
    for seed in range(50):
        n = 3 + seed % 10
        g, tree = grow_distance_hereditary(n, seed)
        width = rank_width_of(g, tree)
        assert width <= 1
        if any(g.adj):
            assert width == 1
    _report(8, "cut-rank and rank-width", started, 60)
