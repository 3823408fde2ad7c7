import pytest

from decomp import DecompError, DiGraph, TooLarge, build_structure, normalize_set_system
from decomp.cmso import (
    Colouring,
    Copying,
    Filtering,
    Interpretation,
    Pipeline,
    UniverseRestriction,
    apply_atom,
    parse_formula,
    run_pipeline,
)
from decomp.cmso import formulas as F

S2 = build_structure(DiGraph.from_edges(2, [(0, 1)], directed=False))
TOP = parse_formula("forall x. x = x")


def test_filtering_keeps_or_drops():
    assert run_pipeline(S2, Pipeline((Filtering(TOP),))) == [S2]
    bottom = parse_formula("exists x. !(x = x)")
    assert run_pipeline(S2, Pipeline((Filtering(bottom),))) == []


def test_empty_pipeline_is_identity():
    assert run_pipeline(S2, Pipeline(())) == [S2]


def test_copying_adds_tagged_copies():
    (out,) = run_pipeline(S2, Pipeline((Copying(1),)))
    assert out.n == 4
    assert out.relations["copy1"] == frozenset({(2, 0), (3, 1)})
    # original relations preserved on originals
    assert out.relations["edge"] == S2.relations["edge"]


def test_colouring_exhaustive_counts():
    outs = run_pipeline(S2, Pipeline((Colouring("c"),)))
    assert len(outs) == 4
    sizes = sorted(len(o.relations["c"]) for o in outs)
    assert sizes == [0, 1, 1, 2]


def test_colour_then_filter_empty():
    empty = parse_formula("forall x. !(c(x))")
    outs = run_pipeline(S2, Pipeline((Colouring("c"), Filtering(empty))))
    assert len(outs) == 1
    assert outs[0].relations["c"] == frozenset()


def test_guided_mode_needs_guesses():
    pipe = Pipeline((Colouring("c"),))
    with pytest.raises(DecompError):
        run_pipeline(S2, pipe, "guided")
    with pytest.raises(DecompError):
        run_pipeline(S2, pipe, "guided", guesses=[1, 2])
    (out,) = run_pipeline(S2, pipe, "guided", guesses=[0b10])
    assert out.relations["c"] == frozenset({(1,)})


def test_exhaustive_bits_guard():
    pipe = Pipeline(tuple(Colouring(f"c{i}") for i in range(11)))
    with pytest.raises(TooLarge):
        run_pipeline(S2, pipe, "exhaustive", colour_bits_guard=20)


def test_universe_restriction_identity():
    atoms = (UniverseRestriction("x", F.EqVar("x", "x")),)
    (same,) = run_pipeline(S2, Pipeline(atoms))
    assert same.universe == (0, 1)


def test_interpretation_reverses_edges():
    interp = Interpretation({"edge": (("x", "y"), F.Rel("edge", ("y", "x")))}, {})
    g = build_structure(DiGraph.from_edges(2, [(0, 1)]))
    (out,) = run_pipeline(g, Pipeline((interp,)))
    assert out.relations["edge"] == frozenset({(1, 0)})


def test_interpretation_set_predicate():
    struct = build_structure(normalize_set_system([], 2))
    interp = Interpretation({}, {"BIG": (("Z",), F.C2(F.SVar("Z")))})
    (out,) = run_pipeline(struct, Pipeline((interp,)))
    assert out.set_predicates["BIG"] == frozenset({(0,), (3,)})


def test_apply_atom_api():
    outs = apply_atom(S2, Colouring("c"))
    assert len(outs) == 4
    outs = apply_atom(S2, Colouring("c"), mode="guided", guess=0b01)
    assert len(outs) == 1 and outs[0].relations["c"] == frozenset({(0,)})
    assert apply_atom(S2, Filtering(TOP)) == [S2]


def test_restriction_filters_relations_and_predicates():
    struct = build_structure(normalize_set_system([], 2))
    struct = struct.with_relation("edge", [(0, 1)])
    keep0 = F.Not(F.ex_e("_w", F.land(F.Rel("edge", ("_w", "x")), F.EqVar("_w", "_w"))))
    (out,) = apply_atom(struct, UniverseRestriction("x", keep0))
    assert out.universe == (0,)
    assert out.relations["edge"] == frozenset()
    assert out.set_predicates["SET"] == frozenset({(1,)})
