import pytest

from decomp import FormulaSyntaxError, ScopeError
from decomp.cmso import formulas as F
from decomp.cmso import parse_formula


def test_two_distinct_elements():
    got = parse_formula("exists x. exists y. !(x = y)")
    assert got == F.ExistsE("x", F.ExistsE("y", F.Not(F.EqVar("x", "y"))))


def test_set_predicate_and_parity():
    got = parse_formula("forall X. (SET(X) -> C2(X))")
    assert got == F.ForallS("X", F.Implies(F.SetPred("SET", (F.SVar("X"),)), F.C2(F.SVar("X"))))


def test_degenerate_formula_transliteration():
    text = """
    # every two children display a member union
    forall y. forall z. ((parent(x, y) & parent(x, z))
        -> SET(leafset(y) union leafset(z)))
    """
    got = parse_formula(text, free=("x",))
    assert isinstance(got, F.ForallE)
    inner = got.body
    assert isinstance(inner, F.ForallE)
    assert isinstance(inner.body, F.Implies)
    pred = inner.body.right
    assert pred == F.SetPred("SET", (F.Union(F.Leafset("y"), F.Leafset("z")),))


def test_leafset_two_arguments():
    got = parse_formula("exists z. z in leafset(t, s)", free=("t", "s"))
    assert got == F.ExistsE("z", F.Member("z", F.Leafset2("t", "s")))


def test_children_binding():
    got = parse_formula("exists Y. children(Y, y)", free=("y",))
    assert got == F.ExistsS("Y", F.Children("Y", "y"))


def test_connective_precedence():
    got = parse_formula("exists x. x = x & !(x = x) | x = x")
    body = got.body
    # & binds tighter than |
    assert isinstance(body, F.Or)


def test_implication_right_associative():
    got = parse_formula("forall x. x = x -> x = x -> x = x")
    assert isinstance(got.body, F.Implies)
    assert isinstance(got.body.right, F.Implies)


def test_set_operators_and_constants():
    got = parse_formula("forall X. X subseteq U minus {a}", free=("a",))
    assert got.body == F.SubsetEq(F.SVar("X"), F.Minus(F.UniverseT(), F.Singleton("a")))
    got = parse_formula("forall X. X inter U = empty")
    assert got.body == F.EqSet(F.Inter(F.SVar("X"), F.UniverseT()), F.EmptyT())


def test_relation_application():
    got = parse_formula("forall x. forall y. edge(x, y) <-> edge(y, x)")
    assert isinstance(got.body.body, F.Iff)


def test_hyphenated_relation_names():
    got = parse_formula("forall x. forall y. t-edge(x, y) -> t-edge(y, x)")
    assert got.body.body.left == F.Rel("t-edge", ("x", "y"))


def test_scope_error():
    with pytest.raises(ScopeError):
        parse_formula("exists x. edge(x, y)")
    parse_formula("exists x. edge(x, y)", free=("y",))


def test_syntax_errors():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("exists x. (x = y")
    with pytest.raises(FormulaSyntaxError):
        parse_formula("exists x. x = y extra junk", free=("y",))
    with pytest.raises(FormulaSyntaxError):
        parse_formula("?? nonsense")


def test_comments_ignored():
    got = parse_formula("exists x. x = x  # trailing comment")
    assert isinstance(got, F.ExistsE)


def test_parsed_formula_evaluates():
    from decomp import DiGraph, build_structure
    from decomp.cmso import evaluate

    g = build_structure(DiGraph.from_edges(3, [(0, 1)], directed=False))
    sym = parse_formula("forall x. forall y. edge(x, y) <-> edge(y, x)")
    assert evaluate(g, sym)
    some_edge = parse_formula("exists x. exists y. edge(x, y)")
    assert evaluate(g, some_edge)
    iso = parse_formula("exists x. forall y. !(edge(x, y)) & !(edge(y, x))")
    assert evaluate(g, iso)
