"""Executable transduction pipelines mirroring the decomposition algorithms.

Every pipeline is a list of atomic transductions whose formulas come from
the corpus below.  Guided runs feed the colouring atoms guesses computed by
the direct algorithms (four bi-colourings of the target tree, an anchor, a
root) and must reproduce the direct construction exactly; exhaustive runs
enumerate colourings and check that the surviving outputs are non-empty and
all correct, which is the shape of the underlying correctness theorems.

Exhaustive colouring spaces blow up as 2^(8n) for the four-bi-colouring
stage, so the exhaustive driver enumerates colour pairs once, keeps their
formula-decoded representative maps, and assembles surviving tuples
combinatorially; sampled tuples are re-run through the literal atom
composition to pin the shortcut to the atom semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import networkx as nx

from ..bitset import bits, full_mask, popcount, submasks
from ..core import (
    BIPART,
    BipartitionSystem,
    DiGraph,
    EDGE,
    ExtRelStruct,
    RootedTree,
    SET,
    STRONG_SET,
    SetSystem,
    UnrootedTree,
    build_structure,
)
from ..errors import DecompError, RequiresUndirected
from ..graphdec import ModularDecomposition, Skeleton, SplitDecomposition, modular_decomposition, modules_set_system
from ..identification import four_bicolourings
from ..laminar import laminar_tree, rooted_reduction, tree_to_sets
from ..partitive import Label, WPTree, strong_bipartitions, strong_members, weakly_partitive_tree, wp_betweenness_triples
from . import formulas as F
from .evaluate import DEFAULT_EVAL_GUARD, Evaluator
from .transduction import (
    Colouring,
    Copying,
    Filtering,
    Interpretation,
    Pipeline,
    UniverseRestriction,
    apply_deterministic,
    run_pipeline,
)

COLOUR_PAIRS = tuple((f"A{i}", f"B{i}") for i in range(1, 5))
ANCHOR = "ANCHOR"
ROOTC = "ROOTC"


# ---------------------------------------------------------------------------
# formula corpus


def f_desc(base: str = SET) -> F.Formula:
    """desc(X, Y): both are family members and X is included in Y."""
    X, Y = F.SVar("X"), F.SVar("Y")
    return F.land(F.SetPred(base, (X,)), F.SetPred(base, (Y,)), F.SubsetEq(X, Y))


def f_child(base: str = SET) -> F.Formula:
    """child(X, Y): immediate inclusion among family members."""
    X, Y, Z = F.SVar("X"), F.SVar("Y"), F.SVar("Z")
    between = F.land(
        F.SetPred(base, (Z,)),
        F.SubsetEq(X, Z),
        F.SubsetEq(Z, Y),
    )
    return F.land(
        F.SetPred(base, (X,)),
        F.SetPred(base, (Y,)),
        F.SubsetEq(X, Y),
        F.Not(F.EqSet(X, Y)),
        F.fa_s("Z", F.implies(between, F.lor(F.EqSet(Z, X), F.EqSet(Z, Y)))),
    )


def f_strong(base: str = SET, var: str = "Z") -> F.Formula:
    """The family member ``var`` overlaps no other member."""
    Z, X = F.SVar(var), F.SVar("_sX")
    clash = F.land(
        F.Not(F.EqSet(F.Inter(X, Z), F.EmptyT())),
        F.Not(F.SubsetEq(X, Z)),
        F.Not(F.SubsetEq(Z, X)),
    )
    return F.land(
        F.SetPred(base, (Z,)),
        F.fa_s("_sX", F.implies(F.land(F.SetPred(base, (X,)), clash), F.TrueF() if False else F.Not(F.TrueF()))),
    )


def f_module(edge: str = EDGE, var: str = "Z") -> F.Formula:
    """``var`` is a non-empty module: outsiders see all or none, both ways."""
    Z = F.SVar(var)
    same_out = F.Iff(F.Rel(edge, ("_mu", "_mv")), F.Rel(edge, ("_mu", "_mw")))
    same_in = F.Iff(F.Rel(edge, ("_mv", "_mu")), F.Rel(edge, ("_mw", "_mu")))
    return F.land(
        F.Not(F.EqSet(Z, F.EmptyT())),
        F.fa_e(
            "_mu",
            F.implies(
                F.Not(F.Member("_mu", Z)),
                F.fa_e(
                    "_mv",
                    F.implies(
                        F.Member("_mv", Z),
                        F.fa_e("_mw", F.implies(F.Member("_mw", Z), F.land(same_out, same_in))),
                    ),
                ),
            ),
        ),
    )


def f_split(edge: str = EDGE, var: str = "Z") -> F.Formula:
    """{Z, U-Z} is a split: at most one non-empty out- and in-profile per side."""
    Z = F.SVar(var)
    out_edge = lambda a, b: F.Rel(edge, (a, b))  # noqa: E731

    def one_profile(direction):
        src = lambda x, y: out_edge(x, y) if direction == "out" else out_edge(y, x)  # noqa: E731
        return F.fa_e(
            "_s1",
            F.implies(
                F.land(F.Member("_s1", Z), F.ex_e("_sy", F.land(F.Not(F.Member("_sy", Z)), src("_s1", "_sy")))),
                F.fa_e(
                    "_s2",
                    F.implies(
                        F.land(F.Member("_s2", Z), F.ex_e("_sz", F.land(F.Not(F.Member("_sz", Z)), src("_s2", "_sz")))),
                        F.fa_e(
                            "_sw",
                            F.implies(
                                F.Not(F.Member("_sw", Z)),
                                F.Iff(src("_s1", "_sw"), src("_s2", "_sw")),
                            ),
                        ),
                    ),
                ),
            ),
        )

    return F.land(
        F.Not(F.EqSet(Z, F.EmptyT())),
        F.Not(F.EqSet(Z, F.UniverseT())),
        one_profile("out"),
        one_profile("in"),
    )


def f_bijoin(edge: str = EDGE, var: str = "Z") -> F.Formula:
    """{Z, U-Z} is a bi-join: members with different outside profiles have
    complementary ones."""
    Z = F.SVar(var)
    same = F.fa_e(
        "_by",
        F.implies(F.Not(F.Member("_by", Z)), F.Iff(F.Rel(edge, ("_b1", "_by")), F.Rel(edge, ("_b2", "_by")))),
    )
    compl = F.fa_e(
        "_by",
        F.implies(F.Not(F.Member("_by", Z)), F.Iff(F.Rel(edge, ("_b1", "_by")), F.Not(F.Rel(edge, ("_b2", "_by"))))),
    )
    return F.land(
        F.Not(F.EqSet(Z, F.EmptyT())),
        F.Not(F.EqSet(Z, F.UniverseT())),
        F.fa_e(
            "_b1",
            F.implies(
                F.Member("_b1", Z),
                F.fa_e("_b2", F.implies(F.land(F.Member("_b2", Z), F.Not(same)), compl)),
            ),
        ),
    )


def f_phi_identified(base: str, a_rel: str, b_rel: str) -> F.Formula:
    """phi_{A,B}(_X): the member _X belongs to the identified set."""
    X = F.SVar("_X")
    Z = F.SVar("_pZ")
    colours = F.Union(F.RelImage(a_rel), F.RelImage(b_rel))
    ab = F.Union(F.Singleton("_pa"), F.Singleton("_pb"))
    per_child = F.implies(
        F.SetPred(f"child[{base}]", (Z, X)),
        F.land(
            F.Not(F.land(F.Member("_pa", Z), F.Member("_pb", Z))),
            F.C2(F.Inter(F.Minus(Z, ab), colours)),
        ),
    )
    return F.land(
        F.SetPred(base, (X,)),
        F.ex_e(
            "_pa",
            F.land(
                F.Member("_pa", F.Inter(X, F.RelImage(a_rel))),
                F.ex_e(
                    "_pb",
                    F.land(F.Member("_pb", F.Inter(X, F.RelImage(b_rel))), F.fa_s("_pZ", per_child)),
                ),
            ),
        ),
    )


def f_repr(base: str, colour: str, phi: F.Formula) -> F.Formula:
    """repr(_a, _X): _X is identified and _a is its representative in the
    given colour; minimality runs over proper subsets inside the family."""
    X, Z = F.SVar("_X"), F.SVar("_rZ")
    minimal = F.fa_s(
        "_rZ",
        F.implies(
            F.land(
                F.SetPred(base, (Z,)),
                F.Member("_a", Z),
                F.SubsetEq(Z, X),
                F.Not(F.EqSet(Z, X)),
            ),
            F.Not(F.apply_to(phi, sets={"_X": Z})),
        ),
    )
    return F.land(phi, F.Member("_a", F.Inter(X, F.RelImage(colour))), minimal)


@dataclass(frozen=True)
class ReprSet:
    """Shared formula instances for one bi-colouring pair."""

    phi: F.Formula
    repr_a: F.Formula
    repr_b: F.Formula


def build_reprs(base: str, pairs=COLOUR_PAIRS) -> tuple[ReprSet, ...]:
    out = []
    for a_rel, b_rel in pairs:
        phi = f_phi_identified(base, a_rel, b_rel)
        out.append(
            ReprSet(
                phi,
                f_repr(base, a_rel, phi),
                f_repr(base, b_rel, f_phi_identified(base, b_rel, a_rel)),
            )
        )
    return tuple(out)


def _is_copy(var: str, copies: int = 4) -> F.Formula:
    return F.lor(*[F.ex_e("_oc", F.Rel(f"copy{i}", (var, "_oc"))) for i in range(1, copies + 1)])


def f_keep_represented(base: str, reprs: tuple[ReprSet, ...]) -> F.Formula:
    """Universe restriction of the laminar stage: originals plus copies whose
    element represents a member in the copy's colouring."""
    branches = []
    for i, rs in enumerate(reprs, start=1):
        KX = F.SVar("_KX")
        branches.append(
            F.ex_e(
                "_kc",
                F.land(
                    F.Rel(f"copy{i}", ("x", "_kc")),
                    F.ex_s(
                        "_KX",
                        F.land(F.SetPred(base, (KX,)), F.apply_to(rs.repr_a, elems={"_a": "_kc"}, sets={"_X": KX})),
                    ),
                ),
            )
        )
    return F.lor(F.Not(_is_copy("x")), *branches)


def f_targets(base: str, reprs: tuple[ReprSet, ...], var: str, target: F.SetTerm) -> F.Formula:
    """The element ``var`` stands for the member ``target``: originals stand
    for their singleton, kept copies for the member they represent."""
    branches = [F.land(F.Not(_is_copy(var)), F.EqSet(target, F.Singleton(var)))]
    for i, rs in enumerate(reprs, start=1):
        branches.append(
            F.ex_e(
                "_tc",
                F.land(
                    F.Rel(f"copy{i}", (var, "_tc")),
                    F.apply_to(rs.repr_a, elems={"_a": "_tc"}, sets={"_X": target}),
                ),
            )
        )
    return F.lor(*branches)


def f_ancestor(base: str, reprs: tuple[ReprSet, ...]) -> F.Formula:
    AX, AY = F.SVar("_AX"), F.SVar("_AY")
    return F.ex_s(
        "_AX",
        F.land(
            F.SetPred(base, (AX,)),
            f_targets(base, reprs, "x", AX),
            F.ex_s(
                "_AY",
                F.land(F.SetPred(base, (AY,)), f_targets(base, reprs, "y", AY), F.SubsetEq(AY, AX)),
            ),
        ),
    )


def f_tree_validity(base: str) -> F.Formula:
    """The ancestor relation displays exactly the family: every member is the
    leaf-descendant set of exactly one element and vice versa."""
    descmatch = F.fa_e(
        "_dz",
        F.implies(
            F.Rel("leaf", ("_dz",)),
            F.Iff(F.Member("_dz", F.SVar("_DX")), F.Rel("ancestor", ("_dt", "_dz"))),
        ),
    )

    def dm(t: str, x: F.SetTerm) -> F.Formula:
        return F.apply_to(descmatch, elems={"_dt": t}, sets={"_DX": x})

    VX = F.SVar("_VX")
    covered = F.fa_s("_VX", F.implies(F.SetPred(base, (VX,)), F.ex_e("_vt", dm("_vt", VX))))
    displayed = F.fa_e("_vt", F.ex_s("_VX", F.land(F.SetPred(base, (VX,)), dm("_vt", VX))))
    unique = F.fa_s(
        "_VX",
        F.implies(
            F.SetPred(base, (VX,)),
            F.fa_e(
                "_v1",
                F.implies(
                    dm("_v1", VX),
                    F.fa_e("_v2", F.implies(dm("_v2", VX), F.EqVar("_v1", "_v2"))),
                ),
            ),
        ),
    )
    return F.land(covered, displayed, unique)


def f_degenerate(base: str = SET) -> F.Formula:
    body = F.implies(
        F.land(F.Rel("parent", ("x", "_dy")), F.Rel("parent", ("x", "_dz"))),
        F.SetPred(base, (F.Union(F.Leafset("_dy"), F.Leafset("_dz")),)),
    )
    return F.land(F.Rel("inner", ("x",)), F.fa_e("_dy", F.fa_e("_dz", body)))


def f_betweenness(base: str = SET) -> F.Formula:
    S = F.SVar("_bS")

    def spans(lo: str, mid: str, hi: str) -> F.Formula:
        return F.ex_s(
            "_bS",
            F.land(
                F.SetPred(base, (S,)),
                F.SubsetEq(F.Union(F.Leafset(lo), F.Leafset(mid)), S),
                F.EqSet(F.Inter(F.Leafset(hi), S), F.EmptyT()),
            ),
        )

    return F.land(
        F.distinct("x", "y", "z"),
        F.ex_e(
            "_bt",
            F.land(
                F.Rel("parent", ("_bt", "x")),
                F.Rel("parent", ("_bt", "y")),
                F.Rel("parent", ("_bt", "z")),
            ),
        ),
        F.Not(F.SetPred(base, (F.Union(F.Leafset("x"), F.Leafset("z")),))),
        spans("x", "y", "z"),
        spans("z", "y", "x"),
    )


def f_m_edge(edge: str = EDGE) -> F.Formula:
    return F.land(
        F.neq("s", "r"),
        F.ex_e("_mt", F.land(F.Rel("parent", ("_mt", "s")), F.Rel("parent", ("_mt", "r")))),
        F.ex_e(
            "_mx",
            F.land(
                F.Member("_mx", F.Leafset("s")),
                F.ex_e("_my", F.land(F.Member("_my", F.Leafset("r")), F.Rel(edge, ("_mx", "_my")))),
            ),
        ),
    )


def f_anchor_set() -> F.Formula:
    """SET(X) of the rooted reduction at the anchor colour: the universe, plus
    member sides avoiding the anchor, plus the anchor singleton."""
    X = F.SVar("Z")
    anchored = F.fa_e(
        "_aa",
        F.implies(
            F.Rel(ANCHOR, ("_aa",)),
            F.lor(F.EqSet(X, F.Singleton("_aa")), F.Not(F.Member("_aa", X))),
        ),
    )
    member = F.lor(F.SetPred(BIPART, (X,)), F.SetPred(BIPART, (F.Minus(F.UniverseT(), X),)))
    return F.lor(F.EqSet(X, F.UniverseT()), F.land(anchored, member))


def f_single_colour(name: str) -> F.Formula:
    return F.ex_e(
        "_u1", F.land(F.Rel(name, ("_u1",)), F.fa_e("_u2", F.implies(F.Rel(name, ("_u2",)), F.EqVar("_u2", "_u1"))))
    )


def f_drop_root() -> F.Formula:
    return F.ex_e("_rz", F.land(F.neq("_rz", "x"), F.Rel("ancestor", ("_rz", "x"))))


def f_unrooted_tedge() -> F.Formula:
    """Edges of the unrooted tree: parent pairs both ways, plus the splice of
    the anchor leaf onto the now-parentless former root child."""
    parentless = lambda v: F.Not(F.ex_e("_tz", F.Rel("parent", ("_tz", v))))  # noqa: E731
    anchor = lambda v: F.Rel(ANCHOR, (v,))  # noqa: E731
    return F.lor(
        F.Rel("parent", ("x", "y")),
        F.Rel("parent", ("y", "x")),
        F.land(anchor("x"), F.Not(anchor("y")), parentless("y")),
        F.land(anchor("y"), F.Not(anchor("x")), parentless("x")),
    )


def f_marker() -> F.Formula:
    """marker(x, y, z): x realizes the arc y->z of the tree."""
    return F.lor(
        F.land(F.Rel("parent", ("y", "z")), F.EqVar("x", "z"), F.Not(F.ex_e("_mo", F.Rel("copy1", ("x", "_mo"))))),
        F.land(F.Rel("parent", ("z", "y")), F.Rel("copy1", ("x", "y"))),
    )


def f_split_keep() -> F.Formula:
    has_parent = lambda v: F.ex_e("_kp", F.Rel("parent", ("_kp", v)))  # noqa: E731
    return F.lor(
        F.land(F.Not(F.ex_e("_ko", F.Rel("copy1", ("x", "_ko")))), has_parent("x")),
        F.ex_e("_ko", F.land(F.Rel("copy1", ("x", "_ko")), has_parent("_ko"))),
    )


def f_split_c_edge(marker: F.Formula, edge: str = EDGE) -> F.Formula:
    mk = lambda x, y, z: F.apply_to(marker, elems={"x": x, "y": y, "z": z})  # noqa: E731
    return F.land(
        F.neq("x", "y"),
        F.ex_e(
            "_cs",
            F.ex_e(
                "_ct",
                F.land(
                    F.Rel("t-edge", ("_cs", "_ct")),
                    mk("x", "_cs", "_ct"),
                    F.ex_e(
                        "_cu",
                        F.land(
                            F.neq("_cu", "_ct"),
                            F.Rel("t-edge", ("_cs", "_cu")),
                            mk("y", "_cs", "_cu"),
                            F.ex_e(
                                "_cx",
                                F.land(
                                    F.Member("_cx", F.Leafset2("_cs", "_ct")),
                                    F.ex_e(
                                        "_cy",
                                        F.land(
                                            F.Member("_cy", F.Leafset2("_cs", "_cu")),
                                            F.Rel(edge, ("_cx", "_cy")),
                                        ),
                                    ),
                                ),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )


def f_split_t_edge(marker: F.Formula) -> F.Formula:
    mk = lambda x, y, z: F.apply_to(marker, elems={"x": x, "y": y, "z": z})  # noqa: E731
    return F.ex_e(
        "_ts",
        F.ex_e(
            "_tt",
            F.land(F.Rel("t-edge", ("_ts", "_tt")), mk("x", "_ts", "_tt"), mk("y", "_tt", "_ts")),
        ),
    )


# ---------------------------------------------------------------------------
# pipeline assembly


_UNARY_RELS = {ANCHOR, ROOTC}


def _identity_relations(names: tuple[str, ...]) -> dict:
    out = {}
    for name in names:
        args = ("x",) if name in _UNARY_RELS else ("x", "y")
        out[name] = (args, F.Rel(name, args))
    return out


def _identity_preds(names: tuple[str, ...]) -> dict:
    return {name: (("Z",), F.SetPred(name, (F.SVar("Z"),))) for name in names}


def laminar_stage_atoms(base: str, keep_rels: tuple[str, ...] = (), keep_preds: tuple[str, ...] = ()):
    """Colour, copy, restrict, interpret ancestor, filter: the tree builder."""
    reprs = build_reprs(base)
    atoms: list = []
    for a_rel, b_rel in COLOUR_PAIRS:
        atoms.append(Colouring(a_rel))
        atoms.append(Colouring(b_rel))
    atoms.append(Copying(4))
    atoms.append(UniverseRestriction("x", f_keep_represented(base, reprs)))
    relations = {"ancestor": (("x", "y"), f_ancestor(base, reprs))}
    relations.update(_identity_relations(keep_rels))
    preds = _identity_preds((base,) + keep_preds)
    atoms.append(Interpretation(relations, preds))
    atoms.append(Filtering(f_tree_validity(base)))
    return atoms, reprs


def pipeline_laminar_tree_atoms(keep_rels: tuple[str, ...] = ()) -> Pipeline:
    atoms, _ = laminar_stage_atoms(SET, keep_rels=keep_rels)
    return Pipeline(tuple(atoms))


def strong_interp(
    keep_rels: tuple[str, ...] = (), base: str = SET, keep_preds: tuple[str, ...] = ()
) -> Interpretation:
    preds = _identity_preds((base,) + keep_preds)
    preds[STRONG_SET] = (("Z",), f_strong(base))
    return Interpretation(_identity_relations(keep_rels), preds)


def pipeline_weakly_partitive_atoms() -> Pipeline:
    atoms: list = [strong_interp()]
    stage, _ = laminar_stage_atoms(STRONG_SET, keep_preds=(SET,))
    atoms.extend(stage)
    relations = {
        "ancestor": (("x", "y"), F.Rel("ancestor", ("x", "y"))),
        "DEGENERATE": (("x",), f_degenerate(SET)),
        "betweeness": (("x", "y", "z"), f_betweenness(SET)),
    }
    atoms.append(Interpretation(relations, {}))
    return Pipeline(tuple(atoms))


def pipeline_modular_atoms() -> Pipeline:
    module_interp = Interpretation(
        _identity_relations((EDGE,)),
        {SET: (("Z",), f_module())},
    )
    atoms: list = [module_interp, strong_interp(keep_rels=(EDGE,))]
    stage, _ = laminar_stage_atoms(STRONG_SET, keep_rels=(EDGE,), keep_preds=(SET,))
    atoms.extend(stage)
    relations = {
        "ancestor": (("x", "y"), F.Rel("ancestor", ("x", "y"))),
        "m-edge": (("s", "r"), f_m_edge()),
    }
    atoms.append(Interpretation(relations, {}))
    return Pipeline(tuple(atoms))


def bipartition_laminar_atoms(keep_rels: tuple[str, ...] = ()) -> list:
    """Anchor guess, rooted reduction, laminar stage, root drop, t-edges."""
    atoms: list = [Colouring(ANCHOR), Filtering(f_single_colour(ANCHOR))]
    rels = _identity_relations(keep_rels)
    rels[ANCHOR] = (("x",), F.Rel(ANCHOR, ("x",)))
    atoms.append(
        Interpretation(
            rels,
            {BIPART: (("Z",), F.SetPred(BIPART, (F.SVar("Z"),))), SET: (("Z",), f_anchor_set())},
        )
    )
    atoms.append(strong_interp(keep_rels=keep_rels + (ANCHOR,), base=SET, keep_preds=(BIPART,)))
    stage, _ = laminar_stage_atoms(STRONG_SET, keep_rels=keep_rels + (ANCHOR,), keep_preds=(SET, BIPART))
    atoms.extend(stage)
    atoms.append(UniverseRestriction("x", f_drop_root()))
    rels = {"t-edge": (("x", "y"), f_unrooted_tedge())}
    rels.update(_identity_relations(keep_rels))
    atoms.append(Interpretation(rels, _identity_preds((BIPART,))))
    return atoms


def pipeline_bipartition_laminar_atoms() -> Pipeline:
    return Pipeline(tuple(bipartition_laminar_atoms()))


def pipeline_split_atoms() -> Pipeline:
    split_interp = Interpretation(
        _identity_relations((EDGE,)),
        {BIPART: (("Z",), f_split())},
    )
    atoms: list = [split_interp]
    atoms.extend(bipartition_laminar_atoms(keep_rels=(EDGE,)))
    atoms.extend(_split_tail_atoms())
    return Pipeline(tuple(atoms))


# ---------------------------------------------------------------------------
# guided guesses from the direct algorithms


def _colour_guesses(tree: RootedTree) -> list[int]:
    out = []
    for colouring, _cls in four_bicolourings(tree):
        out.append(colouring.a)
        out.append(colouring.b)
    return out


def guesses_laminar(system: SetSystem) -> list[int]:
    return _colour_guesses(laminar_tree(system))


def guesses_weakly_partitive(system: SetSystem) -> list[int]:
    return _colour_guesses(laminar_tree(strong_members(system)))


def guesses_modular(graph: DiGraph) -> list[int]:
    return _colour_guesses(modular_decomposition(graph).tree)


def guesses_bipartition(system: BipartitionSystem) -> list[int]:
    reduced = rooted_reduction(strong_bipartitions(system), 0)
    return [1] + _colour_guesses(laminar_tree(reduced))


# ---------------------------------------------------------------------------
# output extraction and comparison


def output_tree_nodes(struct: ExtRelStruct) -> dict[int, int] | None:
    """Map each universe element to its leaf-descendant set under ancestor;
    None when the relation is not laminar-tree shaped."""
    ev = Evaluator(struct)
    try:
        leafsets = ev._derived("leafset")
    except Exception:
        return None
    return dict(leafsets)


def ancestor_output_matches(struct: ExtRelStruct, tree: RootedTree, base_family=None) -> bool:
    """Leafset-matching isomorphism between an ancestor structure and a tree."""
    leafsets = output_tree_nodes(struct)
    if leafsets is None or len(leafsets) != tree.size:
        return False
    got = sorted(leafsets.values())
    want = sorted(tree.leafset)
    if got != want:
        return False
    anc = struct.relations.get("ancestor", frozenset())
    by_mask = {m: x for x, m in leafsets.items()}
    if len(by_mask) != len(leafsets):
        return False
    for u in range(tree.size):
        for v in range(tree.size):
            expected = tree.is_ancestor(u, v)
            if ((by_mask[tree.leafset[u]], by_mask[tree.leafset[v]]) in anc) != expected:
                return False
    # leaves keep their universe ids
    return all(by_mask[1 << e] == e for e in range(tree.n_leaves))


def wptree_output_matches(struct: ExtRelStruct, wpt: WPTree) -> bool:
    if not ancestor_output_matches(struct, wpt.tree):
        return False
    leafsets = output_tree_nodes(struct)
    node_of_mask = {m: x for x, m in leafsets.items()}
    degenerate = {t[0] for t in struct.relations.get("DEGENERATE", frozenset())}
    want_deg = {node_of_mask[wpt.tree.leafset[t]] for t, lab in wpt.label.items() if lab is Label.DEGENERATE}
    if degenerate != want_deg:
        return False
    triples = struct.relations.get("betweeness", frozenset())
    want = set()
    for x, y, z in wp_betweenness_triples(wpt):
        want.add(
            (
                node_of_mask[wpt.tree.leafset[x]],
                node_of_mask[wpt.tree.leafset[y]],
                node_of_mask[wpt.tree.leafset[z]],
            )
        )
    return set(triples) == want


def modular_output_matches(struct: ExtRelStruct, dec: ModularDecomposition) -> bool:
    if not ancestor_output_matches(struct, dec.tree):
        return False
    leafsets = output_tree_nodes(struct)
    node_of_mask = {m: x for x, m in leafsets.items()}
    want = {
        (node_of_mask[dec.tree.leafset[s]], node_of_mask[dec.tree.leafset[r]]) for s, r in dec.m_edges
    }
    return set(struct.relations.get("m-edge", frozenset())) == want


def unrooted_output_matches(struct: ExtRelStruct, tree: UnrootedTree) -> bool:
    """Edge-cut family comparison for t-edge structures with pinned leaves."""
    rel = struct.relations.get("t-edge", frozenset())
    adj: dict[int, set[int]] = {x: set() for x in struct.universe}
    for u, v in rel:
        adj[u].add(v)
        adj[v].add(u)
    if len(struct.universe) != tree.size:
        return False
    edges = {(min(u, v), max(u, v)) for u, v in rel}
    if len(edges) != tree.size - 1:
        return False
    n = tree.n_leaves
    # leaves must be the original elements with matching ids
    leaves = {x for x in struct.universe if len(adj[x]) <= 1}
    if tree.size == 1:
        return len(struct.universe) == 1
    if leaves != set(range(n)):
        return False
    cuts = set()
    for u, v in edges:
        seen = {u, v}
        stack = [v]
        mask = 0
        while stack:
            w = stack.pop()
            if w < n:
                mask |= 1 << w
            for z in adj[w]:
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        cuts.add(min(mask, full_mask(n) & ~mask))
    want = set()
    for a, b in tree.edges():
        m = tree.side_leafset(a, b)
        want.add(min(m, full_mask(n) & ~m))
    return cuts == want


def split_output_matches(struct: ExtRelStruct, dec: SplitDecomposition) -> bool:
    """Pinned-leaf isomorphism of marker structures with edge kinds.

    Leaf markers are the only markers without c-edges (leaf components carry
    no component graph); in a pipeline output the original vertex id is the
    leaf marker's unique t-neighbour.
    """
    c_touch: dict[int, int] = {}
    t_nbr: dict[int, list[int]] = {}
    for u, v in struct.relations.get("c-edge", frozenset()):
        c_touch[u] = c_touch.get(u, 0) + 1
        c_touch[v] = c_touch.get(v, 0) + 1
    for u, v in struct.relations.get("t-edge", frozenset()):
        t_nbr.setdefault(u, []).append(v)
        t_nbr.setdefault(v, []).append(u)
    g1 = nx.DiGraph()
    for x in struct.universe:
        pin = None
        if not c_touch.get(x):
            ports = sorted(set(t_nbr.get(x, ())))
            if len(ports) != 1:
                return False
            pin = ports[0]
        g1.add_node(("s", x), pin=pin)
    for u, v in struct.relations.get("c-edge", frozenset()):
        g1.add_edge(("s", u), ("s", v), kind="c")
    for u, v in struct.relations.get("t-edge", frozenset()):
        g1.add_edge(("s", u), ("s", v), kind="t")
        g1.add_edge(("s", v), ("s", u), kind="t")
    g2 = nx.DiGraph()
    for k, (u, v) in enumerate(dec.markers):
        lab = dec.tree.leaf_label[u]
        g2.add_node(("d", k), pin=lab if lab is not None else None)
    for a, b in dec.c_edges:
        g2.add_edge(("d", a), ("d", b), kind="c")
    for a, b in dec.t_edges:
        g2.add_edge(("d", a), ("d", b), kind="t")
        g2.add_edge(("d", b), ("d", a), kind="t")
    return _pinned_isomorphic(g1, g2)


def skeleton_output_matches(struct: ExtRelStruct, skel: Skeleton) -> bool:
    g1 = nx.Graph()
    n = skel.n
    for x in struct.universe:
        g1.add_node(("s", x), pin=x if x < n else None)
    for name, kind in (("c-edge", "c"), ("t-edge", "t"), ("r-edge", "r")):
        for u, v in struct.relations.get(name, frozenset()):
            g1.add_edge(("s", u), ("s", v), kind=kind)
    g2 = nx.Graph()
    for cv in skel.classes:
        g2.add_node(("d", cv.cid), pin=cv.cid if cv.cid < n else None)
    for pairs, kind in ((skel.c_edges, "c"), (skel.t_edges, "t"), (skel.r_edges, "r")):
        for a, b in pairs:
            g2.add_edge(("d", a), ("d", b), kind=kind)
    return _pinned_isomorphic(g1, g2)


def _pinned_isomorphic(g1, g2) -> bool:
    if g1.number_of_nodes() != g2.number_of_nodes() or g1.number_of_edges() != g2.number_of_edges():
        return False
    nm = nx.algorithms.isomorphism.categorical_node_match("pin", None)
    em = nx.algorithms.isomorphism.categorical_edge_match("kind", None)
    if isinstance(g1, nx.DiGraph):
        matcher = nx.algorithms.isomorphism.DiGraphMatcher(g1, g2, node_match=nm, edge_match=em)
    else:
        matcher = nx.algorithms.isomorphism.GraphMatcher(g1, g2, node_match=nm, edge_match=em)
    return matcher.is_isomorphic()


# ---------------------------------------------------------------------------
# pipeline runners


def _struct_of(obj) -> ExtRelStruct:
    return obj if isinstance(obj, ExtRelStruct) else build_structure(obj)


def pipeline_laminar_tree(
    system: SetSystem | ExtRelStruct,
    mode: str = "guided",
    eval_guard: int = DEFAULT_EVAL_GUARD,
) -> list[ExtRelStruct]:
    """Run the laminar-tree transduction on a laminar SET structure."""
    struct = _struct_of(system)
    family = SetSystem.from_sets(struct.n, (t[0] for t in struct.set_predicates[SET]))
    if mode == "guided":
        pipeline = pipeline_laminar_tree_atoms(keep_rels=tuple(struct.relations))
        return run_pipeline(struct, pipeline, "guided", guesses=guesses_laminar(family), eval_guard=eval_guard)
    return _exhaustive_tree_outputs(struct, SET, keep_rels=tuple(struct.relations), eval_guard=eval_guard)


def pipeline_weakly_partitive_tree(
    system: SetSystem | ExtRelStruct,
    mode: str = "guided",
    eval_guard: int = DEFAULT_EVAL_GUARD,
) -> list[ExtRelStruct]:
    struct = _struct_of(system)
    family = SetSystem.from_sets(struct.n, (t[0] for t in struct.set_predicates[SET]))
    if mode == "guided":
        return run_pipeline(
            struct,
            pipeline_weakly_partitive_atoms(),
            "guided",
            guesses=guesses_weakly_partitive(family),
            eval_guard=eval_guard,
        )
    trees = _exhaustive_strong_tree_outputs(struct, keep_rels=(), eval_guard=eval_guard)
    final = Interpretation(
        {
            "ancestor": (("x", "y"), F.Rel("ancestor", ("x", "y"))),
            "DEGENERATE": (("x",), f_degenerate(SET)),
            "betweeness": (("x", "y", "z"), f_betweenness(SET)),
        },
        {},
    )
    return _apply_tail(trees, [final], eval_guard)


def pipeline_modular(
    graph: DiGraph | ExtRelStruct,
    mode: str = "guided",
    eval_guard: int = DEFAULT_EVAL_GUARD,
) -> list[ExtRelStruct]:
    struct = _struct_of(graph)
    if mode == "guided":
        g = _graph_of(struct)
        return run_pipeline(
            struct,
            pipeline_modular_atoms(),
            "guided",
            guesses=guesses_modular(g),
            eval_guard=eval_guard,
        )
    module_interp = Interpretation(_identity_relations((EDGE,)), {SET: (("Z",), f_module())})
    with_modules = apply_deterministic(struct, module_interp, eval_guard)[0]
    trees = _exhaustive_strong_tree_outputs(with_modules, keep_rels=(EDGE,), eval_guard=eval_guard)
    final = Interpretation(
        {
            "ancestor": (("x", "y"), F.Rel("ancestor", ("x", "y"))),
            "m-edge": (("s", "r"), f_m_edge()),
        },
        {},
    )
    return _apply_tail(trees, [final], eval_guard)


def pipeline_bipartition_laminar(
    system: BipartitionSystem | ExtRelStruct,
    mode: str = "guided",
    eval_guard: int = DEFAULT_EVAL_GUARD,
) -> list[ExtRelStruct]:
    struct = _struct_of(system)
    family = BipartitionSystem.from_sides(struct.n, (t[0] for t in struct.set_predicates[BIPART]))
    if mode == "guided":
        return run_pipeline(
            struct,
            pipeline_bipartition_laminar_atoms(),
            "guided",
            guesses=guesses_bipartition(family),
            eval_guard=eval_guard,
        )
    outputs: list[ExtRelStruct] = []
    for anchor in range(struct.n):
        outputs.extend(_exhaustive_bipartition_outputs(struct, anchor, keep_rels=(), eval_guard=eval_guard))
    return _dedup(outputs)


def pipeline_split(
    graph: DiGraph | ExtRelStruct,
    mode: str = "guided",
    eval_guard: int = DEFAULT_EVAL_GUARD,
) -> list[ExtRelStruct]:
    struct = _struct_of(graph)
    tail = _split_tail_atoms()
    if mode == "guided":
        g = _graph_of(struct)
        from ..graphdec import split_family

        family = split_family(g)
        guesses = [1] + _colour_guesses(laminar_tree(rooted_reduction(strong_bipartitions(family), 0)))
        split_interp = Interpretation(_identity_relations((EDGE,)), {BIPART: (("Z",), f_split())})
        front = [split_interp] + bipartition_laminar_atoms(keep_rels=(EDGE,))
        mids = run_pipeline(struct, Pipeline(tuple(front)), "guided", guesses=guesses, eval_guard=eval_guard)
        outputs = []
        for mid in mids:
            root_mask = _canonical_root_mask(mid)
            outputs.extend(
                run_pipeline(mid, Pipeline(tuple(tail)), "guided", guesses=[root_mask], eval_guard=eval_guard)
            )
        return _dedup(outputs)
    split_interp = Interpretation(_identity_relations((EDGE,)), {BIPART: (("Z",), f_split())})
    with_splits = apply_deterministic(struct, split_interp, eval_guard)[0]
    mids: list[ExtRelStruct] = []
    for anchor in range(struct.n):
        mids.extend(_exhaustive_bipartition_outputs(with_splits, anchor, keep_rels=(EDGE,), eval_guard=eval_guard))
    mids = _dedup(mids)
    outputs = []
    for mid in mids:
        for root in _inner_tree_nodes(mid):
            outputs.extend(
                run_pipeline(mid, Pipeline(tuple(tail)), "guided", guesses=[1 << root], eval_guard=eval_guard)
            )
    return _dedup(outputs)


def _split_tail_atoms() -> list:
    atoms: list = [Colouring(ROOTC)]
    atoms.append(
        Filtering(
            F.ex_e(
                "_fr",
                F.land(
                    F.Rel(ROOTC, ("_fr",)),
                    F.Not(F.Rel("t-leaf", ("_fr",))),
                    F.fa_e("_fs", F.implies(F.Rel(ROOTC, ("_fs",)), F.EqVar("_fs", "_fr"))),
                ),
            )
        )
    )
    rels = _identity_relations((EDGE, "t-edge"))
    rels["parent"] = (("x", "y"), F.Rel("rootedparent", ("x", "y")))
    atoms.append(Interpretation(rels, {}))
    atoms.append(Copying(1))
    marker = f_marker()
    atoms.append(
        Interpretation(
            {
                "c-edge": (("x", "y"), f_split_c_edge(marker)),
                "t-edge": (("x", "y"), f_split_t_edge(marker)),
                "KEEPF": (("x",), f_split_keep()),
            },
            {},
        )
    )
    atoms.append(UniverseRestriction("x", F.Rel("KEEPF", ("x",))))
    atoms.append(
        Interpretation(
            {
                "c-edge": (("x", "y"), F.Rel("c-edge", ("x", "y"))),
                "t-edge": (("x", "y"), F.Rel("t-edge", ("x", "y"))),
            },
            {},
        )
    )
    return atoms


def _graph_of(struct: ExtRelStruct) -> DiGraph:
    return DiGraph.from_edges(struct.n, struct.relations.get(EDGE, frozenset()))


def _canonical_root_mask(mid: ExtRelStruct) -> int:
    """Deterministic root guess: the inner tree node adjacent to leaf 0."""
    adj: dict[int, set[int]] = {x: set() for x in mid.universe}
    for u, v in mid.relations["t-edge"]:
        adj[u].add(v)
        adj[v].add(u)
    inner = [x for x in mid.universe if len(adj[x]) > 1]
    if not inner:
        raise DecompError("degenerate tree has no inner node to root at")
    nb = adj[0]
    for x in sorted(nb):
        if len(adj[x]) > 1:
            return 1 << x
    return 1 << min(inner)


def _inner_tree_nodes(mid: ExtRelStruct) -> list[int]:
    adj: dict[int, set[int]] = {x: set() for x in mid.universe}
    for u, v in mid.relations["t-edge"]:
        adj[u].add(v)
        adj[v].add(u)
    return [x for x in mid.universe if len(adj[x]) > 1]


def _apply_tail(structs: list[ExtRelStruct], atoms: list, eval_guard: int) -> list[ExtRelStruct]:
    out = list(structs)
    for atom in atoms:
        nxt: list[ExtRelStruct] = []
        for s in out:
            nxt.extend(apply_deterministic(s, atom, eval_guard))
        out = nxt
    return _dedup(out)


def _relabel_struct(s: ExtRelStruct, mapping: dict[int, int]) -> ExtRelStruct:
    rels = {
        name: frozenset(tuple(mapping[x] for x in t) for t in tuples)
        for name, tuples in s.relations.items()
    }

    def remap_mask(m: int) -> int:
        out = 0
        for b in bits(m):
            out |= 1 << mapping[b]
        return out

    preds = {
        name: frozenset(tuple(remap_mask(m) for m in t) for t in tuples)
        for name, tuples in s.set_predicates.items()
    }
    return ExtRelStruct(tuple(sorted(mapping[x] for x in s.universe)), rels, preds)


def canonical_tree_struct(s: ExtRelStruct) -> ExtRelStruct:
    """Relabel inner nodes of an ancestor structure by their leafsets.

    Outputs of the laminar stage differ only in which copy ids carry the
    inner nodes; the canonical form quotients that out so downstream stages
    run once per distinct tree.
    """
    ev = Evaluator(s)
    leafsets = ev._derived("leafset")
    leaf_mask = ev._derived("leaf_mask")
    leaves = sorted(x for x in s.universe if leaf_mask >> x & 1)
    inner = sorted(
        (x for x in s.universe if not leaf_mask >> x & 1),
        key=lambda x: (popcount(leafsets[x]), leafsets[x]),
    )
    base = (max(leaves) + 1) if leaves else 0
    mapping = {x: x for x in leaves}
    mapping.update({x: base + i for i, x in enumerate(inner)})
    return _relabel_struct(s, mapping)


def canonical_tedge_struct(s: ExtRelStruct) -> ExtRelStruct:
    """Relabel inner nodes of a t-edge structure by the leaf sets they
    separate from leaf 0."""
    adj: dict[int, set[int]] = {x: set() for x in s.universe}
    for u, v in s.relations["t-edge"]:
        adj[u].add(v)
        adj[v].add(u)
    leaves = sorted(x for x in s.universe if len(adj[x]) <= 1)
    inner = [x for x in s.universe if len(adj[x]) > 1]

    def away_mask(x: int) -> int:
        # leaves separated from leaf 0 when x is removed
        seen = {x}
        mask = 0
        stack = [0]
        seen.add(0)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        for z in leaves:
            if z not in seen:
                mask |= 1 << z
        return mask

    keyed = sorted(inner, key=lambda x: (popcount(away_mask(x)), away_mask(x)))
    base = (max(leaves) + 1) if leaves else 0
    mapping = {x: x for x in leaves}
    mapping.update({x: base + i for i, x in enumerate(keyed)})
    return _relabel_struct(s, mapping)


def _dedup(structs: list[ExtRelStruct]) -> list[ExtRelStruct]:
    seen = set()
    out = []
    for s in structs:
        key = (
            s.universe,
            tuple(sorted((k, tuple(sorted(v))) for k, v in s.relations.items())),
            tuple(sorted((k, tuple(sorted(v))) for k, v in s.set_predicates.items())),
        )
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# exhaustive colouring driver

# The literal composition multiplies out 2^(8n) colouring guesses.  The
# driver below instead decodes each colour pair once through the repr
# formulas, then assembles the pairs whose represented members partition the
# non-singleton family -- exactly the tuples the final validity filter keeps.
# Sampled tuples are replayed through run_pipeline to tie the two paths.


def _pair_signatures(struct: ExtRelStruct, base: str, eval_guard: int):
    """For every (A, B) colour-mask pair: the set of (element, member) pairs
    accepted by the repr formula."""
    reprs = build_reprs(base, COLOUR_PAIRS[:1])[0]
    a_rel, b_rel = COLOUR_PAIRS[0]
    family = sorted(t[0] for t in struct.set_predicates[base])
    non_singleton = [m for m in family if popcount(m) >= 2]
    signatures = {}
    for a_mask in submasks(struct.universe_mask):
        for b_mask in submasks(struct.universe_mask):
            coloured = struct.with_relation(a_rel, ((x,) for x in bits(a_mask)))
            coloured = coloured.with_relation(b_rel, ((x,) for x in bits(b_mask)))
            ev = Evaluator(coloured, eval_guard)
            sig = []
            ok = True
            for a in bits(a_mask):
                for m in family:
                    if m >> a & 1 and ev.evaluate(reprs.repr_a, {"_a": a, "_X": m}):
                        sig.append((a, m))
            targets = [m for _, m in sig]
            if len(set(targets)) != len(targets) or any(popcount(m) < 2 for m in targets):
                ok = False  # can never satisfy the exactly-once filter
            signatures[(a_mask, b_mask)] = (frozenset(sig), ok)
    return signatures, non_singleton


def _exhaustive_tree_outputs(
    struct: ExtRelStruct,
    base: str,
    keep_rels: tuple[str, ...],
    eval_guard: int,
    keep_preds: tuple[str, ...] = (),
) -> list[ExtRelStruct]:
    """All outputs of the laminar stage under exhaustive colouring."""
    signatures, non_singleton = _pair_signatures(struct, base, eval_guard)
    want = 0
    index = {m: i for i, m in enumerate(non_singleton)}
    for m in non_singleton:
        want |= 1 << index[m]
    by_cover: dict[int, list[frozenset]] = {}
    for (a_mask, b_mask), (sig, ok) in signatures.items():
        if not ok:
            continue
        cover = 0
        for _, m in sig:
            cover |= 1 << index[m]
        by_cover.setdefault(cover, []).append(sig)
    for cover in by_cover:
        by_cover[cover] = sorted(set(by_cover[cover]), key=sorted)
    covers = sorted(by_cover)

    tuples: list[tuple[frozenset, ...]] = []

    def assemble(chosen: list[frozenset], remaining: int, slots: int):
        if slots == 0:
            if remaining == 0:
                tuples.append(tuple(chosen))
            return
        for cover in covers:
            if cover & ~remaining:
                continue
            for sig in by_cover[cover]:
                chosen.append(sig)
                assemble(chosen, remaining & ~cover, slots - 1)
                chosen.pop()

    assemble([], want, 4)

    space = (max(struct.universe) + 1) if struct.universe else 0
    outputs = []
    for tup in tuples:
        raw = _build_tree_output(struct, base, tup, space, keep_rels, keep_preds)
        outputs.append(canonical_tree_struct(raw))
    return _dedup(outputs)


def _build_tree_output(
    struct: ExtRelStruct,
    base: str,
    tup: tuple[frozenset, ...],
    space: int,
    keep_rels: tuple[str, ...],
    keep_preds: tuple[str, ...],
) -> ExtRelStruct:
    """Construct the laminar-stage output of one surviving colouring tuple."""
    node_of = {}
    for x in struct.universe:
        node_of[x] = 1 << x
    for i, sig in enumerate(tup, start=1):
        for a, m in sig:
            node_of[i * space + a] = m
    universe = tuple(sorted(node_of))
    anc = frozenset(
        (x, y) for x in universe for y in universe if node_of[y] & ~node_of[x] == 0
    )
    rels = {"ancestor": anc}
    for name in keep_rels:
        rels[name] = struct.relations[name]
    preds = {base: struct.set_predicates[base]}
    for name in keep_preds:
        preds[name] = struct.set_predicates[name]
    return ExtRelStruct(universe, rels, preds)


def _exhaustive_strong_tree_outputs(
    struct: ExtRelStruct, keep_rels: tuple[str, ...], eval_guard: int
) -> list[ExtRelStruct]:
    """Strong-member interpretation followed by the exhaustive laminar stage."""
    with_strong = apply_deterministic(struct, strong_interp(keep_rels=keep_rels), eval_guard)[0]
    return _exhaustive_tree_outputs(
        with_strong, STRONG_SET, keep_rels=keep_rels, eval_guard=eval_guard, keep_preds=(SET,)
    )


def _exhaustive_bipartition_outputs(
    struct: ExtRelStruct, anchor: int, keep_rels: tuple[str, ...], eval_guard: int
) -> list[ExtRelStruct]:
    """Exhaustive run of the bipartition-laminar pipeline at a fixed anchor.

    Non-singleton anchor guesses die at the single-anchor filter, so only the
    n singleton anchors contribute outputs.
    """
    rels = _identity_relations(keep_rels)
    rels[ANCHOR] = (("x",), F.Rel(ANCHOR, ("x",)))
    anchor_interp = Interpretation(
        rels,
        {BIPART: (("Z",), F.SetPred(BIPART, (F.SVar("Z"),))), SET: (("Z",), f_anchor_set())},
    )
    anchored = struct.with_relation(ANCHOR, ((anchor,),))
    prepared = apply_deterministic(anchored, anchor_interp, eval_guard)[0]
    with_strong = apply_deterministic(
        prepared, strong_interp(keep_rels=keep_rels + (ANCHOR,), base=SET, keep_preds=(BIPART,)), eval_guard
    )[0]
    trees = _exhaustive_tree_outputs(
        with_strong,
        STRONG_SET,
        keep_rels=keep_rels + (ANCHOR,),
        eval_guard=eval_guard,
        keep_preds=(SET, BIPART),
    )
    drop = UniverseRestriction("x", f_drop_root())
    out_rels = {"t-edge": (("x", "y"), f_unrooted_tedge())}
    out_rels.update(_identity_relations(keep_rels))
    finish = Interpretation(out_rels, _identity_preds((BIPART,)))
    finished = _apply_tail(trees, [drop, finish], eval_guard)
    return _dedup([canonical_tedge_struct(s) for s in finished])


def replay_tuple_guided(
    struct: ExtRelStruct, tup_guesses: list[int], base: str, keep_rels: tuple[str, ...] = (), eval_guard: int = DEFAULT_EVAL_GUARD
) -> list[ExtRelStruct]:
    """Run the literal laminar-stage atoms on explicit colour guesses; used to
    spot-check the exhaustive driver against the atom semantics."""
    atoms, _ = laminar_stage_atoms(base, keep_rels=keep_rels)
    return run_pipeline(struct, Pipeline(tuple(atoms)), "guided", guesses=tup_guesses, eval_guard=eval_guard)


# ---------------------------------------------------------------------------
# skeleton pipeline (guided only)


def _skeleton_class_formulas():
    """Membership formulas for the four copy roles of an internal tree node.

    Copy 1/2 of u: the two outside-profile classes of the complement of
    L(T_u) (direction towards the parent), copy 1 holding the parent's
    representative leaf.  Copy 3/4: the classes of L(T_u) itself, copy 3
    holding u's own A-side representative.
    """
    reprs = build_reprs("SETR")

    def rep_any(side: str, var: str, node: str) -> F.Formula:
        return F.lor(
            *[
                F.apply_to(rs.repr_a if side == "A" else rs.repr_b, elems={"_a": var}, sets={"_X": F.Leafset(node)})
                for rs in reprs
            ]
        )

    orig_leaf_body = F.land(
        F.Not(F.lor(*[F.ex_e("_ol", F.Rel(f"copy{i}", ("_mw", "_ol"))) for i in range(1, 5)])),
        F.Rel("leaf", ("_mw",)),
    )

    def orig_leaf(v: str) -> F.Formula:
        return F.apply_to(orig_leaf_body, elems={"_mw": v})

    # up_rep(_ur, _un): _ur is the chosen representative of parent(_un) lying
    # outside L(_un); ties between the A- and B-side representative break
    # towards A.
    a_rep_inside = F.ex_e("_ai", F.land(rep_any("A", "_ai", "_uv"), F.Member("_ai", F.Leafset("_un"))))
    up_rep = F.ex_e(
        "_uv",
        F.land(
            F.Rel("parent", ("_uv", "_un")),
            F.Not(F.Member("_ur", F.Leafset("_un"))),
            F.lor(
                rep_any("A", "_ur", "_uv"),
                F.land(rep_any("B", "_ur", "_uv"), a_rep_inside),
            ),
        ),
    )

    same_prof_in = F.fa_e(
        "_py",
        F.implies(
            F.Member("_py", F.Leafset("_pn")),
            F.Iff(F.Rel(EDGE, ("_pw", "_py")), F.Rel(EDGE, ("_pa", "_py"))),
        ),
    )
    same_prof_out = F.fa_e(
        "_py",
        F.implies(
            F.Not(F.Member("_py", F.Leafset("_pn"))),
            F.Iff(F.Rel(EDGE, ("_pw", "_py")), F.Rel(EDGE, ("_pa", "_py"))),
        ),
    )

    def prof(w: str, a: str, node: str, inside: bool) -> F.Formula:
        return F.apply_to(same_prof_in if inside else same_prof_out, elems={"_pw": w, "_pa": a, "_pn": node})

    # member(w, class): w is an original leaf in the class a copy stands for
    up1 = F.land(
        orig_leaf("_mw"),
        F.Not(F.Member("_mw", F.Leafset("_mu"))),
        F.ex_e("_ma", F.land(F.apply_to(up_rep, elems={"_ur": "_ma", "_un": "_mu"}), prof("_mw", "_ma", "_mu", True))),
    )
    up2 = F.land(
        orig_leaf("_mw"),
        F.Not(F.Member("_mw", F.Leafset("_mu"))),
        F.ex_e(
            "_ma",
            F.land(F.apply_to(up_rep, elems={"_ur": "_ma", "_un": "_mu"}), F.Not(prof("_mw", "_ma", "_mu", True))),
        ),
    )
    down_rep = F.land(F.Member("_dr", F.Leafset("_dn")), rep_any("A", "_dr", "_dn"))
    down3 = F.land(
        orig_leaf("_mw"),
        F.Member("_mw", F.Leafset("_mu")),
        F.ex_e(
            "_ma",
            F.land(F.apply_to(down_rep, elems={"_dr": "_ma", "_dn": "_mu"}), prof("_mw", "_ma", "_mu", False)),
        ),
    )
    down4 = F.land(
        orig_leaf("_mw"),
        F.Member("_mw", F.Leafset("_mu")),
        F.ex_e(
            "_ma",
            F.land(F.apply_to(down_rep, elems={"_dr": "_ma", "_dn": "_mu"}), F.Not(prof("_mw", "_ma", "_mu", False))),
        ),
    )
    members = {1: up1, 2: up2, 3: down3, 4: down4}

    def classmember(w: str, x: str) -> F.Formula:
        branches = [
            F.ex_e(
                "_cu",
                F.land(
                    F.Rel(f"copy{j}", (x, "_cu")),
                    F.apply_to(members[j], elems={"_mw": w, "_mu": "_cu"}),
                ),
            )
            for j in (1, 2, 3, 4)
        ]
        branches.append(F.land(orig_leaf(x), F.EqVar(w, x)))
        return F.lor(*branches)

    updir = lambda x, u: F.lor(F.Rel("copy1", (x, u)), F.Rel("copy2", (x, u)))  # noqa: E731
    downdir = lambda x, u: F.lor(  # noqa: E731
        F.Rel("copy3", (x, u)),
        F.Rel("copy4", (x, u)),
        F.land(F.EqVar(x, u), orig_leaf(u)),
    )
    incomp = lambda x, u: F.lor(  # noqa: E731
        updir(x, u),
        F.ex_e("_iw", F.land(F.Rel("parent", (u, "_iw")), downdir(x, "_iw"))),
    )
    samedir = F.ex_e(
        "_su",
        F.lor(
            F.land(updir("x", "_su"), updir("y", "_su")),
            F.land(downdir("x", "_su"), downdir("y", "_su")),
        ),
    )
    adjacent_classes = F.ex_e(
        "_w1",
        F.land(
            classmember("_w1", "x"),
            F.ex_e("_w2", F.land(classmember("_w2", "y"), F.Rel(EDGE, ("_w1", "_w2")))),
        ),
    )
    c_edge = F.land(
        F.neq("x", "y"),
        F.ex_e("_eu", F.land(F.Not(F.Rel("leaf", ("_eu",))), incomp("x", "_eu"), incomp("y", "_eu"))),
        F.Not(samedir),
        adjacent_classes,
    )
    t_edge = F.land(
        F.ex_e(
            "_eu",
            F.lor(
                F.land(updir("x", "_eu"), downdir("y", "_eu")),
                F.land(updir("y", "_eu"), downdir("x", "_eu")),
            ),
        ),
        adjacent_classes,
    )
    r_edge = F.ex_e(
        "_eu",
        F.lor(
            *[
                F.lor(
                    F.land(F.Rel(f"copy{i}", ("x", "_eu")), F.Rel(f"copy{j}", ("y", "_eu"))),
                    F.land(F.Rel(f"copy{j}", ("x", "_eu")), F.Rel(f"copy{i}", ("y", "_eu"))),
                )
                for i, j in ((1, 2), (3, 4))
            ]
        ),
    )
    inner_nonroot = lambda u: F.land(  # noqa: E731
        F.Not(F.Rel("leaf", (u,))), F.ex_e("_kp", F.Rel("parent", ("_kp", u)))
    )
    keep = F.lor(
        orig_leaf("x"),
        F.ex_e(
            "_ku",
            F.land(
                inner_nonroot("_ku"),
                F.lor(
                    F.Rel("copy1", ("x", "_ku")),
                    F.Rel("copy3", ("x", "_ku")),
                    F.land(
                        F.Rel("copy2", ("x", "_ku")),
                        F.ex_e("_kw", F.apply_to(members[2], elems={"_mw": "_kw", "_mu": "_ku"})),
                    ),
                    F.land(
                        F.Rel("copy4", ("x", "_ku")),
                        F.ex_e("_kw", F.apply_to(members[4], elems={"_mw": "_kw", "_mu": "_ku"})),
                    ),
                ),
            ),
        ),
    )
    return c_edge, t_edge, r_edge, keep


def skeleton_tail_atoms() -> list:
    """Atoms from (graph + bipartitive tree) to the skeleton structure."""
    atoms: list = [Colouring(ROOTC)]
    atoms.append(
        Filtering(
            F.ex_e(
                "_fr",
                F.land(
                    F.Rel(ROOTC, ("_fr",)),
                    F.Not(F.Rel("t-leaf", ("_fr",))),
                    F.fa_e("_fs", F.implies(F.Rel(ROOTC, ("_fs",)), F.EqVar("_fs", "_fr"))),
                ),
            )
        )
    )
    atoms.append(
        Interpretation(
            {
                "ancestor": (("x", "y"), F.Rel("rootedanc", ("x", "y"))),
                EDGE: (("x", "y"), F.Rel(EDGE, ("x", "y"))),
            },
            {},
        )
    )
    atoms.append(
        Interpretation(
            {
                "ancestor": (("x", "y"), F.Rel("ancestor", ("x", "y"))),
                EDGE: (("x", "y"), F.Rel(EDGE, ("x", "y"))),
            },
            {"SETR": (("Z",), F.ex_e("_lu", F.EqSet(F.SVar("Z"), F.Leafset("_lu"))))},
        )
    )
    for a_rel, b_rel in COLOUR_PAIRS:
        atoms.append(Colouring(a_rel))
        atoms.append(Colouring(b_rel))
    atoms.append(Copying(4))
    c_edge, t_edge, r_edge, keep = _skeleton_class_formulas()
    atoms.append(
        Interpretation(
            {
                "c-edge": (("x", "y"), c_edge),
                "t-edge": (("x", "y"), t_edge),
                "r-edge": (("x", "y"), r_edge),
                "KEEPF": (("x",), keep),
            },
            {},
        )
    )
    atoms.append(UniverseRestriction("x", F.Rel("KEEPF", ("x",))))
    atoms.append(
        Interpretation(
            {
                "c-edge": (("x", "y"), F.Rel("c-edge", ("x", "y"))),
                "t-edge": (("x", "y"), F.Rel("t-edge", ("x", "y"))),
                "r-edge": (("x", "y"), F.Rel("r-edge", ("x", "y"))),
            },
            {},
        )
    )
    return atoms


def pipeline_skeleton_guided(
    graph: DiGraph | ExtRelStruct, eval_guard: int = DEFAULT_EVAL_GUARD
) -> list[ExtRelStruct]:
    """Guided skeleton transduction: bi-join tree, root, four bi-colourings."""
    struct = _struct_of(graph)
    g = _graph_of(struct)
    if not g.undirected:
        raise RequiresUndirected("the skeleton pipeline needs an undirected graph")
    from ..graphdec import bijoin_family

    family = bijoin_family(g)
    bijoin_interp = Interpretation(_identity_relations((EDGE,)), {BIPART: (("Z",), f_bijoin())})
    front = [bijoin_interp] + bipartition_laminar_atoms(keep_rels=(EDGE,))
    guesses = [1] + _colour_guesses(laminar_tree(rooted_reduction(strong_bipartitions(family), 0)))
    mids = run_pipeline(struct, Pipeline(tuple(front)), "guided", guesses=guesses, eval_guard=eval_guard)
    outputs = []
    tail = skeleton_tail_atoms()
    for mid in mids:
        root_mask = _canonical_root_mask(mid)
        rooted_tree = _rooted_tree_from_struct(mid, root_mask.bit_length() - 1)
        colour_guesses = _colour_guesses(rooted_tree)
        outputs.extend(
            run_pipeline(
                mid,
                Pipeline(tuple(tail)),
                "guided",
                guesses=[root_mask] + colour_guesses,
                eval_guard=eval_guard,
            )
        )
    return _dedup(outputs)


def _rooted_tree_from_struct(mid: ExtRelStruct, root: int) -> RootedTree:
    """Materialize the rooted tree of a t-edge structure for guess computation."""
    adj: dict[int, set[int]] = {x: set() for x in mid.universe}
    for u, v in mid.relations["t-edge"]:
        adj[u].add(v)
        adj[v].add(u)
    ids = {x: i for i, x in enumerate(mid.universe)}
    parent: list[int | None] = [None] * len(ids)
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                parent[ids[w]] = ids[v]
                stack.append(w)
    labels: list[int | None] = [None] * len(ids)
    n = sum(1 for x in mid.universe if len(adj[x]) <= 1)
    for x in mid.universe:
        if len(adj[x]) <= 1:
            labels[ids[x]] = x
    tree = RootedTree(tuple(parent), tuple(labels))
    if sorted(tree.leaf_of_element) != list(range(n)):
        raise DecompError("tree leaves are not the original universe")
    return tree


# ---------------------------------------------------------------------------
# module parity sentence


def f_even_modules() -> F.Formula:
    """Even module count over the labelled modular-decomposition tree.

    A node set X marks the subtrees with evenly many modules.  With m(t) the
    module count below t: PRIME gives m = 1 + sum (even iff oddly many odd
    children), DEGENERATE gives m = sum + 2^k - k - 1 (even iff oddly many
    even children); leaves count one module and stay outside X.
    """
    X = F.SVar("X")
    kids = F.ChildSet("y")
    prime_even = F.land(
        F.Rel("PRIME", ("y",)),
        F.Not(F.Iff(F.C2(F.Inter(X, kids)), F.C2(kids))),
    )
    degenerate_even = F.land(F.Rel("DEGENERATE", ("y",)), F.Not(F.C2(F.Inter(X, kids))))
    body = F.land(
        F.implies(F.Rel("root", ("y",)), F.Member("y", X)),
        F.implies(F.Rel("leaf", ("y",)), F.Not(F.Member("y", X))),
        F.Iff(F.lor(prime_even, degenerate_even), F.Member("y", X)),
    )
    return F.ex_s("X", F.land(F.SubsetEq(X, F.InnerSet()), F.fa_e("y", body)))


def f_even_modules_literal() -> F.Formula:
    """The same sentence spelled with the exact-children binding."""
    X, Y = F.SVar("X"), F.SVar("Y")
    prime_even = F.land(
        F.Rel("PRIME", ("y",)),
        F.Not(F.Iff(F.C2(F.Inter(X, Y)), F.C2(Y))),
    )
    degenerate_even = F.land(F.Rel("DEGENERATE", ("y",)), F.Not(F.C2(F.Inter(X, Y))))
    body = F.ex_s(
        "Y",
        F.land(
            F.Children("Y", "y"),
            F.implies(F.Rel("root", ("y",)), F.Member("y", X)),
            F.implies(F.Rel("leaf", ("y",)), F.Not(F.Member("y", X))),
            F.Iff(F.lor(prime_even, degenerate_even), F.Member("y", X)),
        ),
    )
    return F.ex_s("X", F.land(F.SubsetEq(X, F.InnerSet()), F.fa_e("y", body)))


def labelled_modular_structure(graph: DiGraph) -> ExtRelStruct:
    """{ancestor, PRIME, DEGENERATE} structure of the partitive module tree."""
    if not graph.undirected:
        raise RequiresUndirected("the parity sentence is for undirected graphs")
    wpt = weakly_partitive_tree(modules_set_system(graph))
    struct = build_structure(wpt.tree)
    prime = frozenset((t,) for t, lab in wpt.label.items() if lab is Label.PRIME)
    degenerate = frozenset((t,) for t, lab in wpt.label.items() if lab is Label.DEGENERATE)
    return ExtRelStruct(
        struct.universe,
        {"ancestor": struct.relations["ancestor"], "PRIME": prime, "DEGENERATE": degenerate},
        {},
    )


def sentence_even_modules(graph: DiGraph, literal: bool = False, eval_guard: int = DEFAULT_EVAL_GUARD) -> bool:
    """Whether the graph has an even number of non-empty modules, decided by
    evaluating the parity sentence on the labelled decomposition tree."""
    struct = labelled_modular_structure(graph)
    sentence = f_even_modules_literal() if literal else f_even_modules()
    return Evaluator(struct, eval_guard).evaluate(sentence)


# ---------------------------------------------------------------------------
# the cross formula for weakly-bipartitive trees


def f_cross() -> F.Formula:
    """cross(t, x1, x2, x3, x4): the chord x1-x3 crosses x2-x4 in the cyclic
    order at t, read off membership of nested interval bipartitions.

    Bipartitions are stored by their canonical side, so each member
    quantifier tries the side and its leaf-complement.
    """
    leaf_u = F.TLeaves()

    def member_exists(var: str, body_of):
        side = F.SVar(var)
        return F.lor(
            F.ex_s(var, F.land(F.SetPred(BIPART, (side,)), body_of(side))),
            F.ex_s(var, F.land(F.SetPred(BIPART, (side,)), body_of(F.Minus(leaf_u, side)))),
        )

    def ls(i: int) -> F.SetTerm:
        return F.Leafset2("t", f"x{i}")

    def with_x(tx):
        def with_y(ty):
            def with_z(tz):
                return F.land(
                    F.SubsetEq(ty, tx),
                    F.SubsetEq(tz, tx),
                    F.SubsetEq(ls(1), F.Minus(ty, tz)),
                    F.SubsetEq(ls(2), F.Inter(ty, tz)),
                    F.SubsetEq(ls(3), F.Minus(tz, ty)),
                    F.SubsetEq(ls(4), F.Minus(leaf_u, tx)),
                )

            return member_exists("_cZ", with_z)

        return member_exists("_cY", with_y)

    quad = [f"x{i}" for i in range(1, 5)]
    return F.land(
        F.Not(F.Rel("DEGENERATE", ("t",))),
        F.distinct(*quad),
        *[F.Rel("t-edge", ("t", v)) for v in quad],
        member_exists("_cX", with_x),
    )


def wb_struct_for_cross(system: BipartitionSystem, wbt) -> ExtRelStruct:
    """{BIPART, t-edge, DEGENERATE} structure of a weakly-bipartitive tree."""
    tree = wbt.tree
    struct = build_structure(tree)
    degenerate = frozenset((t,) for t, lab in wbt.label.items() if lab is Label.DEGENERATE)
    return ExtRelStruct(
        struct.universe,
        {"t-edge": struct.relations["t-edge"], "DEGENERATE": degenerate},
        {BIPART: frozenset((m,) for m in system.family)},
    )
