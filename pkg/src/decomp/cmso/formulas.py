"""Abstract syntax for CMSO2 formulas over extended relational structures.

Lowercase variables range over universe elements, uppercase over subsets.
Set terms evaluate to bitsets.  Besides user symbols, formulas may reference
builtin relations (parent, root, leaf, inner, rootedparent, rootedanc,
t-leaf) and builtin set machinery (leafset, childset, the child/desc
relations of a laminar family); the evaluator derives those from ancestor,
t-edge or set-predicate interpretations.
"""

from __future__ import annotations

from dataclasses import dataclass


class SetTerm:
    __slots__ = ()


@dataclass(frozen=True)
class SVar(SetTerm):
    name: str


@dataclass(frozen=True)
class UniverseT(SetTerm):
    pass


@dataclass(frozen=True)
class EmptyT(SetTerm):
    pass


@dataclass(frozen=True)
class Singleton(SetTerm):
    var: str


@dataclass(frozen=True)
class Union(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Inter(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Minus(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Leafset(SetTerm):
    """L(T_t) on ancestor structures: leaves weakly below node t."""

    var: str


@dataclass(frozen=True)
class Leafset2(SetTerm):
    """L(T_s^t) on t-edge structures: leaves in the component of s in T - t."""

    t: str
    s: str


@dataclass(frozen=True)
class ChildSet(SetTerm):
    """The exact child set of a node on ancestor structures."""

    var: str


@dataclass(frozen=True)
class InnerSet(SetTerm):
    """All non-leaf elements of an ancestor structure."""


@dataclass(frozen=True)
class TLeaves(SetTerm):
    """All leaves of a t-edge structure (degree at most one)."""


@dataclass(frozen=True)
class RelImage(SetTerm):
    """{x : R(x)} for a unary relation R, e.g. a colouring."""

    name: str


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class SetPred(Formula):
    name: str
    args: tuple[SetTerm, ...]


@dataclass(frozen=True)
class Member(Formula):
    var: str
    term: SetTerm


@dataclass(frozen=True)
class SubsetEq(Formula):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class EqVar(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class EqSet(Formula):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class C2(Formula):
    """Parity predicate: the set has even cardinality."""

    term: SetTerm


@dataclass(frozen=True)
class Children(Formula):
    """children(Y, y): Y is exactly the child set of y (ancestor structures)."""

    set_var: str
    var: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Apply(Formula):
    """Shared subformula instantiated at a use site.

    Maps every free variable of ``body`` to an outer element variable or set
    term, so one body instance (and its evaluation cache) serves many sites.
    """

    body: Formula
    elem_map: tuple[tuple[str, str], ...] = ()
    set_map: tuple[tuple[str, "SetTerm"], ...] = ()


def apply_to(body: Formula, elems: dict[str, str] | None = None, sets: dict[str, SetTerm] | None = None) -> Apply:
    return Apply(
        body,
        tuple(sorted((elems or {}).items())),
        tuple(sorted((sets or {}).items())),
    )


@dataclass(frozen=True)
class ExistsE(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallE(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsS(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallS(Formula):
    var: str
    body: Formula


# combinators ---------------------------------------------------------------


def land(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        elif not isinstance(p, TrueF):
            flat.append(p)
    if not flat:
        return TrueF()
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def lor(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def neg(f: Formula) -> Formula:
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return Implies(a, b)


def iff(a: Formula, b: Formula) -> Formula:
    return Iff(a, b)


def ex_e(var: str, body: Formula) -> Formula:
    return ExistsE(var, body)


def fa_e(var: str, body: Formula) -> Formula:
    return ForallE(var, body)


def ex_s(var: str, body: Formula) -> Formula:
    return ExistsS(var, body)


def fa_s(var: str, body: Formula) -> Formula:
    return ForallS(var, body)


def neq(x: str, y: str) -> Formula:
    return Not(EqVar(x, y))


def distinct(*names: str) -> Formula:
    from itertools import combinations

    return land(*(neq(a, b) for a, b in combinations(names, 2)))


def free_vars(node) -> frozenset[str]:
    """Free element and set variables of a formula or set term."""
    if isinstance(node, (SVar,)):
        return frozenset({node.name})
    if isinstance(node, (Singleton, Leafset, ChildSet)):
        return frozenset({node.var})
    if isinstance(node, Leafset2):
        return frozenset({node.t, node.s})
    if isinstance(node, (UniverseT, EmptyT, RelImage, InnerSet, TLeaves, TrueF)):
        return frozenset()
    if isinstance(node, (Union, Inter, Minus)):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Rel):
        return frozenset(node.args)
    if isinstance(node, SetPred):
        out: frozenset[str] = frozenset()
        for t in node.args:
            out |= free_vars(t)
        return out
    if isinstance(node, Member):
        return frozenset({node.var}) | free_vars(node.term)
    if isinstance(node, (SubsetEq, EqSet)):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, EqVar):
        return frozenset({node.left, node.right})
    if isinstance(node, C2):
        return free_vars(node.term)
    if isinstance(node, Children):
        return frozenset({node.set_var, node.var})
    if isinstance(node, Not):
        return free_vars(node.body)
    if isinstance(node, (And, Or)):
        out = frozenset()
        for p in node.parts:
            out |= free_vars(p)
        return out
    if isinstance(node, (Implies, Iff)):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, (ExistsE, ForallE, ExistsS, ForallS)):
        return free_vars(node.body) - {node.var}
    if isinstance(node, Apply):
        out = frozenset(v for _, v in node.elem_map)
        for _, term in node.set_map:
            out |= free_vars(term)
        inner = free_vars(node.body)
        mapped = {k for k, _ in node.elem_map} | {k for k, _ in node.set_map}
        if not inner <= mapped:
            raise TypeError(f"Apply leaves {inner - mapped} unmapped")
        return out
    raise TypeError(f"not a formula node: {node!r}")
