"""Atomic transductions and their composition.

The five atomic kinds follow the standard normal form: colourings guess
unary relations, filterings discard structures, copying adds tagged copies,
interpretations re-define the output vocabulary pointwise, and universe
restrictions shrink the domain.  Exhaustive runs enumerate every colouring
(guarded by a total-bits cap); guided runs thread one supplied subset per
colouring atom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from ..bitset import bits, submasks
from ..core import ExtRelStruct
from ..errors import DecompError, TooLarge, UniverseTooLarge
from . import formulas as F
from .evaluate import DEFAULT_EVAL_GUARD, Evaluator


@dataclass(frozen=True)
class Filtering:
    sentence: F.Formula


@dataclass(frozen=True)
class UniverseRestriction:
    var: str
    formula: F.Formula


@dataclass(frozen=True)
class Interpretation:
    """Re-interpret the output vocabulary; each symbol maps to
    (argument variables, defining formula).  Relations take element
    variables, set predicates one set variable (arity 1)."""

    relations: Mapping[str, tuple[tuple[str, ...], F.Formula]] = field(default_factory=dict)
    set_predicates: Mapping[str, tuple[tuple[str, ...], F.Formula]] = field(default_factory=dict)


@dataclass(frozen=True)
class Copying:
    k: int


@dataclass(frozen=True)
class Colouring:
    name: str


Atom = Filtering | UniverseRestriction | Interpretation | Copying | Colouring


@dataclass(frozen=True)
class Pipeline:
    atoms: tuple[Atom, ...]

    def colour_count(self) -> int:
        return sum(1 for a in self.atoms if isinstance(a, Colouring))


def copy_relation_name(i: int) -> str:
    return f"copy{i}"


def apply_deterministic(struct: ExtRelStruct, atom: Atom, guard: int = DEFAULT_EVAL_GUARD) -> list[ExtRelStruct]:
    """Apply a non-colouring atom; filtering may return the empty list."""
    ev = Evaluator(struct, guard)
    if isinstance(atom, Filtering):
        return [struct] if ev.evaluate(atom.sentence) else []
    if isinstance(atom, UniverseRestriction):
        keep = [x for x in struct.universe if ev.evaluate(atom.formula, {atom.var: x})]
        keep_mask = 0
        for x in keep:
            keep_mask |= 1 << x
        rels = {
            name: frozenset(t for t in tuples if all(keep_mask >> x & 1 for x in t))
            for name, tuples in struct.relations.items()
        }
        preds = {
            name: frozenset(t for t in tuples if all(m & ~keep_mask == 0 for m in t))
            for name, tuples in struct.set_predicates.items()
        }
        return [ExtRelStruct(tuple(keep), rels, preds)]
    if isinstance(atom, Interpretation):
        rels = {}
        for name, (args, formula) in atom.relations.items():
            rels[name] = frozenset(_eval_relation(ev, struct, args, formula))
        preds = {}
        for name, (args, formula) in atom.set_predicates.items():
            preds[name] = frozenset(_eval_set_predicate(ev, struct, args, formula, guard))
        return [ExtRelStruct(struct.universe, rels, preds)]
    if isinstance(atom, Copying):
        space = (max(struct.universe) + 1) if struct.universe else 0
        universe = list(struct.universe)
        rels = {name: set(tuples) for name, tuples in struct.relations.items()}
        for i in range(1, atom.k + 1):
            rels.setdefault(copy_relation_name(i), set())
            for x in struct.universe:
                universe.append(i * space + x)
                rels[copy_relation_name(i)].add((i * space + x, x))
        preds = dict(struct.set_predicates)
        return [ExtRelStruct(tuple(sorted(universe)), {k: frozenset(v) for k, v in rels.items()}, preds)]
    raise DecompError(f"not a deterministic atom: {atom!r}")


def _eval_relation(ev: Evaluator, struct: ExtRelStruct, args: tuple[str, ...], formula: F.Formula):
    def rec(prefix: tuple[int, ...], env: dict):
        if len(prefix) == len(args):
            if ev.evaluate(formula, env):
                yield prefix
            return
        var = args[len(prefix)]
        for x in struct.universe:
            env[var] = x
            yield from rec(prefix + (x,), env)
        env.pop(var, None)

    yield from rec((), {})


def _eval_set_predicate(ev: Evaluator, struct: ExtRelStruct, args: tuple[str, ...], formula: F.Formula, guard: int):
    if len(args) != 1:
        raise DecompError("set-predicate interpretations are fixed at arity 1")
    # identity re-interpretations copy the existing table
    if (
        isinstance(formula, F.SetPred)
        and len(formula.args) == 1
        and isinstance(formula.args[0], F.SVar)
        and formula.args[0].name == args[0]
        and formula.name in struct.set_predicates
    ):
        yield from struct.set_predicates[formula.name]
        return
    # direct image for the common pattern "exists u. X = leafset(u)"
    fast = _leafset_image(ev, struct, args[0], formula)
    if fast is not None:
        yield from ((m,) for m in fast)
        return
    if struct.n > guard:
        raise UniverseTooLarge(
            f"set-predicate interpretation over {struct.n} elements (guard {guard})"
        )
    var = args[0]
    for m in submasks(struct.universe_mask):
        if ev.evaluate(formula, {var: m}):
            yield (m,)


def _leafset_image(ev: Evaluator, struct: ExtRelStruct, var: str, formula: F.Formula):
    if (
        isinstance(formula, F.ExistsE)
        and isinstance(formula.body, F.EqSet)
        and isinstance(formula.body.left, F.SVar)
        and formula.body.left.name == var
        and isinstance(formula.body.right, F.Leafset)
        and formula.body.right.var == formula.var
    ):
        return {ev.set_value(F.Leafset(formula.var), {formula.var: u}) for u in struct.universe}
    return None


def apply_atom(
    struct: ExtRelStruct,
    atom: Atom,
    mode: str = "exhaustive",
    guess: int | None = None,
    guard: int = DEFAULT_EVAL_GUARD,
) -> list[ExtRelStruct]:
    """Single-atom image: colourings expand to all extensions (or the guess)."""
    if isinstance(atom, Colouring):
        if mode == "guided":
            if guess is None:
                raise DecompError("guided colouring needs a guess")
            masks: Iterable[int] = (guess,)
        else:
            masks = submasks(struct.universe_mask)
        out = []
        for m in masks:
            if m & ~struct.universe_mask:
                raise DecompError("colour guess leaves the universe")
            out.append(struct.with_relation(atom.name, ((x,) for x in bits(m))))
        return out
    return apply_deterministic(struct, atom, guard)


def run_pipeline(
    struct: ExtRelStruct,
    pipeline: Pipeline,
    mode: str = "exhaustive",
    guesses: Iterable[int] | None = None,
    eval_guard: int = DEFAULT_EVAL_GUARD,
    colour_bits_guard: int = 20,
) -> list[ExtRelStruct]:
    """Image of the structure under the pipeline.

    Exhaustive mode enumerates every interpretation of every colouring atom,
    capped at ``colour_count * n <= colour_bits_guard`` bits of guessing.
    Guided mode consumes one subset per colouring atom from ``guesses``.
    """
    if mode not in ("exhaustive", "guided"):
        raise DecompError(f"unknown mode {mode!r}")
    guess_list: list[int] | None = None
    if mode == "guided":
        if guesses is None:
            raise DecompError("guided mode needs one guess per colouring atom")
        guess_list = list(guesses)
        if len(guess_list) != pipeline.colour_count():
            raise DecompError(
                f"expected {pipeline.colour_count()} guesses, got {len(guess_list)}"
            )
    else:
        bits_needed = pipeline.colour_count() * struct.n
        if bits_needed > colour_bits_guard:
            raise TooLarge(
                f"exhaustive colouring space of {bits_needed} bits exceeds guard "
                f"{colour_bits_guard}; use guided mode or raise the guard"
            )

    outputs: list[ExtRelStruct] = []
    seen = set()

    def walk(current: ExtRelStruct, atom_idx: int, guess_idx: int):
        if atom_idx == len(pipeline.atoms):
            key = _struct_key(current)
            if key not in seen:
                seen.add(key)
                outputs.append(current)
            return
        atom = pipeline.atoms[atom_idx]
        if isinstance(atom, Colouring):
            if guess_list is not None:
                masks: Iterator[int] = iter((guess_list[guess_idx],))
            else:
                masks = submasks(current.universe_mask)
            for m in masks:
                if m & ~current.universe_mask:
                    raise DecompError("colour guess leaves the universe")
                coloured = current.with_relation(atom.name, ((x,) for x in bits(m)))
                walk(coloured, atom_idx + 1, guess_idx + 1)
            return
        for nxt in apply_deterministic(current, atom, eval_guard):
            walk(nxt, atom_idx + 1, guess_idx)

    walk(struct, 0, 0)
    return outputs


def _struct_key(s: ExtRelStruct):
    return (
        s.universe,
        tuple(sorted((k, tuple(sorted(v))) for k, v in s.relations.items())),
        tuple(sorted((k, tuple(sorted(v))) for k, v in s.set_predicates.items())),
    )
