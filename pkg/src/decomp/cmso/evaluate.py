"""CMSO2 satisfaction over extended relational structures.

Monadic quantifiers enumerate all subsets of the universe, which is guarded
(default 12 elements).  Quantifiers whose body opens with a recognizable
guard -- a unary set-predicate application, a child/desc atom of a laminar
family, a subset bound, or an exact-children binding -- enumerate only the
guard's candidates instead, so formulas built by the transduction pipelines
stay tractable on copied universes.
"""

from __future__ import annotations

from ..bitset import bits, popcount, submasks
from ..core import ExtRelStruct
from ..errors import MissingSymbol, UnboundVariable, UniverseTooLarge
from . import formulas as F

DEFAULT_EVAL_GUARD = 12

_BUILTIN_RELS = {"parent", "properanc", "root", "leaf", "inner", "t-leaf", "rootedparent", "rootedanc"}

_MISSING = object()


def _restore(env: dict, var: str, shadow) -> None:
    if shadow is _MISSING:
        env.pop(var, None)
    else:
        env[var] = shadow


class Evaluator:
    """Evaluation session bound to one structure; caches derived data."""

    def __init__(self, struct: ExtRelStruct, guard: int = DEFAULT_EVAL_GUARD):
        self.struct = struct
        self.guard = guard
        self._fv: dict[int, tuple[str, ...]] = {}
        self._memo: dict = {}

    # -- derived tree data ---------------------------------------------------

    def _derived(self, key: str):
        cache = self.struct._cache
        if key in cache:
            return cache[key]
        value = getattr(self, "_compute_" + key.replace("-", "_"))()
        cache[key] = value
        return value

    def _anc_pairs(self) -> frozenset[tuple[int, int]]:
        rels = self.struct.relations
        if "ancestor" not in rels:
            raise MissingSymbol("structure has no ancestor relation")
        return rels["ancestor"]

    def _compute_desc_mask(self) -> dict[int, int]:
        out = {x: 0 for x in self.struct.universe}
        for u, v in self._anc_pairs():
            out[u] |= 1 << v
        return out

    def _compute_anc_mask(self) -> dict[int, int]:
        out = {x: 0 for x in self.struct.universe}
        for u, v in self._anc_pairs():
            out[v] |= 1 << u
        return out

    def _compute_parent_pairs(self) -> frozenset[tuple[int, int]]:
        anc_mask = self._derived("anc_mask")
        pairs = set()
        for v in self.struct.universe:
            proper = anc_mask[v] & ~(1 << v)
            for u in bits(proper):
                between = self._derived("desc_mask")[u] & proper & ~(1 << u)
                if not between:
                    pairs.add((u, v))
        return frozenset(pairs)

    def _compute_leaf_mask(self) -> int:
        desc = self._derived("desc_mask")
        m = 0
        for v in self.struct.universe:
            if desc[v] & ~(1 << v) == 0:
                m |= 1 << v
        return m

    def _compute_root_mask(self) -> int:
        anc = self._derived("anc_mask")
        m = 0
        for v in self.struct.universe:
            if anc[v] & ~(1 << v) == 0:
                m |= 1 << v
        return m

    def _compute_childset(self) -> dict[int, int]:
        out = {x: 0 for x in self.struct.universe}
        for u, v in self._derived("parent_pairs"):
            out[u] |= 1 << v
        return out

    def _compute_leafset(self) -> dict[int, int]:
        desc = self._derived("desc_mask")
        leaves = self._derived("leaf_mask")
        return {v: desc[v] & leaves | ((1 << v) & leaves) for v in self.struct.universe}

    def _compute_tadj(self) -> dict[int, set[int]]:
        rels = self.struct.relations
        if "t-edge" not in rels:
            raise MissingSymbol("structure has no t-edge relation")
        adj: dict[int, set[int]] = {x: set() for x in self.struct.universe}
        for u, v in rels["t-edge"]:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def _compute_tleaf_mask(self) -> int:
        adj = self._derived("tadj")
        m = 0
        for v in self.struct.universe:
            if len(adj[v]) <= 1:
                m |= 1 << v
        return m

    def _compute_leafset2(self) -> dict[tuple[int, int], int]:
        return {}

    def _leafset2(self, t: int, s: int) -> int:
        cache = self._derived("leafset2")
        key = (t, s)
        if key in cache:
            return cache[key]
        adj = self._derived("tadj")
        leaves = self._derived("tleaf_mask")
        mask = 0
        seen = {t, s}
        stack = [s]
        while stack:
            v = stack.pop()
            if leaves >> v & 1:
                mask |= 1 << v
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        cache[key] = mask
        return mask

    def _rooted_root(self) -> int | None:
        rels = self.struct.relations.get("ROOTC", frozenset())
        roots = [t[0] for t in rels]
        return roots[0] if len(roots) == 1 else None

    def _compute_rootedparent_pairs(self) -> frozenset[tuple[int, int]]:
        root = self._rooted_root()
        if root is None:
            return frozenset()
        adj = self._derived("tadj")
        pairs = set()
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    pairs.add((v, w))
                    stack.append(w)
        return frozenset(pairs)

    def _compute_rootedanc_pairs(self) -> frozenset[tuple[int, int]]:
        parent = {v: u for u, v in self._derived("rootedparent_pairs")}
        pairs = set()
        for x in self.struct.universe:
            v: int | None = x
            guardrail = 0
            while v is not None and guardrail <= len(self.struct.universe):
                pairs.add((v, x))
                v = parent.get(v)
                guardrail += 1
        if self._rooted_root() is None:
            return frozenset((x, x) for x in self.struct.universe)
        return frozenset(pairs)

    def _family(self, name: str) -> tuple[int, ...]:
        preds = self.struct.set_predicates
        if name not in preds:
            raise MissingSymbol(f"structure has no set predicate {name}")
        return tuple(sorted(t[0] for t in preds[name]))

    def _children_of(self, name: str, parent_mask: int) -> tuple[int, ...]:
        cache = self.struct._cache.setdefault(("children_of", name), {})
        if parent_mask in cache:
            return cache[parent_mask]
        fam = self._family(name)
        below = [m for m in fam if m != parent_mask and m & ~parent_mask == 0]
        kids = [m for m in below if not any(m != w and m & ~w == 0 for w in below)]
        out = tuple(kids)
        cache[parent_mask] = out
        return out

    def _rel_image(self, name: str) -> int:
        cache = self.struct._cache.setdefault("rel_image", {})
        if name in cache:
            return cache[name]
        rels = self.struct.relations
        if name not in rels:
            raise MissingSymbol(f"structure has no relation {name}")
        m = 0
        for t in rels[name]:
            m |= 1 << t[0]
        cache[name] = m
        return m

    # -- set terms -----------------------------------------------------------

    def set_value(self, term: F.SetTerm, env: dict) -> int:
        if isinstance(term, F.SVar):
            try:
                return env[term.name]
            except KeyError:
                raise UnboundVariable(term.name) from None
        if isinstance(term, F.UniverseT):
            return self.struct.universe_mask
        if isinstance(term, F.EmptyT):
            return 0
        if isinstance(term, F.Singleton):
            return 1 << self._elem(term.var, env)
        if isinstance(term, F.Union):
            return self.set_value(term.left, env) | self.set_value(term.right, env)
        if isinstance(term, F.Inter):
            return self.set_value(term.left, env) & self.set_value(term.right, env)
        if isinstance(term, F.Minus):
            return self.set_value(term.left, env) & ~self.set_value(term.right, env)
        if isinstance(term, F.Leafset):
            return self._derived("leafset")[self._elem(term.var, env)]
        if isinstance(term, F.Leafset2):
            return self._leafset2(self._elem(term.t, env), self._elem(term.s, env))
        if isinstance(term, F.ChildSet):
            return self._derived("childset")[self._elem(term.var, env)]
        if isinstance(term, F.InnerSet):
            return self.struct.universe_mask & ~self._derived("leaf_mask")
        if isinstance(term, F.TLeaves):
            return self._derived("tleaf_mask")
        if isinstance(term, F.RelImage):
            return self._rel_image(term.name)
        raise TypeError(f"not a set term: {term!r}")

    def _elem(self, var: str, env: dict) -> int:
        try:
            return env[var]
        except KeyError:
            raise UnboundVariable(var) from None

    # -- formulas ------------------------------------------------------------

    def evaluate(self, formula: F.Formula, env: dict | None = None) -> bool:
        return self._eval(formula, dict(env) if env else {})

    def _free(self, node) -> tuple[str, ...]:
        key = id(node)
        got = self._fv.get(key)
        if got is None:
            got = tuple(sorted(F.free_vars(node)))
            self._fv[key] = got
        return got

    def _eval(self, f: F.Formula, env: dict) -> bool:
        kind = type(f)
        if kind is F.TrueF:
            return True
        if kind is F.Rel:
            return self._rel(f, env)
        if kind is F.SetPred:
            return self._setpred(f, env)
        if kind is F.Member:
            return bool(self.set_value(f.term, env) >> self._elem(f.var, env) & 1)
        if kind is F.SubsetEq:
            return self.set_value(f.left, env) & ~self.set_value(f.right, env) == 0
        if kind is F.EqVar:
            return self._elem(f.left, env) == self._elem(f.right, env)
        if kind is F.EqSet:
            return self.set_value(f.left, env) == self.set_value(f.right, env)
        if kind is F.C2:
            return popcount(self.set_value(f.term, env)) % 2 == 0
        if kind is F.Children:
            y = self._elem(f.var, env)
            try:
                want = env[f.set_var]
            except KeyError:
                raise UnboundVariable(f.set_var) from None
            return self._derived("childset")[y] == want
        if kind is F.Apply:
            inner = {iv: self._elem(ov, env) for iv, ov in f.elem_map}
            for sv, term in f.set_map:
                inner[sv] = self.set_value(term, env)
            return self._eval(f.body, inner)
        if kind is F.Not:
            return not self._eval(f.body, env)
        if kind is F.And:
            return all(self._eval(p, env) for p in f.parts)
        if kind is F.Or:
            return any(self._eval(p, env) for p in f.parts)
        if kind is F.Implies:
            return not self._eval(f.left, env) or self._eval(f.right, env)
        if kind is F.Iff:
            return self._eval(f.left, env) == self._eval(f.right, env)
        if kind in (F.ExistsE, F.ForallE):
            return self._eval_elem_quant(f, env)
        if kind in (F.ExistsS, F.ForallS):
            return self._eval_set_quant(f, env)
        raise TypeError(f"not a formula: {f!r}")

    def _rel(self, f: F.Rel, env: dict) -> bool:
        args = tuple(self._elem(a, env) for a in f.args)
        rels = self.struct.relations
        if f.name in rels:
            return args in rels[f.name]
        if f.name in _BUILTIN_RELS:
            if f.name == "parent":
                return args in self._derived("parent_pairs")
            if f.name == "properanc":
                return args[0] != args[1] and args in self._anc_pairs()
            if f.name == "root":
                return bool(self._derived("root_mask") >> args[0] & 1)
            if f.name == "leaf":
                return bool(self._derived("leaf_mask") >> args[0] & 1)
            if f.name == "inner":
                return not self._derived("leaf_mask") >> args[0] & 1
            if f.name == "t-leaf":
                return bool(self._derived("tleaf_mask") >> args[0] & 1)
            if f.name == "rootedparent":
                return args in self._derived("rootedparent_pairs")
            if f.name == "rootedanc":
                return args in self._derived("rootedanc_pairs")
        raise MissingSymbol(f"unknown relation {f.name}")

    def _setpred(self, f: F.SetPred, env: dict) -> bool:
        masks = tuple(self.set_value(t, env) for t in f.args)
        preds = self.struct.set_predicates
        if f.name in preds:
            return masks in preds[f.name]
        if f.name.startswith("child[") and f.name.endswith("]"):
            fam = f.name[6:-1]
            return masks[0] in self._children_of(fam, masks[1])
        if f.name.startswith("desc[") and f.name.endswith("]"):
            fam_members = set(self._family(f.name[5:-1]))
            z, x = masks
            return z in fam_members and x in fam_members and z & ~x == 0
        raise MissingSymbol(f"unknown set predicate {f.name}")

    def _eval_elem_quant(self, f, env: dict) -> bool:
        memo_key = self._memo_key(f, env)
        if memo_key in self._memo:
            return self._memo[memo_key]
        want_any = type(f) is F.ExistsE
        result = not want_any
        shadow = env.get(f.var, _MISSING)
        for x in self.struct.universe:
            env[f.var] = x
            if self._eval(f.body, env) == want_any:
                result = want_any
                break
        _restore(env, f.var, shadow)
        self._memo[memo_key] = result
        return result

    def _memo_key(self, f, env: dict):
        names = self._free(f)
        return (id(f), tuple(env.get(n) for n in names))

    # -- guarded set quantification -------------------------------------------

    def _guard_candidates(self, var: str, guard: F.Formula, env: dict):
        """Candidate masks for a bound set variable, or None if unrecognized."""
        if isinstance(guard, F.SetPred) and len(guard.args) == 1:
            arg = guard.args[0]
            if isinstance(arg, F.SVar) and arg.name == var and guard.name in self.struct.set_predicates:
                return self._family(guard.name)
        if (
            isinstance(guard, F.SetPred)
            and guard.name.startswith("child[")
            and len(guard.args) == 2
            and isinstance(guard.args[0], F.SVar)
            and guard.args[0].name == var
            and var not in F.free_vars(guard.args[1])
        ):
            return self._children_of(guard.name[6:-1], self.set_value(guard.args[1], env))
        if (
            isinstance(guard, F.SubsetEq)
            and isinstance(guard.left, F.SVar)
            and guard.left.name == var
            and var not in F.free_vars(guard.right)
        ):
            return tuple(submasks(self.set_value(guard.right, env)))
        if isinstance(guard, F.Children) and guard.set_var == var:
            return (self._derived("childset")[self._elem(guard.var, env)],)
        return None

    def _eval_set_quant(self, f, env: dict) -> bool:
        memo_key = self._memo_key(f, env)
        if memo_key in self._memo:
            return self._memo[memo_key]
        result = self._eval_set_quant_inner(f, env)
        self._memo[memo_key] = result
        return result

    def _eval_set_quant_inner(self, f, env: dict) -> bool:
        var, body = f.var, f.body
        if type(f) is F.ExistsS:
            if isinstance(body, F.And):
                guard, rest = body.parts[0], F.land(*body.parts[1:])
            else:
                guard, rest = body, F.TrueF()
            cands = self._guard_candidates(var, guard, env)
            if cands is not None:
                shadow = env.get(var, _MISSING)
                hit = False
                for m in cands:
                    env[var] = m
                    if self._eval(rest, env):
                        hit = True
                        break
                _restore(env, var, shadow)
                return hit
            return self._full_scan(f, env, want_any=True)
        # ForallS
        if isinstance(body, F.Implies):
            lhs, rhs = body.left, body.right
            if isinstance(lhs, F.And):
                guard, rest = lhs.parts[0], F.land(*lhs.parts[1:])
            else:
                guard, rest = lhs, F.TrueF()
            cands = self._guard_candidates(var, guard, env)
            if cands is not None:
                shadow = env.get(var, _MISSING)
                ok = True
                for m in cands:
                    env[var] = m
                    if self._eval(rest, env) and not self._eval(rhs, env):
                        ok = False
                        break
                _restore(env, var, shadow)
                return ok
        return self._full_scan(f, env, want_any=False)

    def _full_scan(self, f, env: dict, want_any: bool) -> bool:
        if self.struct.n > self.guard:
            raise UniverseTooLarge(
                f"unguarded set quantifier over {self.struct.n} elements (guard {self.guard})"
            )
        result = not want_any
        shadow = env.get(f.var, _MISSING)
        for m in submasks(self.struct.universe_mask):
            env[f.var] = m
            if self._eval(f.body, env) == want_any:
                result = want_any
                break
        _restore(env, f.var, shadow)
        return result


def evaluate(struct: ExtRelStruct, formula: F.Formula, env: dict | None = None, guard: int = DEFAULT_EVAL_GUARD) -> bool:
    """One-shot satisfaction check; see Evaluator for session reuse."""
    return Evaluator(struct, guard).evaluate(formula, env)
