"""Command-line front end.

Subcommands: laminar, wptree, wbtree, modular, cotree, split, bijoin,
cutrank, verify, cmso (eval | run).  Inputs come from --in (path or ``-``),
results go to --out as JSON or DOT.  Exit codes: 0 success, 1 domain error,
2 usage or parse error.  DECOMP_GUARD mirrors --guard.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import formats
from .core import build_structure
from .errors import DecompError, FormulaSyntaxError, ScopeError
from .graphdec import (
    cotree,
    cut_rank,
    modular_decomposition,
    skeleton,
    split_decomposition,
)
from .laminar import laminar_tree
from .oracle import check_closure
from .partitive import weakly_bipartitive_tree, weakly_partitive_tree


def _open_in(path: str):
    return sys.stdin if path == "-" else open(path, "r", encoding="utf8")


def _emit(args, payload: str) -> None:
    if args.out == "-":
        sys.stdout.write(payload)
    else:
        with open(args.out, "w", encoding="utf8") as fh:
            fh.write(payload)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _common(sub):
    sub.add_argument("--in", dest="infile", default="-", help="input path or - for stdin")
    sub.add_argument("--out", default="-", help="output path or - for stdout")
    sub.add_argument("--format", choices=("json", "dot"), default="json")
    sub.add_argument("--guard", type=int, default=None, help="enumeration guard override")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--jobs", type=int, default=1, help="worker count for subset scans")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="decomp", description=__doc__)
    subs = top.add_subparsers(dest="command", required=True)

    for name in ("laminar", "wptree"):
        sub = subs.add_parser(name)
        _common(sub)
    sub = subs.add_parser("wbtree")
    _common(sub)
    sub.add_argument("--anchor", type=int, default=0, help="element rooting the reduction")
    for name in ("modular", "cotree", "split", "bijoin"):
        sub = subs.add_parser(name)
        _common(sub)
    sub = subs.add_parser("cutrank")
    _common(sub)
    sub.add_argument("--set", required=True, help="comma-separated vertex subset")
    sub = subs.add_parser("verify")
    _common(sub)
    sub.add_argument(
        "--law",
        required=True,
        choices=("weakly-partitive", "partitive", "weakly-bipartitive", "bipartitive"),
    )
    cm = subs.add_parser("cmso")
    cm_subs = cm.add_subparsers(dest="cmso_command", required=True)
    ev = cm_subs.add_parser("eval")
    _common(ev)
    ev.add_argument("--formula", required=True, help="formula text or @path")
    ev.add_argument("--free", default="", help="comma-separated free variables with bindings a=1,X=0,2")
    run = cm_subs.add_parser("run")
    _common(run)
    run.add_argument(
        "pipeline",
        choices=("laminar", "wptree", "modular", "bipartition", "split", "skeleton"),
    )
    run.add_argument("--mode", choices=("guided", "exhaustive"), default="guided")
    run.add_argument("--anchor", type=int, default=0)
    return top


def _guard(args) -> int:
    if args.guard is not None:
        return args.guard
    env = os.environ.get("DECOMP_GUARD")
    return int(env) if env else 16


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (FormulaSyntaxError, ScopeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DecompError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    guard = _guard(args)
    cmd = args.command
    if cmd == "laminar":
        with _open_in(args.infile) as fh:
            system = formats.load_set_system(fh)
        tree = laminar_tree(system)
        if args.format == "dot":
            _emit(args, formats.rooted_tree_dot(tree))
        else:
            _emit_json(args, formats.rooted_tree_json(tree))
        return 0
    if cmd == "wptree":
        with _open_in(args.infile) as fh:
            system = formats.load_set_system(fh)
        wpt = weakly_partitive_tree(system)
        if args.format == "dot":
            _emit(args, formats.rooted_tree_dot(wpt.tree, wpt.label, wpt.order))
        else:
            _emit_json(args, formats.wptree_json(wpt))
        return 0
    if cmd == "wbtree":
        with _open_in(args.infile) as fh:
            system = formats.load_bipartition_system(fh)
        wbt = weakly_bipartitive_tree(system)
        if args.format == "dot":
            _emit(args, formats.unrooted_tree_dot(wbt.tree, wbt.label, wbt.cyclic_order))
        else:
            _emit_json(args, formats.wbtree_json(wbt))
        return 0
    if cmd in ("modular", "cotree", "split", "bijoin", "cutrank"):
        with _open_in(args.infile) as fh:
            graph, names = formats.load_graph(fh)
        if cmd == "modular":
            dec = modular_decomposition(graph, guard)
            if args.format == "dot":
                _emit(args, formats.rooted_tree_dot(dec.tree))
            else:
                obj = formats.modular_json(dec)
                if names:
                    obj["names"] = names
                _emit_json(args, obj)
            return 0
        if cmd == "cotree":
            ct = cotree(graph, guard)
            if args.format == "dot":
                _emit(args, formats.rooted_tree_dot(ct.tree, ct.label, ct.order))
            else:
                _emit_json(args, formats.cotree_json(ct))
            return 0
        if cmd == "split":
            dec = split_decomposition(graph, guard, jobs=args.jobs)
            if args.format == "dot":
                _emit(args, formats.split_dot(dec))
            else:
                _emit_json(args, formats.split_json(dec))
            return 0
        if cmd == "bijoin":
            skel = skeleton(graph, guard, jobs=args.jobs)
            if args.format == "dot":
                _emit(args, formats.skeleton_dot(skel))
            else:
                _emit_json(args, formats.skeleton_json(skel))
            return 0
        subset = {int(tok) for tok in args.set.split(",") if tok != ""}
        _emit_json(args, {"cut_rank": cut_rank(graph, subset)})
        return 0
    if cmd == "verify":
        with _open_in(args.infile) as fh:
            text = fh.read()
        obj = json.loads(text)
        if "sets" in obj:
            from .core import SetSystem

            system = SetSystem.from_sets(int(obj["n"]), [set(s) for s in obj["sets"]])
        else:
            from .core import BipartitionSystem

            system = BipartitionSystem.from_sides(int(obj["n"]), [set(s) for s in obj["sides"]])
        violation = check_closure(system, args.law)
        if violation is None:
            _emit_json(args, {"law": args.law, "holds": True})
            return 0
        _emit_json(
            args,
            {
                "law": args.law,
                "holds": False,
                "first": list_from_mask(violation.first),
                "second": list_from_mask(violation.second),
                "missing": list_from_mask(violation.missing),
            },
        )
        return 1
    if cmd == "cmso":
        return _dispatch_cmso(args)
    raise DecompError(f"unknown command {cmd}")


def list_from_mask(mask: int) -> list[int]:
    from .bitset import bits

    return list(bits(mask))


def _dispatch_cmso(args) -> int:
    from .cmso import evaluate, parse_formula
    from .cmso import pipelines as pipelines_mod

    if args.cmso_command == "eval":
        text = args.formula
        if text.startswith("@"):
            with open(text[1:], "r", encoding="utf8") as fh:
                text = fh.read()
        env = {}
        free = []
        if args.free:
            for binding in args.free.split(";"):
                name, _, value = binding.partition("=")
                free.append(name.strip())
                if name.strip()[0].isupper():
                    env[name.strip()] = sum(1 << int(v) for v in value.split(",") if v != "")
                else:
                    env[name.strip()] = int(value)
        formula = parse_formula(text, free=tuple(free))
        with _open_in(args.infile) as fh:
            struct = formats.load_structure(fh)
        result = evaluate(struct, formula, env)
        _emit_json(args, {"satisfied": result})
        return 0
    # cmso run
    with _open_in(args.infile) as fh:
        text = fh.read()
    obj = json.loads(text)
    if "sets" in obj:
        from .core import SetSystem

        source = SetSystem.from_sets(int(obj["n"]), [set(s) for s in obj["sets"]])
    elif "sides" in obj:
        from .core import BipartitionSystem

        source = BipartitionSystem.from_sides(int(obj["n"]), [set(s) for s in obj["sides"]])
    else:
        source = formats.load_graph_json(obj)
    runners = {
        "laminar": pipelines_mod.pipeline_laminar_tree,
        "wptree": pipelines_mod.pipeline_weakly_partitive_tree,
        "modular": pipelines_mod.pipeline_modular,
        "bipartition": pipelines_mod.pipeline_bipartition_laminar,
        "split": pipelines_mod.pipeline_split,
    }
    if args.pipeline == "skeleton":
        outputs = pipelines_mod.pipeline_skeleton_guided(source)
    else:
        outputs = runners[args.pipeline](source, mode=args.mode)
    payload = []
    for out in outputs:
        payload.append(
            {
                "universe": list(out.universe),
                "relations": {k: sorted(map(list, v)) for k, v in out.relations.items()},
                "set_predicates": {
                    k: sorted([list_from_mask(m) for m in t] for t in v)
                    for k, v in out.set_predicates.items()
                },
            }
        )
    _emit_json(args, {"outputs": payload})
    return 0


if __name__ == "__main__":
    sys.exit(main())
