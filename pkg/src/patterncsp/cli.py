"""Command-line front end.

Every command prints one JSON document on stdout. Exit status is 0 when the
question was answered, 1 when ``recognize`` finds no order, and 2 for usage,
input or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from . import catalog, recognition, solvers
from .csp import (
    Instance,
    InstanceError,
    brute_force_solve,
    count_solutions,
    enforce_ac,
    is_arc_consistent,
    parse_instance,
)
from .figures import BUILTINS, builtin
from .occurrence import CapExceeded, OccurrenceResult, in_class, occurs
from .pattern import Pattern, PatternError, parse_pattern


class UsageError(Exception):
    """Bad arguments or unreadable input; reported with exit status 2."""


# -- input helpers --------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_instance(path: str) -> Instance:
    """Read an instance file; documents written by ``gen`` or ``catalog show``
    are accepted too, the instance being taken from their ``instance`` key."""
    text = _read(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc.msg}") from exc
    if isinstance(doc, dict) and isinstance(doc.get("instance"), dict):
        doc = doc["instance"]
    try:
        return parse_instance(doc)
    except InstanceError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _load_pattern(source: str) -> Pattern:
    """A builtin pattern name or a path to a pattern JSON file."""
    if source.lower() in BUILTINS and not Path(source).exists():
        return builtin(source)
    try:
        return parse_pattern(_read(source))
    except PatternError as exc:
        raise UsageError(f"{source}: {exc}") from exc


def _split(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [t.strip() for t in text.split(",") if t.strip()]


def _var_order(inst: Instance, text: str | None) -> tuple[str, ...]:
    names = _split(text)
    if names is None:
        return inst.variables
    if sorted(names) != sorted(inst.variables):
        raise UsageError("--var-order must list every variable exactly once")
    return tuple(names)


def _dom_order(inst: Instance, text: str | None) -> tuple[int, ...]:
    raw = _split(text)
    if raw is None:
        return tuple(sorted(inst.universe))
    try:
        values = [int(v) for v in raw]
    except ValueError as exc:
        raise UsageError("--dom-order must list integers") from exc
    if sorted(values) != sorted(inst.universe):
        raise UsageError("--dom-order must list every universe value exactly once")
    return tuple(values)


# -- output helpers -------------------------------------------------------------


def _point(p: tuple[str, str]) -> list[str]:
    return [p[0], p[1]]


def _map_json(m: dict) -> list:
    return sorted([_point(k), list(v)] for k, v in m.items())


def _occurrence_json(result: OccurrenceResult) -> dict[str, Any]:
    if result.occurs:
        witnesses = []
        for w in result.witnesses:
            if isinstance(w, tuple):
                ext, h = w
                witnesses.append({"extension": ext.to_json(), "map": _map_json(h)})
            else:
                witnesses.append({"map": _map_json(w)})
        return {"verdict": "occurs", "witnesses": witnesses}
    out: dict[str, Any] = {"verdict": "not-occurs"}
    if result.extension is not None:
        out["extension"] = result.extension.to_json()
    return out


def _outcome_json(out: solvers.SolveOutcome) -> dict[str, Any]:
    return {
        "status": out.status,
        "assignment": out.assignment,
        "diagnostic": out.diagnostic,
        "witness": _map_json(out.witness) if out.witness else None,
        "trace": [
            {"variable": s.variable, "candidates": list(s.candidates), "chosen": s.chosen}
            for s in out.trace
        ],
    }


def _orders_json(orders) -> dict[str, Any] | str:
    if orders is None:
        return "none"
    return {"varOrder": list(orders[0]), "domOrder": list(orders[1])}


def _classification_json(c: catalog.Classification) -> dict[str, Any]:
    out: dict[str, Any] = {"verdict": c.verdict}
    if c.verdict == "ac-solvable":
        out["maximal"] = c.maximal
        out["occurrence"] = _occurrence_json(c.occurrence)
    elif c.verdict == "not-ac-solvable":
        out["instance"] = c.instance
        out["orders"] = _orders_json(c.orders)
    else:
        out["reason"] = c.reason
    return out


# -- commands -------------------------------------------------------------------


def cmd_ac(args: argparse.Namespace) -> tuple[Any, int]:
    inst = _load_instance(args.instance)
    reduced, trace = enforce_ac(inst)
    return {
        "wipeout": trace.wipeout,
        "removals": [list(r) for r in trace.removals],
        "instance": None if trace.wipeout else reduced.to_json(),
    }, 0


def cmd_solve(args: argparse.Namespace) -> tuple[Any, int]:
    inst = _load_instance(args.instance)
    cls = args.solver_class
    if cls == "brute":
        res = brute_force_solve(inst, args.cap)
        return {"status": res.status, "assignment": res.solution, "nodes": res.nodes}, 0
    var_order = _var_order(inst, args.var_order)
    dom_order = _dom_order(inst, args.dom_order)
    if cls in solvers.SOLVERS:
        out = solvers.SOLVERS[cls](inst, var_order, dom_order)
    elif cls == "lx":
        out = solvers.solve_lx(inst)
    elif cls == "btp":
        out = solvers.solve_btp(inst, var_order)
    else:
        out = solvers.solve_mac(inst, solvers.in_order(var_order))
    return _outcome_json(out), 0


def cmd_occurs(args: argparse.Namespace) -> tuple[Any, int]:
    return _occurrence_json(occurs(_load_pattern(args.pattern), _load_pattern(args.target))), 0


def cmd_in_class(args: argparse.Namespace) -> tuple[Any, int]:
    pattern = _load_pattern(args.pattern)
    inst = _load_instance(args.instance)
    try:
        orders = in_class(pattern, inst, args.cap)
    except CapExceeded as exc:
        raise UsageError(str(exc)) from exc
    return {"orders": _orders_json(orders)}, 0


def cmd_recognize(args: argparse.Namespace) -> tuple[Any, int]:
    inst = _load_instance(args.instance)
    if args.fixed == "dom":
        dom_order = _dom_order(inst, args.order)
        res = recognition.find_var_order(inst, args.target, dom_order)
        out: dict[str, Any] = {
            "order": list(res.order) if res.order else "none",
            "certificate": (
                _occurrence_json(res.certificate)
                if res.certificate
                else {"constraints": [{"kind": c.kind, "scope": [inst.variables[i] for i in c.scope]}
                                      for c in res.problem.constraints]}
            ),
        }
        return out, 0 if res.order else 1
    if args.target not in ("bti", "btx"):
        raise UsageError("--fixed var supports --target bti or btx")
    var_order = _var_order(inst, args.order)
    res_d = recognition.find_dom_order(inst, args.target, var_order)
    out = {
        "order": list(res_d.order) if res_d.order else "none",
        "certificate": (
            _occurrence_json(res_d.certificate) if res_d.certificate else {"cycle": [list(a) for a in res_d.cycle]}
        ),
    }
    return out, 0 if res_d.order else 1


def cmd_classify(args: argparse.Namespace) -> tuple[Any, int]:
    return _classification_json(catalog.classify(_load_pattern(args.pattern))), 0


def cmd_catalog(args: argparse.Namespace) -> tuple[Any, int]:
    if args.action == "list":
        return {"instances": list(catalog.CATALOG_NAMES), "refuting": [[lab, name] for lab, _, name in catalog.refuting_table()]}, 0
    if args.action == "show":
        if not args.name:
            raise UsageError("catalog show needs an instance name")
        try:
            inst = catalog.catalog_instance(args.name)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from exc
        return {"name": args.name.upper(), "instance": inst.to_json(), "varOrder": list(inst.variables)}, 0
    report = []
    for name in catalog.CATALOG_NAMES:
        inst = catalog.catalog_instance(name)
        patterns = {}
        for label, pattern, target in catalog.refuting_table():
            if target == name:
                patterns[label] = _orders_json(in_class(pattern, inst))
        report.append({
            "name": name,
            "arcConsistent": is_arc_consistent(inst),
            "solutions": count_solutions(inst),
            "avoided": patterns,
        })
    ok = all(r["arcConsistent"] and r["solutions"] == 0 and "none" not in r["avoided"].values() for r in report)
    return {"ok": ok, "instances": report}, 0


def cmd_gen(args: argparse.Namespace) -> tuple[Any, int]:
    if args.kind == "gadget":
        if not args.cnf:
            raise UsageError("gen gadget needs --cnf")
        try:
            n, clauses = recognition.parse_dimacs(_read(args.cnf))
            g = recognition.gen_gadget(args.target, clauses, n)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return {
            "instance": g.instance.to_json(),
            "varOrder": list(g.var_order) if g.var_order else None,
            "clauses": [
                {"literals": list(c.literals), "positions": list(c.positions), "extras": list(c.extras)}
                for c in g.clauses
            ],
            "aMax": g.a_max,
        }, 0
    if args.kind == "free":
        if not args.pattern:
            raise UsageError("gen free needs --pattern")
        inst, vo, do = catalog.gen_pattern_free_instance(
            _load_pattern(args.pattern), args.vars, args.dom, args.density, args.seed
        )
        return {"instance": inst.to_json(), "varOrder": list(vo), "domOrder": list(do)}, 0
    inst = catalog.random_instance(args.vars, args.dom, args.density, args.seed)
    return {"instance": inst.to_json()}, 0


def cmd_oracle(args: argparse.Namespace) -> tuple[Any, int]:
    inst = _load_instance(args.instance)
    res = brute_force_solve(inst, args.cap)
    out: dict[str, Any] = {"status": res.status, "solution": res.solution, "nodes": res.nodes}
    if args.count:
        out["count"] = count_solutions(inst, args.cap)
    return out, 0


def cmd_enumerate(args: argparse.Namespace) -> tuple[Any, int]:
    try:
        patterns = list(catalog.enumerate_simple_patterns(args.max_vars, args.max_pts, args.max_neg))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    tally: dict[str, int] = {}
    rows = []
    for p in patterns:
        row: dict[str, Any] = {"pattern": p.to_json()}
        if args.classify:
            c = catalog.classify(p)
            tally[c.verdict] = tally.get(c.verdict, 0) + 1
            row["classification"] = _classification_json(c)
        rows.append(row)
    summary = {"count": len(patterns), "verdicts": tally}
    if args.report:
        try:
            Path(args.report).write_text(json.dumps({"summary": summary, "patterns": rows}, sort_keys=True))
        except OSError as exc:
            raise UsageError(f"cannot write {args.report}: {exc.strerror or exc}") from exc
    return summary, 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patterncsp", description=__doc__.splitlines()[0])
    parser.add_argument("--pretty", action="store_true", help="indent JSON output")
    # also accepted after the command name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS, help="indent JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ac", parents=[common], help="enforce arc consistency")
    p.add_argument("instance")
    p.set_defaults(func=cmd_ac)

    p = sub.add_parser("solve", parents=[common], help="solve with a class solver or brute force")
    p.add_argument("instance")
    p.add_argument("--class", dest="solver_class", default="brute",
                   choices=["brute", "emc", "btx", "bti", "lx", "btp", "mac"])
    p.add_argument("--var-order")
    p.add_argument("--dom-order")
    p.add_argument("--cap", type=int, default=-1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("occurs", parents=[common], help="pattern-in-pattern occurrence")
    p.add_argument("--pattern", required=True, help="builtin name or pattern JSON file")
    p.add_argument("--target", required=True, help="builtin name or pattern JSON file")
    p.set_defaults(func=cmd_occurs)

    p = sub.add_parser("in-class", parents=[common], help="search order pairs under which a pattern is avoided")
    p.add_argument("--pattern", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--cap", type=int, default=10**7)
    p.set_defaults(func=cmd_in_class)

    p = sub.add_parser("recognize", parents=[common], help="find an order avoiding a pattern, the other order fixed")
    p.add_argument("instance")
    p.add_argument("--target", required=True, choices=["btp", "bti", "btx", "emc"])
    p.add_argument("--fixed", required=True, choices=["dom", "var"])
    p.add_argument("--order", help="the fixed order, comma separated (default: natural)")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("classify", parents=[common], help="decide AC-solvability of a simple pattern")
    p.add_argument("pattern")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("catalog", parents=[common], help="catalogue instances")
    p.add_argument("action", choices=["list", "show", "verify"])
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("gen", parents=[common], help="generate instances")
    p.add_argument("kind", choices=["gadget", "free", "random"])
    p.add_argument("--target", default="emc", choices=["emc", "btx", "bti"])
    p.add_argument("--cnf")
    p.add_argument("--pattern")
    p.add_argument("--vars", type=int, default=5)
    p.add_argument("--dom", type=int, default=3)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive search")
    p.add_argument("instance")
    p.add_argument("--cap", type=int, default=-1)
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("enumerate", parents=[common], help="enumerate simple patterns")
    p.add_argument("--max-vars", type=int, default=3)
    p.add_argument("--max-pts", type=int, default=2)
    p.add_argument("--max-neg", type=int, default=2)
    p.add_argument("--classify", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, status = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.pretty:
        text = json.dumps(payload, sort_keys=True, indent=2)
    else:
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
