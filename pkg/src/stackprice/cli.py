"""Command-line interface: ``stackprice gen | solve | analyze | export-dot``.

Results go to stdout as JSON; diagnostics go to stderr.  Exit codes:
0 success, 2 bad input or an incompatible check, 3 enumeration cap
exceeded, 4 prices inducing a negative cycle.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import generators
from .dot import solution_dot, to_dot
from .errors import CapExceeded, NegativeCycle, PathExplosion, ProfileExplosion, StackpriceError
from .jsonio import dumps_instance, instance_to_json, load_instance, pop_report_to_json, solution_to_json
from .matroids import MatroidOracle, verify_matroid_immunity
from .pricing import optimal_pricing, price_of_positivity, single_price_best, surplus_formula_check
from .rational import format_rational
from .structure import (
    diagnose_clutter,
    find_st_paradox,
    paradox_to_instance,
    recognize_series_parallel,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_EXPLOSION = 3
EXIT_NEGATIVE_CYCLE = 4


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _paradox_json(paradox):
    if paradox is None:
        return None
    return {
        "a": paradox.a,
        "u": paradox.u,
        "v": paradox.v,
        "b": paradox.b,
        "P1": list(paradox.P1),
        "P2": list(paradox.P2),
        "P3": list(paradox.P3),
    }


def _witness_json(w):
    if w is None:
        return None
    return {
        "a": w.a,
        "b": w.b,
        "c": w.c,
        "A": sorted(w.A, key=str),
        "B": sorted(w.B, key=str),
        "C": sorted(w.C, key=str),
    }


# gen -------------------------------------------------------------------------


def _build(args):
    family = args.family
    if family == "braess":
        return generators.braess_basic()
    if family == "generalized-braess":
        if args.n is None or args.n < 2:
            raise UsageError("generalized-braess needs --n >= 2")
        return generators.generalized_braess(args.n)
    if family == "path-graph":
        if args.m is None or args.m < 1:
            raise UsageError("path-graph needs --m >= 1")
        return generators.path_graph(args.m)
    if family == "two-follower-sp":
        return generators.two_follower_sp()
    if family == "triangle":
        return generators.triangle_network()
    if family == "paradox-witness":
        host = load_instance(args.host) if args.host else generators.st_paradox_graph()
        paradox = find_st_paradox(host)
        if paradox is None:
            raise UsageError("host graph is series-parallel; it contains no paradox")
        return paradox_to_instance(paradox, host)
    if family == "random":
        if args.random_mode == "matroid":
            return generators.random_matroid_instance(args.seed)
        return generators.random_instance(args.seed, args.random_mode, followers=args.followers)
    raise UsageError(f"unknown family {family!r}")


def cmd_gen(args) -> int:
    instance = _build(args)
    text = dumps_instance(instance)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


# solve -----------------------------------------------------------------------


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    if args.mode == "both":
        out = pop_report_to_json(instance, price_of_positivity(instance, profile_cap=args.cap))
    else:
        out = solution_to_json(instance, optimal_pricing(instance, args.mode, cap=args.cap))
    if args.single_price:
        q, profit = single_price_best(instance)
        out["single_price"] = {"q": format_rational(q), "profit": format_rational(profit)}
    _emit(out)
    return EXIT_OK


# analyze ---------------------------------------------------------------------


def _require_network(instance, what):
    if not instance.is_network:
        raise UsageError(f"{what} needs a network instance")


def cmd_analyze(args) -> int:
    instance = load_instance(args.instance)
    check = args.check
    if check == "sp":
        _require_network(instance, f"--check {check}")
        verdict = recognize_series_parallel(instance)
        _emit({
            "check": "sp",
            "is_series_parallel": verdict.is_series_parallel,
            "source": verdict.source,
            "sink": verdict.sink,
            "pruned": list(verdict.pruned),
            "reduction_trace": [list(step) for step in verdict.reduction_trace],
            "paradox": _paradox_json(verdict.paradox),
        })
    elif check == "paradox":
        _require_network(instance, f"--check {check}")
        _emit({"check": "paradox", "paradox": _paradox_json(find_st_paradox(instance))})
    elif check == "clutter":
        reports = []
        for k, f in enumerate(instance.followers):
            diag = diagnose_clutter(instance.system_at(k))
            reports.append({
                "follower": f.id,
                "antichain_ok": diag.antichain_ok,
                "verdict": diag.verdict,
                "nec_witness": _witness_json(diag.nec_witness),
                "suf_holds": diag.suf_holds,
                "witness_instance": instance_to_json(diag.witness_instance) if diag.witness_instance else None,
            })
        _emit({"check": "clutter", "followers": reports})
    elif check == "matroid":
        if instance.is_network or not all(isinstance(instance.systems[f.system], MatroidOracle)
                                          for f in instance.followers):
            raise UsageError("--check matroid needs every follower to use a matroid system")
        report = verify_matroid_immunity(instance)
        _emit({"check": "matroid", "immune": True, **pop_report_to_json(instance, report)})
    elif check == "surplus":
        result = surplus_formula_check(instance)
        _emit({
            "check": "surplus",
            "formula": format_rational(result.formula_value),
            "free_profit": format_rational(result.free_profit),
            "nonnegative_profit": format_rational(result.nonnegative_profit),
            "matches_free": result.matches_free,
            "matches_nonneg": result.matches_nonneg,
        })
    return EXIT_OK


# export-dot ------------------------------------------------------------------


def cmd_export_dot(args) -> int:
    instance = load_instance(args.instance)
    _require_network(instance, "export-dot")
    if args.solution:
        with open(args.solution, encoding="utf-8") as fh:
            sys.stdout.write(solution_dot(instance, json.load(fh)))
    else:
        sys.stdout.write(to_dot(instance))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stackprice", description="Exact Stackelberg network pricing.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance")
    gen.add_argument("family", choices=["braess", "generalized-braess", "path-graph", "two-follower-sp",
                                        "triangle", "paradox-witness", "random"])
    gen.add_argument("--n", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--random-mode", choices=["sp", "dag", "clutter", "matroid"], default="sp")
    gen.add_argument("--followers", type=int, default=1)
    gen.add_argument("--host", help="instance whose graph hosts the paradox witness")
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="compute optimal prices")
    solve.add_argument("instance")
    solve.add_argument("--mode", choices=["free", "nonneg", "nonnegative", "both"], default="both")
    solve.add_argument("--single-price", action="store_true")
    solve.add_argument("--cap", type=int, help="profile cap (overrides STACKPRICE_PROFILE_CAP)")
    solve.set_defaults(func=cmd_solve)

    analyze = sub.add_parser("analyze", help="structural diagnostics")
    analyze.add_argument("instance")
    analyze.add_argument("--check", choices=["sp", "paradox", "clutter", "matroid", "surplus"], required=True)
    analyze.set_defaults(func=cmd_analyze)

    dot = sub.add_parser("export-dot", help="Graphviz export")
    dot.add_argument("instance")
    dot.add_argument("--solution")
    dot.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ProfileExplosion, PathExplosion, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXPLOSION
    except NegativeCycle as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE_CYCLE
    except (UsageError, StackpriceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
