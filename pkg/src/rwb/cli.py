"""Command line entry point: ``rwb chase|entail|verify|models|stone``.

Exit codes: 0 pass or Proved, 1 failure or Disproved, 2 malformed input,
3 budget exhausted (the partial model is still printed), 4 Unknown.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .chase import Disproved, Proved, chase, entails
from .enumerate import enumerate_models
from .errors import ArityError, ParseError, PreconditionError, SortError
from .generate import load_theory, theory_names
from .kernel import BACKEND
from .parser import parse_formula, parse_sequent, parse_theory
from .printer import format_fic, format_sequent
from .stone import MeetSemilattice, all_lattices, check_equivalence
from .suites import SUITES, Config, run_suites

SCHEMA = "rwb-report/1"

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_BUDGET, EXIT_UNKNOWN = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _text_arg(value: str) -> str:
    """A literal argument, or the contents of the file it names."""
    p = Path(value)
    if p.suffix and p.is_file():
        return p.read_text()
    return value


def _theory(value):
    if value is None:
        raise InputError("--theory is required")
    p = Path(value)
    if p.is_file():
        return parse_theory(p.read_text())
    if value in theory_names():
        return load_theory(value)
    raise InputError(f"no theory file or corpus theory named {value!r} (corpus: {', '.join(theory_names())})")


def _emit(args, payload: dict):
    if not args.json:
        return
    text = json.dumps({"schema": SCHEMA, "command": args.command, **payload}, indent=2, sort_keys=True) + "\n"
    if args.json == "-":
        sys.stdout.write(text)
    else:
        Path(args.json).write_text(text)


def cmd_chase(args) -> int:
    t = _theory(args.theory)
    if args.formula is None:
        raise InputError("--formula is required")
    f = parse_formula(_text_arg(args.formula), t.signature)
    res = chase(f, t, args.budget)
    print(f"formula: {format_fic(f)}")
    print(f"status: {res.status} after {res.steps} steps")
    print(f"generic: ({', '.join(res.generic)})")
    print("model:")
    print(res.model.describe())
    if args.trace:
        for i, step in enumerate(res.trace):
            print(f"  step {i}: {step.axiom} on ({', '.join(step.trigger)}) {step.kind}")
    _emit(args, {"formula": format_fic(f), "result": res.to_dict()})
    return EXIT_OK if res.terminated else EXIT_BUDGET


def cmd_entail(args) -> int:
    t = _theory(args.theory)
    if args.sequent is None:
        raise InputError("--sequent is required")
    s = parse_sequent(_text_arg(args.sequent), t.signature)
    verdict = entails(t, s, args.budget)
    name = type(verdict).__name__
    print(f"sequent: {format_sequent(s)}")
    print(f"verdict: {name}")
    if isinstance(verdict, Disproved):
        print(f"witness: ({', '.join(verdict.witness)})")
        print("countermodel:")
        print(verdict.countermodel.describe())
    _emit(args, {"sequent": format_sequent(s), "result": verdict.to_dict()})
    if isinstance(verdict, Proved):
        return EXIT_OK
    return EXIT_FAIL if isinstance(verdict, Disproved) else EXIT_UNKNOWN


def _suite_ids(value: str) -> list:
    if value in (None, "all"):
        return list(SUITES)
    ids = [x.strip() for x in value.split(",") if x.strip()]
    unknown = [x for x in ids if x not in SUITES]
    if unknown:
        raise InputError(f"unknown suite {', '.join(unknown)} (available: all, {', '.join(SUITES)})")
    return ids


def cmd_verify(args) -> int:
    ids = _suite_ids(args.suite)
    cfg = Config(seed=args.seed, budget=args.budget)
    for key in ("max_size", "stages", "model_size"):
        if getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    if not 1 <= cfg.max_size <= 6:
        raise InputError("--max-size must lie in 1..6")
    if not 1 <= cfg.stages <= 8 or not 1 <= cfg.model_size <= 6:
        raise InputError("--stages must lie in 1..8 and --model-size in 1..6")
    reports = run_suites(ids, cfg, args.workers)
    for r in reports:
        extra = ""
        if r.unknown or r.conditional or r.budget_exhausted:
            extra = f" unknown={r.unknown} conditional={r.conditional} budget-exhausted={r.budget_exhausted}"
        fails = "" if r.passed else " failed: " + ", ".join(f"{k} x{v}" for k, v in sorted(r.failures.items()))
        print(f"{'PASS' if r.passed else 'FAIL'} {r.suite}: {r.instances} instances, "
              f"{sum(r.checks.values())} checks, {r.seconds:.1f}s{extra}{fails}")
    ok = all(r.passed for r in reports)
    config = {k: v for k, v in vars(cfg).items()}
    _emit(args, {"config": config, "passed": ok, "suites": [r.to_dict() for r in reports]})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_models(args) -> int:
    t = _theory(args.theory)
    bound = args.max_size if args.max_size is not None else 3
    if not 0 <= bound <= 6:
        raise InputError("--max-size must lie in 0..6")
    models = list(enumerate_models(t, bound))
    print(f"{len(models)} models with at most {bound} elements per sort, up to isomorphism")
    if not args.quiet:
        for i, m in enumerate(models):
            print(f"model {i}:")
            print(m.describe())
    _emit(args, {"bound": bound, "count": len(models), "models": [m.to_dict() for m in models]})
    return EXIT_OK


def cmd_stone(args) -> int:
    if args.input:
        try:
            lattices = [MeetSemilattice.from_json(Path(args.input).read_text())]
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise InputError(f"{args.input}: expected a JSON order matrix ({e})")
    else:
        size = args.max_size if args.max_size is not None else 5
        if not 1 <= size <= 6:
            raise InputError("--max-size must lie in 1..6")
        lattices = list(all_lattices(size))
    reports = [check_equivalence(s) for s in lattices]
    for s, r in zip(lattices, reports):
        print(f"{'equal' if r.equal else 'DIFFERENT'} size={r.size} filters={r.filters} "
              f"maps={r.continuous} opens={r.opens} principal={'ok' if r.principal_ok else 'FAIL'} "
              f"order={s.to_matrix()}")
    ok = all(r.equal and r.principal_ok for r in reports)
    print(f"{sum(r.equal for r in reports)} of {len(reports)} semilattices: directed-join-preserving maps = continuous maps")
    _emit(args, {"passed": ok, "instances": [dict(r.to_dict(), order=s.to_matrix())
                                             for s, r in zip(lattices, reports)]})
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rwb", description="Regular-logic workbench.")
    p.add_argument("--version", action="version", version=f"rwb {__version__} ({BACKEND} kernel)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", metavar="OUT", help="write a JSON report to OUT ('-' for stdout)")
        return sp

    budget_help = "chase step budget (default: $RWB_BUDGET or 10000)"
    sp = common(sub.add_parser("chase", help="chase the canonical structure of a formula"))
    sp.add_argument("--theory", help="theory file or corpus theory name")
    sp.add_argument("--formula", help="formula-in-context, e.g. '[x:A, y:A] R(x, y)', or a file")
    sp.add_argument("--budget", type=int, help=budget_help)
    sp.add_argument("--trace", action="store_true", help="print every chase step")
    sp.set_defaults(func=cmd_chase)

    sp = common(sub.add_parser("entail", help="decide a sequent through the universal model"))
    sp.add_argument("--theory", help="theory file or corpus theory name")
    sp.add_argument("--sequent", help="sequent, e.g. '[x:A, y:A] R(x, y) |- R(y, x)', or a file")
    sp.add_argument("--budget", type=int, help=budget_help)
    sp.set_defaults(func=cmd_entail)

    sp = common(sub.add_parser("verify", help="run property suites"))
    sp.add_argument("--suite", default="all", help=f"'all' or a comma list of: {', '.join(SUITES)}")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-size", type=int, help="semilattice size bound (default 5)")
    sp.add_argument("--stages", type=int, help="diagram stages (default 5)")
    sp.add_argument("--model-size", type=int, help="elements per sort in diagram stages (default 5)")
    sp.add_argument("--budget", type=int, help=budget_help)
    sp.add_argument("--workers", type=int, default=1, help="run suites in a process pool")
    sp.set_defaults(func=cmd_verify)

    sp = common(sub.add_parser("models", help="enumerate finite models up to isomorphism"))
    sp.add_argument("--theory", help="theory file or corpus theory name")
    sp.add_argument("--max-size", type=int, help="elements per sort (default 3)")
    sp.add_argument("--quiet", action="store_true", help="print only the count")
    sp.set_defaults(func=cmd_models)

    sp = common(sub.add_parser("stone", help="compare directed-join-preserving and continuous maps"))
    sp.add_argument("--input", help="JSON order matrix of one meet-semilattice")
    sp.add_argument("--max-size", type=int, help="check every semilattice up to this size (default 5)")
    sp.set_defaults(func=cmd_stone)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "budget", None) is not None and args.budget < 0:
        print("error: --budget must be non-negative", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except (ParseError, SortError, ArityError, PreconditionError, InputError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
