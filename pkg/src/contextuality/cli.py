"""Command-line front end.

Exit codes: 0 success, 1 parse/validation/usage error, 2 capacity error,
3 assertion failure (--assert-noncontextual on a contextual system),
4 numerical error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import catalog
from .augmentation import FillPolicy, augment, check_invariance
from .coupling import multimaximal_coupling, verify_coupling
from .lp import (CapacityError, MAX_CELLS_DEFAULT, NumericalError, EPS_DEGREE,
                 contextuality_degree)
from .system import (ParseError, ValidationError, as_fraction, connection,
                     parse_system, serialize_system)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CAPACITY = 2
EXIT_ASSERT = 3
EXIT_NUMERICAL = 4


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _load_system(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_system(text)
    except ParseError as exc:
        raise CliError(f"{path}: parse error: {exc}") from exc
    except ValidationError as exc:
        lines = "\n  ".join(exc.violations)
        raise CliError(f"{path}: invalid system:\n  {lines}") from exc


def _fmt(x: float) -> str:
    return f"{x:.12f}"


def _print_connections(system, out):
    for q in system.contents:
        view = connection(system, q)
        entries = "  ".join(f"{c}: p={_fmt(float(p))}" for c, p in view.entries)
        print(f"connection {q}: {entries}", file=out)


def _coupling_lines(coup):
    lines = []
    for outcome, p in coup.pmf.items():
        cells = " ".join(f"{v:+d}" for v in outcome)
        lines.append(f"  ({cells})  {_fmt(float(p))}")
    return lines


def cmd_analyze(args) -> int:
    system = _load_system(args.path)
    report = contextuality_degree(system, max_cells=args.max_cells)
    contextual = report.degree > args.tolerance
    if args.format == "json":
        doc = {
            "system": args.path,
            "contents": len(system.contents),
            "contexts": len(system.contexts),
            "measured_cells": len(system.measured_cells()),
            "consistent": report.consistent,
            "connections": {
                q: {c: float(p) for c, p in connection(system, q).entries}
                for q in system.contents
            },
            "couplings": {
                q: [{"outcome": list(o), "p": float(p)}
                    for o, p in coup.pmf.items()]
                for q, coup in report.couplings.items()
            },
            "min_total_variation": float(f"{report.min_total_variation:.12g}"),
            "degree": float(f"{report.degree:.12g}"),
            "contextual": contextual,
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"system: {args.path}")
        print(f"contents: {len(system.contents)}  contexts: {len(system.contexts)}  "
              f"measured cells: {len(system.measured_cells())}")
        print(f"consistently connected: {'yes' if report.consistent else 'no'}")
        _print_connections(system, sys.stdout)
        for q, coup in report.couplings.items():
            print(f"coupling {q} over contexts {', '.join(coup.contexts)}:")
            for line in _coupling_lines(coup):
                print(line)
        print(f"min total variation: {_fmt(report.min_total_variation)}")
        print(f"degree: {_fmt(report.degree)}")
        print(f"contextual: {'yes' if contextual else 'no'}")
    if args.witness:
        space_cells = [{"context": c, "content": q}
                       for c, q in ((cell.context, cell.content)
                                    for cell in system.measured_cells())]
        doc = {
            "cells": space_cells,
            "masses": [{"outcome": list(o), "q": float(m)}
                       for o, m in sorted(report.witness.masses.items())],
        }
        with open(args.witness, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    if args.assert_noncontextual and contextual:
        return EXIT_ASSERT
    return EXIT_OK


def _parse_fill(text: str) -> int:
    if text in ("+1", "1"):
        return 1
    if text == "-1":
        return -1
    raise CliError(f"fill value must be +1 or -1, got {text!r}")


def _load_per_cell(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read fill map {path}: {exc}") from exc
    if not isinstance(doc, dict) or "fills" not in doc:
        raise CliError(f'{path}: fill map must be {{"fills": [...]}}')
    mapping = {}
    for entry in doc["fills"]:
        try:
            mapping[(entry["content"], entry["context"])] = int(entry["value"])
        except (TypeError, KeyError) as exc:
            raise CliError(f"{path}: each fill needs content, context, value") from exc
    return mapping


def cmd_augment(args) -> int:
    system = _load_system(args.path)
    if args.per_cell:
        try:
            policy = FillPolicy.from_map(_load_per_cell(args.per_cell))
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    else:
        policy = FillPolicy.uniform(_parse_fill(args.fill))
    n_empty = len(system.empty_cells())
    try:
        augmented = augment(system, policy)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    text = serialize_system(augmented)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"cells filled: {n_empty}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_couple(args) -> int:
    system = _load_system(args.path)
    if args.content not in system.contents:
        raise CliError(f"unknown content {args.content!r}")
    view = connection(system, args.content)
    coup = multimaximal_coupling(view)
    audit = verify_coupling(coup, view)
    print(f"content: {args.content}")
    entries = "  ".join(f"{c}: p={_fmt(float(p))}" for c, p in view.entries)
    print(f"marginals: {entries}")
    print("coupling pmf:")
    for line in _coupling_lines(coup):
        print(line)
    print("pairwise maximality:")
    for pair in audit.pairs:
        ci, cj = view.contexts[pair.i], view.contexts[pair.j]
        print(f"  Pr[{ci} = {cj}] achieved {_fmt(float(pair.achieved))} "
              f"bound {_fmt(float(pair.bound))}")
    return EXIT_OK


def cmd_invariance(args) -> int:
    system = _load_system(args.path)
    policies = []
    if args.fills in ("both", "+1"):
        policies.append(FillPolicy.uniform(1))
    if args.fills in ("both", "-1"):
        policies.append(FillPolicy.uniform(-1))
    empty = [(cell.content, cell.context) for cell in system.empty_cells()]
    if args.trials and empty:
        rng = random.Random(args.seed)
        seen = {tuple(sorted(p.per_cell or ())) for p in policies}
        for _ in range(args.trials):
            mapping = {cell: rng.choice((1, -1)) for cell in empty}
            policy = FillPolicy.from_map(mapping)
            key = policy.per_cell
            if key in seen:
                continue
            seen.add(key)
            policies.append(policy)
    results = check_invariance(system, policies, max_cells=args.max_cells)
    all_passed = True
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  before {_fmt(r.degree_before)}  "
              f"after {_fmt(r.degree_after)}  {r.policy.describe()}")
        all_passed = all_passed and r.passed
    return EXIT_OK if all_passed else EXIT_ASSERT


def _parse_ratio_list(text: str, what: str):
    try:
        return tuple(as_fraction(tok.strip()) for tok in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad {what} list {text!r}") from exc


def cmd_generate(args) -> int:
    try:
        system = _build_generated(args)
    except (ValueError, ValidationError) as exc:
        raise CliError(str(exc)) from exc
    text = serialize_system(system)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _build_generated(args):
    if args.kind == "cyclic":
        if args.preset == "pr-box":
            return catalog.pr_box()
        if args.preset == "tsirelson":
            return catalog.tsirelson_box()
        if args.correlations is None:
            raise CliError("cyclic needs --preset or --correlations")
        corr = _parse_ratio_list(args.correlations, "correlation")
        marg = (_parse_ratio_list(args.marginals, "marginal")
                if args.marginals else None)
        n = args.n if args.n is not None else len(corr)
        return catalog.generate_cyclic(
            catalog.CyclicSpec(n=n, correlations=corr, marginals=marg))
    if args.kind == "staircase":
        if args.preset == "coins":
            half = Fraction(1, 2)
            pmfs = {c: catalog.independent_pmf([half, half])
                    for c in catalog.STAIRCASE_CONTEXTS}
        elif args.preset == "correlated":
            pmfs = {c: catalog.pair_pmf(Fraction(1, 2), Fraction(1, 2), Fraction(1))
                    for c in catalog.STAIRCASE_CONTEXTS}
        elif args.preset == "deterministic":
            return catalog.deterministic_system(
                catalog.STAIRCASE_ROWS, catalog.STAIRCASE_CONTENTS,
                catalog.STAIRCASE_CONTEXTS)
        else:
            raise CliError("staircase needs --preset coins|correlated|deterministic")
        return catalog.generate_staircase(pmfs)
    if args.kind == "random":
        return catalog.random_system(seed=args.seed, n_contents=args.contents,
                                     n_contexts=args.contexts,
                                     n_empty=args.empty)
    raise CliError(f"unknown kind {args.kind!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contextuality",
        description="Contextuality analysis of content-context systems "
                    "of binary random variables.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="degree of contextuality of a system file")
    p.add_argument("path")
    p.add_argument("--witness", metavar="OUT",
                   help="write the optimal quasi-distribution as JSON")
    p.add_argument("--assert-noncontextual", action="store_true",
                   help="exit 3 if the system is contextual")
    p.add_argument("--tolerance", type=float, default=EPS_DEGREE,
                   help="degree threshold for the contextual verdict")
    p.add_argument("--max-cells", type=int, default=MAX_CELLS_DEFAULT)
    p.add_argument("--format", choices=("human", "json"), default="human")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("augment", help="fill empty cells with fixed values")
    p.add_argument("path")
    p.add_argument("--fill", default="+1", help="+1 or -1 for every empty cell")
    p.add_argument("--per-cell", metavar="MAPFILE",
                   help="JSON fill map covering exactly the empty cells")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("couple", help="multimaximal coupling of one connection")
    p.add_argument("path")
    p.add_argument("--content", required=True)
    p.set_defaults(func=cmd_couple)

    p = sub.add_parser("invariance", help="check dummy-fill degree invariance")
    p.add_argument("path")
    p.add_argument("--trials", type=int, default=0,
                   help="additional random per-cell policies")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fills", choices=("both", "+1", "-1"), default="both")
    p.add_argument("--max-cells", type=int, default=MAX_CELLS_DEFAULT)
    p.add_argument("--jobs", type=int, default=1,
                   help="accepted for compatibility; trials run sequentially")
    p.set_defaults(func=cmd_invariance)

    p = sub.add_parser("generate", help="write a catalog system file")
    p.add_argument("kind", choices=("staircase", "cyclic", "random"))
    p.add_argument("--preset")
    p.add_argument("--n", type=int)
    p.add_argument("--correlations", help="comma-separated rationals")
    p.add_argument("--marginals", help="comma-separated rationals")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--contents", type=int, default=3)
    p.add_argument("--contexts", type=int, default=4)
    p.add_argument("--empty", type=int, default=2)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
