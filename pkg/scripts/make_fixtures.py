#!/usr/bin/env python3
"""Regenerate fixtures/v1: catalog system files plus the golden degree table.

Golden degrees come from the exact rational oracle; every certificate is
re-verified before the table is written. Run from the repository root:

    python3 scripts/make_fixtures.py
"""
from fractions import Fraction
from pathlib import Path

from contextuality import catalog, serialize_system
from contextuality.catalog import (CyclicSpec, STAIRCASE_CONTENTS,
                                   STAIRCASE_CONTEXTS, STAIRCASE_ROWS)

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "v1"


def staircase_coins():
    half = Fraction(1, 2)
    return catalog.generate_staircase(
        {c: catalog.independent_pmf([half, half]) for c in STAIRCASE_CONTEXTS})


def staircase_correlated():
    half = Fraction(1, 2)
    return catalog.generate_staircase(
        {c: catalog.pair_pmf(half, half, Fraction(1)) for c in STAIRCASE_CONTEXTS})


FIXTURES = {
    "pr-box": catalog.pr_box,
    "tsirelson": catalog.tsirelson_box,
    "two-cycle": lambda: catalog.generate_cyclic(
        CyclicSpec(n=2, correlations=(Fraction(1), Fraction(-1)))),
    "cyclic3-contextual": lambda: catalog.generate_cyclic(
        CyclicSpec(n=3, correlations=(Fraction(1), Fraction(1), Fraction(-1)))),
    "staircase-coins": staircase_coins,
    "staircase-correlated": staircase_correlated,
    "staircase-deterministic": lambda: catalog.deterministic_system(
        STAIRCASE_ROWS, STAIRCASE_CONTENTS, STAIRCASE_CONTEXTS),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, build in FIXTURES.items():
        system = build()
        (OUT / f"{name}.json").write_text(serialize_system(system),
                                          encoding="utf-8")
        result = catalog.oracle_degree(system)
        result.verify()
        d = result.degree
        rows.append(f"{name} {d.numerator}/{d.denominator} {float(d):.12f}")
        print(rows[-1])
    header = ("# golden degrees of contextuality, minted by the exact oracle\n"
              "# columns: fixture, exact rational, decimal to 12 digits\n")
    (OUT / "golden.txt").write_text(header + "\n".join(rows) + "\n",
                                    encoding="utf-8")


if __name__ == "__main__":
    main()
