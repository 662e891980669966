"""Canonical test systems, seeded random systems, and the exact oracle.

The oracle re-solves the minimum-total-variation program in exact rational
arithmetic and ships a primal witness plus a dual certificate, so its degrees
can be frozen as golden values and the floating-point path cross-checked.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import simplex_exact
from .lp import CapacityError, build_constraints, system_couplings
from .system import (MINUS, PLUS, Bunch, System, as_fraction, bunch,
                     outcome_sort_key, validate, ValidationError)

ORACLE_MAX_CELLS = 10

HALF = Fraction(1, 2)

# 3 contents x 4 contexts with a staircase of 4 empty cells: both pair
# overlaps between rows and columns of length 2 and 3.
STAIRCASE_CONTENTS = ("q1", "q2", "q3")
STAIRCASE_CONTEXTS = ("c1", "c2", "c3", "c4")
STAIRCASE_ROWS = {
    "c1": ("q1", "q2"),
    "c2": ("q1", "q2"),
    "c3": ("q1", "q3"),
    "c4": ("q2", "q3"),
}


@dataclass(frozen=True)
class CyclicSpec:
    """Rank-n cyclic system: context i measures contents i and i+1 (mod n)."""

    n: int
    correlations: tuple   # per-context E[XY], Fractions in [-1, 1]
    marginals: tuple = None  # per-content Pr[+1]; defaults to all 1/2

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("cyclic rank must be at least 2")
        if len(self.correlations) != self.n:
            raise ValueError(f"expected {self.n} correlations")
        if self.marginals is not None and len(self.marginals) != self.n:
            raise ValueError(f"expected {self.n} marginals")


def pair_pmf(m1: Fraction, m2: Fraction, e: Fraction) -> dict:
    """Joint pmf of two +1/-1 variables with Pr[+1] marginals m1, m2 and
    product expectation e: p(x,y) = (1 + x u1 + y u2 + x y e) / 4 with
    u = 2p - 1. Raises ValueError if any mass leaves [0, 1]."""
    u1, u2 = 2 * m1 - 1, 2 * m2 - 1
    pmf = {}
    for x in (PLUS, MINUS):
        for y in (PLUS, MINUS):
            p = (1 + x * u1 + y * u2 + x * y * e) / 4
            if not 0 <= p <= 1:
                raise ValueError(
                    f"marginals ({m1}, {m2}) and correlation {e} give "
                    f"mass {p} for outcome ({x:+d}, {y:+d})")
            pmf[(x, y)] = p
    return pmf


def independent_pmf(marginals) -> dict:
    """Product pmf of independent +1/-1 variables with the given Pr[+1]s."""
    pmf = {(): Fraction(1)}
    for m in marginals:
        m = as_fraction(m)
        pmf = {o + (v,): p * (m if v == PLUS else 1 - m)
               for o, p in pmf.items() for v in (PLUS, MINUS)}
    return pmf


def generate_staircase(bunch_pmfs: dict) -> System:
    """Build the 3x4 staircase-shaped system from per-context pair pmfs.

    `bunch_pmfs` maps each of c1..c4 to a pmf over that context's fixed
    content pair (see STAIRCASE_ROWS)."""
    if set(bunch_pmfs) != set(STAIRCASE_CONTEXTS):
        raise ValueError(f"expected pmfs for contexts {STAIRCASE_CONTEXTS}")
    bunches = []
    for c in STAIRCASE_CONTEXTS:
        pmf = bunch_pmfs[c]
        if any(len(o) != 2 for o in pmf):
            raise ValueError(f"context {c!r} takes a pmf over exactly 2 cells")
        bunches.append(bunch(c, STAIRCASE_ROWS[c], pmf))
    system = System(contents=STAIRCASE_CONTENTS, contexts=STAIRCASE_CONTEXTS,
                    bunches=tuple(bunches))
    _raise_if_invalid(system)
    return system


def generate_cyclic(spec: CyclicSpec) -> System:
    contents = tuple(f"q{i + 1}" for i in range(spec.n))
    contexts = tuple(f"c{i + 1}" for i in range(spec.n))
    marginals = (tuple(as_fraction(m) for m in spec.marginals)
                 if spec.marginals is not None else (HALF,) * spec.n)
    correlations = tuple(as_fraction(e) for e in spec.correlations)
    for e in correlations:
        if not -1 <= e <= 1:
            raise ValueError(f"correlation {e} outside [-1, 1]")
    bunches = []
    for i in range(spec.n):
        j = (i + 1) % spec.n
        pmf = pair_pmf(marginals[i], marginals[j], correlations[i])
        bunches.append(bunch(contexts[i], (contents[i], contents[j]), pmf))
    system = System(contents=contents, contexts=contexts, bunches=tuple(bunches))
    _raise_if_invalid(system)
    return system


def pr_box() -> System:
    return generate_cyclic(CyclicSpec(n=4, correlations=(1, 1, 1, Fraction(-1))))


# rational stand-in for 1/sqrt(2); the golden degree belongs to this exact
# rational system, not to the irrational ideal
TSIRELSON_RATIO = Fraction(169, 239)


def tsirelson_box() -> System:
    e = TSIRELSON_RATIO
    return generate_cyclic(CyclicSpec(n=4, correlations=(e, e, e, -e)))


def random_system(seed: int, n_contents: int = 3, n_contexts: int = 4,
                  n_empty: int = 2, weight_range: int = 48) -> System:
    """Deterministic seeded system with rational bunch pmfs.

    Empty cells are drawn so that every content stays measured somewhere and
    no bunch becomes empty. Masses are integer weights normalized by their
    sum, a rational Dirichlet-like scheme."""
    rng = random.Random(seed)
    contents = tuple(f"q{i + 1}" for i in range(n_contents))
    contexts = tuple(f"c{i + 1}" for i in range(n_contexts))
    grid = [(q, c) for c in contexts for q in contents]
    if n_empty < 0 or n_empty > len(grid) - max(n_contents, n_contexts):
        raise ValueError(f"cannot leave {n_empty} cells empty in a "
                         f"{n_contents}x{n_contexts} grid")
    while True:
        empty = set(rng.sample(grid, n_empty))
        measured = [cell for cell in grid if cell not in empty]
        if all(any(q == qq for qq, _ in measured) for q in contents) and \
           all(any(c == cc for _, cc in measured) for c in contexts):
            break
    bunches = []
    for c in contexts:
        row = tuple(q for q in contents if (q, c) not in empty)
        weights = [rng.randint(1, weight_range) for _ in range(1 << len(row))]
        total = sum(weights)
        pmf = {}
        for code, w in enumerate(weights):
            outcome = tuple(MINUS if (code >> (len(row) - 1 - k)) & 1 else PLUS
                            for k in range(len(row)))
            pmf[outcome] = Fraction(w, total)
        bunches.append(bunch(c, row, pmf))
    system = System(contents=contents, contexts=contexts, bunches=tuple(bunches))
    _raise_if_invalid(system)
    return system


def deterministic_system(shape_rows: dict, contents, contexts,
                         value: int = PLUS) -> System:
    """Every measured cell fixed at `value` with probability 1."""
    bunches = []
    for c in contexts:
        row = tuple(shape_rows[c])
        bunches.append(bunch(c, row, {(value,) * len(row): 1}))
    system = System(contents=tuple(contents), contexts=tuple(contexts),
                    bunches=tuple(bunches))
    _raise_if_invalid(system)
    return system


# ---------------------------------------------------------------------------
# exact oracle

@dataclass(frozen=True)
class OracleResult:
    degree: Fraction
    min_total_variation: Fraction
    witness: dict        # outcome tuple -> Fraction (zeros omitted)
    dual: tuple          # one multiplier per constraint
    space: object        # JointOutcomeSpace
    constraints: tuple

    def verify(self) -> None:
        """Independent exact re-evaluation of both certificates.

        Primal: the witness satisfies every constraint exactly and its total
        variation equals the claimed optimum. Dual: the multipliers are
        feasible for the dual program (|A^T y| <= 1 columnwise) and attain the
        same value, so by weak duality the optimum is proved."""
        total = sum(self.witness.values(), Fraction(0))
        if total != 1:
            raise AssertionError(f"witness masses sum to {total}, not 1")
        for con in self.constraints:
            got = sum((m for o, m in self.witness.items()
                       if all(o[j] == v for j, v in
                              zip(con.cell_indices, con.pattern))),
                      Fraction(0))
            if got != con.target:
                raise AssertionError(
                    f"witness violates {con.kind} constraint for {con.label!r}")
        tv = sum((abs(m) for m in self.witness.values()), Fraction(0))
        if tv != self.min_total_variation:
            raise AssertionError(
                f"witness total variation {tv} != claimed {self.min_total_variation}")
        # dual feasibility: each joint outcome's accumulated multiplier in [-1, 1]
        acc = {}
        for con, y in zip(self.constraints, self.dual):
            if y == 0:
                continue
            for code in range(self.space.size):
                outcome = self.space.outcome_of(code)
                if all(outcome[j] == v for j, v in
                       zip(con.cell_indices, con.pattern)):
                    acc[code] = acc.get(code, Fraction(0)) + y
        if any(abs(v) > 1 for v in acc.values()):
            raise AssertionError("dual certificate is infeasible")
        bound = sum((y * con.target for con, y in
                     zip(self.constraints, self.dual)), Fraction(0))
        if bound != self.min_total_variation:
            raise AssertionError(
                f"dual value {bound} != primal value {self.min_total_variation}")


def oracle_degree(system: System, max_cells: int = ORACLE_MAX_CELLS) -> OracleResult:
    """Exact rational min V - 1 with primal and dual certificates.

    Probabilities are stored as exact rationals throughout, so any parseable
    system is oracle-eligible; the only cap is the joint-space size."""
    _raise_if_invalid(system)
    for b in system.bunches:
        total = sum(b.pmf.values(), Fraction(0))
        if total != 1:
            raise ValueError(
                f"bunch for context {b.context!r} sums to {total}, not exactly 1; "
                "the oracle needs exact rational pmfs")
    try:
        space, constraints = build_constraints(system, system_couplings(system),
                                               max_cells=max_cells)
    except CapacityError as exc:
        raise CapacityError(
            f"oracle limited to {max_cells} measured cells: {exc}") from exc
    n = space.size
    A = [[Fraction(0)] * n for _ in constraints]
    ncells = len(space.cells)
    for i, con in enumerate(constraints):
        mask = patt = 0
        for j, v in zip(con.cell_indices, con.pattern):
            bit = 1 << (ncells - 1 - j)
            mask |= bit
            if v == MINUS:
                patt |= bit
        row = A[i]
        for code in range(n):
            if (code & mask) == patt:
                row[code] = Fraction(1)
    b = [con.target for con in constraints]
    # q = a - b split: columns [A | -A], unit costs
    A_full = [A[i] + [-v for v in A[i]] for i in range(len(A))]
    c = [Fraction(1)] * (2 * n)
    sol = simplex_exact.solve_equality_lp(A_full, b, c)
    witness = {}
    for code in range(n):
        q = sol.x[code] - sol.x[n + code]
        if q != 0:
            witness[space.outcome_of(code)] = q
    return OracleResult(
        degree=sol.value - 1,
        min_total_variation=sol.value,
        witness=witness,
        dual=tuple(sol.y),
        space=space,
        constraints=tuple(constraints),
    )


def _raise_if_invalid(system: System) -> None:
    violations = validate(system)
    if violations:
        raise ValidationError(violations)
