"""Degree of contextuality as a minimum-total-variation linear program.

A quasi-distribution assigns a signed mass to every joint outcome of all
measured cells. It must reproduce every bunch pmf when marginalized onto a
context's cells and every multimaximal coupling pmf when marginalized onto a
content's cells. Minimizing the sum of absolute masses over such signed
distributions gives min V; the degree of contextuality is min V - 1, zero
exactly when a proper joint distribution exists.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .coupling import Coupling, multimaximal_coupling
from .system import (MINUS, PLUS, System, connection, is_consistently_connected,
                     validate, ValidationError)

EPS_LP = 1e-9       # constraint residuals of returned witnesses
EPS_DEGREE = 1e-7   # contextual / noncontextual verdict threshold
MAX_CELLS_DEFAULT = 20


class CapacityError(RuntimeError):
    """Joint outcome space too large for the dense formulation."""


class NumericalError(RuntimeError):
    """LP solver failed to converge to an optimal solution."""


@dataclass(frozen=True)
class JointOutcomeSpace:
    """All measured cells in canonical (context, content) order; joint
    outcomes are indexed by integers whose bits follow that order, with bit
    value 0 meaning +1 (so integer order is the lexicographic outcome order)."""

    cells: tuple  # ((context, content), ...)

    @property
    def size(self) -> int:
        return 1 << len(self.cells)

    def index(self, context: str, content: str) -> int:
        return self.cells.index((context, content))

    def outcome_of(self, code: int) -> tuple:
        n = len(self.cells)
        return tuple(MINUS if (code >> (n - 1 - j)) & 1 else PLUS
                     for j in range(n))

    def code_of(self, outcome) -> int:
        n = len(self.cells)
        code = 0
        for j, v in enumerate(outcome):
            if v == MINUS:
                code |= 1 << (n - 1 - j)
        return code


@dataclass(frozen=True)
class MarginalConstraint:
    kind: str            # "bunch" or "connection"
    label: str           # owning context or content
    cell_indices: tuple  # positions in the JointOutcomeSpace
    pattern: tuple       # +1/-1 assignment for those cells
    target: Fraction


@dataclass(frozen=True)
class QuasiDistribution:
    """Signed mass function over the joint outcome space (zeros omitted)."""

    masses: dict  # outcome tuple -> float or Fraction

    def total_variation(self):
        return sum(abs(m) for m in self.masses.values())

    def total_mass(self):
        return sum(self.masses.values())


@dataclass(frozen=True)
class ContextualityReport:
    min_total_variation: float
    degree: float
    contextual: bool
    witness: QuasiDistribution
    consistent: bool
    couplings: dict  # content -> Coupling


def outcome_space(system: System, max_cells: int = MAX_CELLS_DEFAULT) -> JointOutcomeSpace:
    cells = tuple((cell.context, cell.content) for cell in system.measured_cells())
    if len(cells) > max_cells:
        raise CapacityError(
            f"{len(cells)} measured cells exceeds the limit of {max_cells} "
            f"(2^{len(cells)} joint outcomes)")
    return JointOutcomeSpace(cells=cells)


def system_couplings(system: System) -> dict:
    return {q: multimaximal_coupling(connection(system, q)) for q in system.contents}


def build_constraints(system: System, couplings: dict,
                      max_cells: int = MAX_CELLS_DEFAULT):
    """One equality per (context, bunch outcome) and per (content, coupling
    outcome), referencing cells by canonical index. Returns (space, constraints)."""
    space = outcome_space(system, max_cells=max_cells)
    constraints = []
    for c in system.contexts:
        b = system.bunch_of(c)
        idx = tuple(space.index(c, q) for q in b.contents)
        for outcome, p in _full_pmf(b.pmf, len(b.contents)):
            constraints.append(MarginalConstraint(
                kind="bunch", label=c, cell_indices=idx,
                pattern=outcome, target=p))
    for q in system.contents:
        coup = couplings[q]
        idx = tuple(space.index(c, q) for c in coup.contexts)
        for outcome, p in _full_pmf(coup.pmf, len(coup.contexts)):
            constraints.append(MarginalConstraint(
                kind="connection", label=q, cell_indices=idx,
                pattern=outcome, target=p))
    return space, constraints


def _full_pmf(pmf: dict, arity: int):
    """All 2^arity outcomes in lexicographic order, including zero masses
    (zero targets are constraints too)."""
    out = []
    for code in range(1 << arity):
        outcome = tuple(MINUS if (code >> (arity - 1 - j)) & 1 else PLUS
                        for j in range(arity))
        out.append((outcome, pmf.get(outcome, Fraction(0))))
    return out


def constraint_matrix(constraints, space: JointOutcomeSpace):
    """Sparse 0/1 selection matrix A and target vector t with A q = t."""
    n = space.size
    ncells = len(space.cells)
    codes = np.arange(n, dtype=np.int64)
    rows, cols = [], []
    t = np.empty(len(constraints))
    for i, con in enumerate(constraints):
        mask = 0
        patt = 0
        for j, v in zip(con.cell_indices, con.pattern):
            bit = 1 << (ncells - 1 - j)
            mask |= bit
            if v == MINUS:
                patt |= bit
        sel = np.nonzero((codes & mask) == patt)[0]
        rows.append(np.full(len(sel), i, dtype=np.int64))
        cols.append(sel)
        t[i] = float(con.target)
    data = np.ones(sum(len(r) for r in rows))
    A = sp.csr_matrix((data, (np.concatenate(rows), np.concatenate(cols))),
                      shape=(len(constraints), n))
    return A, t


def solve_min_tv(constraints, space: JointOutcomeSpace):
    """Minimize the sum of absolute masses subject to the marginal equalities.

    Standard split q = a - b with a, b >= 0 and objective sum(a + b).
    Returns (min V, witness)."""
    A, t = constraint_matrix(constraints, space)
    n = space.size
    A_eq = sp.hstack([A, -A], format="csr")
    c = np.ones(2 * n)
    res = linprog(c, A_eq=A_eq, b_eq=t, bounds=(0, None), method="highs")
    if res.status != 0:
        raise NumericalError(f"LP solver status {res.status}: {res.message}")
    q = res.x[:n] - res.x[n:]
    masses = {space.outcome_of(int(i)): float(q[i])
              for i in np.nonzero(q)[0]}
    return float(res.fun), QuasiDistribution(masses=masses)


def feasibility_check(system: System, max_cells: int = MAX_CELLS_DEFAULT) -> bool:
    """True iff a proper (nonnegative) joint distribution meets all bunch and
    coupling marginal constraints."""
    _require_valid(system)
    space, constraints = build_constraints(system, system_couplings(system),
                                           max_cells=max_cells)
    A, t = constraint_matrix(constraints, space)
    c = np.zeros(space.size)
    res = linprog(c, A_eq=A, b_eq=t, bounds=(0, None), method="highs")
    if res.status == 0:
        return True
    if res.status == 2:
        return False
    raise NumericalError(f"LP solver status {res.status}: {res.message}")


def contextuality_degree(system: System,
                         max_cells: int = MAX_CELLS_DEFAULT) -> ContextualityReport:
    """Full analysis: couplings, min total variation, degree and verdict."""
    _require_valid(system)
    couplings = system_couplings(system)
    space, constraints = build_constraints(system, couplings, max_cells=max_cells)
    min_v, witness = solve_min_tv(constraints, space)
    min_v = max(min_v, 1.0)  # mathematical lower bound; clip solver noise
    degree = min_v - 1.0
    return ContextualityReport(
        min_total_variation=min_v,
        degree=degree,
        contextual=degree > EPS_DEGREE,
        witness=witness,
        consistent=is_consistently_connected(system),
        couplings=couplings,
    )


def witness_residuals(witness: QuasiDistribution, constraints, space):
    """Constraint residuals of a quasi-distribution, for verification."""
    out = []
    for con in constraints:
        total = 0.0
        for outcome, mass in witness.masses.items():
            if all(outcome[j] == v for j, v in zip(con.cell_indices, con.pattern)):
                total += float(mass)
        out.append(total - float(con.target))
    return out


def _require_valid(system: System) -> None:
    violations = validate(system)
    if violations:
        raise ValidationError(violations)
