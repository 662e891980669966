"""Dense two-phase simplex in exact rational arithmetic.

Solves  min c.x  s.t.  A x = b, x >= 0  with Fraction entries and no
tolerances. A Gauss-Jordan presolve removes linearly dependent equality rows
(the marginal constraint sets built here are heavily rank-deficient) while
tracking the row multipliers, so the dual certificate can be mapped back to
the original constraints. Bland's rule guarantees termination.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

try:  # gmpy2 rationals are several times faster than Fraction; optional
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

ZERO = _Q(0)
ONE = _Q(1)


class InfeasibleError(ValueError):
    """The equality system admits no nonnegative solution."""


class UnboundedError(ValueError):
    """The objective is unbounded below on the feasible set."""


@dataclass
class LpSolution:
    value: Fraction
    x: list        # primal solution, length n
    y: list        # dual multipliers for the ORIGINAL rows, length m
    basis: list    # optimal basis column indices


def _presolve(A, b):
    """Row-reduce [A | b], tracking multipliers E with A_red = E A.

    Returns (A_red, b_red, E) with A_red of full row rank. A row reducing to
    0 = nonzero raises InfeasibleError.
    """
    m = len(A)
    rows = [(list(A[i]), [ONE if j == i else ZERO for j in range(m)], b[i])
            for i in range(m)]
    n = len(A[0]) if m else 0
    kept = []
    pivot_row = 0
    work = [[r[0], r[1], r[2]] for r in rows]  # mutable triples
    for col in range(n):
        piv = None
        for i in range(pivot_row, len(work)):
            if work[i][0][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        work[pivot_row], work[piv] = work[piv], work[pivot_row]
        arow, erow, bval = work[pivot_row]
        inv = ONE / arow[col]
        if inv != 1:
            arow[:] = [v * inv for v in arow]
            erow[:] = [v * inv for v in erow]
            bval *= inv
            work[pivot_row][2] = bval
        for i in range(len(work)):
            if i == pivot_row:
                continue
            f = work[i][0][col]
            if f == 0:
                continue
            oa, oe, ob = work[i]
            work[i][0] = [u - f * v for u, v in zip(oa, arow)]
            work[i][1] = [u - f * v for u, v in zip(oe, erow)]
            work[i][2] = ob - f * bval
        pivot_row += 1
        if pivot_row == len(work):
            break
    A_red, b_red, E = [], [], []
    for i, (arow, erow, bval) in enumerate(work):
        if i < pivot_row:
            A_red.append(arow)
            E.append(erow)
            b_red.append(bval)
        elif bval != 0:
            raise InfeasibleError("inconsistent equality constraints")
    return A_red, b_red, E


def _pivot(T, obj, basis, prow, pcol):
    piv = T[prow][pcol]
    if piv != 1:
        inv = ONE / piv
        T[prow] = [v * inv for v in T[prow]]
    prow_vals = T[prow]
    for i in range(len(T)):
        if i == prow:
            continue
        f = T[i][pcol]
        if f != 0:
            T[i] = [u - f * v for u, v in zip(T[i], prow_vals)]
    f = obj[pcol]
    if f != 0:
        obj[:] = [u - f * v for u, v in zip(obj, prow_vals)]
    basis[prow] = pcol


def _iterate(T, obj, basis, allowed_cols):
    """Pivot until no allowed column has negative reduced cost.

    Dantzig's rule (most negative reduced cost) for speed; after a long run
    of degenerate pivots the objective value stops moving and the rule
    switches to Bland's, which cannot cycle. Exact arithmetic makes the
    stall detection precise."""
    ncols = len(obj) - 1
    stall = 0
    bland = False
    while True:
        pcol = None
        if bland:
            for j in range(ncols):
                if allowed_cols[j] and obj[j] < 0:
                    pcol = j
                    break
        else:
            best_rc = ZERO
            for j in range(ncols):
                if allowed_cols[j] and obj[j] < best_rc:
                    best_rc = obj[j]
                    pcol = j
        if pcol is None:
            return
        prow = None
        best = None
        for i in range(len(T)):
            a = T[i][pcol]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[prow]):
                    best = ratio
                    prow = i
        if prow is None:
            raise UnboundedError("objective unbounded below")
        if not bland:
            stall = stall + 1 if best == 0 else 0
            if stall > 2 * len(T) + 10:
                bland = True
        _pivot(T, obj, basis, prow, pcol)


def _to_fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def solve_equality_lp(A, b, c) -> LpSolution:
    """Exact simplex for min c.x, A x = b, x >= 0.

    Accepts Fractions (or anything mpq/Fraction can ingest); returns
    Fractions regardless of the internal rational type."""
    n = len(c)
    A = [[_Q(v) for v in row] for row in A]
    b = [_Q(v) for v in b]
    c = [_Q(v) for v in c]
    A_red, b_red, E = _presolve(A, b)
    r = len(A_red)
    # nonnegative right-hand sides
    for i in range(r):
        if b_red[i] < 0:
            A_red[i] = [-v for v in A_red[i]]
            E[i] = [-v for v in E[i]]
            b_red[i] = -b_red[i]

    # tableau columns: structural (n) + artificial (r) + rhs
    T = [list(A_red[i]) + [ONE if j == i else ZERO for j in range(r)] + [b_red[i]]
         for i in range(r)]
    basis = [n + i for i in range(r)]

    # phase 1: minimize the artificial total
    obj = [ZERO] * (n + r + 1)
    for i in range(r):
        for j in range(n):
            obj[j] -= T[i][j]
        obj[-1] -= T[i][-1]
    allowed = [True] * (n + r)
    _iterate(T, obj, basis, allowed)
    if -obj[-1] != 0:
        raise InfeasibleError("no nonnegative solution")
    # drive any zero-level artificials out of the basis
    for i in range(r):
        if basis[i] >= n:
            pcol = next((j for j in range(n) if T[i][j] != 0), None)
            if pcol is None:
                raise AssertionError("presolved row with no structural pivot")
            _pivot(T, obj, basis, i, pcol)

    # phase 2
    obj = [ZERO] * (n + r + 1)
    for j in range(n):
        obj[j] = c[j]
    for i in range(r):
        cb = c[basis[i]]
        if cb != 0:
            for j in range(n + r + 1):
                obj[j] -= cb * T[i][j]
    allowed = [j < n for j in range(n + r)]
    _iterate(T, obj, basis, allowed)

    x = [ZERO] * n
    for i in range(r):
        x[basis[i]] = T[i][-1]
    value = sum((c[j] * x[j] for j in range(n) if x[j] != 0), ZERO)
    # reduced cost under artificial column i is -y_red[i]
    y_red = [-obj[n + i] for i in range(r)]
    m = len(A)
    y = [sum((y_red[i] * E[i][k] for i in range(r) if E[i][k] != 0), ZERO)
         for k in range(m)]
    return LpSolution(value=_to_fraction(value),
                      x=[_to_fraction(v) for v in x],
                      y=[_to_fraction(v) for v in y],
                      basis=list(basis))
