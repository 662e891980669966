"""Multimaximal couplings of connections.

For binary variables the joint distribution with prescribed Pr[+1] marginals
in which every pair coincides with the maximal possible probability
1 - |p_i - p_j| is unique: it is the nested (comonotone) coupling, where a
single latent uniform threshold decides every coordinate at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .system import PLUS, MINUS, ConnectionView, as_fraction, outcome_sort_key


@dataclass(frozen=True)
class Coupling:
    """Joint pmf of one connection's coupled counterparts."""

    content: str
    contexts: tuple
    pmf: dict  # outcome tuple -> Fraction, zeros omitted

    def marginal(self, i: int) -> Fraction:
        return sum((p for o, p in self.pmf.items() if o[i] == PLUS), Fraction(0))

    def pair_equality(self, i: int, j: int) -> Fraction:
        return sum((p for o, p in self.pmf.items() if o[i] == o[j]), Fraction(0))


@dataclass(frozen=True)
class PairMaximality:
    i: int
    j: int
    achieved: Fraction
    bound: Fraction


@dataclass(frozen=True)
class CouplingAudit:
    pairs: tuple      # PairMaximality per (i, j), i < j
    residuals: tuple  # per-index |coupling marginal - connection marginal|

    def ok(self, tol=0) -> bool:
        return (all(p.achieved == p.bound for p in self.pairs) if tol == 0 else
                all(abs(float(p.bound - p.achieved)) <= tol for p in self.pairs)) \
            and all(float(r) <= tol for r in self.residuals)


def maximal_pair_probability(p, q):
    """Largest possible Pr[X = Y] over couplings of two binary variables
    with Pr[X=+1] = p and Pr[Y=+1] = q."""
    p, q = as_fraction(p), as_fraction(q)
    for v in (p, q):
        if not 0 <= v <= 1:
            raise ValueError(f"marginal {v} outside [0, 1]")
    return 1 - abs(p - q)


def multimaximal_coupling(view: ConnectionView) -> Coupling:
    """The nested coupling of a connection: T_i = +1 exactly when a shared
    latent uniform falls below p_i. Support has at most m+1 outcomes."""
    m = len(view.entries)
    if m == 0:
        raise ValueError("connection view has no entries")
    ps = [as_fraction(p) for p in view.marginals]
    for p in ps:
        if not 0 <= p <= 1:
            raise ValueError(f"marginal {p} outside [0, 1]")
    # ranks sorted by marginal descending; ties keep canonical context order
    order = sorted(range(m), key=lambda i: (-ps[i], i))
    levels = [Fraction(1)] + [ps[i] for i in order] + [Fraction(0)]
    pmf = {}
    for k in range(m + 1):
        mass = levels[k] - levels[k + 1]
        if mass == 0:
            continue
        outcome = [MINUS] * m
        for i in order[:k]:
            outcome[i] = PLUS
        pmf[tuple(outcome)] = mass
    pmf = dict(sorted(pmf.items(), key=lambda kv: outcome_sort_key(kv[0])))
    return Coupling(content=view.content, contexts=view.contexts, pmf=pmf)


def verify_coupling(c: Coupling, view: ConnectionView) -> CouplingAudit:
    """Audit a claimed coupling: marginal residuals against the connection and
    achieved-vs-bound equality probability for every pair."""
    if c.content != view.content or c.contexts != view.contexts:
        raise ValueError("coupling and connection view refer to different columns")
    m = len(view.entries)
    if any(len(o) != m for o in c.pmf):
        raise ValueError("coupling outcome arity does not match the view")
    ps = [as_fraction(p) for p in view.marginals]
    residuals = tuple(abs(c.marginal(i) - ps[i]) for i in range(m))
    pairs = []
    for i in range(m):
        for j in range(i + 1, m):
            pairs.append(PairMaximality(
                i=i, j=j,
                achieved=c.pair_equality(i, j),
                bound=maximal_pair_probability(ps[i], ps[j]),
            ))
    return CouplingAudit(pairs=tuple(pairs), residuals=residuals)


def restrict_coupling(c: Coupling, indices) -> Coupling:
    """Marginalize a coupling onto a subset of its coordinates. The result is
    exactly the multimaximal coupling of the restricted connection."""
    indices = sorted(set(indices))
    if not indices:
        raise ValueError("empty index subset")
    if indices[0] < 0 or indices[-1] >= len(c.contexts):
        raise ValueError(f"index out of range for {len(c.contexts)} contexts")
    pmf = {}
    for outcome, p in c.pmf.items():
        key = tuple(outcome[i] for i in indices)
        pmf[key] = pmf.get(key, Fraction(0)) + p
    pmf = dict(sorted(pmf.items(), key=lambda kv: outcome_sort_key(kv[0])))
    return Coupling(content=c.content,
                    contexts=tuple(c.contexts[i] for i in indices),
                    pmf=pmf)
