"""Filling empty cells with deterministic variables.

An empty cell (content not measured in a context) can be filled with a
variable fixed at +1 or -1. Filling every empty cell leaves the degree of
contextuality unchanged: the joint outcome spaces before and after are in
bijection (insert the fixed values at the new coordinates), and the bijection
carries feasible quasi-distributions to feasible quasi-distributions with the
same total variation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .lp import MAX_CELLS_DEFAULT, QuasiDistribution, contextuality_degree
from .system import PLUS, MINUS, Bunch, System, VALUES, outcome_sort_key

INVARIANCE_TOL = 1e-7


@dataclass(frozen=True)
class FillPolicy:
    """How to choose the fixed value for each empty cell."""

    mode: str                       # "uniform" or "per-cell"
    value: Optional[int] = None     # +1/-1 for uniform mode
    per_cell: Optional[tuple] = None  # (((content, context), value), ...)

    @classmethod
    def uniform(cls, value: int) -> "FillPolicy":
        if value not in VALUES:
            raise ValueError(f"fill value must be +1 or -1, got {value!r}")
        return cls(mode="uniform", value=value)

    @classmethod
    def from_map(cls, mapping: Mapping) -> "FillPolicy":
        items = []
        for (content, context), value in sorted(mapping.items()):
            if value not in VALUES:
                raise ValueError(f"fill value must be +1 or -1, got {value!r}")
            items.append(((content, context), value))
        return cls(mode="per-cell", per_cell=tuple(items))

    def describe(self) -> str:
        if self.mode == "uniform":
            return f"uniform({self.value:+d})"
        fills = ", ".join(f"{q}@{c}={v:+d}" for (q, c), v in self.per_cell)
        return f"per-cell({fills})"


def augment(system: System, policy: FillPolicy) -> System:
    """Fill every empty cell with a deterministic variable.

    Measured cells are untouched; a full system comes back unchanged. Filled
    contents are appended to each bunch in the system's content order."""
    empty = [(cell.content, cell.context) for cell in system.empty_cells()]
    if policy.mode == "uniform":
        fills = {cell: policy.value for cell in empty}
    else:
        fills = dict(policy.per_cell)
        if set(fills) != set(empty):
            missing = sorted(set(empty) - set(fills))
            extra = sorted(set(fills) - set(empty))
            parts = []
            if missing:
                parts.append(f"missing empty cells {missing}")
            if extra:
                parts.append(f"cells that are not empty {extra}")
            raise ValueError("per-cell fill map does not match the system's "
                             "empty cells: " + "; ".join(parts))
    if not fills:
        return system

    bunches = []
    for b in system.bunches:
        added = [q for q in system.contents
                 if (q, b.context) in fills]
        if not added:
            bunches.append(b)
            continue
        values = tuple(fills[(q, b.context)] for q in added)
        pmf = {outcome + values: p for outcome, p in b.pmf.items()}
        pmf = dict(sorted(pmf.items(), key=lambda kv: outcome_sort_key(kv[0])))
        bunches.append(Bunch(context=b.context,
                             contents=b.contents + tuple(added),
                             pmf=pmf))
    return System(contents=system.contents, contexts=system.contexts,
                  bunches=tuple(bunches))


@dataclass(frozen=True)
class InvarianceCheck:
    policy: FillPolicy
    degree_before: float
    degree_after: float
    passed: bool


def check_invariance(system: System, policies,
                     max_cells: int = MAX_CELLS_DEFAULT,
                     tol: float = INVARIANCE_TOL) -> list:
    """Degree before vs after augmentation for each policy."""
    before = contextuality_degree(system, max_cells=max_cells).degree
    out = []
    for policy in policies:
        after = contextuality_degree(augment(system, policy),
                                     max_cells=max_cells).degree
        out.append(InvarianceCheck(
            policy=policy,
            degree_before=before,
            degree_after=after,
            passed=abs(after - before) <= tol,
        ))
    return out


@dataclass(frozen=True)
class OutcomeEmbedding:
    """Injection from the original joint outcome space into the augmented one:
    original values pass through, fixed fill values are spliced in at the new
    coordinates."""

    original_cells: tuple   # canonical (context, content) order
    augmented_cells: tuple
    source: tuple           # per augmented cell: original index or None
    fills: tuple            # per augmented cell: fill value or None

    def forward(self, outcome) -> tuple:
        if len(outcome) != len(self.original_cells):
            raise ValueError("outcome arity does not match the original system")
        return tuple(outcome[i] if i is not None else v
                     for i, v in zip(self.source, self.fills))

    def push_forward(self, quasi: QuasiDistribution) -> QuasiDistribution:
        return QuasiDistribution(masses={
            self.forward(outcome): mass for outcome, mass in quasi.masses.items()
        })


def bijection_map(system: System, augmented: System) -> OutcomeEmbedding:
    """The outcome-space injection relating a system to its augmentation.

    Raises ValueError unless `augmented` extends `system` by deterministic
    variables in exactly the originally empty cells."""
    if system.contents != augmented.contents or system.contexts != augmented.contexts:
        raise ValueError("systems do not share contents and contexts")
    orig_cells = tuple((c.context, c.content) for c in system.measured_cells())
    aug_cells = tuple((c.context, c.content) for c in augmented.measured_cells())
    if not set(orig_cells) <= set(aug_cells):
        raise ValueError("augmented system does not measure all original cells")

    fills = {}
    for b in augmented.bunches:
        orig = system.bunch_of(b.context)
        added = [q for q in b.contents if q not in orig.contents]
        positions = {q: b.contents.index(q) for q in b.contents}
        for q in added:
            values = {o[positions[q]] for o in b.pmf}
            if len(values) != 1:
                raise ValueError(
                    f"cell ({q!r}, {b.context!r}) is not deterministic")
            fills[(b.context, q)] = values.pop()
        # the original bunch must be the marginal of the augmented one
        keep = [positions[q] for q in orig.contents]
        marg = {}
        for o, p in b.pmf.items():
            key = tuple(o[i] for i in keep)
            marg[key] = marg.get(key, Fraction(0)) + p
        if marg != orig.pmf:
            raise ValueError(
                f"bunch for context {b.context!r} does not extend the original")

    source = []
    fill_vals = []
    for cell in aug_cells:
        if cell in set(orig_cells):
            source.append(orig_cells.index(cell))
            fill_vals.append(None)
        else:
            source.append(None)
            fill_vals.append(fills[cell])
    return OutcomeEmbedding(original_cells=orig_cells, augmented_cells=aug_cells,
                            source=tuple(source), fills=tuple(fill_vals))
