"""Content-context systems of binary (+1/-1) random variables.

A system is a matrix whose rows are contexts and whose columns are contents.
Each context carries one jointly distributed "bunch" of variables; variables
sharing a content across contexts form a "connection" and are stochastically
unrelated to each other. Probabilities are stored as exact Fractions so the
same data feeds both the floating-point and the exact-rational solvers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

PLUS = 1
MINUS = -1
VALUES = (PLUS, MINUS)

# pmf sums and marginal comparisons; inputs are short decimals or rationals,
# so this is far below any real noise floor.
EPS_MASS = 1e-9

Prob = Union[Fraction, int, float, str]


class ParseError(ValueError):
    """Malformed system text (bad JSON, unknown field, non-binary value)."""


class ValidationError(ValueError):
    """A structurally parseable system that violates model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def as_fraction(p: Prob) -> Fraction:
    """Coerce a probability-like value to an exact Fraction.

    Floats go through their shortest decimal repr, so 0.1 means 1/10.
    Strings may be decimal ("0.25") or ratio ("3/10") form.
    """
    if isinstance(p, Fraction):
        return p
    if isinstance(p, float):
        return Fraction(repr(p))
    if isinstance(p, (int, str)):
        return Fraction(p)
    raise TypeError(f"cannot interpret {p!r} as a probability")


def outcome_sort_key(outcome: tuple) -> tuple:
    # lexicographic with +1 before -1
    return tuple(0 if v == PLUS else 1 for v in outcome)


@dataclass(frozen=True)
class Bunch:
    """Joint pmf of the variables measured together in one context."""

    context: str
    contents: tuple
    pmf: dict  # outcome tuple (+1/-1 per content) -> Fraction, zeros omitted

    def mass(self, outcome: tuple) -> Fraction:
        return self.pmf.get(tuple(outcome), Fraction(0))

    def marginal(self, content: str) -> Fraction:
        """Pr[variable at `content` = +1]."""
        i = self.contents.index(content)
        return sum((p for o, p in self.pmf.items() if o[i] == PLUS), Fraction(0))


def bunch(context: str, contents: Iterable[str], pmf: Mapping) -> Bunch:
    """Build a Bunch, coercing probabilities and dropping zero-mass outcomes."""
    contents = tuple(contents)
    clean = {}
    for outcome, p in pmf.items():
        q = as_fraction(p)
        if q != 0:
            clean[tuple(outcome)] = q
    clean = dict(sorted(clean.items(), key=lambda kv: outcome_sort_key(kv[0])))
    return Bunch(context=context, contents=contents, pmf=clean)


@dataclass(frozen=True)
class System:
    """Immutable content-context system; one bunch per context."""

    contents: tuple
    contexts: tuple
    bunches: tuple  # one Bunch per context, in context order

    def bunch_of(self, context: str) -> Bunch:
        for b in self.bunches:
            if b.context == context:
                return b
        raise KeyError(f"unknown context {context!r}")

    def is_measured(self, content: str, context: str) -> bool:
        return content in self.bunch_of(context).contents

    def cells(self) -> list:
        """All cells in canonical (context, content) order, measured or empty."""
        out = []
        for c in self.contexts:
            measured = set(self.bunch_of(c).contents)
            for q in self.contents:
                out.append(Cell(content=q, context=c, measured=q in measured))
        return out

    def measured_cells(self) -> list:
        return [cell for cell in self.cells() if cell.measured]

    def empty_cells(self) -> list:
        return [cell for cell in self.cells() if not cell.measured]


@dataclass(frozen=True)
class Cell:
    content: str
    context: str
    measured: bool


@dataclass(frozen=True)
class ConnectionView:
    """One content's marginals across the contexts where it is measured."""

    content: str
    entries: tuple  # ((context, Fraction Pr[+1]), ...) in system context order

    @property
    def contexts(self) -> tuple:
        return tuple(c for c, _ in self.entries)

    @property
    def marginals(self) -> tuple:
        return tuple(p for _, p in self.entries)


def validate(system: System) -> list:
    """Check all model invariants; returns human-readable violations.

    An empty list means the system is well formed. Violations are data,
    not exceptions: callers decide whether to raise.
    """
    out = []
    if len(set(system.contents)) != len(system.contents):
        out.append("duplicate content labels")
    if len(set(system.contexts)) != len(system.contexts):
        out.append("duplicate context labels")
    for label in list(system.contents) + list(system.contexts):
        if not isinstance(label, str) or not label:
            out.append(f"empty or non-string label {label!r}")

    seen_contexts = []
    measured_contents = set()
    for b in system.bunches:
        where = f"bunch for context {b.context!r}"
        if b.context not in system.contexts:
            out.append(f"{where}: context not declared")
        if b.context in seen_contexts:
            out.append(f"{where}: more than one bunch for this context")
        seen_contexts.append(b.context)
        if len(b.contents) == 0:
            out.append(f"{where}: no contents")
        if len(set(b.contents)) != len(b.contents):
            dups = sorted({q for q in b.contents if b.contents.count(q) > 1})
            out.append(f"{where}: duplicate content(s) {dups} in one bunch")
        for q in b.contents:
            if q not in system.contents:
                out.append(f"{where}: undeclared content {q!r}")
        measured_contents.update(b.contents)
        total = Fraction(0)
        for outcome, p in b.pmf.items():
            cell = f"{where}, outcome {outcome}"
            if len(outcome) != len(b.contents):
                out.append(f"{cell}: arity mismatch")
                continue
            if any(v not in VALUES for v in outcome):
                out.append(f"{cell}: values must be +1 or -1")
            if p < 0:
                out.append(f"{cell}: negative mass {p}")
            total += p
        if abs(float(total) - 1.0) > EPS_MASS:
            out.append(f"{where}: masses sum to {float(total)!r}, not 1")
    for c in system.contexts:
        if c not in seen_contexts:
            out.append(f"context {c!r} has no bunch")
    for q in system.contents:
        if q not in measured_contents:
            out.append(f"content {q!r} is measured in no context")
    return out


def connection(system: System, content: str) -> ConnectionView:
    """The column view of one content: per-context Pr[+1] marginals."""
    if content not in system.contents:
        raise KeyError(f"unknown content {content!r}")
    entries = []
    for c in system.contexts:
        b = system.bunch_of(c)
        if content in b.contents:
            entries.append((c, b.marginal(content)))
    return ConnectionView(content=content, entries=tuple(entries))


def is_consistently_connected(system: System) -> bool:
    """True iff every connection's marginals agree within EPS_MASS."""
    for q in system.contents:
        ps = connection(system, q).marginals
        if any(abs(float(p - ps[0])) > EPS_MASS for p in ps[1:]):
            return False
    return True


# ---------------------------------------------------------------------------
# file format

_TOP_KEYS = ("contents", "contexts", "bunches")
_BUNCH_KEYS = ("context", "contents", "pmf")
_PMF_KEYS = ("outcome", "p")


def _parse_value(v, where: str) -> int:
    f = as_fraction(v) if not isinstance(v, Fraction) else v
    if f == 1:
        return PLUS
    if f == -1:
        return MINUS
    raise ParseError(f"{where}: outcome value {v!r} is not +1 or -1 "
                     "(only binary systems are supported)")


def parse_system(text: str) -> System:
    """Parse the JSON system format; raises ParseError / ValidationError."""
    try:
        doc = json.loads(text, parse_float=Fraction, parse_int=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in doc:
        if key not in _TOP_KEYS:
            raise ParseError(f"unknown top-level field {key!r}")
    for key in _TOP_KEYS:
        if key not in doc:
            raise ParseError(f"missing top-level field {key!r}")
    contents = tuple(doc["contents"])
    contexts = tuple(doc["contexts"])
    if not isinstance(doc["bunches"], list):
        raise ParseError('"bunches" must be a list')

    bunches = []
    for i, raw in enumerate(doc["bunches"]):
        where = f"bunches[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: must be an object")
        for key in raw:
            if key not in _BUNCH_KEYS:
                raise ParseError(f"{where}: unknown field {key!r}")
        for key in _BUNCH_KEYS:
            if key not in raw:
                raise ParseError(f"{where}: missing field {key!r}")
        b_contents = tuple(raw["contents"])
        pmf = {}
        for j, entry in enumerate(raw["pmf"]):
            pwhere = f"{where}.pmf[{j}]"
            if not isinstance(entry, dict):
                raise ParseError(f"{pwhere}: must be an object")
            for key in entry:
                if key not in _PMF_KEYS:
                    raise ParseError(f"{pwhere}: unknown field {key!r}")
            for key in _PMF_KEYS:
                if key not in entry:
                    raise ParseError(f"{pwhere}: missing field {key!r}")
            outcome = tuple(_parse_value(v, pwhere) for v in entry["outcome"])
            try:
                p = as_fraction(entry["p"])
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                raise ParseError(f"{pwhere}: bad probability {entry['p']!r}") from exc
            if outcome in pmf:
                raise ParseError(f"{pwhere}: duplicate outcome {outcome}")
            pmf[outcome] = p
        bunches.append(bunch(raw["context"], b_contents, pmf))

    # keep bunches in declared context order when possible
    by_context = {b.context: b for b in bunches}
    if len(by_context) == len(bunches) and set(by_context) == set(contexts):
        bunches = [by_context[c] for c in contexts]
    system = System(contents=contents, contexts=contexts, bunches=tuple(bunches))
    violations = validate(system)
    if violations:
        raise ValidationError(violations)
    return system


def render_prob(f: Fraction) -> str:
    """Render a Fraction as a JSON token: exact decimal when it has one
    within 17 significant digits, else a quoted "num/den" string."""
    if f.denominator == 1:
        return str(f.numerator)
    d = f.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        k = max(twos, fives)
        scaled = abs(f.numerator) * 10 ** k // f.denominator
        digits = str(scaled).rstrip("0")
        if len(digits.lstrip("0")) <= 17:
            sign = "-" if f.numerator < 0 else ""
            whole, frac = divmod(scaled, 10 ** k)
            frac_s = str(frac).zfill(k).rstrip("0")
            return f"{sign}{whole}.{frac_s}" if frac_s else f"{sign}{whole}"
    return json.dumps(f"{f.numerator}/{f.denominator}")


def serialize_system(system: System) -> str:
    """Canonical serialization: fixed key order, outcomes lexicographic with
    +1 before -1, zero masses omitted. Structurally equal systems produce
    byte-identical text."""
    out = ["{"]
    out.append(f'  "contents": {json.dumps(list(system.contents))},')
    out.append(f'  "contexts": {json.dumps(list(system.contexts))},')
    out.append('  "bunches": [')
    for bi, b in enumerate(system.bunches):
        out.append("    {")
        out.append(f'      "context": {json.dumps(b.context)},')
        out.append(f'      "contents": {json.dumps(list(b.contents))},')
        out.append('      "pmf": [')
        items = sorted(b.pmf.items(), key=lambda kv: outcome_sort_key(kv[0]))
        for oi, (outcome, p) in enumerate(items):
            comma = "," if oi + 1 < len(items) else ""
            ostr = json.dumps(list(outcome))
            out.append(f'        {{"outcome": {ostr}, "p": {render_prob(p)}}}{comma}')
        out.append("      ]")
        out.append("    }" + ("," if bi + 1 < len(system.bunches) else ""))
    out.append("  ]")
    out.append("}")
    return "\n".join(out) + "\n"
