"""Finitely presented enumeration families with stabilized tails.

A trace file presents finitely many enumeration events for a family of
objects U_0 .. U_{nmax-1}; every index n >= nmax denotes the same object as
index nmax-1 (the stabilized tail).  Line order is enumeration time: the
trace truncated to its first t events is the stage-t approximation of the
family, and the full trace plays the role of complete oracle knowledge.

Under the tail rule every "for almost all n" question about a family is
decidable by scanning n in [N, nmax-1] plus one tail check, which is exactly
how the covering modules simulate their oracle queries.  This module also
provides the brute-force liminf oracles those constructions are verified
against; the oracles compute the defining union-of-suffix-intersections (or
max-of-suffix-minima) formulas directly and share no logic with the covering
processes.

Trace grammar (UTF-8, LF line endings, single spaces)::

    family <kind> nmax=<INT>              kinds: sets, measure
    family <kind> nmax=<INT> depth=<INT>  kinds: open, tree, func
    add <n> <token>                       sets   (token over [A-Za-z0-9_])
    add <n> <word>                        open   (word over {0,1}, or e)
    raise <n> <token> <value>             measure
    raise <n> <word> <value>              tree, func

Values are positive rationals written as p/q or in decimal notation.  A
duplicate add is idempotent and a raise below the current value is a no-op,
so objects grow monotonically with the stage.

Parsed families are immutable; the covering modules operate on private
mutable copies and may be run concurrently on the same family.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .kernel import (
    CylinderSet,
    InputError,
    ZERO,
    format_rational,
    parse_rational,
    word_from_text,
    word_to_text,
)

__all__ = [
    "Event",
    "KINDS",
    "ParseError",
    "StabilizedFamily",
    "StageApproximation",
    "at_stage",
    "format_trace",
    "func_eval",
    "liminf_open",
    "liminf_sets",
    "liminf_sets_witness",
    "liminf_values",
    "open_at",
    "opens_by_index",
    "parse_trace",
    "set_at",
    "sets_by_index",
    "universe",
    "value_at",
    "values_by_index",
]

KINDS = ("sets", "open", "measure", "tree", "func")
_DEPTH_KINDS = ("open", "tree", "func")
_SET_KINDS = ("sets", "open")
_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class ParseError(ValueError):
    """A malformed trace line; the message names the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Event:
    """One enumeration event: add ``key`` to U_index, or raise its value."""

    index: int
    key: str
    value: Fraction | None = None


@dataclass(frozen=True)
class StabilizedFamily:
    kind: str
    nmax: int
    depth: int | None
    events: tuple[Event, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown family kind {self.kind!r}")
        if self.nmax < 1:
            raise InputError("nmax must be positive")
        if (self.depth is not None) != (self.kind in _DEPTH_KINDS):
            raise InputError(f"kind {self.kind!r} and depth argument disagree")
        if self.depth is not None and self.depth < 1:
            raise InputError("depth must be positive")
        for e in self.events:
            if not 0 <= e.index < self.nmax:
                raise InputError(f"event index {e.index} not below nmax={self.nmax}")

    @property
    def stages(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class StageApproximation:
    """The family as known after ``stage`` enumeration steps."""

    stage: int
    family: StabilizedFamily


def at_stage(family: StabilizedFamily, stage: int) -> StageApproximation:
    if stage < 0:
        raise InputError("stage must be non-negative")
    truncated = replace(family, events=family.events[:stage])
    return StageApproximation(stage, truncated)


def _parse_header(line: str) -> tuple[str, int, int | None]:
    fields = line.split(" ")
    if len(fields) < 3 or fields[0] != "family":
        raise ParseError(1, "expected 'family <kind> nmax=<INT> [depth=<INT>]'")
    kind = fields[1]
    if kind not in KINDS:
        raise ParseError(1, f"unknown kind {kind!r}")
    wants_depth = kind in _DEPTH_KINDS
    if len(fields) != (4 if wants_depth else 3):
        raise ParseError(1, f"kind {kind!r} takes {'nmax and depth' if wants_depth else 'nmax only'}")

    def keyed(field: str, key: str) -> int:
        prefix = key + "="
        if not field.startswith(prefix) or not field[len(prefix):].isdigit():
            raise ParseError(1, f"expected {key}=<INT>, got {field!r}")
        return int(field[len(prefix):])

    nmax = keyed(fields[2], "nmax")
    if nmax < 1:
        raise ParseError(1, "nmax must be positive")
    depth = None
    if wants_depth:
        depth = keyed(fields[3], "depth")
        if depth < 1:
            raise ParseError(1, "depth must be positive")
    return kind, nmax, depth


def _parse_index(lineno: int, field: str, nmax: int) -> int:
    if not field.isdigit():
        raise ParseError(lineno, f"bad index {field!r}")
    n = int(field)
    if n >= nmax:
        raise ParseError(lineno, f"index {n} not below nmax={nmax}")
    return n


def _parse_key(lineno: int, field: str, kind: str, depth: int | None) -> str:
    if kind in ("sets", "measure"):
        if not _TOKEN_RE.match(field):
            raise ParseError(lineno, f"bad token {field!r}")
        return field
    try:
        word = word_from_text(field)
    except InputError as exc:
        raise ParseError(lineno, str(exc)) from None
    assert depth is not None
    if len(word) > depth:
        raise ParseError(lineno, f"word {field!r} longer than depth {depth}")
    return word


def parse_trace(text: str | bytes) -> StabilizedFamily:
    """Parse a trace; raises ParseError naming the offending line."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(1, f"not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(1, "empty trace")
    kind, nmax, depth = _parse_header(lines[0])
    verb = "add" if kind in _SET_KINDS else "raise"
    nfields = 3 if kind in _SET_KINDS else 4

    events = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(" ")
        if len(fields) != nfields or any(f == "" for f in fields):
            raise ParseError(lineno, f"expected '{verb} <n> <key>{' <value>' if nfields == 4 else ''}'")
        if fields[0] != verb:
            raise ParseError(lineno, f"kind {kind!r} uses verb {verb!r}, got {fields[0]!r}")
        n = _parse_index(lineno, fields[1], nmax)
        key = _parse_key(lineno, fields[2], kind, depth)
        value = None
        if nfields == 4:
            try:
                value = parse_rational(fields[3])
            except InputError as exc:
                raise ParseError(lineno, str(exc)) from None
            if value <= 0:
                raise ParseError(lineno, f"non-positive rational {fields[3]!r}")
        events.append(Event(n, key, value))
    return StabilizedFamily(kind, nmax, depth, tuple(events))


def format_trace(family: StabilizedFamily) -> str:
    """Inverse of parse_trace (up to event normalization)."""
    head = f"family {family.kind} nmax={family.nmax}"
    if family.depth is not None:
        head += f" depth={family.depth}"
    lines = [head]
    as_text = (lambda k: k) if family.kind in ("sets", "measure") else word_to_text
    for e in family.events:
        if e.value is None:
            lines.append(f"add {e.index} {as_text(e.key)}")
        else:
            lines.append(f"raise {e.index} {as_text(e.key)} {format_rational(e.value)}")
    return "\n".join(lines) + "\n"


def universe(family: StabilizedFamily) -> tuple[str, ...]:
    """Keys appearing anywhere in the trace, in first-appearance order."""
    seen: dict[str, None] = {}
    for e in family.events:
        seen.setdefault(e.key)
    return tuple(seen)


def sets_by_index(family: StabilizedFamily) -> list[frozenset[str]]:
    if family.kind != "sets":
        raise InputError(f"expected a sets family, got {family.kind!r}")
    out: list[set[str]] = [set() for _ in range(family.nmax)]
    for e in family.events:
        out[e.index].add(e.key)
    return [frozenset(s) for s in out]


def opens_by_index(family: StabilizedFamily) -> list[CylinderSet]:
    if family.kind != "open":
        raise InputError(f"expected an open family, got {family.kind!r}")
    words: list[set[str]] = [set() for _ in range(family.nmax)]
    for e in family.events:
        words[e.index].add(e.key)
    return [CylinderSet(w) for w in words]


def values_by_index(family: StabilizedFamily) -> list[dict[str, Fraction]]:
    """Per-index value tables for measure/tree/func kinds (absent key = 0)."""
    if family.kind not in ("measure", "tree", "func"):
        raise InputError(f"expected a valued family, got {family.kind!r}")
    out: list[dict[str, Fraction]] = [{} for _ in range(family.nmax)]
    for e in family.events:
        table = out[e.index]
        assert e.value is not None
        if e.value > table.get(e.key, ZERO):
            table[e.key] = e.value
    return out


def _clamp(family: StabilizedFamily, n: int) -> int:
    if n < 0:
        raise InputError("family index must be non-negative")
    return min(n, family.nmax - 1)


def set_at(family: StabilizedFamily, n: int) -> frozenset[str]:
    return sets_by_index(family)[_clamp(family, n)]


def open_at(family: StabilizedFamily, n: int) -> CylinderSet:
    return opens_by_index(family)[_clamp(family, n)]


def value_at(family: StabilizedFamily, n: int, point: str) -> Fraction:
    tables = values_by_index(family)
    table = tables[_clamp(family, n)]
    if family.kind == "func":
        return func_eval(table, point, family.depth)
    return table.get(point, ZERO)


def func_eval(table: dict[str, Fraction], cell: str, depth: int | None) -> Fraction:
    """Value of a func-kind table at a depth-level cell.

    Each raise of word w to v means "at least v on the cylinder of w", so the
    value at a cell is the maximum over the cell's prefixes.
    """
    if depth is None or len(cell) != depth:
        raise InputError(f"func points are cells of length {depth}, got {cell!r}")
    return max((table.get(cell[:i], ZERO) for i in range(depth + 1)), default=ZERO)


def liminf_sets(family: StabilizedFamily) -> frozenset[str]:
    """Elements belonging to almost all U_n: the union over N of the
    intersections of U_N, U_{N+1}, ...; finite under the tail rule."""
    sets_ = sets_by_index(family)
    result: set[str] = set()
    for start in range(family.nmax):
        inter = set(sets_[start])
        for s in sets_[start + 1:]:
            inter &= s
        result |= inter
    return frozenset(result)


def liminf_sets_witness(family: StabilizedFamily) -> tuple[frozenset[str], int]:
    """The liminf plus the smallest N with liminf contained in every U_n, n >= N."""
    limit = liminf_sets(family)
    sets_ = sets_by_index(family)
    witness = family.nmax - 1
    for start in range(family.nmax - 1, -1, -1):
        if not limit <= sets_[start]:
            break
        witness = start
    assert all(limit <= sets_[n] for n in range(witness, family.nmax))
    return limit, witness


def liminf_open(family: StabilizedFamily) -> CylinderSet:
    """Exact liminf of an open family.

    Finite intersections of cylinder sets are clopen, so at desk scale the
    union of suffix intersections is itself a cylinder set and no interior
    needs to be taken.
    """
    opens = opens_by_index(family)
    result = CylinderSet.empty()
    for start in range(family.nmax):
        inter = opens[start]
        for s in opens[start + 1:]:
            inter = inter & s
        result = result | inter
    return result


def liminf_values(family: StabilizedFamily, point: str) -> Fraction:
    """liminf of the values at ``point``: max over N of suffix minima."""
    tables = values_by_index(family)
    if family.kind == "func":
        vals = [func_eval(t, point, family.depth) for t in tables]
    else:
        vals = [t.get(point, ZERO) for t in tables]
    best = ZERO
    for start in range(family.nmax):
        best = max(best, min(vals[start:]))
    return best


def check_semimeasures(family: StabilizedFamily) -> None:
    """Raise InputError naming the first index whose table sums above 1."""
    for n, table in enumerate(values_by_index(family)):
        total = sum(table.values(), ZERO)
        if total > 1:
            raise InputError(
                f"m_{n} is not a semimeasure: values sum to {format_rational(total)}"
            )


def check_tree_tables(family: StabilizedFamily) -> None:
    """Raise InputError naming the first (word, index) violating the tree law
    a(y) >= a(y0) + a(y1) (absent words count as 0) or a(root) > 1."""
    assert family.depth is not None
    for n, table in enumerate(values_by_index(family)):
        if table.get("", ZERO) > 1:
            raise InputError(f"a_{n} exceeds 1 at the root")
        parents = {w[:-1] for w in table if w}
        for y in sorted(parents, key=lambda w: (len(w), w)):
            need = table.get(y + "0", ZERO) + table.get(y + "1", ZERO)
            if table.get(y, ZERO) < need:
                raise InputError(
                    f"a_{n} violates the tree constraint at word {word_to_text(y)}: "
                    f"{format_rational(table.get(y, ZERO))} < {format_rational(need)}"
                )


def sequence_values(family: StabilizedFamily, points: Sequence[str]) -> dict[str, list[Fraction]]:
    """Value rows (one list per point, indexed by n) for reporting."""
    tables = values_by_index(family)
    out: dict[str, list[Fraction]] = {}
    for p in points:
        if family.kind == "func":
            out[p] = [func_eval(t, p, family.depth) for t in tables]
        else:
            out[p] = [t.get(p, ZERO) for t in tables]
    return out
