"""Randomness-deficiency constructions over toy decoder tables.

True program-size complexity is uncomputable, so the lab replaces it with
the complexity induced by a finite decoder table (program word -> output
word): C(u) is the length of the shortest program producing u, infinite when
none does.  Every counting argument here holds for any description method,
which is exactly what the verifiers check.

From a decoder and a slack parameter c one gets, per length n, the set of
strings whose complexity sits below n - c; there are fewer than 2^(n-c) such
strings because there are only that many shorter programs.  The cylinders of
these strings form an open family of per-member measure at most 2^-c, ready
to be fed to the open-cover construction with eps' = 2^-(c-1).

In the other direction, a two-index table of interval approximations
(stabilizing in the second index) is normalized by a per-index deletion pass
so each column keeps total measure at most 2^-c; the covered strings of each
length n then number at most 2^(n-c) and receive (n-c)-bit codes by rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import opencover, traces
from .kernel import (
    CylinderSet,
    InputError,
    ZERO,
    format_rational,
    word_from_text,
    word_to_text,
)
from .verdict import Check, Verdict

__all__ = [
    "DecoderTable",
    "DeficiencyProfile",
    "StabilizeResult",
    "TestApproximation",
    "bar_deficiency",
    "deficiency_cover_family",
    "deficiency_pipeline",
    "deficiency_sets",
    "parse_decoder",
    "parse_test_table",
    "stabilize_test",
]


@dataclass(frozen=True)
class DecoderTable:
    """A finite description method: program word -> output word."""

    entries: tuple[tuple[str, str], ...]

    def __post_init__(self):
        seen = set()
        for program, output in self.entries:
            if program in seen:
                raise InputError(f"duplicate program {word_to_text(program)}")
            seen.add(program)
            for side in (program, output):
                if any(ch not in "01" for ch in side):
                    raise InputError(f"not a binary word: {side!r}")

    def complexity(self) -> dict[str, int]:
        """Minimal program length per output (outputs without programs are
        simply absent, i.e. have infinite complexity)."""
        out: dict[str, int] = {}
        for program, output in self.entries:
            length = len(program)
            if output not in out or length < out[output]:
                out[output] = length
        return out


def parse_decoder(text: str | bytes) -> DecoderTable:
    """Parse lines ``<program> <output>`` (binary words, ``e`` for empty)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise traces.ParseError(1, f"not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    entries = []
    seen = set()
    for lineno, line in enumerate(lines, start=1):
        fields = line.split(" ")
        if len(fields) != 2 or "" in fields:
            raise traces.ParseError(lineno, "expected '<program> <output>'")
        try:
            program = word_from_text(fields[0])
            output = word_from_text(fields[1])
        except InputError as exc:
            raise traces.ParseError(lineno, str(exc)) from None
        if program in seen:
            raise traces.ParseError(lineno, f"duplicate program {fields[0]}")
        seen.add(program)
        entries.append((program, output))
    return DecoderTable(tuple(entries))


@dataclass(frozen=True)
class DeficiencyProfile:
    """Per-string complexity and deficiency |u| - C(u) under a decoder.

    ``deficiency`` omits undescribed strings (their complexity is infinite).
    """

    complexity: dict[str, int]
    deficiency: dict[str, int]

    @classmethod
    def of(cls, decoder: DecoderTable) -> "DeficiencyProfile":
        complexity = decoder.complexity()
        return cls(complexity, {u: len(u) - c for u, c in complexity.items()})


def deficiency_sets(decoder: DecoderTable, n: int, c: int) -> frozenset[str]:
    """Strings of length n with complexity below n - c.

    At most 2^(n-c) - 1 of these exist: that is the number of programs
    shorter than n - c.  Empty whenever c >= n.
    """
    if n < 0 or c < 0:
        raise InputError("n and c must be non-negative")
    cutoff = n - c
    return frozenset(
        output
        for program, output in decoder.entries
        if len(output) == n and len(program) < cutoff
    )


def deficiency_cover_family(
    decoder: DecoderTable, c: int, nmax: int, depth: int
) -> traces.StabilizedFamily:
    """The open family whose member n is the union of cylinders of the
    length-n strings of deficiency above c; each member has measure at most
    2^-c, so the family is valid covering input at eps = 2^-c."""
    if depth < nmax:
        raise InputError(f"depth {depth} must be at least nmax {nmax}")
    if c < 0:
        raise InputError("c must be non-negative")
    events = []
    for n in range(nmax):
        for u in sorted(deficiency_sets(decoder, n, c)):
            events.append(traces.Event(n, u))
    return traces.StabilizedFamily("open", nmax, depth, tuple(events))


def deficiency_pipeline(
    decoder: DecoderTable, c: int, nmax: int, depth: int
) -> tuple[traces.StabilizedFamily, opencover.OpenCoverResult, Verdict]:
    """Build the deficiency family and cover its liminf at eps = 2^-c,
    eps' = 2^-(c-1); requires c >= 1 so that eps' <= 1."""
    if c < 1:
        raise InputError("the covering step needs c >= 1 (eps' = 2^-(c-1))")
    family = deficiency_cover_family(decoder, c, nmax, depth)
    eps = Fraction(1, 1 << c)
    eps_prime = Fraction(1, 1 << (c - 1))
    result = opencover.run_trim_cover(family, eps, eps_prime)
    verdict = opencover.verify_open_cover(family, eps, eps_prime, result)
    return family, result, verdict


def bar_deficiency(decoder: DecoderTable, x: str, limit: int) -> int | None:
    """Least deficiency among the described extensions of x up to length
    ``limit`` (a truncated rendering of the infimum over all extensions;
    the truncation bound must be reported alongside).

    Undescribed extensions carry no deficiency value and are skipped; None
    means x has no described extension within the bound.
    """
    if any(ch not in "01" for ch in x):
        raise InputError(f"not a binary word: {x!r}")
    if len(x) > limit:
        raise InputError(f"|x| = {len(x)} exceeds the bound {limit}")
    best: int | None = None
    for output, c in DeficiencyProfile.of(decoder).complexity.items():
        if len(output) <= limit and output.startswith(x):
            d = len(output) - c
            if best is None or d < best:
                best = d
    return best


@dataclass(frozen=True)
class TestApproximation:
    """Computable approximations I_{i,n} of a sequence of intervals.

    ``intervals`` maps (i, n) to a cylinder word; missing pairs mean the
    empty placeholder.  Structural invariants: nothing at n < i, and the
    word at (i, n) has length at most n (measure at least 2^-n).
    """

    intervals: dict[tuple[int, int], str]
    c: int

    def __post_init__(self):
        if self.c < 0:
            raise InputError("c must be non-negative")
        for (i, n), word in self.intervals.items():
            if i < 0 or n < 0:
                raise InputError("interval indices must be non-negative")
            if n < i:
                raise InputError(f"interval at (i={i}, n={n}) sits before its index")
            if any(ch not in "01" for ch in word):
                raise InputError(f"not a binary word: {word!r}")
            if len(word) > n:
                raise InputError(
                    f"interval at (i={i}, n={n}) has measure below 2^-{n}"
                )


def parse_test_table(text: str | bytes, c: int) -> TestApproximation:
    """Parse lines ``<i> <n> <word>`` into a TestApproximation."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise traces.ParseError(1, f"not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    table: dict[tuple[int, int], str] = {}
    for lineno, line in enumerate(lines, start=1):
        fields = line.split(" ")
        if len(fields) != 3 or "" in fields:
            raise traces.ParseError(lineno, "expected '<i> <n> <word>'")
        if not fields[0].isdigit() or not fields[1].isdigit():
            raise traces.ParseError(lineno, "indices must be non-negative integers")
        i, n = int(fields[0]), int(fields[1])
        if (i, n) in table:
            raise traces.ParseError(lineno, f"duplicate interval at ({i}, {n})")
        try:
            table[(i, n)] = word_from_text(fields[2])
        except InputError as exc:
            raise traces.ParseError(lineno, str(exc)) from None
    try:
        return TestApproximation(table, c)
    except InputError as exc:
        raise traces.ParseError(len(lines) + 1, str(exc)) from None


@dataclass(frozen=True)
class StabilizeResult:
    surviving: dict[tuple[int, int], str]
    deleted: tuple[tuple[int, int], ...]
    covered: dict[int, tuple[str, ...]]
    codes: dict[int, dict[str, str]]
    totals: dict[int, Fraction]
    verdict: Verdict


def stabilize_test(test: TestApproximation) -> StabilizeResult:
    """Normalize the approximation table and code the covered strings.

    Per second index n, intervals are scanned in ascending first index and
    deleted as soon as keeping them would push the column's total measure
    above 2^-c; stabilization of the limit intervals means every limit
    interval is eventually let through.  The strings of length n covered by
    the survivors number at most 2^(n-c) and are coded by the (n-c)-bit
    binary form of their lexicographic rank.
    """
    c = test.c
    cap = Fraction(1, 1 << c)
    by_n: dict[int, list[tuple[int, str]]] = {}
    for (i, n), word in sorted(test.intervals.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        by_n.setdefault(n, []).append((i, word))

    surviving: dict[tuple[int, int], str] = {}
    deleted: list[tuple[int, int]] = []
    covered: dict[int, tuple[str, ...]] = {}
    codes: dict[int, dict[str, str]] = {}
    totals: dict[int, Fraction] = {}
    witness = ""
    for n, column in by_n.items():
        total = ZERO
        kept: list[str] = []
        for i, word in column:
            mu = Fraction(1, 1 << len(word))
            if total + mu > cap:
                deleted.append((i, n))
                continue
            total += mu
            surviving[(i, n)] = word
            kept.append(word)
        totals[n] = total

        strings: set[str] = set()
        for word in kept:
            pad = n - len(word)
            strings.update(
                word + format(j, f"0{pad}b") if pad else word for j in range(1 << pad)
            )
        if n < c and strings:
            raise InputError(f"covered strings at n={n} below c={c}")
        bound = 1 << (n - c) if n >= c else 0
        if len(strings) > bound and not witness:
            witness = f"n={n}: {len(strings)} strings"
        ranked = sorted(strings)
        covered[n] = tuple(ranked)
        width = n - c
        codes[n] = {
            u: (format(rank, f"0{width}b") if width else "")
            for rank, u in enumerate(ranked)
        }

    injective = all(
        len(set(column.values())) == len(column) for column in codes.values()
    )
    checks = (
        Check("count-bound", not witness, witness),
        Check(
            "measure-bound",
            all(t <= cap for t in totals.values()),
            "",
        ),
        Check("code-injectivity", injective, ""),
    )
    return StabilizeResult(
        surviving, tuple(deleted), covered, codes, totals, Verdict(checks)
    )


def deficiency_family_verdict(
    decoder: DecoderTable, c: int, family: traces.StabilizedFamily
) -> Verdict:
    """Independent checks of the family bounds: per-n cardinality below
    2^(n-c) and per-n measure at most 2^-c, recomputed from scratch."""
    complexity = decoder.complexity()
    witness_count = ""
    witness_measure = ""
    for n, s in enumerate(traces.opens_by_index(family)):
        expected = {
            u for u, k in complexity.items() if len(u) == n and k < n - c
        }
        if len(expected) > max(0, (1 << max(n - c, 0)) - 1) and not witness_count:
            witness_count = f"n={n}"
        mu = CylinderSet(expected).measure()
        if mu > Fraction(1, 1 << c) and not witness_measure:
            witness_measure = f"n={n}: {format_rational(mu)}"
        if s != CylinderSet(expected) and not witness_count:
            witness_count = f"n={n}: family disagrees with the deficiency sets"
    return Verdict(
        (
            Check("deficiency-counts", not witness_count, witness_count),
            Check("member-measures", not witness_measure, witness_measure),
        )
    )
