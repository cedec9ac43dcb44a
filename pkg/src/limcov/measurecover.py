"""Increase operations for semimeasures: flat, frequency, and tree variants.

The flat process upgrades the liminf of a stabilized sequence of
semimeasures m_n into a single semimeasure m' that dominates it.  For a
triple (u, N, r) the *increase operation* raises every m_n(u) with n >= N up
to the rational r (values already >= r stay put); it is acceptable when all
m_n remain semimeasures afterwards.  m'(u) is the largest accepted r.  A
no-change increase is always acceptable, so m'(u) is at least the largest
grid point below the tail value of u, which is the liminf under the tail
rule.

Rather than materializing every (u, N, r) attempt, the run exploits that
acceptability of (u, N, r) is exactly r <= min over n in [N, nmax] of
cap_n(u), where cap_n(u) = m_n(u) + (1 - sum(m_n)) is the headroom of u at
index n.  Increases of u leave u's own caps unchanged (value and sum rise
together), so the caps computed when u comes up are valid for all of u's
attempts, and the largest accepted r per (u, N) is the grid floor of the
suffix cap minimum.  This is observationally identical to iterating the
triples (u first-appearance order, N ascending over [0, nmax], r ascending
over the grid) and is checked against a literal reference in the test suite.

The tree variant raises values on binary words; an increase of a(x) is
followed by the minimal upward repair a(y) := max(a(y), a(y0) + a(y1)) from
x's parent to the root and is acceptable iff every repaired root stays <= 1.
The headroom formula picks up the slack along the ancestor path:
cap_n(x) = a_n(x) + sum of slack_n(y) over proper ancestors y
+ (1 - a_n(root)), which telescopes to at most 1.

All runs are single-threaded and deterministic on private working copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import traces
from .kernel import InputError, ZERO, format_rational, word_to_text, words_up_to
from .verdict import Check, Verdict

__all__ = [
    "MeasureCoverResult",
    "RationalGrid",
    "TreeCoverResult",
    "frequency_semimeasures",
    "frequency_trace",
    "run_measure_cover",
    "run_tree_cover",
    "verify_frequency_cover",
    "verify_measure_cover",
    "verify_tree_cover",
]


@dataclass(frozen=True)
class RationalGrid:
    """The dyadic grid {j / 2^g : 1 <= j <= 2^g}, a finite stand-in for
    "every rational r"; answers are exact at resolution 2^-g."""

    resolution: int

    def __post_init__(self):
        if self.resolution < 1:
            raise InputError("grid resolution must be positive")

    @property
    def step(self) -> Fraction:
        return Fraction(1, 1 << self.resolution)

    def values(self) -> list[Fraction]:
        g = self.resolution
        return [Fraction(j, 1 << g) for j in range(1, (1 << g) + 1)]

    def floor(self, value: Fraction) -> Fraction:
        """Largest grid multiple <= value (0 below the first grid point)."""
        if value <= 0:
            return ZERO
        g = self.resolution
        return Fraction((value.numerator << g) // value.denominator, 1 << g)


@dataclass(frozen=True)
class MeasureCoverResult:
    """Output table m', its high-water acceptance log, and the grid.

    The log holds one entry (u, N, r) per increase that pushed m'(u) to a
    new maximum, in iteration order; m'(u) is the largest logged r for u.
    """

    table: dict[str, Fraction]
    log: tuple[tuple[str, int, Fraction], ...]
    grid: RationalGrid


@dataclass(frozen=True)
class TreeCoverResult:
    table: dict[str, Fraction]
    log: tuple[tuple[str, int, Fraction], ...]
    grid: RationalGrid
    depth: int


def run_measure_cover(
    family: traces.StabilizedFamily,
    grid: RationalGrid,
    universe: Iterable[str] | None = None,
) -> MeasureCoverResult:
    """Run the increase process; m' dominates the grid floor of every tail value.

    ``universe`` defaults to the elements appearing in the trace; pass a
    wider one to let the process raise elements the trace never mentions
    (their liminf is 0, so m' is an upper bound for it either way).
    """
    if family.kind != "measure":
        raise InputError(f"expected a measure family, got {family.kind!r}")
    traces.check_semimeasures(family)

    tables = traces.values_by_index(family)
    working = [dict(t) for t in tables]
    working.append(dict(tables[-1]))  # index nmax: the shared tail
    sums = [sum(t.values(), ZERO) for t in working]

    univ = list(traces.universe(family)) if universe is None else list(dict.fromkeys(universe))
    table: dict[str, Fraction] = {}
    log: list[tuple[str, int, Fraction]] = []
    top = family.nmax + 1
    for u in univ:
        # Headroom of u per index; increases of u itself never change it.
        caps = [working[n].get(u, ZERO) + 1 - sums[n] for n in range(top)]
        best = ZERO
        for start in range(top):
            cap = min(caps[start:])
            r = grid.floor(cap)
            if r <= best:
                continue
            best = r
            log.append((u, start, r))
            for n in range(start, top):
                current = working[n].get(u, ZERO)
                if current < r:
                    sums[n] += r - current
                    working[n][u] = r
                assert sums[n] <= 1
        if best > 0:
            table[u] = best
    return MeasureCoverResult(table, tuple(log), grid)


def verify_measure_cover(
    family: traces.StabilizedFamily,
    grid: RationalGrid,
    result: MeasureCoverResult,
    universe: Iterable[str] | None = None,
) -> Verdict:
    """Check m' against the liminf oracle, trusting only the log."""
    from_log: dict[str, Fraction] = {}
    ordered = True
    for u, _, r in result.log:
        if r <= from_log.get(u, ZERO):
            ordered = False
        from_log[u] = max(from_log.get(u, ZERO), r)
    consistent = ordered and from_log == result.table
    checks = [
        Check(
            "log-consistency",
            consistent,
            "" if consistent else "table disagrees with the acceptance log",
        )
    ]

    total = sum(from_log.values(), ZERO)
    nonneg = all(v >= 0 for v in from_log.values())
    ok = total <= 1 and nonneg
    checks.append(Check("semimeasure", ok, "" if ok else f"sum {format_rational(total)}"))

    univ = list(traces.universe(family)) if universe is None else list(dict.fromkeys(universe))
    floor_witness = ""
    for u in univ:
        need = grid.floor(traces.liminf_values(family, u))
        if from_log.get(u, ZERO) < need:
            floor_witness = f"{u} below {format_rational(need)}"
            break
    checks.append(Check("grid-floor", not floor_witness, floor_witness))
    return Verdict(tuple(checks))


def frequency_semimeasures(
    values: Mapping[int, str], horizon: int
) -> list[dict[str, Fraction]]:
    """The occurrence-fraction tables mu_1 .. mu_horizon of a partial map.

    mu_n(x) counts the positions i < n with value x, divided by n; undefined
    positions count in the denominator only, so each mu_n is a semimeasure.
    """
    if horizon < 1:
        raise InputError("horizon must be positive")
    for i in values:
        if not 0 <= i < horizon:
            raise InputError(f"position {i} outside [0, {horizon})")
    out: list[dict[str, Fraction]] = []
    counts: dict[str, int] = {}
    for n in range(1, horizon + 1):
        x = values.get(n - 1)
        if x is not None:
            counts[x] = counts.get(x, 0) + 1
        out.append({key: Fraction(c, n) for key, c in counts.items()})
    return out


def frequency_trace(values: Mapping[int, str], horizon: int) -> traces.StabilizedFamily:
    """A measure-kind family with nmax=horizon whose member n is mu_{n+1},
    suitable as input for run_measure_cover."""
    mus = frequency_semimeasures(values, horizon)
    order: dict[str, None] = {}
    for i in sorted(values):
        order.setdefault(values[i])
    events = []
    for n, mu in enumerate(mus):
        for key in order:
            v = mu.get(key, ZERO)
            if v > 0:
                events.append(traces.Event(n, key, v))
    return traces.StabilizedFamily("measure", horizon, None, tuple(events))


def verify_frequency_cover(
    values: Mapping[int, str],
    horizon: int,
    grid: RationalGrid,
    result: MeasureCoverResult,
) -> Verdict:
    """Check that m' dominates every suffix minimum of the fractions at grid
    precision: for each x and N, m'(x) >= gridfloor(min_{N<=n<=T} mu_n(x))."""
    mus = frequency_semimeasures(values, horizon)
    witness = ""
    for x in dict.fromkeys(values.values()):
        got = result.table.get(x, ZERO)
        for start in range(horizon):
            need = grid.floor(min(mu.get(x, ZERO) for mu in mus[start:]))
            if got < need:
                witness = f"{x} below {format_rational(need)} at N={start}"
                break
        if witness:
            break
    checks = [Check("suffix-domination", not witness, witness)]
    total = sum(result.table.values(), ZERO)
    checks.append(
        Check("semimeasure", total <= 1, "" if total <= 1 else format_rational(total))
    )
    return Verdict(tuple(checks))


def _tree_cap(table: dict[str, Fraction], word: str) -> Fraction:
    """Headroom of ``word``: its value plus ancestor slack plus root headroom."""
    cap = table.get(word, ZERO) + 1 - table.get("", ZERO)
    y = word
    while y:
        y = y[:-1]
        sibling_sum = table.get(y + "0", ZERO) + table.get(y + "1", ZERO)
        cap += table.get(y, ZERO) - sibling_sum
    return cap


def _tree_raise(table: dict[str, Fraction], word: str, r: Fraction) -> None:
    """Raise table[word] to r and repair ancestors minimally upward."""
    if table.get(word, ZERO) >= r:
        return
    table[word] = r
    y = word
    while y:
        y = y[:-1]
        need = table.get(y + "0", ZERO) + table.get(y + "1", ZERO)
        if table.get(y, ZERO) >= need:
            break
        table[y] = need
    assert table.get("", ZERO) <= 1
    if __debug__:  # the tree law holds along the repaired path
        y = word
        while y:
            y = y[:-1]
            assert table.get(y, ZERO) >= table.get(y + "0", ZERO) + table.get(y + "1", ZERO)


def run_tree_cover(
    family: traces.StabilizedFamily, grid: RationalGrid
) -> TreeCoverResult:
    """The increase process on binary-tree semimeasures.

    Words are visited in length-lexicographic order over all words up to the
    family depth, so parents settle before their children; each (x, N)
    performs the largest acceptable grid increase, where acceptability means
    every repaired root over n in [N, nmax] stays <= 1.
    """
    if family.kind != "tree":
        raise InputError(f"expected a tree family, got {family.kind!r}")
    traces.check_tree_tables(family)
    assert family.depth is not None

    tables = traces.values_by_index(family)
    working = [dict(t) for t in tables]
    working.append(dict(tables[-1]))
    top = family.nmax + 1

    table: dict[str, Fraction] = {}
    log: list[tuple[str, int, Fraction]] = []
    for word in words_up_to(family.depth):
        caps = [_tree_cap(working[n], word) for n in range(top)]
        best = ZERO
        for start in range(top):
            r = grid.floor(min(caps[start:]))
            if r <= best:
                continue
            best = r
            log.append((word, start, r))
            for n in range(start, top):
                _tree_raise(working[n], word, r)
        if best > 0:
            table[word] = best
    return TreeCoverResult(table, tuple(log), grid, family.depth)


def verify_tree_cover(
    family: traces.StabilizedFamily, grid: RationalGrid, result: TreeCoverResult
) -> Verdict:
    """Check the output tree law and the grid-floor bound via the oracle."""
    from_log: dict[str, Fraction] = {}
    ordered = True
    for w, _, r in result.log:
        if r <= from_log.get(w, ZERO):
            ordered = False
        from_log[w] = max(from_log.get(w, ZERO), r)
    consistent = ordered and from_log == result.table
    checks = [
        Check(
            "log-consistency",
            consistent,
            "" if consistent else "table disagrees with the acceptance log",
        )
    ]

    assert family.depth is not None
    tree_witness = ""
    if from_log.get("", ZERO) > 1:
        tree_witness = f"root value {format_rational(from_log.get('', ZERO))}"
    else:
        for y in words_up_to(family.depth - 1):
            need = from_log.get(y + "0", ZERO) + from_log.get(y + "1", ZERO)
            if from_log.get(y, ZERO) < need:
                tree_witness = word_to_text(y)
                break
    checks.append(Check("tree-law", not tree_witness, tree_witness))

    floor_witness = ""
    for w in words_up_to(family.depth):
        need = grid.floor(traces.liminf_values(family, w))
        if from_log.get(w, ZERO) < need:
            floor_witness = f"{word_to_text(w)} below {format_rational(need)}"
            break
    checks.append(Check("grid-floor", not floor_witness, floor_witness))
    return Verdict(tuple(checks))
