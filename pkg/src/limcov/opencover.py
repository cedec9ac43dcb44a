"""Covering the liminf of open sets of small measure, three ways.

All three modes take a stabilized open family with every member of measure
at most eps and produce an open cover V of the liminf with measure at most
eps' > eps, verified exactly.

``trim`` mode: attempts run over pairs (cylinder word x, start index i).
Each attempt raises a global threshold (initially eps) by the attempt's
delta; the candidate set starts as the cylinder of x and, while some first
m >= i would be pushed above the threshold by adding it, is replaced by its
intersection with that U_m.  Every such trim removes measure strictly above
the attempt's delta (the overhang past the previous threshold), so trimming
terminates in fewer than 1/delta steps; the surviving candidate is added to
every U_n with n >= i.  A point lying in all U_n from some index on is never
trimmed away, so the union of added sets covers the liminf.

``naive`` mode: same attempt loop, but an attempt whose addition would cross
the threshold is skipped outright.  In general this only covers the union of
the interiors of the suffix intersections, but stabilized families are
clopen at desk scale, so here it covers the liminf exactly as well.

``blocks`` mode: non-adaptive.  With thresholds eps_j = eps +
(eps'-eps)(1 - 2^-j), pick the smallest k_1 such that the intersection
U_0..U_{k_1} joined with any single later U_i stays within eps_1, then the
smallest k_2 > k_1 for the two-block union against eps_2, and so on; the
union of the block intersections plus the tail intersection covers the
liminf within eps'.

Internally the working sets live as bit masks over the 2^depth cells of the
family's depth, so measure comparisons are integer popcounts; thresholds
stay exact Fractions and comparisons use floor(theta * 2^depth), which is
exact for cell counts.  Results are converted back to canonical
CylinderSets; the verifier works purely on those plus the liminf oracle.

Runs are single-threaded and deterministic; results are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import traces
from .kernel import (
    CylinderSet,
    InputError,
    RealInterval,
    ZERO,
    cell_span,
    format_rational,
    word_to_text,
    words_up_to,
)
from .verdict import Check, Verdict

__all__ = [
    "DeltaSchedule",
    "OmegaFamilyResult",
    "OpenCoverResult",
    "Piece",
    "omega_family",
    "run_block_cover",
    "run_naive_cover",
    "run_trim_cover",
    "verify_open_cover",
]


@dataclass(frozen=True)
class DeltaSchedule:
    """Per-attempt threshold increments delta_t = budget * 2^-(t+1).

    All increments are positive and their total stays strictly below the
    budget, so the running threshold never reaches eps'.
    """

    budget: Fraction

    def __post_init__(self):
        if self.budget <= 0:
            raise InputError("threshold budget must be positive")

    def delta(self, attempt: int) -> Fraction:
        return self.budget * Fraction(1, 1 << (attempt + 1))

    def trim_limit(self, attempt: int) -> int:
        """ceil(1 / delta_t); trim counts must stay strictly below it."""
        num, den = self.budget.numerator, self.budget.denominator
        return -((-(den << (attempt + 1))) // num)


@dataclass(frozen=True)
class Piece:
    """One contribution to the cover.

    For trim/naive mode: the candidate cylinder word, its start index, the
    global attempt number, the trim count, and the final added set.  For
    blocks mode: ``word`` is None, ``start``/``stop`` delimit the block
    intersection (``stop`` None for the tail block), and ``attempt`` is -1.
    """

    word: str | None
    start: int
    stop: int | None
    attempt: int
    trims: int
    added: CylinderSet


@dataclass(frozen=True)
class OpenCoverResult:
    mode: str
    cover: CylinderSet
    pieces: tuple[Piece, ...]
    theta: Fraction
    trim_events: tuple[tuple[int, int], ...]
    eps: Fraction
    eps_prime: Fraction


def _check_open_pre(
    family: traces.StabilizedFamily, eps: Fraction, eps_prime: Fraction
) -> list[CylinderSet]:
    if family.kind != "open":
        raise InputError(f"expected an open family, got {family.kind!r}")
    if not 0 < eps < eps_prime <= 1:
        raise InputError(
            f"need 0 < eps < eps' <= 1, got eps={format_rational(eps)}, "
            f"eps'={format_rational(eps_prime)}"
        )
    opens = traces.opens_by_index(family)
    for n, s in enumerate(opens):
        mu = s.measure()
        if mu > eps:
            raise InputError(
                f"U_{n} has measure {format_rational(mu)}, above eps={format_rational(eps)}"
            )
    return opens


def _word_mask(word: str, depth: int) -> int:
    base, span = cell_span(word, depth)
    return ((1 << span) - 1) << base


def _set_mask(s: CylinderSet, depth: int) -> int:
    mask = 0
    for w in s.words:
        mask |= _word_mask(w, depth)
    return mask


def _mask_set(mask: int, depth: int) -> CylinderSet:
    cells = []
    index = 0
    while mask:
        if mask & 1:
            cells.append(format(index, f"0{depth}b") if depth else "")
        mask >>= 1
        index += 1
    return CylinderSet(cells)


def _theta_floor(theta: Fraction, depth: int) -> int:
    """floor(theta * 2^depth): cell counts above it exceed theta exactly."""
    return (theta.numerator << depth) // theta.denominator


def _cover_run(
    family: traces.StabilizedFamily,
    eps: Fraction,
    eps_prime: Fraction,
    trim: bool,
) -> OpenCoverResult:
    opens = _check_open_pre(family, eps, eps_prime)
    depth = family.depth
    assert depth is not None
    schedule = DeltaSchedule(eps_prime - eps)

    masks = [_set_mask(s, depth) for s in opens]
    masks.append(masks[-1])  # index nmax: the shared tail
    top = family.nmax + 1
    words = words_up_to(depth)

    theta = eps
    cover_mask = 0
    pieces: list[Piece] = []
    trim_events: list[tuple[int, int]] = []
    attempt = -1
    for start in range(top):
        for word in words:
            attempt += 1
            theta += schedule.delta(attempt)
            tf = _theta_floor(theta, depth)
            candidate = _word_mask(word, depth)
            trims = 0
            if trim:
                while True:
                    hit = -1
                    for m in range(start, top):
                        if (masks[m] | candidate).bit_count() > tf:
                            hit = m
                            break
                    if hit < 0:
                        break
                    candidate &= masks[hit]
                    trims += 1
                    assert trims < schedule.trim_limit(attempt)
            else:
                if any((masks[m] | candidate).bit_count() > tf for m in range(start, top)):
                    continue
            if trims:
                trim_events.append((attempt, trims))
            for n in range(start, top):
                masks[n] |= candidate
            assert all(m.bit_count() <= tf for m in masks)
            if candidate & ~cover_mask:
                pieces.append(
                    Piece(word, start, None, attempt, trims, _mask_set(candidate, depth))
                )
                cover_mask |= candidate
    return OpenCoverResult(
        "trim" if trim else "naive",
        _mask_set(cover_mask, depth),
        tuple(pieces),
        theta,
        tuple(trim_events),
        eps,
        eps_prime,
    )


def run_trim_cover(
    family: traces.StabilizedFamily, eps: Fraction, eps_prime: Fraction
) -> OpenCoverResult:
    """Trimming mode; covers the liminf within measure eps'."""
    return _cover_run(family, eps, eps_prime, trim=True)


def run_naive_cover(
    family: traces.StabilizedFamily, eps: Fraction, eps_prime: Fraction
) -> OpenCoverResult:
    """No-trimming mode: violating attempts are skipped.  Covers the union
    of interiors of suffix intersections, which equals the liminf here."""
    return _cover_run(family, eps, eps_prime, trim=False)


def run_block_cover(
    family: traces.StabilizedFamily, eps: Fraction, eps_prime: Fraction
) -> OpenCoverResult:
    """Block-union mode over the original (unmodified) family."""
    opens = _check_open_pre(family, eps, eps_prime)
    depth = family.depth
    assert depth is not None
    budget = eps_prime - eps

    masks = [_set_mask(s, depth) for s in opens]
    masks.append(masks[-1])
    tail = masks[-1]
    last = family.nmax - 1

    pieces: list[Piece] = []
    union_mask = 0
    start = 0
    block_index = 0
    eps_j = eps
    while True:
        block_index += 1
        eps_j = eps + budget * (1 - Fraction(1, 1 << block_index))
        tf = _theta_floor(eps_j, depth)
        stop = -1
        inter = ~0
        for k in range(start, last + 1):
            inter &= masks[k]
            joined = union_mask | inter
            if all(
                (joined | masks[i]).bit_count() <= tf for i in range(k + 1, last + 2)
            ):
                stop = k
                break
        assert stop >= 0  # stop = nmax-1 always qualifies
        inter_mask = inter & ((1 << (1 << depth)) - 1)
        pieces.append(Piece(None, start, stop, -1, 0, _mask_set(inter_mask, depth)))
        union_mask |= inter_mask
        if stop == last:
            break
        start = stop + 1

    pieces.append(Piece(None, family.nmax, None, -1, 0, _mask_set(tail, depth)))
    union_mask |= tail
    assert union_mask.bit_count() <= _theta_floor(eps_j, depth)
    return OpenCoverResult(
        "blocks",
        _mask_set(union_mask, depth),
        tuple(pieces),
        eps_j,
        (),
        eps,
        eps_prime,
    )


def verify_open_cover(
    family: traces.StabilizedFamily,
    eps: Fraction,
    eps_prime: Fraction,
    result: OpenCoverResult,
) -> Verdict:
    """Re-check the cover from its pieces against the liminf oracle.

    Works entirely on canonical CylinderSets and exact Fractions; shares no
    working-set machinery with the construction runs.
    """
    union = CylinderSet.empty()
    for piece in result.pieces:
        union = union | piece.added
    consistent = union == result.cover
    checks = [
        Check(
            "piece-consistency",
            consistent,
            "" if consistent else "cover disagrees with the union of pieces",
        )
    ]

    mu = union.measure()
    checks.append(
        Check("measure-bound", mu <= eps_prime, "" if mu <= eps_prime else format_rational(mu))
    )
    checks.append(
        Check(
            "threshold-bound",
            result.theta <= eps_prime,
            "" if result.theta <= eps_prime else format_rational(result.theta),
        )
    )

    limit = traces.liminf_open(family)
    covered = limit.subset(union)
    missing = "" if covered else word_to_text(sorted(limit.words)[0])
    checks.append(Check("coverage", covered, missing))

    schedule = DeltaSchedule(eps_prime - eps)
    trim_witness = ""
    for attempt, count in result.trim_events:
        if count >= schedule.trim_limit(attempt):
            trim_witness = f"attempt {attempt}: {count} trims"
            break
    checks.append(Check("trim-bound", not trim_witness, trim_witness))
    return Verdict(tuple(checks))


@dataclass(frozen=True)
class OmegaFamilyResult:
    """The interval family built from an eventually periodic rational
    sequence, materialized for two full periods past the prefix; members
    beyond that repeat with the cycle, see interval_at."""

    intervals: tuple[RealInterval, ...]
    w_min: Fraction
    prefix_len: int
    period: int
    eps: Fraction
    verdict: Verdict

    def interval_at(self, i: int) -> RealInterval:
        """U_i for arbitrary i, by the closed form of the periodic tail."""
        if i < 0:
            raise InputError("interval index must be non-negative")
        if i < len(self.intervals):
            return self.intervals[i]
        return self.intervals[self.prefix_len + (i - self.prefix_len) % self.period]


def omega_family(
    prefix: Sequence[Fraction], cycle: Sequence[Fraction], eps: Fraction
) -> OmegaFamilyResult:
    """Intervals U_i = (inf_{j>=i} w_j - eps/3, w_i + eps/3) for the sequence
    w that runs through ``prefix`` and then repeats ``cycle`` forever.

    Past the prefix the infimum is always the cycle minimum w_min, so the
    tail intervals repeat with the cycle.  The result records exact checks:
    w_min lies in every tail interval, tail intervals at cycle-minimum
    positions have measure exactly 2*eps/3 (in particular, below eps
    infinitely often), and every other tail interval has measure
    w_i - w_min + 2*eps/3.
    """
    if not cycle:
        raise InputError("cycle must be nonempty")
    if eps <= 0:
        raise InputError("eps must be positive")
    prefix = list(prefix)
    cycle = list(cycle)
    w_min = min(cycle)
    third = eps / 3
    count = len(prefix) + 2 * len(cycle)

    def w(i: int) -> Fraction:
        if i < len(prefix):
            return prefix[i]
        return cycle[(i - len(prefix)) % len(cycle)]

    def inf_from(i: int) -> Fraction:
        # The cycle repeats forever, so every tail infimum is w_min.
        return min(min(prefix[i:], default=w_min), w_min) if i < len(prefix) else w_min

    intervals = tuple(
        RealInterval(inf_from(i) - third, w(i) + third) for i in range(count)
    )

    member_witness = ""
    small_witness = ""
    shape_witness = ""
    for i in range(len(prefix), count):
        interval = intervals[i]
        if not interval.contains(w_min):
            member_witness = f"i={i}"
            break
        expected = w(i) - w_min + 2 * third
        if interval.measure() != expected:
            shape_witness = f"i={i}"
            break
        if w(i) == w_min and interval.measure() != 2 * third:
            small_witness = f"i={i}"
            break
    checks = (
        Check("tail-membership", not member_witness, member_witness),
        Check("min-position-measure", not small_witness, small_witness),
        Check("tail-measure-identity", not shape_witness, shape_witness),
    )
    return OmegaFamilyResult(
        intervals, w_min, len(prefix), len(cycle), eps, Verdict(checks)
    )
