"""Covering the liminf of small finite sets by a set of the same size bound.

Given a stabilized family of sets U_n that each hold at most 2^k elements,
a single deterministic pass over pairs (N, u) tries, for each pair, to add u
to every U_n with n >= N.  The addition is *acceptable* when all U_n stay
within the 2^k bound; under full knowledge of the trace this is decidable by
scanning n in [N, nmax-1] plus the tail.  The elements of accepted additions
form the cover V: it never exceeds 2^k elements (every accepted element ends
up in the tail set, which respects the bound), and it contains the liminf,
because adding an element already present everywhere changes nothing and is
therefore always acceptable.

The pass works on a private mutable copy of the family; additions performed
for earlier pairs stay in force and count against later acceptability checks.
Runs are single-threaded and deterministic: identical traces give identical
logs and covers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import traces
from .kernel import InputError
from .verdict import Check, Verdict

__all__ = ["SetCoverResult", "run_set_cover", "verify_set_cover"]


@dataclass(frozen=True)
class SetCoverResult:
    """Cover, acceptance log (one entry per covered element), and the bound."""

    cover: frozenset[str]
    log: tuple[tuple[int, str], ...]
    bound: int


def run_set_cover(
    family: traces.StabilizedFamily,
    k: int,
    extra_universe: Iterable[str] = (),
) -> SetCoverResult:
    """Run the covering pass at cardinality bound 2^k.

    Pairs (N, u) are visited with N ascending over [0, nmax] (index nmax
    addresses the tail, i.e. all n >= nmax at once) and u in first-appearance
    order over the trace universe.  Elements never enumerated cannot belong
    to the liminf nor block an addition, so the universe suffices;
    ``extra_universe`` widens it when callers care about absent elements.
    """
    if k < 0:
        raise InputError("k must be non-negative")
    bound = 1 << k
    sets_ = traces.sets_by_index(family)
    for n, s in enumerate(sets_):
        if len(s) > bound:
            raise InputError(f"U_{n} has {len(s)} elements, above the bound {bound}")

    # Index nmax is the shared tail object for all n >= nmax.
    working: list[set[str]] = [set(s) for s in sets_]
    working.append(set(sets_[-1]))

    univ = list(traces.universe(family))
    for u in extra_universe:
        if u not in univ:
            univ.append(u)

    covered: set[str] = set()
    log: list[tuple[int, str]] = []
    for start in range(family.nmax + 1):
        suffix = working[start:]
        for u in univ:
            # Not acceptable iff some U_n, n >= start, holds 2^k elements
            # besides u; with |U_n| <= bound maintained, that is exactly:
            if not all(u in s or len(s) < bound for s in suffix):
                continue
            for s in suffix:
                s.add(u)
            if u not in covered:
                covered.add(u)
                log.append((start, u))
            assert all(len(s) <= bound for s in working)
    return SetCoverResult(frozenset(covered), tuple(log), bound)


def verify_set_cover(
    family: traces.StabilizedFamily,
    k: int,
    result: SetCoverResult,
    extra_universe: Sequence[str] = (),
) -> Verdict:
    """Check a cover against the liminf oracle, trusting only the log.

    The cover is re-derived from the log, its cardinality is checked against
    2^k, and coverage is checked against traces.liminf_sets, which computes
    the liminf from the defining formula and shares no logic with
    run_set_cover.
    """
    del extra_universe  # the verdict depends only on the trace and the log
    bound = 1 << k
    from_log = [u for _, u in result.log]
    consistent = frozenset(from_log) == result.cover and len(from_log) == len(set(from_log))
    checks = [
        Check(
            "log-consistency",
            consistent,
            "" if consistent else "cover disagrees with the acceptance log",
        )
    ]
    cover = frozenset(from_log)
    checks.append(
        Check(
            "cardinality",
            len(cover) <= bound,
            "" if len(cover) <= bound else f"{len(cover)} elements exceed {bound}",
        )
    )
    missing = sorted(traces.liminf_sets(family) - cover)
    checks.append(Check("coverage", not missing, missing[0] if missing else ""))
    return Verdict(tuple(checks))
