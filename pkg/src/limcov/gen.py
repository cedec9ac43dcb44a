"""Seed-deterministic generators for traces, decoders and partial maps.

Every generator is a pure function of its parameters: the same seed yields
byte-identical output.  Generated inputs always satisfy the preconditions of
the construction they feed (cardinality bounds, per-member measures,
semimeasure sums, tree laws, integral caps), which the generators verify
before returning.  Families get a bias towards a common stabilized core so
liminfs are frequently nonempty and coverage checks have teeth.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import traces
from .kernel import CylinderSet, InputError, ZERO, format_rational, word_to_text

__all__ = [
    "NMAX_CAP",
    "DEPTH_CAP",
    "gen_decoder_text",
    "gen_function_text",
    "gen_test_table_text",
    "gen_trace",
    "parse_function_table",
]

NMAX_CAP = 64
DEPTH_CAP = 12


def _check_caps(nmax: int, depth: int | None) -> None:
    if not 1 <= nmax <= NMAX_CAP:
        raise InputError(f"nmax must lie in [1, {NMAX_CAP}]")
    if depth is not None and not 1 <= depth <= DEPTH_CAP:
        raise InputError(f"depth must lie in [1, {DEPTH_CAP}]")


def _dyadic(rng: random.Random, precision: int) -> Fraction:
    """A random positive dyadic in (0, 1] with denominator 2^precision."""
    return Fraction(rng.randint(1, 1 << precision), 1 << precision)


def _random_word(rng: random.Random, max_len: int, min_len: int = 1) -> str:
    length = rng.randint(min_len, max_len)
    return "".join(rng.choice("01") for _ in range(length)) if length else ""


def gen_trace(
    kind: str,
    nmax: int,
    seed: int,
    depth: int | None = None,
    universe: int = 16,
    bound: int | None = None,
    eps: Fraction | None = None,
) -> str:
    """Generate a syntactically valid, precondition-satisfying trace.

    ``bound`` caps every member's cardinality (sets kind), ``eps`` caps every
    member's measure (open kind) or integral (func kind).
    """
    if kind not in traces.KINDS:
        raise InputError(f"unknown family kind {kind!r}")
    if kind in ("open", "tree", "func"):
        if depth is None:
            raise InputError(f"kind {kind!r} needs a depth")
    else:
        depth = None
    _check_caps(nmax, depth)
    rng = random.Random(seed)
    builder = {
        "sets": _gen_sets,
        "open": _gen_open,
        "measure": _gen_measure,
        "tree": _gen_tree,
        "func": _gen_func,
    }[kind]
    text = builder(rng, nmax, depth, universe, bound, eps)
    family = traces.parse_trace(text)  # generated traces must parse
    _post_check(family, bound, eps)
    return text


def _post_check(
    family: traces.StabilizedFamily, bound: int | None, eps: Fraction | None
) -> None:
    if family.kind == "sets" and bound is not None:
        for n, s in enumerate(traces.sets_by_index(family)):
            if len(s) > bound:
                raise AssertionError(f"generator bug: |U_{n}| = {len(s)} > {bound}")
    if family.kind == "open" and eps is not None:
        for n, s in enumerate(traces.opens_by_index(family)):
            if s.measure() > eps:
                raise AssertionError(
                    f"generator bug: measure(U_{n}) = {format_rational(s.measure())}"
                )
    if family.kind == "measure":
        traces.check_semimeasures(family)
    if family.kind == "tree":
        traces.check_tree_tables(family)
    if family.kind == "func" and eps is not None:
        for n, table in enumerate(traces.values_by_index(family)):
            depth = family.depth
            assert depth is not None
            total = sum(
                traces.func_eval(table, format(i, f"0{depth}b"), depth)
                for i in range(1 << depth)
            )
            if total * Fraction(1, 1 << depth) > eps:
                raise AssertionError(f"generator bug: integral of f_{n} above eps")


def _emit(header: str, lines: list[str], rng: random.Random) -> str:
    rng.shuffle(lines)
    return "\n".join([header, *lines]) + "\n" if lines else header + "\n"


def _gen_sets(rng, nmax, depth, universe, bound, eps) -> str:
    del depth, eps
    bound = bound if bound is not None else 4
    tokens = [f"u{i}" for i in range(max(1, universe))]
    core = rng.sample(tokens, k=min(len(tokens), rng.randint(0, bound)))
    lines = []
    for n in range(nmax):
        members = set(core[: rng.randint(0, len(core))] if n < nmax - 1 else core)
        target = rng.randint(len(members), min(bound, len(tokens)))
        while len(members) < target:
            members.add(rng.choice(tokens))
        for u in sorted(members):
            lines.append(f"add {n} {u}")
            if rng.random() < 0.1:  # duplicates are idempotent
                lines.append(f"add {n} {u}")
    return _emit(f"family sets nmax={nmax}", lines, rng)


def _gen_open(rng, nmax, depth, universe, bound, eps) -> str:
    del universe, bound
    eps = eps if eps is not None else Fraction(1, 4)
    # A common core kept inside every member makes the liminf nonempty.
    core: list[str] = []
    core_measure = ZERO
    for _ in range(rng.randint(0, 3)):
        w = _random_word(rng, depth)
        mu = Fraction(1, 1 << len(w))
        if core_measure + mu <= eps / 2:
            core.append(w)
            core_measure += mu
    lines = []
    for n in range(nmax):
        words = list(core)
        for _ in range(rng.randint(0, 2 * depth)):
            w = _random_word(rng, depth)
            if CylinderSet(words + [w]).measure() <= eps:
                words.append(w)
        for w in sorted(set(words)):
            lines.append(f"add {n} {word_to_text(w)}")
    return _emit(f"family open nmax={nmax} depth={depth}", lines, rng)


def _gen_measure(rng, nmax, depth, universe, bound, eps) -> str:
    del depth, bound, eps
    tokens = [f"u{i}" for i in range(max(1, universe))]
    core: dict[str, Fraction] = {}
    remaining = Fraction(1)
    for u in rng.sample(tokens, k=min(len(tokens), rng.randint(0, 4))):
        v = remaining * _dyadic(rng, 4)
        if v > 0:
            core[u] = v
            remaining -= v
    lines = []
    for n in range(nmax):
        table = dict(core) if rng.random() < 0.8 or n == nmax - 1 else {}
        left = Fraction(1) - sum(table.values(), ZERO)
        for u in rng.sample(tokens, k=min(len(tokens), rng.randint(0, 4))):
            if u in table:
                continue
            v = left * _dyadic(rng, 4)
            if v > 0:
                table[u] = v
                left -= v
        for u in sorted(table):
            v = table[u]
            if rng.random() < 0.2:  # staged raise below the final value
                lines.append(f"raise {n} {u} {format_rational(v / 2)}")
            lines.append(f"raise {n} {u} {format_rational(v)}")
    return _emit(f"family measure nmax={nmax}", lines, rng)


def _split_tree(rng, word: str, mass: Fraction, depth: int, out: dict[str, Fraction]):
    if mass <= 0:
        return
    out[word] = mass
    if len(word) >= depth or rng.random() < 0.3:
        return
    share = mass * _dyadic(rng, 3)
    left = share * _dyadic(rng, 3)
    _split_tree(rng, word + "0", left, depth, out)
    _split_tree(rng, word + "1", share - left, depth, out)


def _gen_tree(rng, nmax, depth, universe, bound, eps) -> str:
    del universe, bound, eps
    lines = []
    for n in range(nmax):
        table: dict[str, Fraction] = {}
        _split_tree(rng, "", _dyadic(rng, 3), depth, table)
        for w in sorted(table, key=lambda w: (len(w), w)):
            if table[w] > 0:
                lines.append(f"raise {n} {word_to_text(w)} {format_rational(table[w])}")
    return _emit(f"family tree nmax={nmax} depth={depth}", lines, rng)


def _gen_func(rng, nmax, depth, universe, bound, eps) -> str:
    del universe, bound
    eps = eps if eps is not None else Fraction(1, 4)
    core: dict[str, Fraction] = {}
    budget = eps / 2
    for _ in range(rng.randint(0, 2)):
        w = _random_word(rng, depth)
        v = _dyadic(rng, 3)
        if v * Fraction(1, 1 << len(w)) <= budget:
            core[w] = max(core.get(w, ZERO), v)
            budget -= v * Fraction(1, 1 << len(w))
    lines = []
    for n in range(nmax):
        table = dict(core)
        spent = sum(v * Fraction(1, 1 << len(w)) for w, v in table.items())
        for _ in range(rng.randint(0, depth + 2)):
            w = _random_word(rng, depth)
            v = _dyadic(rng, 3)
            cost = v * Fraction(1, 1 << len(w))
            if spent + cost <= eps:
                table[w] = max(table.get(w, ZERO), v)
                spent += cost
        for w in sorted(table, key=lambda w: (len(w), w)):
            lines.append(f"raise {n} {word_to_text(w)} {format_rational(table[w])}")
    return _emit(f"family func nmax={nmax} depth={depth}", lines, rng)


def gen_decoder_text(seed: int, entries: int = 12, max_program: int = 8, max_output: int = 10) -> str:
    """Random decoder table; programs unique, words at most the given lengths."""
    if max_program > 16 or max_output > 24:
        raise InputError("decoder word lengths beyond desk scale")
    rng = random.Random(seed)
    programs: set[str] = set()
    lines = []
    for _ in range(entries):
        program = _random_word(rng, max_program, min_len=0)
        if program in programs:
            continue
        programs.add(program)
        output = _random_word(rng, max_output, min_len=0)
        lines.append(f"{word_to_text(program)} {word_to_text(output)}")
    return "\n".join(lines) + "\n" if lines else ""


def gen_function_text(seed: int, horizon: int, value_range: int = 8, density: int = 2) -> str:
    """Random partial map {0..horizon-1} -> tokens as ``<i> <token>`` lines."""
    if horizon < 1:
        raise InputError("horizon must be positive")
    rng = random.Random(seed)
    lines = []
    for i in range(horizon):
        if rng.randint(0, max(1, density)) != 0:
            lines.append(f"{i} x{rng.randrange(max(1, value_range))}")
    return "\n".join(lines) + "\n" if lines else ""


def parse_function_table(text: str | bytes) -> dict[int, str]:
    """Parse ``<i> <token>`` lines into a partial map (missing i = undefined)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise traces.ParseError(1, f"not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out: dict[int, str] = {}
    for lineno, line in enumerate(lines, start=1):
        fields = line.split(" ")
        if len(fields) != 2 or "" in fields or not fields[0].isdigit():
            raise traces.ParseError(lineno, "expected '<i> <token>'")
        i = int(fields[0])
        if i in out:
            raise traces.ParseError(lineno, f"duplicate position {i}")
        if not traces._TOKEN_RE.match(fields[1]):
            raise traces.ParseError(lineno, f"bad token {fields[1]!r}")
        out[i] = fields[1]
    return out


def gen_test_table_text(seed: int, c: int, max_n: int = 8) -> str:
    """Random interval-approximation table lines ``<i> <n> <word>``
    satisfying the structural invariants (word length <= n, nothing at n<i)."""
    rng = random.Random(seed)
    lines = []
    seen = set()
    for _ in range(rng.randint(0, 3 * max_n)):
        n = rng.randint(0, max_n)
        i = rng.randint(0, n)
        if (i, n) in seen:
            continue
        seen.add((i, n))
        word = _random_word(rng, n, min_len=max(0, min(n, c - 1)))
        lines.append(f"{i} {n} {word_to_text(word)}")
    lines.sort(key=lambda line: (int(line.split()[1]), int(line.split()[0])))
    return "\n".join(lines) + "\n" if lines else ""
