"""Trace grammar, stabilized-tail semantics, stage monotonicity, oracles."""

import random
from fractions import Fraction

import pytest

from limcov import traces
from limcov.kernel import CylinderSet, InputError
from limcov.traces import (
    ParseError,
    at_stage,
    format_trace,
    liminf_open,
    liminf_sets,
    liminf_sets_witness,
    liminf_values,
    parse_trace,
)

F = Fraction


def test_parse_sets_example():
    fam = parse_trace("family sets nmax=2\nadd 0 a\nadd 1 a\n")
    assert fam.kind == "sets" and fam.nmax == 2 and fam.depth is None
    assert traces.sets_by_index(fam) == [frozenset({"a"}), frozenset({"a"})]
    assert traces.set_at(fam, 7) == frozenset({"a"})  # tail rule


def test_parse_open_example():
    fam = parse_trace("family open nmax=1 depth=2\nadd 0 01\n")
    assert traces.open_at(fam, 0) == CylinderSet({"01"})
    assert traces.open_at(fam, 5) == CylinderSet({"01"})


def test_parse_measure_example():
    fam = parse_trace("family measure nmax=1\nraise 0 x 3/4\n")
    assert traces.value_at(fam, 0, "x") == F(3, 4)
    assert traces.value_at(fam, 0, "absent") == 0


def test_parse_accepts_bytes_and_missing_final_newline():
    fam = parse_trace(b"family sets nmax=1\nadd 0 a")
    assert traces.universe(fam) == ("a",)


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("", 1),
        ("family sets nmax=0\n", 1),
        ("family sets nmax=2 depth=3\n", 1),
        ("family open nmax=2\n", 1),
        ("family wat nmax=2\n", 1),
        ("family sets nmax=2\nadd 2 a\n", 2),
        ("family sets nmax=2\nraise 0 a 1/2\n", 2),
        ("family sets nmax=2\nadd 0 a b\n", 2),
        ("family sets nmax=2\nadd 0 a\n\nadd 1 b\n", 3),
        ("family open nmax=1 depth=2\nadd 0 010\n", 2),
        ("family open nmax=1 depth=2\nadd 0 2\n", 2),
        ("family measure nmax=1\nraise 0 x 0\n", 2),
        ("family measure nmax=1\nraise 0 x -1/2\n", 2),
        ("family measure nmax=1\nraise 0 x 1/0\n", 2),
        ("family measure nmax=1\nraise 0 x% 1/2\n", 2),
    ],
)
def test_parse_errors_name_the_line(text, lineno):
    with pytest.raises(ParseError) as err:
        parse_trace(text)
    assert err.value.lineno == lineno
    assert f"line {lineno}:" in str(err.value)


def test_parse_rejects_crlf_and_bad_bytes():
    with pytest.raises(ParseError):
        parse_trace("family sets nmax=1\r\nadd 0 a\r\n")
    with pytest.raises(ParseError) as err:
        parse_trace(b"\xff\xfe")
    assert err.value.lineno == 1


def test_duplicate_add_is_idempotent_and_low_raise_is_noop():
    fam = parse_trace("family sets nmax=1\nadd 0 a\nadd 0 a\n")
    assert traces.set_at(fam, 0) == frozenset({"a"})
    fam = parse_trace("family measure nmax=1\nraise 0 x 3/4\nraise 0 x 1/4\n")
    assert traces.value_at(fam, 0, "x") == F(3, 4)


def test_format_trace_round_trip():
    text = "family tree nmax=2 depth=2\nraise 0 e 1/2\nraise 1 01 1/4\n"
    fam = parse_trace(text)
    assert format_trace(fam) == text
    assert parse_trace(format_trace(fam)) == fam


def test_stage_truncation_is_monotone():
    text = "family sets nmax=3\n" + "".join(
        f"add {n} u{i}\n" for i, n in enumerate([0, 1, 2, 0, 1, 2, 1])
    )
    fam = parse_trace(text)
    previous = [frozenset()] * fam.nmax
    for t in range(fam.stages + 1):
        stage = at_stage(fam, t)
        assert stage.stage == t
        current = traces.sets_by_index(stage.family)
        for before, now in zip(previous, current):
            assert before <= now
        previous = current
    assert traces.sets_by_index(at_stage(fam, fam.stages).family) == traces.sets_by_index(fam)


def test_value_stage_monotone():
    rng = random.Random(5)
    lines = ["family measure nmax=3"]
    for _ in range(12):
        lines.append(f"raise {rng.randrange(3)} u{rng.randrange(3)} {rng.randint(1, 8)}/16")
    fam = parse_trace("\n".join(lines) + "\n")
    for point in traces.universe(fam):
        last = [F(0)] * fam.nmax
        for t in range(fam.stages + 1):
            tables = traces.values_by_index(at_stage(fam, t).family)
            now = [tab.get(point, F(0)) for tab in tables]
            assert all(a <= b for a, b in zip(last, now))
            last = now


@pytest.mark.parametrize(
    "text,expected",
    [
        ("family sets nmax=2\nadd 0 a\nadd 0 b\nadd 1 b\n", {"b"}),
        ("family sets nmax=2\n", set()),
        ("family sets nmax=3\nadd 0 a\nadd 1 a\nadd 1 c\nadd 2 c\n", {"c"}),
    ],
)
def test_liminf_sets_examples(text, expected):
    assert liminf_sets(parse_trace(text)) == frozenset(expected)


def test_liminf_sets_witness():
    fam = parse_trace("family sets nmax=3\nadd 0 a\nadd 1 a\nadd 1 c\nadd 2 c\n")
    limit, witness = liminf_sets_witness(fam)
    assert limit == frozenset({"c"}) and witness == 1


@pytest.mark.parametrize(
    "text,expected",
    [
        ("family open nmax=2 depth=2\nadd 0 0\nadd 1 0\n", {"0"}),
        ("family open nmax=2 depth=2\nadd 0 0\nadd 1 00\n", {"00"}),
        ("family open nmax=2 depth=2\nadd 0 0\nadd 1 1\n", {"1"}),
    ],
)
def test_liminf_open_examples(text, expected):
    assert liminf_open(parse_trace(text)) == CylinderSet(expected)


@pytest.mark.parametrize(
    "lines,expected",
    [
        (["raise 0 x 1/2", "raise 1 x 1/2", "raise 2 x 1/2"], F(1, 2)),
        (["raise 0 x 1"], F(0)),
        (["raise 1 x 1/4", "raise 2 x 1/2"], F(1, 2)),
    ],
)
def test_liminf_values_examples(lines, expected):
    fam = parse_trace("family measure nmax=3\n" + "".join(l + "\n" for l in lines))
    assert liminf_values(fam, "x") == expected


def test_liminf_open_agrees_with_cell_decomposition():
    # Decompose each member into depth-level cells and take the sets-liminf.
    rng = random.Random(77)
    for _ in range(50):
        nmax, depth = rng.randint(1, 5), rng.randint(1, 4)
        lines = [f"family open nmax={nmax} depth={depth}"]
        for _ in range(rng.randint(0, 10)):
            n = rng.randrange(nmax)
            length = rng.randint(1, depth)
            word = "".join(rng.choice("01") for _ in range(length))
            lines.append(f"add {n} {word}")
        fam = parse_trace("\n".join(lines) + "\n")
        as_cells = ["family sets nmax=%d" % nmax]
        for n, s in enumerate(traces.opens_by_index(fam)):
            for cell in sorted(s.cells(depth)):
                as_cells.append(f"add {n} c{cell}")
        cell_fam = parse_trace("\n".join(as_cells) + "\n")
        expected = {c[1:] for c in liminf_sets(cell_fam)}
        assert liminf_open(fam) == CylinderSet(expected)


def test_func_eval_uses_prefix_maxima():
    fam = parse_trace("family func nmax=1 depth=2\nraise 0 0 1/4\nraise 0 00 1/2\n")
    assert traces.value_at(fam, 0, "00") == F(1, 2)
    assert traces.value_at(fam, 0, "01") == F(1, 4)
    assert traces.value_at(fam, 0, "11") == F(0)
    with pytest.raises(InputError):
        liminf_values(fam, "0")  # func points are full-depth cells


def test_kind_accessor_mismatch():
    fam = parse_trace("family sets nmax=1\nadd 0 a\n")
    with pytest.raises(InputError):
        traces.opens_by_index(fam)
    with pytest.raises(InputError):
        traces.values_by_index(fam)


def test_family_constructor_enforces_type_invariants():
    with pytest.raises(InputError):
        traces.StabilizedFamily("sets", 2, None, (traces.Event(2, "a"),))
    with pytest.raises(InputError):
        traces.StabilizedFamily("sets", 0, None, ())
    with pytest.raises(InputError):
        traces.StabilizedFamily("open", 1, None, ())
    with pytest.raises(InputError):
        traces.StabilizedFamily("measure", 1, 3, ())
