"""Kernel invariants: canonical form, exact measures, set algebra."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limcov.kernel import (
    CylinderSet,
    InputError,
    RealInterval,
    cell_span,
    parse_rational,
    word_from_text,
    word_to_text,
    words_up_to,
)

F = Fraction

words = st.text(alphabet="01", min_size=0, max_size=8)
word_sets = st.frozensets(words, max_size=12)
rationals = st.fractions(max_denominator=64)


@pytest.mark.parametrize(
    "inside,expected",
    [
        ({"01"}, F(1, 4)),
        (set(), F(0)),
        ({"0", "1"}, F(1)),
        ({"00", "11"}, F(1, 2)),
    ],
)
def test_measure_examples(inside, expected):
    assert CylinderSet(inside).measure() == expected


def test_whole_space_canonicalizes_to_root():
    assert CylinderSet({"0", "1"}).words == frozenset({""})


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ({"0"}, {"1"}, {""}),
        ({"0"}, {"01"}, {"0"}),
        ({"00"}, {"11"}, {"00", "11"}),
    ],
)
def test_union_examples(a, b, expected):
    assert (CylinderSet(a) | CylinderSet(b)).words == frozenset(expected)


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ({"0"}, {"01"}, {"01"}),
        ({"00"}, {"11"}, set()),
        ({"0"}, {"0", "10"}, {"0"}),
    ],
)
def test_intersect_examples(a, b, expected):
    assert (CylinderSet(a) & CylinderSet(b)).words == frozenset(expected)


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ({"01"}, {"0"}, True),
        ({"0"}, {"01"}, False),
        (set(), {"1"}, True),
        (set(), set(), True),
    ],
)
def test_subset_examples(a, b, expected):
    assert CylinderSet(a).subset(CylinderSet(b)) is expected


def test_rejects_non_binary_words():
    with pytest.raises(InputError):
        CylinderSet({"0a"})


@given(word_sets)
def test_canonicalization_idempotent(ws):
    once = CylinderSet(ws)
    assert CylinderSet(once.words).words == once.words


@given(word_sets)
def test_canonical_form_is_prefix_free_antichain(ws):
    canon = CylinderSet(ws).words
    for a in canon:
        for b in canon:
            if a != b:
                assert not a.startswith(b) and not b.startswith(a)
    # maximal merging: no sibling pair x0, x1 survives
    for a in canon:
        if a and (a[:-1] + "0") in canon and (a[:-1] + "1") in canon:
            raise AssertionError(f"unmerged siblings below {a[:-1]!r}")


def test_inclusion_exclusion_exhaustive_depth_three():
    # All 256 point sets of depth <= 3 are unions of the eight depth-3 cells.
    cells = [format(i, "03b") for i in range(8)]
    sets = []
    measures = []
    for mask in range(256):
        s = CylinderSet(c for i, c in enumerate(cells) if mask >> i & 1)
        sets.append(s)
        measures.append(s.measure())
    for i in range(256):
        a = sets[i]
        for j in range(i, 256):
            b = sets[j]
            assert (a | b) == sets[i | j]
            assert (a & b) == sets[i & j]
            assert measures[i | j] + measures[i & j] == measures[i] + measures[j]


@settings(max_examples=200)
@given(word_sets, word_sets)
def test_inclusion_exclusion_randomized(ws_a, ws_b):
    a, b = CylinderSet(ws_a), CylinderSet(ws_b)
    assert (a | b).measure() + (a & b).measure() == a.measure() + b.measure()


@given(word_sets, word_sets)
def test_measure_monotone_under_subset(ws_a, ws_b):
    a, b = CylinderSet(ws_a), CylinderSet(ws_b)
    if a.subset(b):
        assert a.measure() <= b.measure()
    assert a.measure() <= (a | b).measure()
    assert (a & b).measure() <= a.measure()


@given(rationals, rationals, rationals)
def test_rational_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert x + 0 == x and x * 1 == x
    assert x + (-x) == 0
    if x != 0:
        assert x * (1 / x) == 1


def test_parse_rational():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("0.75") == F(3, 4)
    assert parse_rational("2") == F(2)
    with pytest.raises(InputError):
        parse_rational("3/0")
    with pytest.raises(InputError):
        parse_rational("x")


def test_word_text_round_trip():
    assert word_to_text("") == "e"
    assert word_from_text("e") == ""
    assert word_from_text("010") == "010"
    with pytest.raises(InputError):
        word_from_text("2")
    with pytest.raises(InputError):
        word_from_text("")


def test_words_up_to_order():
    assert words_up_to(2) == ["", "0", "1", "00", "01", "10", "11"]


def test_cell_span():
    assert cell_span("", 3) == (0, 8)
    assert cell_span("1", 3) == (4, 4)
    assert cell_span("011", 3) == (3, 1)
    with pytest.raises(InputError):
        cell_span("0000", 3)


def test_cells_partition():
    s = CylinderSet({"0", "11"})
    assert s.cells(2) == frozenset({"00", "01", "11"})
    assert CylinderSet(s.cells(2)) == s


def test_real_interval():
    iv = RealInterval(F(1, 8), F(3, 8))
    assert iv.measure() == F(1, 4)
    assert iv.contains(F(1, 4))
    assert not iv.contains(F(1, 8))  # open at the endpoints
    assert RealInterval(F(1), F(1)).is_empty
    assert RealInterval(F(2), F(1)).measure() == 0
