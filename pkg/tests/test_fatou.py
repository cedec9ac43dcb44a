"""Step-function domination: integral algebra, the raise/cap process, and
its specialization to the set and semimeasure pipelines."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from limcov import gen, traces
from limcov.fatou import StepFunction, fatou_specializes, run_fatou, verify_fatou
from limcov.kernel import InputError, words_up_to
from limcov.measurecover import RationalGrid
from limcov.traces import parse_trace

F = Fraction
ZERO = F(0)


def literal_fatou(family, eps, eps_prime, grid):
    """Reference run in plain Fractions over StepFunction operations."""
    depth = family.depth
    fns = [
        StepFunction.from_table(t, depth) for t in traces.values_by_index(family)
    ]
    working = fns + [fns[-1]]
    top = family.nmax + 1
    budget = eps_prime - eps
    g = grid.resolution
    maxval = max((max(fn.cells) for fn in working), default=ZERO)
    levels = max(1 << g, math.ceil(maxval * (1 << g)))
    theta = eps
    phi = StepFunction.zero(depth)
    attempt = -1
    for start in range(top):
        for word in words_up_to(depth):
            for j in range(1, levels + 1):
                attempt += 1
                theta += budget / (1 << (attempt + 1))
                u = StepFunction.indicator(word, depth, F(j, 1 << g))
                while True:
                    hit = -1
                    for s in range(start, top):
                        if working[s].pointwise_max(u).integral() > theta:
                            hit = s
                            break
                    if hit < 0:
                        break
                    u = u.pointwise_min(working[hit])
                for s in range(start, top):
                    working[s] = working[s].pointwise_max(u)
                phi = phi.pointwise_max(u)
    return phi, theta


def test_step_function_basics():
    g = StepFunction.indicator("0", 1, F(1, 2))
    assert g.integral() == F(1, 4)
    assert StepFunction.zero(3).integral() == 0
    h = StepFunction.indicator("00", 2)
    assert h.integral() == F(1, 4)
    assert h.value("00") == 1 and h.value("10") == 0
    with pytest.raises(InputError):
        StepFunction(1, (F(-1), F(0)))
    with pytest.raises(InputError):
        g.pointwise_max(h)


cells4 = st.tuples(*([st.fractions(min_value=0, max_value=2, max_denominator=16)] * 4))


@given(cells4, cells4)
def test_max_min_integral_identity(a, b):
    f = StepFunction(2, a)
    g = StepFunction(2, b)
    assert (
        f.pointwise_max(g).integral() + f.pointwise_min(g).integral()
        == f.integral() + g.integral()
    )


def test_constant_half_family():
    fam = parse_trace("family func nmax=2 depth=1\nraise 0 0 1/2\nraise 1 0 1/2\n")
    grid = RationalGrid(1)
    res = run_fatou(fam, F(1, 4), F(1, 2), grid)
    assert res.phi.value("0") >= F(1, 2)
    assert res.phi.integral() <= F(1, 2)
    assert verify_fatou(fam, F(1, 4), F(1, 2), grid, res).passed


def test_zero_family_is_dominated_cheaply():
    fam = traces.StabilizedFamily("func", 1, 2, ())
    res = run_fatou(fam, F(1, 4), F(1, 2), RationalGrid(2))
    assert res.phi.integral() <= F(1, 2)  # phi may well be nonzero


def test_capping_preserves_surviving_cell():
    # f_0 lives on cell 00, later members on 11; theliminf is empty but the
    # process must still respect every bound while capping repeatedly.
    fam = parse_trace("family func nmax=2 depth=2\nraise 0 00 1\nraise 1 11 1\n")
    grid = RationalGrid(2)
    res = run_fatou(fam, F(1, 4), F(1, 2), grid)
    assert res.phi.value("11") == 1  # tail value survives at full height
    assert res.phi.integral() <= F(1, 2)
    assert verify_fatou(fam, F(1, 4), F(1, 2), grid, res).passed
    assert any(trims for *_, trims in res.log)


def test_integral_precondition_names_index():
    fam = parse_trace("family func nmax=2 depth=2\nraise 1 0 1\n")
    with pytest.raises(InputError, match="f_1"):
        run_fatou(fam, F(1, 4), F(1, 2), RationalGrid(1))
    with pytest.raises(InputError):
        run_fatou(fam, F(1, 2), F(1, 2), RationalGrid(1))


def test_values_above_one_are_still_dominated():
    fam = parse_trace("family func nmax=1 depth=2\nraise 0 00 3\n")
    grid = RationalGrid(1)
    res = run_fatou(fam, F(3, 4), F(7, 8), grid)
    assert res.phi.value("00") >= 3
    assert verify_fatou(fam, F(3, 4), F(7, 8), grid, res).passed


def test_matches_literal_reference():
    rng = random.Random(31)
    for i in range(12):
        nmax, depth = rng.randint(1, 3), rng.randint(1, 2)
        eps = rng.choice([F(1, 4), F(1, 2)])
        fam = parse_trace(gen.gen_trace("func", nmax, seed=9000 + i, depth=depth, eps=eps))
        grid = RationalGrid(rng.randint(1, 2))
        fast = run_fatou(fam, eps, eps + F(1, 8), grid)
        phi, theta = literal_fatou(fam, eps, eps + F(1, 8), grid)
        assert fast.phi == phi
        assert fast.theta == theta


def test_random_sweep():
    rng = random.Random(32)
    for i in range(25):
        nmax, depth = rng.randint(1, 5), rng.randint(1, 4)
        eps = rng.choice([F(1, 8), F(1, 4)])
        fam = parse_trace(gen.gen_trace("func", nmax, seed=9500 + i, depth=depth, eps=eps))
        grid = RationalGrid(rng.randint(1, 4))
        res = run_fatou(fam, eps, eps + F(1, 8), grid)
        verdict = verify_fatou(fam, eps, eps + F(1, 8), grid, res)
        assert verdict.passed, verdict.failures()


# specialization to the other pipelines


def test_specializes_sets_singleton():
    fam = parse_trace("family sets nmax=2\nadd 0 a\nadd 1 a\n")
    report = fatou_specializes(fam, RationalGrid(2), depth=1)
    assert report.verdict.passed
    assert report.rows == (("a", True, report.rows[0][2]),)


def test_specializes_measure_constant():
    fam = parse_trace("family measure nmax=1\nraise 0 a 1/2\n")
    report = fatou_specializes(fam, RationalGrid(2))
    assert report.verdict.passed


def test_specializes_empty_family_vacuously():
    fam = parse_trace("family sets nmax=1\n")
    report = fatou_specializes(fam, RationalGrid(1))
    assert report.verdict.passed and report.rows == ()


def test_specializes_overflow():
    fam = parse_trace("family sets nmax=1\nadd 0 a\nadd 0 b\nadd 0 c\n")
    with pytest.raises(InputError):
        fatou_specializes(fam, RationalGrid(1), depth=1)


def test_specializes_random_sweep():
    rng = random.Random(33)
    for i in range(20):
        kind = "sets" if i % 2 == 0 else "measure"
        fam = parse_trace(
            gen.gen_trace(kind, rng.randint(1, 4), seed=9800 + i, universe=4, bound=4)
        )
        report = fatou_specializes(fam, RationalGrid(rng.randint(1, 3)))
        assert report.verdict.passed, report.rows
