import cmath
import random
from fractions import Fraction as F

import numpy as np
import pytest

from darboux_mellin.elementary import (
    EdgeFitError,
    MellinSeries,
    MultiIndex,
    compensator,
    edge_elementary,
    elementary_mellin,
    monomial_mellin,
    pole_vector,
)
from darboux_mellin.mellin import RationalMellin, inverse_mellin, partial_fractions
from darboux_mellin.oracle import OneForm, iterated_quadrature, saddle_path
from darboux_mellin.saddle import EdgeSeries, FormSeries, SaddleChart, ValidationError, fit_edge_series

UNIT = SaddleChart(1, 1, 1)


def test_pole_vector_examples():
    for m, n in ((3, 1), (0, 4), (2, 2)):
        assert pole_vector((m, n), UNIT) == (n, m)
    assert pole_vector((1, 0, 0, 1), UNIT) == (1, 2, 1)
    assert pole_vector((1, 1), SaddleChart(2, 3)) == (F(1, 3), F(1, 2))


def test_multi_index():
    alpha = MultiIndex.from_pairs([(1, 0), (0, 1)])
    assert alpha.entries == (1, 0, 0, 1)
    assert alpha.length == 2
    assert alpha.weight(1) == 6
    with pytest.raises(ValueError):
        MultiIndex((1, 2, 3))
    with pytest.raises(ValidationError):
        MultiIndex((-1, 0)).check(UNIT)


def test_compensator_examples():
    assert compensator((3, 1), UNIT) == partial_fractions([1], {1: 1, 3: 1})
    assert compensator((5, 5), UNIT) == RationalMellin({(5, 2): 1})
    assert inverse_mellin(compensator((5, 5), UNIT)).terms == {(F(5), 1): F(-1)}
    assert compensator((1, 0, 0, 1), UNIT) == partial_fractions([1], {1: 2, 2: 1})


def test_monomial_examples():
    f = monomial_mellin([((3, 1), "dx")], UNIT)
    assert f == partial_fractions([1], {1: 1, 3: 1})
    assert inverse_mellin(f).terms == {(F(1), 0): F(1, 2), (F(3), 0): F(-1, 2)}
    g = monomial_mellin([((1, 0), "dx"), ((0, 1), "dx")], UNIT)
    assert inverse_mellin(g).terms == {(F(2), 0): F(1), (F(1), 0): F(-1), (F(1), 1): F(-1)}
    h = monomial_mellin([((0, 1), "dy")], UNIT)
    assert h == -partial_fractions([1], {0: 1, 1: 1})
    assert inverse_mellin(h).terms == {(F(1), 0): F(1), (F(0), 0): F(-1)}
    with pytest.raises(ValueError):
        monomial_mellin([((0, 1), "dz")], UNIT)


def test_monomial_against_closed_form_with_unequal_exponents():
    # lambda = (2, 3): y = t^(1/3) x^(-2/3), so int_{sqrt t}^1 y dx is elementary
    chart = SaddleChart(2, 3)
    series = inverse_mellin(monomial_mellin([((1, 1), "dx")], chart))
    for t in (0.1, 0.5, 0.9):
        exact = t ** (1 / 3) * 3 * (1 - t ** (1 / 6))
        assert abs(series(t) - exact) < 1e-14


def test_elementary_examples():
    series = elementary_mellin([FormSeries(dx={(1, 1): 1, (2, 2): 1})], UNIT, 10)
    assert series.rational() == RationalMellin({(1, 2): 1, (2, 2): 1})
    assert series.series().terms == {(F(1), 1): F(-1), (F(2), 1): F(-1)}
    zero = elementary_mellin([FormSeries()], UNIT, 10)
    assert len(zero) == 0 and not zero.rational()
    mono = elementary_mellin([FormSeries(dx={(1, 0): 1}), FormSeries(dx={(0, 1): 1})], UNIT, 10)
    assert mono.rational() == monomial_mellin([((1, 0), "dx"), ((0, 1), "dx")], UNIT)


def test_elementary_errors():
    with pytest.raises(ValueError, match="keeps no term"):
        elementary_mellin([FormSeries(dx={(3, 3): 1})], UNIT, 4)
    with pytest.raises(ValidationError):
        elementary_mellin([FormSeries(dx={(-1, 3): 1})], UNIT, 10)
    with pytest.raises(ValueError):
        elementary_mellin([], UNIT, 10)


def test_kept_terms_obey_envelope():
    rng = random.Random(6)
    chart = SaddleChart(2, 3, 2)
    for _ in range(10):
        forms = [FormSeries(dx={(rng.randint(-1, 4), rng.randint(-1, 4)): F(rng.randint(-3, 3) or 1, 64)
                                for _ in range(3)},
                            dy={(rng.randint(-1, 4), rng.randint(-1, 4)): F(1, 64)})
                 for _ in range(rng.randint(1, 3))]
        series = elementary_mellin(forms, chart, 30)
        for alpha, c in series.terms.items():
            assert abs(c) <= series.envelope * F(2) ** -alpha.weight(chart.pole_bound)
    with pytest.raises(ValueError, match="envelope"):
        MellinSeries(1, {MultiIndex((1, 1)): F(1)}, 10, F(1), UNIT)


def test_compensator_bound_off_poles():
    rng = random.Random(7)
    for _ in range(200):
        l1, l2 = rng.choice([(1, 1), (2, 3), (1, 2)])
        chart = SaddleChart(l1, l2, 3)
        alpha = tuple(rng.randint(-2, 5) for _ in range(2 * rng.randint(1, 3)))
        ell = compensator(alpha, chart)
        shifts = pole_vector(alpha, chart)
        s = complex(rng.uniform(-8, 4), rng.uniform(-3, 3))
        rho = min(abs(s + float(v)) for v in shifts)
        assert abs(complex(ell(s))) <= rho ** -(len(shifts)) * (1 + 1e-9)


def test_pole_locations_on_lattice_and_bounded():
    rng = random.Random(8)
    for _ in range(100):
        l1, l2 = rng.choice([(1, 1), (2, 3), (1, 2)])
        M = 3
        chart = SaddleChart(l1, l2, M)
        l = rng.randint(1, 3)
        alpha = tuple(rng.randint(-2, 5) for _ in range(2 * l))
        step = F(1, l1 * l2)  # lambda1^-1 Z + lambda2^-1 Z = (1 / (l1 l2)) Z for coprime integers
        for a in compensator(alpha, chart).poles():
            assert (a / step).denominator == 1
            assert -a <= l * M * (F(1, l1) + F(1, l2))


def test_pole_lattice_spacing_two_three():
    chart = SaddleChart(2, 3, 1)
    locations = set()
    for m in range(0, 3):
        for n in range(0, 3):
            locations |= set(compensator((m, n), chart).poles())
            locations |= set(compensator((m, 0, 0, n), chart).poles())
    assert all((6 * a).denominator == 1 for a in locations)
    assert any((2 * a).denominator != 1 and (3 * a).denominator != 1 for a in locations)


def test_random_monomials_against_oracle():
    rng = random.Random(9)
    for _ in range(25):
        l1, l2 = rng.choice([(1, 1), (2, 3), (1, 2)])
        chart = SaddleChart(l1, l2, 3)
        word = [((rng.randint(-2, 5), rng.randint(-2, 5)), rng.choice(["dx", "dy"]))
                for _ in range(rng.randint(1, 3))]
        series = inverse_mellin(monomial_mellin(word, chart))
        forms = [OneForm.monomial_dx(m, n) if k == "dx" else OneForm.monomial_dy(m, n) for (m, n), k in word]
        t = rng.choice([0.1, 0.3, 0.5, 0.7, 0.9])
        oracle = iterated_quadrature(forms, saddle_path(l1, l2, t))
        assert abs(series(t) - oracle) <= 1e-8 * abs(oracle) + 1e-12


def test_complete_form_tail_is_sound():
    # keep only part of a polynomial form; the discarded majorant covers the rest
    form = FormSeries(dx={(1, 0): 1, (2, 1): F(1, 2), (3, 3): F(1, 8), (4, 2): F(1, 16)}, envelope=8)
    full = elementary_mellin([form, form], UNIT, 40)
    cut = elementary_mellin([form, form], UNIT, 7)
    assert cut.discarded and not full.discarded
    for t in (0.05, 0.2, 0.5, 0.9):
        gap = abs(full.series()(t) - cut.series()(t))
        assert gap <= float(cut.discarded.evaluate(t, absolute_log=True))


def test_infinite_form_tail_is_sound():
    # sum_{m >= 1, n >= 0} 2^-(m+n) x^(m-1) y^n dx = dx / (2 (1 - x/2)(1 - y/2))
    stored = {(m, n): F(1, 2 ** (m + n)) for m in range(1, 9) for n in range(0, 9) if m + n <= 8}
    form = FormSeries(dx=stored, envelope=1, truncation=8, complete=False)
    exact = OneForm(P=lambda x, y: 0.5 / ((1 - x / 2) * (1 - y / 2)))
    for l in (1, 2):
        series = elementary_mellin([form] * l, UNIT, 6 + 2 * l)
        assert series.certified and series.discarded
        for t in (0.1, 0.4, 0.8):
            oracle = iterated_quadrature([exact] * l, saddle_path(1, 1, t))
            assert abs(oracle - series.series()(t)) <= float(series.discarded.evaluate(t, absolute_log=True))


def test_estimated_envelope_flags_incomplete_series():
    form = FormSeries(dx={(1, 0): 1}, truncation=4, complete=False)
    series = elementary_mellin([form], UNIT, 5)
    assert not series.certified
    complete = elementary_mellin([FormSeries(dx={(1, 0): 1})], UNIT, 5)
    assert complete.certified


def test_edge_elementary():
    edge = EdgeSeries(2, {0: 1, F(1, 2): 1})
    assert edge_elementary(edge)(0.25) == pytest.approx(1.5, abs=1e-15)
    assert not edge_elementary(EdgeSeries(3, {}))
    ts = np.linspace(0.1, 0.9, 20)
    good = fit_edge_series(ts, 2 - ts, 1, 2)
    assert edge_elementary(good)(0.5) == pytest.approx(1.5, abs=1e-10)
    noisy = fit_edge_series(ts, np.sin(40 * ts), 1, 1)
    with pytest.raises(EdgeFitError):
        edge_elementary(noisy)
