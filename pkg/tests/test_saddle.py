import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from darboux_mellin.elementary import elementary_mellin
from darboux_mellin.oracle import OneForm, iterated_quadrature, saddle_path
from darboux_mellin.saddle import (
    EdgePiece,
    EdgeSeries,
    FormSeries,
    PolycycleDescriptor,
    SaddleChart,
    SaddlePiece,
    ValidationError,
    fit_edge_series,
    pullback_form,
    validate_chart,
)


def test_chart_basics():
    chart = SaddleChart(2, 3, 2)
    assert chart.mu_ratio == F(2, 3)
    assert chart.min_index == -1
    assert SaddleChart(0.7, 1).lambda1 == F(7, 10)
    assert SaddleChart(1, 1, scale=4.0).model_level(1.0) == 0.25
    with pytest.raises(ValidationError):
        SaddleChart(0, 1)
    with pytest.raises(ValidationError):
        SaddleChart(1, -2)
    with pytest.raises(ValidationError):
        SaddleChart(1, 1, -1)


def test_validate_accepts_in_envelope_form():
    chart, forms = validate_chart(SaddleChart(1, 1, 1), [{"dx": {(1, 1): 1.0}, "envelope": 4}])
    assert forms[0].dx == {(1, 1): 1.0}
    assert not forms[0].envelope_estimated


def test_validate_rejects_low_index():
    with pytest.raises(ValidationError, match="must exceed -M"):
        validate_chart(SaddleChart(1, 1, 1), [{"dx": {(-2, 0): 1}}])


def test_envelope_violation():
    with pytest.raises(ValidationError, match="envelope violated"):
        FormSeries(dx={(4, 4): 3.0}, envelope=4)


def test_estimated_envelope():
    form = FormSeries(dx={(1, 2): F(1, 2), (0, 0): 3})
    assert form.envelope_estimated
    assert form.envelope == 4  # max(1/2 * 2^3, 3 * 2^0)


def test_truncation_check():
    assert FormSeries(dx={(2, 3): 1}).truncation == 5
    with pytest.raises(ValidationError):
        FormSeries(dx={(2, 3): 1}, truncation=4)


def test_pullback_examples():
    unit = SaddleChart(1, 1)
    assert pullback_form(unit, FormSeries(dy={(0, 1): 1})).dx == {(0, 1): F(-1)}
    pure = FormSeries(dx={(1, 1): 1})
    assert pullback_form(unit, pure) is pure
    assert pullback_form(SaddleChart(2, 3), FormSeries(dy={(1, 2): 1})).dx == {(1, 2): F(-2, 3)}


def test_pullback_linear_and_idempotent():
    chart = SaddleChart(3, 2)
    a = FormSeries(dx={(1, 0): 1}, dy={(2, 1): 2})
    b = FormSeries(dy={(2, 1): -1, (0, 3): 5})
    both = FormSeries(dx={(1, 0): 1}, dy={(2, 1): 1, (0, 3): 5})
    pa, pb, pboth = (pullback_form(chart, f) for f in (a, b, both))
    summed = {k: pa.dx.get(k, 0) + pb.dx.get(k, 0) for k in set(pa.dx) | set(pb.dx)}
    assert {k: v for k, v in summed.items() if v} == pboth.dx
    assert pullback_form(chart, pboth) is pboth


def test_dy_level_one_value():
    # integral of dy along xy = t from y = 1 down to y = t is t - 1
    chart = SaddleChart(1, 1)
    series = elementary_mellin([FormSeries(dy={(0, 1): 1})], chart, 10).series()
    for t in (0.2, 0.7):
        assert abs(series(t) - (t - 1)) < 1e-15


def test_pullback_against_quadrature_on_random_dy_forms():
    rng = random.Random(5)
    for _ in range(20):
        l1, l2 = rng.choice([(1, 1), (2, 3), (1, 2), (3, 2)])
        m, n = rng.randint(-1, 4), rng.randint(-1, 4)
        chart = SaddleChart(l1, l2, 2)
        pulled = pullback_form(chart, FormSeries(dy={(m, n): 1}))
        series = elementary_mellin([pulled], chart, 40).series()
        t = rng.uniform(0.1, 0.9)
        oracle = iterated_quadrature([OneForm.monomial_dy(m, n)], saddle_path(l1, l2, t))
        assert abs(series(t) - oracle) <= 1e-9 * abs(oracle) + 1e-15


def test_edge_series_examples():
    edge = EdgeSeries(2, {0: 1, F(1, 2): 1})
    assert edge(0.25) == pytest.approx(1.5, abs=1e-15)
    assert not EdgeSeries(2, {}).as_series()
    with pytest.raises(ValidationError, match="lattice"):
        EdgeSeries(2, {F(1, 3): 1})


def test_fit_edge_series_recovers_polynomial():
    ts = np.linspace(0.05, 0.95, 30)
    fit = fit_edge_series(ts, 2 - ts, 1, 1)
    assert not fit.certified
    assert fit.coefficients[F(0)] == pytest.approx(2, abs=1e-10)
    assert fit.coefficients[F(1)] == pytest.approx(-1, abs=1e-10)
    assert fit.residual < 1e-10


def test_polycycle_descriptor():
    saddle = SaddlePiece(SaddleChart(1, 1))
    edge = EdgePiece((EdgeSeries(1, {0: 1}),))
    cyc = PolycycleDescriptor((saddle, edge, saddle), (0.3, 0.6), darboux="H = x*y")
    assert cyc.piece_count == 3
    with pytest.raises(ValidationError):
        PolycycleDescriptor((saddle, edge), (0.6, 0.3))
    with pytest.raises(ValidationError):
        PolycycleDescriptor((saddle, edge), (1.2,))
    with pytest.raises(ValidationError, match="alternate"):
        PolycycleDescriptor((saddle, saddle), (0.5,))


def test_saddle_curve_level_is_constant():
    path = saddle_path(2, 3, 0.5)
    piece = path.pieces[0]
    u = np.linspace(piece.start, piece.stop, 50)
    x, y = piece.point(u)
    assert np.allclose(x ** 2 * y ** 3, 0.5, rtol=1e-14, atol=0)
    (x0, y0), (x1, y1) = path.endpoints()
    assert (x0, y0) == pytest.approx((math.sqrt(0.5), 1.0), abs=1e-15)
    assert (x1, y1) == pytest.approx((1.0, 0.5 ** (1 / 3)), abs=1e-15)
