import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankel_lab.coefficients import (
    HypothesisWarning,
    IndicatorAbove,
    Monomial,
    Polynomial,
    a_widom,
    even_part,
    law_value,
    predict,
    predicted_coefficients,
    u_frak,
    u_indicator,
    w0,
    w1,
)
from hankel_lab.errors import InputError, UnsupportedError
from hankel_lab.geometry import AxisBox, Disk, Interval, StarBoundary
from hankel_lab.symbols import Bump, Constant, SeparableSymbol

from oracles import a_widom_mp, u_frak_mp, u_indicator_mp

PI2 = math.pi**2
LAM, OM = Interval(0.0, 1.0), Interval(-1.0, 1.0)
UNIT = Disk((0.0, 0.0), 1.0)


def test_even_part_examples():
    t = np.linspace(-2, 2, 41)
    assert np.all(even_part(Monomial(3))(t) == 0)
    assert even_part(Monomial(4)) == Monomial(4)
    assert np.allclose(even_part(Polynomial((0, 1, 1)))(t), t**2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.floats(-5, 5))
def test_even_part_is_even(coefs, t):
    g = Polynomial(tuple([0.0] + coefs))
    ge = even_part(g)
    assert ge(t) == ge(-t)


def test_polynomial_needs_zero_constant():
    with pytest.raises(InputError):
        Polynomial((1.0, 2.0))
    with pytest.raises(InputError):
        IndicatorAbove(0.0)


def test_w0_examples():
    assert w0(1.0, LAM, OM).value == pytest.approx(1 / math.pi, rel=1e-14)
    assert w0(0.0, LAM, OM).value == 0.0
    assert w0(1.0, UNIT, UNIT).value == pytest.approx(0.25, rel=1e-14)


def test_w0_smooth_symbol_matches_tensor_quadrature():
    from scipy.integrate import dblquad

    a = SeparableSymbol(((Bump((0.4,), 0.5, 1.0), Bump((0.0,), 1.5, 2.0)),), 1)
    ref = dblquad(lambda xi, x: a(np.array([x]), np.array([xi]))[()], 0, 1, -1, 1,
                  epsabs=1e-13)[0] / (2 * math.pi)
    assert w0(lambda x, xi: a(x, xi), LAM, OM).value == pytest.approx(ref, rel=1e-8)


def test_w0_dimension_mismatch():
    with pytest.raises(InputError):
        w0(1.0, LAM, UNIT)


def test_w1_examples():
    assert w1(1.0, LAM, OM).value == 4.0
    assert w1(0.0, LAM, OM).value == 0.0
    assert w1(0.0, UNIT, UNIT).value == 0.0
    assert w1(1.0, UNIT, UNIT, m=512).value == pytest.approx(4.0, abs=1e-8)


def test_w1_star_is_positive_and_converges():
    s = StarBoundary((0, 0), 1.0, (0.15,), (0.05,))
    v1 = w1(1.0, s, UNIT, m=256).value
    v2 = w1(1.0, s, UNIT, m=512).value
    assert v1 > 0 and abs(v1 - v2) < 1e-6 * v2


def test_box_prediction_warns():
    with pytest.warns(HypothesisWarning):
        c = predicted_coefficients("trace_H", Monomial(2), 1.0, AxisBox((-0.5, -0.5), (0.5, 0.5)),
                                   UNIT)
    assert c["hypotheses_ok"] is False


def test_a_widom_examples():
    for b in (0.3, 1.0, 2.5):
        assert a_widom(Monomial(1), b) == 0.0
    assert a_widom(Monomial(2), 1.0) == pytest.approx(-1 / (4 * PI2), abs=1e-12)
    assert a_widom(Polynomial((0, 1, -1)), 1.0) == pytest.approx(1 / (4 * PI2), abs=1e-12)


@pytest.mark.parametrize("g,b", [(Monomial(2), 1.0), (Monomial(3), 0.7), (Monomial(5), 1.3),
                                 (Polynomial((0, 1, -1)), 1.0), (Polynomial((0, 0.5, 0, 2)), 2.0)])
def test_a_widom_matches_mpmath(g, b):
    assert a_widom(g, b) == pytest.approx(a_widom_mp(g, b), abs=1e-11)


def test_a_widom_refuses_indicator():
    with pytest.raises(UnsupportedError):
        a_widom(IndicatorAbove(0.25), 1.0)


def test_u_frak_examples():
    assert u_frak(Monomial(2), 1.0) == pytest.approx(1 / (2 * PI2), abs=1e-11)
    assert u_frak(Monomial(4), 1.0) == pytest.approx(1 / (12 * PI2), abs=1e-11)
    assert u_frak(Monomial(2), 2.0) == pytest.approx(2 / PI2, abs=1e-11)
    assert u_frak(Monomial(2), 2.0) == pytest.approx(u_frak_mp(Monomial(2), 2.0), abs=1e-11)


def test_u_frak_negative_b():
    with pytest.raises(InputError):
        u_frak(Monomial(2), -1.0)


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("b", [0.5, 2.0, 3.0])
def test_u_frak_scaling(p, b):
    assert u_frak(Monomial(2 * p), b) == pytest.approx(b ** (2 * p) * u_frak(Monomial(2 * p), 1.0),
                                                       abs=1e-9)


def test_u_indicator_examples():
    assert u_indicator(0.5, 1.0) == 0.0
    assert u_indicator(0.3, 0.4) == 0.0
    assert u_indicator(0.25, 0.5) == 0.0
    ref = 2 / PI2 * math.log(2 + math.sqrt(3))
    assert u_indicator(0.25, 1.0) == pytest.approx(ref, abs=1e-14)
    assert u_indicator(0.25, 1.0) == pytest.approx(u_indicator_mp(0.25, 1.0), abs=1e-14)


def test_u_indicator_threshold_positive():
    with pytest.raises(InputError):
        u_indicator(0.0, 1.0)


@pytest.mark.parametrize("lam,b", [(0.25, 1.0), (0.4, 1.0), (1.0, 3.0)])
def test_u_indicator_equals_quadrature(lam, b):
    quad_value = u_frak(IndicatorAbove(lam), b, closed_form=False)
    assert quad_value == pytest.approx(u_indicator(lam, b), abs=1e-9)
    brk = (2 * lam / b,)
    assert u_frak_mp(IndicatorAbove(lam), b, brk) == pytest.approx(u_indicator(lam, b), abs=1e-12)


def test_u_indicator_monotone():
    lams = np.linspace(0.05, 2.0, 20)
    bs = np.linspace(0.0, 5.0, 20)
    table = np.array([[u_indicator(l, b) for b in bs] for l in lams])
    assert np.all(np.diff(table, axis=0) <= 0)
    assert np.all(np.diff(table, axis=1) >= 0)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_lemma8_identity(p):
    g = Polynomial(tuple(np.polynomial.polynomial.polypow([0.0, 1.0, -1.0], p)))
    assert a_widom(g, 1.0) == pytest.approx(0.5 * u_frak(Monomial(2 * p), 1.0), abs=1e-8)


@pytest.mark.parametrize("p", [1, 2])
def test_factorisation_of_modulus(p):
    a = SeparableSymbol(((Bump((0.0,), 1.5, 1.0), Bump((0.0,), 2.0, 0.8)),
                         (Constant(0.3, 1), Constant(1.0, 1))), 1)
    base = u_frak(Monomial(2 * p), 1.0)
    lhs = w1(lambda x, xi: np.abs(a(x, xi)) ** (2 * p) * base, LAM, OM).value
    from hankel_lab.coefficients import u_frak_values

    rhs = w1(lambda x, xi: u_frak_values(Monomial(2 * p), np.abs(a(x, xi))), LAM, OM).value
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_predict_examples():
    one = SeparableSymbol.constant(1.0, 1)
    assert predict("trace_H", Monomial(2), one, LAM, OM, math.e) == pytest.approx(2 / PI2, rel=1e-12)
    for alpha in (1.0, 10.0, 1e4):
        assert predict("count", 0.5, one, LAM, OM, alpha) == 0.0
        assert predict("count", 0.7, one, LAM, OM, alpha) == 0.0
    for alpha in (3.0, 50.0):
        v = predict("trace_T", Monomial(1), one, LAM, OM, alpha, b=1.0)
        assert v == pytest.approx(alpha / math.pi, rel=1e-12)


def test_predicted_constants():
    one = SeparableSymbol.constant(1.0, 1)
    c = predicted_coefficients("trace_H", Monomial(4), one, LAM, OM)
    assert c["A"] == pytest.approx(1 / (3 * PI2), rel=1e-10)
    c = predicted_coefficients("count", IndicatorAbove(0.25), one, LAM, OM)
    assert c["A"] == pytest.approx(4 / PI2 * math.acosh(2.0), rel=1e-12)
    c = predicted_coefficients("trace_T", Monomial(2), one, LAM, OM, b=1.0)
    assert c["A"] == pytest.approx(-1 / PI2, rel=1e-10)
    assert c["D"] == pytest.approx(1 / math.pi, rel=1e-12)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        c = predicted_coefficients("trace_H", Monomial(2), SeparableSymbol.constant(1.0, 2),
                                   UNIT, UNIT, m=512)
    assert c["A"] == pytest.approx(2 / PI2, rel=1e-9)


def test_predict_rejects_small_alpha():
    with pytest.raises(InputError):
        predict("trace_H", Monomial(2), 1.0, LAM, OM, 0.5)


def test_predict_trace_T_needs_polynomial():
    with pytest.raises(UnsupportedError):
        predicted_coefficients("trace_T", IndicatorAbove(0.2), 1.0, LAM, OM, b=1.0)


def test_law_value_shape():
    c = {"A": 2.0, "D": 0.5}
    assert law_value(c, np.e, 1) == pytest.approx(0.5 * np.e + 2.0)
    assert law_value(c, np.e, 2) == pytest.approx(0.5 * np.e**2 + 2.0 * np.e)
