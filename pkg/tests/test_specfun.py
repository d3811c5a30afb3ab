import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crs_noma import specfun as sf
from oracles import lower_gamma_regularized_quad, upper_gamma_quad

X_GRID = np.logspace(-6, 2, 33)


def rel(a, b):
    return abs(a - b) / abs(b)


def test_upper_gamma_zero_reference_values():
    # frozen from the quadrature oracle: int_x^inf e^{-t}/t dt
    assert rel(sf.upper_gamma_zero(1.0), upper_gamma_quad(0.0, 1.0)) < 1e-12
    assert sf.upper_gamma_zero(1.0) == pytest.approx(0.219383934395520, rel=1e-12)
    assert sf.upper_gamma_zero(0.5) == pytest.approx(0.559773594776161, rel=1e-12)


def test_upper_gamma_zero_large_x_asymptote():
    x = 1e4
    assert x * sf.exp_scaled_upper_gamma_zero(x) == pytest.approx(1.0, rel=1e-3)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
def test_domain_errors(x):
    with pytest.raises(sf.DomainError):
        sf.upper_gamma_zero(x)
    with pytest.raises(sf.DomainError):
        sf.exp_scaled_upper_gamma_zero(x)
    with pytest.raises(sf.DomainError):
        sf.upper_gamma_neg_int(2, x)


def test_lower_gamma_domain_errors():
    with pytest.raises(sf.DomainError):
        sf.regularized_lower_gamma(2, -0.1)
    with pytest.raises(sf.DomainError):
        sf.regularized_lower_gamma(0, 1.0)
    with pytest.raises(sf.DomainError):
        sf.regularized_lower_gamma(1.5, 1.0)


def test_exp_scaled_values():
    assert sf.exp_scaled_upper_gamma_zero(1.0) == pytest.approx(0.596347362323194, rel=1e-12)
    x = 1e3
    # the three-term tail is off by its next term, 6/x^4 (6e-9 relative here)
    tail4 = 1 / x - 1 / x**2 + 2 / x**3 - 6 / x**4
    assert sf.exp_scaled_upper_gamma_zero(x) == pytest.approx(tail4, rel=1e-9)
    assert sf.exp_scaled_upper_gamma_zero(x) == pytest.approx(1 / x - 1 / x**2 + 2 / x**3, rel=1e-8)
    x = 1e-8
    assert sf.exp_scaled_upper_gamma_zero(x) == pytest.approx(-math.log(x) - sf.EULER_GAMMA, abs=1e-6)


@pytest.mark.parametrize("x", [700.0, 1e5, 1e150, 1e300])
def test_exp_scaled_finite_beyond_underflow(x):
    v = sf.exp_scaled_upper_gamma_zero(x)
    assert math.isfinite(v) and v > 0
    assert v == pytest.approx(1.0 / x, rel=2.0 / x + 1e-15)


def test_scaling_consistency():
    for x in np.logspace(-6, math.log10(600), 40):
        assert rel(sf.exp_scaled_upper_gamma_zero(x) * math.exp(-x), sf.upper_gamma_zero(x)) < 1e-12


def test_neg_int_reference_values():
    assert sf.upper_gamma_neg_int(0, 1.0) == sf.upper_gamma_zero(1.0)
    assert sf.upper_gamma_neg_int(1, 1.0) == pytest.approx(math.exp(-1) - 0.219383934395520, rel=1e-12)
    assert sf.upper_gamma_neg_int(1, 1.0) == pytest.approx(0.148495506775922, rel=1e-12)
    assert rel(sf.upper_gamma_neg_int(2, 0.5), upper_gamma_quad(-2.0, 0.5)) < 1e-12


def test_neg_int_order_cap():
    sf.upper_gamma_neg_int(30, 1.0)
    with pytest.raises(sf.UnsupportedOrderError):
        sf.upper_gamma_neg_int(31, 1.0)
    assert sf.upper_gamma_neg_int(40, 1.0, max_order=40) > 0
    with pytest.raises(sf.DomainError):
        sf.upper_gamma_neg_int(-1, 1.0)


@pytest.mark.parametrize("n", range(7))
def test_neg_int_against_quadrature(n):
    for x in X_GRID:
        assert rel(sf.upper_gamma_neg_int(n, x), upper_gamma_quad(-float(n), x)) < 1e-9, (n, x)


def test_upper_gamma_zero_against_quadrature():
    for x in X_GRID:
        assert rel(sf.upper_gamma_zero(x), upper_gamma_quad(0.0, x)) < 1e-9
        assert rel(sf.exp_scaled_upper_gamma_zero(x), math.exp(x) * upper_gamma_quad(0.0, x)) < 1e-9


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6, 8, 16])
def test_lower_gamma_against_quadrature(k):
    for x in X_GRID:
        ref = lower_gamma_regularized_quad(k, x)
        if ref < 1e-290:
            continue
        assert rel(sf.regularized_lower_gamma(k, x), ref) < 1e-9, (k, x)


def test_lower_gamma_reference_values():
    assert sf.regularized_lower_gamma(5, 0.0) == 0.0
    for x in (1e-9, 0.3, 2.0, 40.0):
        assert sf.regularized_lower_gamma(1, x) == pytest.approx(-math.expm1(-x), rel=1e-14)
    assert sf.regularized_lower_gamma(3, 2.0) == pytest.approx(1 - 5 * math.exp(-2.0), rel=1e-14)
    assert sf.regularized_lower_gamma(3, 2.0) == pytest.approx(0.323323583816936, rel=1e-12)
    assert sf.regularized_lower_gamma(3, 2.0) + sf.regularized_upper_gamma(3, 2.0) == pytest.approx(1.0, abs=1e-15)


def test_lower_gamma_small_argument_keeps_relative_precision():
    # P(n, y) = y^n/n! (1 - n y/(n+1) + ...)
    y = 1e-7
    for n in (2, 4, 8):
        lead = y**n / math.factorial(n)
        assert sf.regularized_lower_gamma(n, y) == pytest.approx(lead * (1 - n * y / (n + 1)), rel=1e-12)


def test_exp_scaled_expint_matches_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 50
    for n in (1, 2, 5, 13, 31):
        for x in (1e-6, 0.3, 1.0, 3.7, 25.0, 180.0, 5e3):
            ref = float(mpmath.exp(mpmath.mpf(x)) * mpmath.expint(n, mpmath.mpf(x)))
            assert rel(sf.exp_scaled_expint(n, x), ref) < 1e-11, (n, x)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-8, 700.0), st.floats(1.0001, 3.0))
def test_upper_gamma_zero_strictly_decreasing(x, factor):
    assert sf.upper_gamma_zero(x * factor) < sf.upper_gamma_zero(x)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 16), st.floats(0.0, 200.0), st.floats(0.0, 50.0))
def test_lower_gamma_nondecreasing_and_bounded(k, x, dx):
    p1 = sf.regularized_lower_gamma(k, x)
    p2 = sf.regularized_lower_gamma(k, x + dx)
    assert 0.0 <= p1 <= p2 <= 1.0


def test_lower_gamma_tends_to_one():
    for k in (1, 4, 16):
        assert sf.regularized_lower_gamma(k, 200.0) == 1.0


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 30), st.floats(1e-6, 100.0))
def test_recurrence_consistency(n, x):
    # Gamma(-n+1, x) = -n Gamma(-n, x) + x^{-n} e^{-x}
    lhs = sf.upper_gamma_neg_int(n - 1, x)
    a = -n * sf.upper_gamma_neg_int(n, x)
    b = x ** (-n) * math.exp(-x)
    if not (math.isfinite(a) and math.isfinite(b)) or lhs == 0.0:
        return
    # only where the subtraction keeps at least 4 of its ~16 digits
    if abs(a + b) < 1e-12 * max(abs(a), abs(b)):
        return
    cond = max(abs(a), abs(b)) / abs(lhs)
    assert abs(a + b - lhs) <= 1e-9 * abs(lhs) * max(1.0, cond * 1e-4)
