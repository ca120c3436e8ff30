import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from digitzeta.analytic import (
    B_fn, B_fn_direct, L, L_coeffs, L_minus_log, P, P_telescoped, Z, c_coeffs,
    c_partition_sum, euler_maclaurin_identity_check, mean_exp_P, radius,
)
from digitzeta.core import fibonacci, geometric, lucas, make_digit_set, tau_floor

BIN = make_digit_set([0, 1])
D015 = make_digit_set([0, 1, 5])


def test_binary_L_coefficients():
    # log(1 + e^-y) = log 2 - y/2 + y^2/8 - y^4/192 + y^6/2880 - ...
    g = L_coeffs(BIN, 6)
    assert g[0] == pytest.approx(math.log(2), abs=1e-16)
    assert list(g.coeffs[1:]) == [Fraction(-1, 2), Fraction(1, 8), 0, Fraction(-1, 192), 0, Fraction(1, 2880)]


def test_L_coefficients_against_mpmath_taylor():
    d = make_digit_set([0, 2, 7])
    ref = mpmath.taylor(lambda y: mpmath.log(1 + mpmath.exp(-2 * y) + mpmath.exp(-7 * y)), 0, 8)
    got = L_coeffs(d, 8)
    for k in range(9):
        assert float(got[k]) == pytest.approx(float(ref[k]), rel=1e-12, abs=1e-14)


@given(st.floats(0, 5))
def test_L_minus_log_consistent(y):
    d = make_digit_set([0, 1, 5])
    assert float(L(d, y)) - math.log(3) == pytest.approx(float(L_minus_log(d, y)), abs=1e-14)


@pytest.mark.parametrize("beta", [2, 3, "5/2"])
@pytest.mark.parametrize("m", [1, 2, 5, 9])
def test_c_two_routes(beta, m):
    assert c_coeffs(beta, D015, m)[m] == c_partition_sum(beta, D015, m)


def test_c_exact_for_rational_beta():
    c = c_coeffs(3, D015, 4)
    assert all(isinstance(v, Fraction) for v in c.coeffs)
    assert c[0] == 1


def test_c_float_beta_matches_exact():
    a = c_coeffs(3, D015, 10).floats()
    b = c_coeffs(3.0, D015, 10).floats()
    assert np.allclose(a, b, rtol=1e-12, atol=1e-15)


def test_radius_binary():
    # the binary c-series is t/(e^t - 1)'s Taylor series, radius 2 pi
    info = radius(2, BIN)
    assert abs(info.sigma_est - 2 * math.pi) / (2 * math.pi) < 0.2
    assert info.rho == 0


@given(st.floats(-3, 3))
def test_P_periodic(w):
    assert float(P(3, D015, w + 1)) == pytest.approx(float(P(3, D015, w)), abs=1e-13)


@pytest.mark.parametrize("beta,digits", [(3, [0, 1, 5]), (2, [0, 1, 5]), (4, [0, 3])])
def test_P_two_forms(beta, digits):
    d = make_digit_set(digits)
    w = np.linspace(0, 1, 17)
    assert np.allclose(P(beta, d, w), [P_telescoped(beta, d, x) for x in w], atol=1e-12)


def test_P_vanishes_for_full_digits():
    w = np.linspace(0, 1, 64)
    for b in (2, 3, 7):
        assert np.max(np.abs(P(b, make_digit_set(range(b)), w))) < 1e-12


def test_P_nonzero_otherwise():
    assert np.max(np.abs(P(3, D015, np.linspace(0, 1, 64)))) > 1e-3


@pytest.mark.parametrize("t", [1.0, 0.3, 0.01, 1e-4])
@pytest.mark.parametrize("beta,digits", [(2, [0, 1]), (3, [0, 1, 5]), (5, [0, 2, 7]), ("5/2", [0, 1])])
def test_identity(beta, digits, t):
    assert euler_maclaurin_identity_check(beta, make_digit_set(digits), t).diff < 1e-10


def test_identity_rejects_large_t():
    with pytest.raises(ValueError):
        euler_maclaurin_identity_check(2, BIN, 2.0)


@given(st.floats(0.05, 3))
def test_binary_Z_closed_form(t):
    assert Z(geometric(2), BIN, t) == pytest.approx(1 / -math.expm1(-t), rel=1e-12)


@pytest.mark.parametrize("base", [fibonacci(), lucas(), tau_floor("9/5")])
@pytest.mark.parametrize("t", [0.9, 0.1, 0.01])
def test_B_summed_vs_direct(base, t):
    assert float(B_fn(base, BIN, t)) == pytest.approx(B_fn_direct(base, BIN, t), abs=1e-11)


def test_mean_exp_P_full_digits():
    assert mean_exp_P(3, make_digit_set([0, 1, 2])) == pytest.approx(1.0, abs=1e-14)
