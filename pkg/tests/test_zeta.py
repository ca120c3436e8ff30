import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from digitzeta.core import NumerationError, fibonacci, geometric, make_digit_set, tau_floor
from digitzeta.special import PoleError
from digitzeta.zeta import (
    abscissa, pole_grid, pole_location, residue, special_value, zeta_continued_geometric,
    zeta_continued_perturbed, zeta_direct,
)

BIN = make_digit_set([0, 1])
D015 = make_digit_set([0, 1, 5])

# Riemann zeta from mpmath
RIEMANN = [
    (2, 1.6449340668482264),
    (3 + 1j, 1.1072144084314093 - 0.14829086717817536j),
    (0.5 + 2j, 0.44054565034082943 - 0.31164633843573974j),
    (-1.5, -0.025485201889833036),
    (-0.5 + 4j, 0.4440416257177037 + 0.18051697141016512j),
]


@pytest.mark.parametrize("s,ref", RIEMANN)
def test_binary_is_riemann(s, ref):
    assert abs(zeta_continued_geometric(2, BIN, s).value - ref) < 1e-11


def test_full_ternary_is_riemann():
    d = make_digit_set([0, 1, 2])
    for s in (2.5, 0.3 + 1j, -2.5):
        ref = complex(mpmath.zeta(s))
        assert abs(zeta_continued_geometric(3, d, s).value - ref) < 1e-10


def test_scaled_digits():
    # digits {0, 2} in base 2 give the even numbers: 2^-s zeta(s)
    d = make_digit_set([0, 2])
    for s in (2.0, 0.5 + 3j):
        ref = 2 ** -s * complex(mpmath.zeta(s))
        assert abs(zeta_continued_geometric(2, d, s).value - ref) < 1e-10


def test_special_values_binary():
    for n, ref in ((0, -0.5), (1, -1 / 12), (2, 0.0), (3, 1 / 120)):
        assert special_value(2, BIN, n) == pytest.approx(ref, abs=1e-12)
        assert zeta_continued_geometric(2, BIN, -n).value.real == pytest.approx(ref, abs=1e-12)


def test_trivial_zeros():
    d = make_digit_set([0, 1, 5])
    for n in (1, 2, 3, 4):
        assert abs(zeta_continued_geometric(2, d, -n).value) < 1e-10
        assert special_value(2, d, n) == 0.0
    assert zeta_continued_geometric(2, d, 0).value == pytest.approx(-1, abs=1e-10)


@settings(max_examples=10)
@given(st.floats(-5, 5))
def test_direct_matches_continued(t):
    sig = 1.0
    s = complex(sig + 0.5, t)
    d = zeta_direct(geometric(3), D015, s).value
    c = zeta_continued_geometric(3, D015, s).value
    assert abs(d - c) < 1e-6


def test_c_shift_invariance():
    s = complex(-0.7, 3.0)
    vals = [zeta_continued_geometric(3, D015, s, c_shift=c).value for c in (0, 1, 2)]
    assert max(abs(v - vals[0]) for v in vals) < 1e-8


def test_direct_needs_convergent_region():
    with pytest.raises(ValueError):
        zeta_direct(geometric(3), D015, 1.1)


def test_pole_guard():
    with pytest.raises(PoleError):
        zeta_continued_geometric(2, BIN, 1 + 1e-8)
    loc = pole_location(3, D015, 0, 1)
    with pytest.raises(PoleError):
        zeta_continued_geometric(3, D015, loc + 1e-9)


@pytest.mark.parametrize("j,k", [(0, 0), (0, 1), (1, 1), (1, -2)])
def test_residue_by_approach(j, k):
    info = residue(3, D015, j, k)
    p = info.location
    approx = [(h) * zeta_continued_geometric(3, D015, p + h).value for h in (1e-3, 5e-4)]
    # (s - p) zeta(s) = res + O(h): extrapolate linearly
    extrap = 2 * approx[1] - approx[0]
    assert abs(extrap - info.residue) < 1e-6 * max(1.0, abs(info.residue))


def test_binary_pole_grid():
    grid = pole_grid(2, BIN, 2, 2)
    nonzero = [(g.j, g.k) for g in grid if abs(g.residue) > 1e-12]
    assert nonzero == [(0, 0)]
    assert residue(2, BIN, 0, 0).residue == pytest.approx(1.0, abs=1e-12)


def test_residue_vanishes_at_nonpositive_integer_location():
    info = residue(3, D015, 1, 0)
    assert info.location == 0 and info.residue == 0


def test_abscissa():
    info = abscissa(geometric(3), D015)
    assert info.sigma_c == 1.0 and info.boundary_divergent
    assert abscissa(fibonacci(), BIN).sigma_c == pytest.approx(math.log(2) / math.log((1 + 5 ** 0.5) / 2))


def test_perturbed_agrees_on_geometric():
    for s in (complex(0.7, 2.0), complex(1.4, -1.0)):
        a = zeta_continued_perturbed(geometric(3), D015, s).value
        b = zeta_continued_geometric(3, D015, s).value
        assert abs(a - b) < 1e-9


def test_perturbed_against_direct_tau_floor():
    base = tau_floor("9/5")
    d = make_digit_set([0, 1])
    sig = math.log(2) / math.log(1.8)
    s = complex(sig + 0.6, 1.5)
    a = zeta_continued_perturbed(base, d, s).value
    b = zeta_direct(base, d, s).value
    assert abs(a - b) < 1e-6


def test_perturbed_region_and_requirements():
    with pytest.raises(ValueError):
        zeta_continued_perturbed(fibonacci(), BIN, 0.3)
    with pytest.raises(NumerationError):
        zeta_continued_geometric(fibonacci(), BIN, 2)
