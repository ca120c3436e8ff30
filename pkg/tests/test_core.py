import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from digitzeta.core import (
    NumerationError, as_fraction, central_binomial, fibonacci, geometric, kappa,
    load_base_table, log_card, lucas, make_digit_set, mu, parse_base, parse_digits,
    system_params, table_base, tau_floor,
)


def naive_kappa_sum(beta, u, dmax, K=4000):
    return sum(beta ** -math.floor(k / u) * dmax for k in range(1, K))


digit_lists = st.lists(st.integers(1, 30), min_size=1, max_size=6, unique=True)


def test_digit_set_normalises():
    d = make_digit_set([5, 0, 1, 1])
    assert d.values == (0, 1, 5)
    assert d.cardinality == 3 and d.max_digit == 5 and d.min_nonzero == 1
    assert d.gcd_if_integer == 1


@pytest.mark.parametrize("bad", [[], [1, 2], [0], [0, -1]])
def test_digit_set_rejects(bad):
    with pytest.raises(NumerationError):
        make_digit_set(bad)


def test_parse_digits_rational():
    d = parse_digits("0, 1/2, 3")
    assert d.values == (0, Fraction(1, 2), 3)
    assert not d.is_integer


def test_as_fraction_float_uses_repr():
    assert as_fraction(0.1) == Fraction(1, 10)
    with pytest.raises(ValueError):
        as_fraction(float("nan"))


def test_base_terms():
    assert fibonacci().terms(8) == [1, 2, 3, 5, 8, 13, 21, 34]
    assert lucas().terms(6) == [1, 3, 4, 7, 11, 18]
    assert central_binomial().terms(6) == [1, 2, 6, 20, 70, 252]
    assert tau_floor("3/2").terms(5) == [1, 2, 3, 5, 7]
    assert geometric(3).terms(4) == [1, 3, 9, 27]
    assert geometric("5/2").term(2) == Fraction(25, 4)


def test_fibonacci_scale():
    f = fibonacci()
    assert abs(f.term(50) / f.alpha / f.beta ** 50 - 1) < 1e-12
    assert max(abs(f.deviation(k)) for k in range(40)) < 1


def test_ratio_probe_decays():
    probe = lucas().ratio_probe(30)
    assert probe[-1] < 1e-10


def test_parse_base_kinds(tmp_path):
    assert parse_base("geometric", "3").param == 3
    assert parse_base("tau-floor:9/5").param == Fraction(9, 5)
    assert parse_base("central-binomial").kind == "central_binomial"
    p = tmp_path / "b.txt"
    p.write_text("beta=2\n# comment\n1\n2\n4\n8\n")
    b = parse_base(f"table:{p}")
    assert b.terms(4) == [1, 2, 4, 8] and b.max_index() == 3
    with pytest.raises(IndexError):
        b.term(4)
    with pytest.raises(NumerationError):
        parse_base("octal")
    with pytest.raises(NumerationError):
        parse_base("geometric")


def test_table_file_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1\n2\n")
    with pytest.raises(NumerationError):
        load_base_table(p)
    p.write_text("beta=2\n1\nx\n")
    with pytest.raises(NumerationError):
        load_base_table(p)
    with pytest.raises(NumerationError):
        table_base([1, 2], 2, gamma=2)


def test_kappa_values():
    assert kappa(2, make_digit_set([0, 1])) == 1.0
    assert kappa(3, make_digit_set([0, 1, 2])) == 1.0
    # the defining sum is 5/8 at u = 1/2 and jumps above 1 just past it
    assert abs(kappa(3, make_digit_set([0, 1, 5])) - 0.5) < 1e-8


@given(st.integers(2, 6), digit_lists)
def test_kappa_against_naive_sum(beta, extra):
    d = make_digit_set([0] + extra)
    k = kappa(beta, d, tol=1e-9)
    assert naive_kappa_sum(beta, k, float(d.max_digit)) <= 1 + 1e-9
    if k < 1:
        assert naive_kappa_sum(beta, k + 1e-6, float(d.max_digit)) > 1


@given(st.integers(2, 6), digit_lists, st.integers(1, 20))
def test_kappa_monotone_in_max_digit(beta, extra, bump):
    d1 = make_digit_set([0] + extra)
    d2 = make_digit_set([0] + extra + [max(extra) + bump])
    assert kappa(beta, d2) <= kappa(beta, d1) + 1e-12


def test_mu():
    assert mu(3, make_digit_set([0, 1, 3])) == 2
    assert mu(2, make_digit_set([0, 1])) == 1
    assert mu(3, make_digit_set([0, 1, 5])) == 1
    with pytest.raises(NumerationError):
        mu(2, make_digit_set([0, 2]))
    with pytest.raises(NumerationError):
        mu("5/2", make_digit_set([0, 1]))


@given(st.integers(2, 7), digit_lists)
def test_mu_bounds(beta, extra):
    d = make_digit_set([0] + extra)
    assume(d.gcd_if_integer == 1)
    m = mu(beta, d)
    assert 1 <= m <= d.cardinality
    assert m >= math.ceil(d.cardinality / beta)


def test_log_card_exact_powers():
    assert log_card(2, make_digit_set([0, 1, 2, 3])) == 2.0
    assert log_card(3, make_digit_set([0, 1, 5])) == 1.0
    assert abs(log_card(2, make_digit_set([0, 1, 5])) - math.log2(3)) < 1e-15


def test_system_params_without_mu():
    p = system_params("5/2", make_digit_set([0, 1]))
    assert p.mu is None and p.kappa > 0
