"""Exact arithmetic: series, polynomials, quotient rings, PF operators."""

from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from msplab.errors import NonUnitConstantTerm, NonZeroInnerConstant, NotInvertible
from msplab.exact import (PFOperator, TruncSeries, binom, cyclotomic_ring, h_ring, linsolve, p_ring, poly_add,
                          poly_divmod, poly_eval, poly_mul, poly_trim, primitive_t_ring, rat, rat_str, t_ring)

small = st.fractions(min_value=-20, max_value=20, max_denominator=9)


def series(order=6, unit=False, zero_const=False):
    def build(cs):
        cs = [mpq(c.numerator, c.denominator) for c in cs]
        if unit:
            cs[0] = mpq(1)
        if zero_const:
            cs[0] = mpq(0)
        return TruncSeries.from_coeffs(cs, order)
    return st.lists(small, min_size=order + 1, max_size=order + 1).map(build)


def test_rat_str_round_trip_and_format():
    assert rat_str(mpq(-3, 6)) == "-1/2"
    assert rat_str(5) == "5/1"
    assert rat("7/21") == mpq(1, 3)


@given(st.integers(0, 30), st.integers(0, 30))
def test_binom_matches_math_comb(n, m):
    assert binom(n, m) == comb(n, m)


@given(series(), series(), series())
def test_multiplication_is_associative_and_commutative(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(series(unit=True))
def test_inverse(a):
    assert a * a.inverse() == TruncSeries.constant(1, a.order)


@given(series(zero_const=True))
def test_exp_log_round_trip(a):
    assert a.exp().log() == a


@given(series(zero_const=True), series(zero_const=True))
def test_exp_turns_sums_into_products(a, b):
    assert (a + b).exp() == a.exp() * b.exp()


@given(series(unit=True), st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_rational_power(a, e):
    e = mpq(e.numerator, e.denominator)
    assert a.power(e) * a.power(1 - e) == a


@given(series(zero_const=True))
def test_reversion_inverts_composition(a):
    f = a + TruncSeries.monomial(1, a.order) - TruncSeries.monomial(1, a.order, a[1])
    g = f.revert()
    assert f.compose(g) == TruncSeries.monomial(1, a.order)
    assert g.compose(f) == TruncSeries.monomial(1, a.order)


@given(series(), series())
def test_D_is_a_derivation(a, b):
    assert (a * b).D() == a.D() * b + a * b.D()


def test_geometric_series_oracle():
    # 1/(1 - 3q) = sum 3^d q^d
    g = TruncSeries.geometric(3, 10)
    assert g * TruncSeries.from_coeffs([1, -3], 10) == TruncSeries.constant(1, 10)
    assert g[10] == 3 ** 10


def test_errors_on_bad_input():
    with pytest.raises(NonUnitConstantTerm):
        TruncSeries.from_coeffs([0, 1], 3).inverse()
    with pytest.raises(NonZeroInnerConstant):
        TruncSeries.from_coeffs([1, 1], 3).exp()
    with pytest.raises(NonZeroInnerConstant):
        TruncSeries.from_coeffs([1, 1], 3).compose(TruncSeries.from_coeffs([1, 1], 3))


@given(st.lists(small, min_size=1, max_size=6), st.lists(small, min_size=2, max_size=4))
def test_poly_divmod(a, b):
    a = [mpq(x.numerator, x.denominator) for x in a]
    b = [mpq(x.numerator, x.denominator) for x in b]
    if not poly_trim(b) or len(poly_trim(b)) < 1:
        return
    q, r = poly_divmod(a, b)
    assert len(poly_trim(r)) < len(poly_trim(b))
    recon = poly_mul(q, b)
    recon = [x + (r[i] if i < len(r) else 0) for i, x in enumerate(recon + [0] * max(0, len(r) - len(recon)))]
    assert poly_trim(recon) == poly_trim(a)


@given(st.integers(-5, 5), st.integers(-5, 5))
def test_poly_eval(x, c):
    assert poly_eval([c, 0, 1], x) == c + x * x


def test_linsolve_oracle():
    sol = linsolve([[1, 1], [1, -1]], [3, 1])
    assert sol.consistent and list(sol.solution) == [2, 1]
    assert not linsolve([[1, 1], [1, 1]], [1, 2]).consistent


def test_t_ring_relation():
    R = t_ring(7)
    assert R.gen() ** 7 == R.scalar(-1)
    assert R.gen() ** 14 == R.one()


def test_p_ring_relation():
    R = p_ring(7)
    assert R.gen() ** 11 == -(R.gen() ** 4)


def test_h_ring_nilpotent():
    R = h_ring()
    assert (R.gen() ** 4).is_zero() and not (R.gen() ** 3).is_zero()


@pytest.mark.parametrize("N", [7, 11])
def test_primitive_ring_is_a_field_quotient(N):
    R = primitive_t_ring(N)
    t = R.gen()
    assert t ** N == R.scalar(-1)
    x = t + 2
    assert x * x.inverse() == R.one()


def test_non_unit_in_t_ring_is_not_invertible():
    R = t_ring(7)
    with pytest.raises(NotInvertible):
        (R.gen() + 1).inverse()


def test_cyclotomic_ring_exists():
    R = cyclotomic_ring(7)
    assert R.gen() ** 14 == R.one()


def test_pf_operator_commutator():
    # [D, X] = X(1 - X)
    D, X = PFOperator.D(), PFOperator.X()
    assert D * X - X * D == PFOperator.scalar([0, 1, -1])


@given(st.lists(small, min_size=1, max_size=5))
def test_pf_apply_agrees_with_composition(f):
    f = [mpq(x.numerator, x.denominator) for x in f]
    D, X = PFOperator.D(), PFOperator.X()
    op = D * D + X * D
    Df = D.apply(f)
    assert poly_trim(op.apply(f)) == poly_trim(poly_add(D.apply(Df), poly_mul([0, 1], Df)))


def test_fraction_inputs_are_accepted():
    s = TruncSeries.from_coeffs([Fraction(1, 2), 1], 2)
    assert s[0] == mpq(1, 2)
