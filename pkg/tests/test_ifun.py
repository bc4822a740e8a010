"""I-functions and generator series."""

from __future__ import annotations

from math import factorial, prod

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from msplab.errors import InvalidSpec
from msplab.exact import TruncSeries
from msplab.ifun import I22_READINGS, default_zdepth, generators, msp_ifunction, z_ifunction, z_ifunction_terms
from msplab.targets import all_targets, target_config

TARGETS = all_targets()


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_I0_is_the_factorial_ratio(t):
    I = z_ifunction(t, 12)
    for d in range(13):
        assert I.I0[d] == factorial(t.k * d) // prod(factorial(a * d) for a in t.weights)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_I1_from_harmonic_numbers(t):
    # d/du of the q^d term at u = 0: coefficient times (k H_{kd} - sum a_i H_{a_i d}).
    I = z_ifunction(t, 6)

    def H(n):
        return sum(mpq(1, m) for m in range(1, n + 1))

    for d in range(7):
        expected = I.I0[d] * (t.k * H(t.k * d) - sum(a * H(a * d) for a in t.weights))
        assert I.I1[d] == expected


def test_I11_first_coefficient_is_2772():
    assert generators(target_config(6), 3).I11[1] == 2772


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_generator_definitions(t):
    g = generators(t, 10)
    assert g.B == g.I0.D() / g.I0
    assert g.A == g.I11.D() / g.I11
    assert g.B2 == g.I0.D().D() / g.I0
    assert g.Y == TruncSeries.geometric(t.r, 10)
    assert g.I11 == 1 + (g.I.I1 / g.I0).D()


def test_i22_readings_differ_by_one():
    t = target_config(6)
    a = generators(t, 8, "literal")
    b = generators(t, 8, "log-prefactor")
    assert b.I22 == a.I22 + 1
    assert a.I22[0] == 0 and b.I22[0] == 1
    assert set(I22_READINGS) == {"literal", "log-prefactor"}
    with pytest.raises(InvalidSpec):
        generators(t, 8, "other")


@given(st.integers(1, 10))
def test_terms_are_polynomials_in_u_with_unit_constant_at_degree_zero(order):
    terms = z_ifunction_terms(target_config(8), order)
    assert terms[0] == [1, 0, 0, 0]
    assert len(terms) == order + 1


def test_msp_ifunction_first_degree():
    t = target_config(6)
    N = 7
    I = msp_ifunction(t, N, 2)
    assert I.coefficient(0, 0, 0) == 1
    # q^1 p^0: +360 at w^N and -360 at w^(2N)
    assert I.coefficient(0, 1, N) == 360
    assert I.coefficient(0, 1, 2 * N) == -360
    assert all(I.coefficient(0, 1, e) == 0 for e in range(N))


@given(st.integers(7, 13), st.integers(1, 6))
def test_default_zdepth_holds_the_top_degree(N, order):
    assert default_zdepth(N, order) == N * order + 1


def test_msp_grading():
    t = target_config(6)
    N = 7
    I = msp_ifunction(t, N, 3)
    for (i, d, e), c in I.series.terms.items():
        assert (i - e) % N == 0, (i, d, e)
