"""R-matrix at the isolated fixed points."""

from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from msplab import level1
from msplab.errors import InvalidSpec, NonUniqueSolution
from msplab.exact import PFOperator, poly_sub, poly_trim, primitive_t_ring
from msplab.level1 import (PF2_CONSTANTS, TAIL_CONSTANTS, bernoulli, delta_coefficients, delta_compare, degree,
                           level1_degree_report, level1_wrap_report, pf2_constant, pf_expand, pf_expansion_report,
                           r_entries_level1, root_difference_sums, solve_r_tower, tail_closed_form, tail_constants,
                           tail_series, tilde, tower_report, x_to_y, y_to_x)
from msplab.targets import all_targets, target_config

TARGETS = all_targets()
PRIMES = [7, 11, 13, 17, 19, 23]


def test_bernoulli_numbers():
    B = bernoulli(10)
    assert B[:3] == [1, mpq(-1, 2), mpq(1, 6)]
    assert (B[4], B[6], B[8], B[10]) == (mpq(-1, 30), mpq(1, 42), mpq(-1, 30), mpq(5, 66))
    assert all(B[n] == 0 for n in (3, 5, 7, 9))


@pytest.mark.parametrize("N", [7, 11])
def test_root_difference_sums_by_brute_force(N):
    # sum over the nontrivial N-th roots w of (w - 1)^(-n), with w = t^(2j) in Q[t]/Phi_2N
    R = primitive_t_ring(N)
    S = root_difference_sums(N, 5)
    for n in range(1, 6):
        acc = R.zero()
        for j in range(1, N):
            acc = acc + (R.gen_power(2 * j) - R.one()).inverse() ** n
        assert acc == R.scalar(S[n - 1])


def test_first_root_difference_sum():
    # sum 1/(w - 1) = -(N - 1)/2
    for N in PRIMES:
        assert root_difference_sums(N, 1)[0] == mpq(-(N - 1), 2)


@given(st.lists(st.fractions(max_denominator=5, min_value=-4, max_value=4), min_size=1, max_size=5))
def test_x_y_substitution_is_an_involution(f):
    f = [mpq(x.numerator, x.denominator) for x in f]
    assert poly_trim(x_to_y(y_to_x(f))) == poly_trim(f)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
@pytest.mark.parametrize("N", [7, 11, 13])
def test_pf_expansion(t, N):
    assert pf_expansion_report(t, N).passed


@pytest.mark.parametrize("N", PRIMES)
def test_first_order_operator(N):
    pf = pf_expand(target_config(8), N, 1)
    assert pf[0] == PFOperator()
    assert pf[1] == PFOperator({1: [N], 0: [0, mpq(N + 3, 2)]})
    assert tilde(pf[1], N) == PFOperator({1: [N]})


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
@pytest.mark.parametrize("N", [7, 11, 13])
def test_pf2_constants(t, N):
    assert pf2_constant(t, N) == PF2_CONSTANTS[t.k]


def test_quoted_pf2_constants():
    assert PF2_CONSTANTS == {6: mpq(41, 18), 8: mpq(217, 96), 10: mpq(133, 60)}
    assert TAIL_CONSTANTS == {6: mpq(23, 72), 8: mpq(29, 96), 10: mpq(31, 120)}


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
@pytest.mark.parametrize("N", [7, 11])
def test_tower_degrees(t, N):
    tower = solve_r_tower(t, N, min(6, N - 1))
    rep = tower_report(tower)
    assert rep.passed
    assert max(tower.degrees()) <= t.k


def test_first_tower_entry():
    tower = solve_r_tower(target_config(6), 7, 1)
    assert tower.r[1] == [mpq(305, 252), mpq(-51, 28)]
    # the value at Y = 0 is not zero
    assert tower.boundary_values()[1] == mpq(305, 252)


@given(st.sampled_from([6, 8, 10]), st.sampled_from(PRIMES), st.integers(1, 4))
def test_tower_solves_its_equation(k, N, m):
    tower = solve_r_tower(target_config(k), N, m)
    op = PFOperator({1: [N], 0: [0, -m]})
    assert poly_trim(poly_sub(x_to_y(op.apply(y_to_x(tower.r[m]))), tower.sources[m])) == []
    assert degree(tower.r[m]) == m


def test_tower_window():
    with pytest.raises(NonUniqueSolution):
        solve_r_tower(target_config(6), 7, 7)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
@pytest.mark.parametrize("N", [7, 11, 13])
def test_delta_compare_picks_reading_k(t, N):
    rep = delta_compare(t, N, 4)
    assert rep.passed
    assert rep.payload["reading"] == "k"
    assert rep.payload["first_mismatch"]["r"] == 1


def test_delta_reading_validation():
    with pytest.raises(InvalidSpec):
        delta_coefficients(target_config(6), 7, 2, "x")


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
@pytest.mark.parametrize("N", [7, 11])
def test_level1_entries(t, N):
    assert level1_degree_report(t, N, 4).passed
    assert level1_wrap_report(t, N, 4).passed
    E = r_entries_level1(t, N, N + 3, 2)
    assert E[(0, 0)] == [1]


def test_wrap_check_detects_a_flipped_band(monkeypatch):
    t = target_config(6)
    original = level1.level1_band
    monkeypatch.setattr(level1, "level1_band", lambda t, N: [-c for c in original(t, N)])
    assert not level1_wrap_report(t, 7, 3).passed


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_tail_constants(t):
    assert tail_constants(t).passed


@given(st.sampled_from([6, 8, 10]), st.sampled_from(PRIMES + [29, 31]))
def test_tail_closed_form_is_minus_r1(k, N):
    t = target_config(k)
    tower = solve_r_tower(t, N, 1)
    assert poly_trim(tail_series(tower)[2]) == poly_trim(tail_closed_form(t, N))
