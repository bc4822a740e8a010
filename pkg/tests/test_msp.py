"""Genus-zero MSP data: connection, S-matrix, Picard-Fuchs, specialized entries."""

from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from msplab.errors import DepthTooSmall, InvalidSpec, VanishingFactor
from msplab.exact import TruncSeries, poly_eval, primitive_t_ring
from msplab.msp import (band_constants, birkhoff_connection, classical_limit_ok, connection_AM, degree_bound,
                        lemma_degree_bound, pf_check, product_of_weight_differences, rotation_holds, solve_SM,
                        specialize_closed, specialize_from_SM, specialize_recursive, state_pairing,
                        symplectic_check, t_alpha, two_point_W, weight_difference_formula, zeta)
from msplab.targets import all_targets, target_config

TARGETS = all_targets()
N = 7


@pytest.fixture(scope="module")
def sm6():
    return solve_SM(target_config(6), N, 3)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_connection_classical_limit(t):
    assert classical_limit_ok(connection_AM(t, N))


def test_state_pairing_inverse():
    sp = state_pairing(target_config(6), N)
    dim = N + 4
    for i in range(dim):
        for j in range(dim):
            s = sum(sp.eta[i][l] * sp.eta_inv[l][j] for l in range(dim))
            assert s == (1 if i == j else 0)


def test_dual_basis():
    sp = state_pairing(target_config(8), N)
    R = sp.ring
    for j in range(N + 4):
        phi = sp.dual_basis(j)
        for i in range(N + 4):
            assert sp.pair(phi, R.gen_power(i)) == (1 if i == j else 0)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_connection_read_back_from_I_function(t):
    order = 2
    A = connection_AM(t, N)
    derived = birkhoff_connection(t, N, order)
    for key in set(A.entries) | set(derived):
        const, qc = A.entry(*key)
        assert derived.get(key, TruncSeries.constant(0, order)) == TruncSeries.from_coeffs([const, qc], order)


def test_symplectic(sm6):
    assert symplectic_check(sm6).passed


def test_symplectic_detects_a_defect(sm6):
    col = sm6.columns[2].copy()
    col.add_term(3, 1, 5, mpq(1))
    bad = type(sm6)(sm6.t, sm6.N, sm6.order, sm6.zdepth, sm6.columns[:2] + [col] + sm6.columns[3:])
    assert not symplectic_check(bad).passed


def test_zdepth_too_small():
    with pytest.raises(DepthTooSmall):
        solve_SM(target_config(6), N, 3, zdepth=5)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_picard_fuchs(t):
    assert pf_check(t, N, 3).passed


def test_picard_fuchs_fails_with_the_wrong_factor():
    t = target_config(6)
    rep = pf_check(t, N, 2, ordinary={1, 2, 3, 5, 6})
    assert not rep.passed and rep.first_failure["coefficient"] >= 1


def test_band_constants_palindromic():
    for t in TARGETS:
        b = band_constants(t)
        assert b == b[::-1]


@given(st.integers(0, 6), st.integers(0, 6))
def test_t_alpha_is_an_N_th_root_of_unity(a, b):
    ta = t_alpha(N, a)
    assert ta ** N == ta.ring.one()
    assert t_alpha(N, a) == t_alpha(N, a + N)
    assert zeta(N) ** N == zeta(N).ring.one()


@pytest.mark.parametrize("alpha", range(N))
def test_weight_difference_product(alpha):
    R = primitive_t_ring(N)
    assert product_of_weight_differences(N, alpha, R) == weight_difference_formula(N, alpha, R)
    # on the t = -1 factor of t^N + 1 all t_beta coincide, so the product
    # vanishes there and cannot equal N t_alpha^(N-1) in the full ring
    full = product_of_weight_differences(N, alpha)
    assert poly_eval(list(full.coeffs), -1) == 0
    assert full != weight_difference_formula(N, alpha)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_specialized_routes_agree(t):
    order = 3
    S = solve_SM(t, N, order, zdepth=(t.k + N) * order + 10)
    for a in sorted(t.narrow):
        f = specialize_recursive(t, N, a, order)
        assert specialize_closed(t, N, a, order) == f[0]
        for i in range(N + 4):
            assert specialize_from_SM(S, a, i) == f[i], (a, i)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_specialized_first_entry_is_one(t):
    assert specialize_recursive(t, N, 1, 6)[0] == TruncSeries.constant(1, 6)


@given(st.sampled_from([6, 8, 10]), st.integers(1, 30), st.integers(0, N - 1), st.integers(0, N - 1))
def test_specialized_properties(k, a, alpha, beta):
    t = target_config(k)
    if a > 3 * k:
        return
    try:
        fs = specialize_recursive(t, N, a, 5)
    except VanishingFactor:
        assert not t.is_narrow_residue(a)
        return
    for i, f in enumerate(fs):
        assert f.degree() <= degree_bound(t, N, a, i)
        assert f.degree() <= lemma_degree_bound(t, N, a, i)
        assert rotation_holds(f, N, i, alpha, beta)


def test_non_narrow_limit_breaks_the_degree_bound():
    t = target_config(6)
    f0 = specialize_recursive(t, N, 3, 3, allow_limit=True)[0]
    assert f0[1] == 288 and f0.degree() > degree_bound(t, N, 3, 0)


def test_two_point_function_swap_symmetry():
    t = target_config(6)
    S = solve_SM(t, N, 2, zdepth=40)
    W = two_point_W(S, 20)
    assert W
    for (i, j), tab in W.items():
        for (d, s, u), c in tab.items():
            assert W.get((j, i), {}).get((d, u, s), 0) == c


def test_connection_needs_N_at_least_5():
    with pytest.raises(InvalidSpec):
        connection_AM(target_config(6), 3)
