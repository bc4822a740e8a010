"""The operator M on the hypergeometric series and the tower I_0..I_4."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from msplab.errors import InvalidSpec
from msplab.exact import TruncSeries
from msplab.ifun import generators, z_ifunction
from msplab.targets import all_targets, target_config
from msplab.zagier_zinger import (M_operator, WSeries, cross_check_generators, f_series, ip_tower,
                                  sextic_display_report, verify_zz)

TARGETS = all_targets()


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_identities(t):
    tower = ip_tower(t, 20)
    assert verify_zz(t, 20, tower).passed
    assert cross_check_generators(t, 20, tower).passed


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_F_at_w_zero_is_I0(t):
    assert f_series(t, 10, 3).at_zero() == z_ifunction(t, 10).I0


def test_sextic_display_form():
    assert sextic_display_report(5, 7).passed


@given(st.sampled_from([6, 8, 10]), st.integers(2, 12))
def test_tower_product_property(k, order):
    t = target_config(k)
    tower = ip_tower(t, order)
    prod = tower[0]
    for s in tower[1:]:
        prod = prod * s
    assert prod == TruncSeries.geometric(t.r, order)
    assert tower[1] == tower[3]


def test_verify_detects_a_perturbed_tower():
    t = target_config(6)
    tower = ip_tower(t, 10)
    tower[3] = tower[3] + TruncSeries.monomial(4, 10)
    rep = verify_zz(t, 10, tower)
    assert not rep.passed and rep.first_failure["coefficient"] == 4


def test_w_window_exhausted():
    F = f_series(target_config(6), 4, 1)
    with pytest.raises(InvalidSpec):
        M_operator(F)


def test_M_on_a_w_independent_series_is_one():
    x = TruncSeries.from_coeffs([1, 2, 3], 2)
    F = WSeries([x, TruncSeries.constant(0, 2)])
    out = M_operator(F)
    assert out.cols[0] == TruncSeries.constant(1, 2)


def test_generators_agree_with_tower_for_k8():
    t = target_config(8)
    g = generators(t, 12)
    tower = ip_tower(t, 12)
    assert tower[2] == g.I22
