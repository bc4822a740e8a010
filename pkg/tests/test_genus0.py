"""Genus-zero theory of the hypersurfaces."""

from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from msplab.errors import InvalidSpec
from msplab.exact import TruncSeries
from msplab.genus0 import (bps_numbers, genus0_invariants, genus0_potentials_genpoly, genus0_potentials_series,
                           inverse_mirror_map, mirror_map, p_recursion, resolve_i22_reading, s_z_matrix,
                           verify_yukawa_identity)
from msplab.ifun import generators
from msplab.targets import all_targets, target_config

TARGETS = all_targets()

# Classical instanton numbers of the three hypersurfaces (literature values).
BPS = {6: [7884, 6028452, 11900417220], 8: [29504, 128834912, 1423720546880],
       10: [231200, 12215785600, 1700894366474400]}


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_bps_numbers(t):
    rep = genus0_invariants(t, 3)
    assert rep.routes_agree
    assert bps_numbers(rep.invariants) == BPS[t.k]


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_yukawa_identity(t):
    assert verify_yukawa_identity(t, 20).passed


def test_yukawa_identity_detects_a_perturbation():
    t = target_config(6)
    rep = verify_yukawa_identity(t, 10, perturb=TruncSeries.monomial(7, 10, mpq(1, 10 ** 9)))
    assert not rep.passed and rep.first_failure["coefficient"] == 7


def test_i22_reading_verdict():
    out = resolve_i22_reading(target_config(6), 8)
    assert out["chosen"] == "log-prefactor"
    assert not out["literal"]["yukawa"].passed


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_mirror_map_round_trip(t):
    g = generators(t, 10)
    Q = mirror_map(g)
    assert Q[1] == 1
    assert Q.compose(inverse_mirror_map(g)) == TruncSeries.monomial(1, 10)


@pytest.mark.parametrize("t", TARGETS, ids=lambda t: f"k{t.k}")
def test_s_z_connection(t):
    assert s_z_matrix(t, 10).residual_report().passed


@given(st.sampled_from([6, 8, 10]), st.integers(5, 7))
def test_genpoly_and_series_routes_agree(k, n_max):
    t = target_config(k)
    g = generators(t, 14)
    series = genus0_potentials_series(t, n_max, g)
    polys = genus0_potentials_genpoly(n_max)
    assert series[3] == TruncSeries.constant(1, 14)
    for n in range(4, n_max + 1):
        assert polys[n].evaluate(g) == series[n]


def test_p_recursion_rejects_unstable_and_bare_series():
    with pytest.raises(InvalidSpec):
        p_recursion(TruncSeries.constant(1, 3), 0, 2)
    with pytest.raises(InvalidSpec):
        p_recursion(TruncSeries.constant(1, 3), 0, 3)
