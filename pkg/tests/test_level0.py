"""R-matrix restricted to the hypersurface."""

from __future__ import annotations

import pytest

from msplab.errors import InvalidSpec
from msplab.exact import TruncSeries
from msplab.ifun import generators
from msplab.level0 import (basis_scales, entries_from_direct, level0_dual_route_report, level0_membership,
                           level0_R_direct, level0_window_report, log_derivative_constants,
                           log_derivative_genpolys, membership_report, r_entries_level0, surviving_entries,
                           vanishing_report)
from msplab.targets import all_targets, target_config

ORDER = 14
CASES = [(6, 7), (8, 11), (10, 7), (6, 13)]


@pytest.fixture(scope="module", params=CASES, ids=lambda c: f"k{c[0]}-N{c[1]}")
def case(request):
    k, N = request.param
    t = target_config(k)
    g = generators(t, ORDER)
    R = level0_R_direct(t, N, ORDER, gens=g, check=False)
    m_max = min(4, N - 4)
    E = r_entries_level0(t, N, m_max, ORDER, g, check=False)
    return t, N, g, R, E, m_max


def test_windows(case):
    t, N, g, R, E, m_max = case
    assert level0_window_report(R).passed


def test_windows_are_tight(case):
    # column 0 is I0 only through z^(N-4); its z^(N-3) part is nonzero
    t, N, g, R, E, m_max = case
    assert any(not R.coefficient(0, i, N - 3).is_zero() for i in range(4))


def test_vanishing_pattern(case):
    t, N, g, R, E, m_max = case
    assert vanishing_report(E, N, ORDER, t.k).passed


def test_dual_route(case):
    t, N, g, R, E, m_max = case
    assert level0_dual_route_report(t, N, m_max, ORDER, R, E).passed


def test_direct_route_normalization(case):
    t, N, g, R, E, m_max = case
    D = entries_from_direct(R, m_max)
    one = TruncSeries.constant(1, ORDER)
    for b in range(4):
        assert D[(0, b, b)] == one


def test_membership(case):
    t, N, g, R, E, m_max = case
    certs = level0_membership(t, N, m_max, ORDER, 6, g, E)
    assert set(certs) == set(surviving_entries(N, m_max))
    assert membership_report(certs, N, ORDER, t.k).passed


@pytest.mark.parametrize("t", all_targets(), ids=lambda t: f"k{t.k}")
def test_log_derivative_constants_in_the_generators(t):
    g = generators(t, 12)
    for P, s in zip(log_derivative_genpolys(), log_derivative_constants(g)):
        assert P.evaluate(g) == s
    # I0^2 I11^2 I22 = Y makes the third scale Y / (I0 I11)
    assert basis_scales(g)[2] == g.Y / (g.I0 * g.I11)


def test_m_max_window():
    t = target_config(6)
    with pytest.raises(InvalidSpec):
        r_entries_level0(t, 7, 4, 6)


def test_vanishing_report_flags_an_off_class_entry(case):
    t, N, g, R, E, m_max = case
    bad = dict(E)
    bad[(1, 3, 0)] = TruncSeries.monomial(2, ORDER)
    rep = vanishing_report(bad, N, ORDER, t.k)
    assert not rep.passed and rep.first_failure["coefficient"] == 2
