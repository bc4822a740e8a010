"""Target constants against independent formulas and quoted values."""

from __future__ import annotations

from math import factorial, prod

import pytest
from gmpy2 import mpq

from msplab.errors import InvalidSpec, UnknownTarget
from msplab.ifun import generators
from msplab.targets import all_targets, check_N, is_odd_prime, narrow_set, target_config

QUOTED = {
    6: (3, 11664, (360, 2772, 5400)),
    8: (2, 65536, (1680, 15808, 30560)),
    10: (1, 800000, (15120, 179520, 410720)),
}


@pytest.mark.parametrize("k", [6, 8, 10])
def test_quoted_constants(k):
    t = target_config(k)
    p_k, r, c = QUOTED[k]
    assert (t.p_k, t.r, t.c_vec) == (p_k, r, c)


@pytest.mark.parametrize("t", all_targets(), ids=lambda t: f"k{t.k}")
def test_constants_from_weights(t):
    assert sum(t.weights) == t.k
    assert t.r == mpq(t.k ** t.k, prod(a ** a for a in t.weights))
    assert t.c_vec[0] == factorial(t.k) // prod(factorial(a) for a in t.weights)


@pytest.mark.parametrize("t", all_targets(), ids=lambda t: f"k{t.k}")
def test_band_constants_are_first_coefficients_of_the_generators(t):
    g = generators(t, 2)
    assert (g.I0[1], g.I11[1], g.I22[1]) == t.c_vec


def test_narrow_and_ordinary_sets():
    assert sorted(target_config(6).narrow) == [1, 2, 4, 5]
    assert sorted(target_config(8).narrow) == [1, 3, 5, 7]
    assert sorted(target_config(10).narrow) == [1, 3, 7, 9]
    for t in all_targets():
        assert len(t.ordinary) == 5 and t.k in t.ordinary
        assert t.narrow == narrow_set(t.weights, t.k)


def test_unknown_target():
    with pytest.raises(UnknownTarget):
        target_config(7)


@pytest.mark.parametrize("n,expected", [(2, False), (3, True), (7, True), (9, False), (11, True), (15, False)])
def test_is_odd_prime(n, expected):
    assert is_odd_prime(n) is expected


@pytest.mark.parametrize("N", [4, 5, 9, 2])
def test_check_N_rejects(N):
    with pytest.raises(InvalidSpec):
        check_N(N)
