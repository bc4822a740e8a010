"""Generator polynomials and membership certificates."""

from __future__ import annotations

import json

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from msplab.errors import InsufficientOrder, InvalidSpec
from msplab.ifun import generators
from msplab.membership import (WITNESS_SERIES, GenPoly, MembershipCertificate, b4_relation, dclosure_witnesses,
                               find_polynomial, gp, monomial_count, monomials, named_series, search_polynomial)
from msplab.targets import all_targets, target_config

GENS = {t.k: generators(t, 30) for t in all_targets()}

exps = st.tuples(*[st.integers(0, 2)] * 5)
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=7).map(lambda f: mpq(f.numerator, f.denominator))
low_exps = st.sampled_from(monomials(2))
low_polys = st.lists(st.tuples(low_exps, coeff), min_size=1, max_size=4).map(
    lambda terms: sum((GenPoly.from_exponents(e, c) for e, c in terms), GenPoly()))
core_polys = st.lists(st.tuples(exps, coeff), min_size=1, max_size=4).map(
    lambda terms: sum((GenPoly.from_exponents(e, c) for e, c in terms), GenPoly()))


@given(core_polys, core_polys)
def test_evaluate_is_a_ring_map(P, Q):
    g = GENS[6]
    assert (P * Q).evaluate(g) == P.evaluate(g) * Q.evaluate(g)
    assert (P + Q).evaluate(g) == P.evaluate(g) + Q.evaluate(g)


@given(core_polys, core_polys)
def test_symbolic_D_is_a_derivation(P, Q):
    assert (P * Q).D() == P.D() * Q + P * Q.D()


@pytest.mark.parametrize("name", ["A", "B", "B2", "B3", "Y"])
def test_symbolic_D_matches_series_D(name):
    for k, g in GENS.items():
        assert gp(name).D().evaluate(g) == named_series(name, g).D()


def test_b4_relation_holds_on_series():
    for k, g in GENS.items():
        assert b4_relation(target_config(k)).evaluate(g) == g.B_m(4)


def test_monomial_counts():
    assert monomial_count(2) == 21 == len(monomials(2))
    assert monomial_count(4) == 126


@pytest.mark.parametrize("k", [6, 8, 10])
def test_dclosure_witnesses(k):
    g = GENS[k]
    certs = dclosure_witnesses(g, max_degree=4, guard=8)
    assert set(certs) == set(WITNESS_SERIES)
    for name, cert in certs.items():
        assert cert.certified, name
        assert cert.verify(named_series(name, g), g)


@given(low_polys)
def test_solver_recovers_a_planted_polynomial(P):
    g = GENS[8]
    cert = find_polynomial(P.evaluate(g), g, 2, guard=8)
    assert cert.certified
    assert cert.poly.evaluate(g) == P.evaluate(g)


def test_solver_refutes_a_non_member():
    g = GENS[6]
    s = g.I0
    cert = search_polynomial(s, g, 2, guard=8)
    assert not cert.certified


def test_insufficient_order():
    g = generators(target_config(6), 10)
    with pytest.raises(InsufficientOrder):
        find_polynomial(g.A, g, 2, guard=8)


def test_certificate_json_round_trip():
    g = GENS[6]
    cert = find_polynomial(named_series("DA", g), g, 2)
    back = MembershipCertificate.from_dict(json.loads(cert.to_json()))
    assert back.poly == cert.poly and back.status == cert.status
    assert back.verify(named_series("DA", g), g)


def test_named_series_rejects_unknown():
    with pytest.raises(InvalidSpec):
        named_series("Z9", GENS[6])
