"""Report objects and their JSON form."""

from __future__ import annotations

import json

from gmpy2 import mpq

from msplab.exact import TruncSeries
from msplab.report import FAIL, PASS, CheckReport, combine, series_check


def test_series_check_reports_first_difference():
    a = TruncSeries.from_coeffs([1, 2, 3, 4], 3)
    b = TruncSeries.from_coeffs([1, 2, 5, 4], 3)
    rep = series_check("x", "mod", "op", a, b)
    assert rep.status == FAIL
    assert rep.first_failure == {"module": "mod", "op": "op", "coefficient": 2}
    assert series_check("x", "mod", "op", a, a).status == PASS


def test_combine_keeps_the_first_failure_and_smallest_order():
    ok = CheckReport("a", PASS, 10)
    bad = CheckReport("b", FAIL, 7, first_failure={"coefficient": 3})
    rep = combine("all", [ok, bad, CheckReport("c", FAIL, 9, first_failure={"coefficient": 1})])
    assert rep.status == FAIL and rep.order == 7
    assert rep.first_failure == {"coefficient": 3, "check": "b"}


def test_json_is_sorted_and_rational_safe():
    rep = CheckReport("a", FAIL, 3, first_failure={"value": mpq(-2, 6)})
    doc = json.loads(rep.to_json())
    assert doc["first_failure"]["value"] == "-1/3"
    assert list(doc) == sorted(doc)
