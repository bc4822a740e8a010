"""Uniform pass/fail reports for every exact check."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exact import TruncSeries, rat_str

PASS = "PASS"
FAIL = "FAIL"


@dataclass
class CheckReport:
    """Outcome of one check, valid through ``order``.

    ``first_failure`` names the first mismatch (module, op, coefficient
    index and any other locus keys).  ``payload`` carries computed data and
    is only serialized by reference.
    """

    check_id: str
    status: str
    order: int
    first_failure: dict | None = None
    payload: dict = field(default_factory=dict)
    payload_ref: str | None = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        out = {"check_id": self.check_id, "status": self.status, "order": self.order}
        if self.first_failure is not None:
            out["first_failure"] = _jsonable(self.first_failure)
        out["payload_ref"] = self.payload_ref
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def series_check(check_id: str, module: str, op: str, lhs: TruncSeries, rhs, **payload) -> CheckReport:
    """PASS iff lhs and rhs agree through their common order."""
    if isinstance(rhs, TruncSeries):
        order = min(lhs.order, rhs.order)
    else:
        order = lhs.order
    d = lhs.first_difference(rhs)
    if d is None:
        return CheckReport(check_id, PASS, order, payload=payload)
    return CheckReport(
        check_id, FAIL, order,
        first_failure={"module": module, "op": op, "coefficient": d},
        payload=payload,
    )


def combine(check_id: str, parts: list[CheckReport]) -> CheckReport:
    """PASS iff every part passes; reports the first failing part."""
    order = min((p.order for p in parts), default=0)
    for p in parts:
        if not p.passed:
            ff = dict(p.first_failure or {})
            ff.setdefault("check", p.check_id)
            return CheckReport(check_id, FAIL, order, first_failure=ff, payload={"parts": parts})
    return CheckReport(check_id, PASS, order, payload={"parts": parts})


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    try:
        return rat_str(x)
    except (TypeError, ValueError):
        return str(x)
