"""The ten acceptance criteria, one printed PASS/FAIL line each.

All arithmetic is exact, so every tolerance is zero: a PASS means
coefficient-wise equality through the stated order.
"""

from __future__ import annotations

import time

import pytest

from msplab.suite import CRITERIA, SuiteParams, specialized_all, criterion_lemma_bound, criterion_specialized

# Runtime budgets in seconds.
BUDGET = {
    "AC1-yukawa": 5, "AC2-zagier-zinger": 30, "AC3-mirror-symplectic": 120, "AC4-picard-fuchs": 60,
    "AC5-specialized-entries": 120, "AC6-level1-tower": 60, "AC7-tail-constants": 30, "AC8-level0": 300,
    "AC9-finite-generation": 120, "AC10-degree-bound": 120,
}

_SPECIALIZED: list = []


def _run(fn):
    if fn in (criterion_specialized, criterion_lemma_bound):
        if not _SPECIALIZED:
            _SPECIALIZED.append(specialized_all(SuiteParams()))
        return fn(SuiteParams(), _SPECIALIZED[0])
    return fn(SuiteParams())


@pytest.mark.parametrize("cid,title,fn", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(cid, title, fn, capsys):
    start = time.perf_counter()
    rep = _run(fn)
    seconds = time.perf_counter() - start
    line = f"[acceptance] {cid}: {rep.status} ({title}; exact, through order {rep.order}; {seconds:.2f}s)"
    if rep.first_failure:
        line += f" first failure: {rep.to_dict()['first_failure']}"
    with capsys.disabled():
        print("\n" + line)
        for note in rep.notes:
            print(f"[acceptance]   {note}")
    assert rep.check_id == cid
    assert rep.passed, rep.first_failure
    assert seconds < BUDGET[cid]
