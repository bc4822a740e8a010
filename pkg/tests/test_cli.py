"""Command-line surface: exit codes, formats, config files, determinism."""

from __future__ import annotations

import csv
import io
import json

import pytest

from msplab.cli import EXIT_FAIL, EXIT_INVALID, EXIT_OK, main, parse_job, run
from msplab.suite import CHECK_IDS


def test_yukawa_verify_k8():
    code, out = run(["yukawa-verify", "--k", "8", "--order", "25"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["status"] == "PASS" and doc["order"] == 25
    assert set(doc) >= {"check_id", "status", "order", "payload_ref"}


def test_generators_csv():
    code, out = run(["generators", "--k", "6", "--order", "3", "--series", "I0", "--format", "csv"])
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["d", "numerator", "denominator"]
    assert rows[2] == ["1", "360", "1"]


def test_gw0_table():
    code, out = run(["gw0", "--k", "6", "--order", "2"])
    assert code == EXIT_OK
    assert json.loads(out)["data"]["N0d"][1:] == ["7884/1", "12058875/2"]


def test_membership_certificate():
    code, out = run(["membership", "--series", "DB3", "--degree", "4"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["certificate"]["status"] == "certified"
    assert doc["certificate"]["guard_order"] == 8


def test_membership_failure_exit_code():
    code, out = run(["membership", "--series", "B", "--degree", "0", "--order", "12"])
    assert code == EXIT_FAIL
    assert json.loads(out)["first_failure"]["series"] == "B"


@pytest.mark.parametrize("argv", [
    ["yukawa-verify", "--k", "7"],
    ["pf-check", "--N", "9"],
    ["rmatrix", "--level", "2", "--N", "7"],
    ["membership"],
    ["smatrix", "--N", "7", "--specialize", "1,2"],
    ["nonsense"],
    ["yukawa-verify", "--order", "0"],
])
def test_invalid_spec_exit_3(argv):
    code, out = run(argv)
    assert code == EXIT_INVALID
    assert json.loads(out)["error"] == "invalid spec"


def test_assertion_failure_exit_2():
    # degree 1 is too small to certify DB3
    code, _ = run(["membership", "--series", "DB3", "--degree", "1"])
    assert code == EXIT_FAIL


def test_text_and_level_commands():
    code, out = run(["rmatrix", "--level", "1", "--N", "7", "--format", "text"])
    assert code == EXIT_OK and "r1: 305/252, -51/28" in out
    code, out = run(["delta-compare", "--N", "7", "--k", "10", "--format", "text"])
    assert code == EXIT_OK and "matching reading: k" in out
    code, _ = run(["tail-constants", "--k", "8"])
    assert code == EXIT_OK
    code, _ = run(["zz-verify", "--k", "8", "--order", "15"])
    assert code == EXIT_OK
    code, _ = run(["pf-check", "--N", "7", "--order", "2"])
    assert code == EXIT_OK


def test_smatrix_and_specialize():
    code, _ = run(["smatrix", "--N", "7", "--order", "2"])
    assert code == EXIT_OK
    code, out = run(["smatrix", "--N", "7", "--order", "4", "--specialize", "1,0,0"])
    assert code == EXIT_OK
    assert json.loads(out)["data"]["f0"] == ["1/1", "0/1", "0/1", "0/1", "0/1"]


def test_rmatrix_level0():
    code, _ = run(["rmatrix", "--level", "0", "--N", "7", "--order", "12"])
    assert code == EXIT_OK


def test_config_file_overrides_defaults(tmp_path):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("# defaults\nk = 10\norder=5\nformat = text\n")
    job = parse_job(["yukawa-verify", "--config", str(cfg)])
    assert (job.k, job.order, job.out_format) == (10, 5, "text")
    job = parse_job(["yukawa-verify", "--config", str(cfg), "--order", "7"])
    assert job.order == 7
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(["yukawa-verify", "--config", str(bad)])[0] == EXIT_INVALID


def test_defaults():
    job = parse_job(["pf-check"])
    assert (job.N, job.order, job.k) == (11, 20, 6)


def test_verify_all_is_deterministic_and_complete(tmp_path):
    argv = ["verify-all", "--k", "6", "--N", "7", "--order", "12"]
    code1, out1 = run(argv)
    code2, out2 = run(argv + ["--cache-dir", str(tmp_path)])
    code3, out3 = run(argv + ["--cache-dir", str(tmp_path)])
    assert code1 == code2 == code3 == EXIT_OK
    assert out2 == out3
    doc = json.loads(out1)
    assert [r["check_id"] for r in doc] == list(CHECK_IDS)
    assert all(r["status"] == "PASS" for r in doc)


def test_verify_all_worker_pool_matches_serial():
    argv = ["verify-all", "--k", "10", "--N", "7", "--order", "8"]
    assert run(argv) == run(argv + ["--jobs", "2"])


def test_main_writes_stdout(capsys):
    assert main(["yukawa-verify", "--order", "5", "--format", "text"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
