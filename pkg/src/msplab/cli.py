"""Command-line interface: ``msplab <command> [options]``.

Exit codes: 0 when every requested assertion passes, 2 on an assertion
failure (the report names the first failure), 3 on an invalid request.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .cache import Cache, cached_generators, open_cache
from .errors import CheckFailed, InvalidSpec, MsplabError
from .exact import TruncSeries, poly_trim, rat_str
from .genus0 import genus0_invariants, verify_yukawa_identity
from .level1 import delta_compare, level1_degree_report, level1_wrap_report, solve_r_tower, tail_constants, tower_report
from .membership import named_series, search_polynomial
from .msp import (degree_bound, pf_check, rotation_holds, solve_SM, specialize_closed, specialize_recursive,
                  symplectic_check)
from .report import FAIL, PASS, CheckReport, combine
from .suite import CHECK_IDS, SuiteParams, level0_report, run_suite
from .targets import check_N, target_config
from .zagier_zinger import cross_check_generators, ip_tower, verify_zz

COMMANDS = ("generators", "gw0", "yukawa-verify", "smatrix", "pf-check", "rmatrix", "delta-compare",
            "tail-constants", "membership", "zz-verify", "verify-all")
FORMATS = ("json", "csv", "text")
DEFAULTS = {"k": 6, "N": 11, "order": 20, "zdepth": None, "format": "json", "cache_dir": None}
MEMBERSHIP_DEFAULT_ORDER = 30
CONFIG_KEYS = {"k": int, "N": int, "order": int, "zdepth": int, "format": str, "cache_dir": str}

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 2, 3


@dataclass(frozen=True)
class JobSpec:
    command: str
    k: int | None
    N: int
    order: int
    zdepth: int | None
    out_format: str
    cache_dir: str | None
    explicit: frozenset = frozenset()
    level: int = 1
    specialize: tuple | None = None
    series: str | None = None
    degree: int = 4
    guard: int = 8
    jobs: int = 1

    def validate(self) -> "JobSpec":
        if self.command not in COMMANDS:
            raise InvalidSpec(f"unknown command {self.command!r}")
        if self.k is not None:
            target_config(self.k)
        if self.order < 1:
            raise InvalidSpec("order must be positive")
        if self.zdepth is not None and self.zdepth < 1:
            raise InvalidSpec("zdepth must be positive")
        if self.out_format not in FORMATS:
            raise InvalidSpec(f"format must be one of {FORMATS}")
        if self.command in ("smatrix", "pf-check", "rmatrix", "delta-compare") or "N" in self.explicit:
            check_N(self.N)
        if self.command == "rmatrix" and self.level not in (0, 1):
            raise InvalidSpec("--level must be 0 or 1")
        if self.command == "membership" and not self.series:
            raise InvalidSpec("membership needs --series")
        if self.degree < 0 or self.guard < 0 or self.jobs < 1:
            raise InvalidSpec("degree, guard and jobs must be nonnegative (jobs positive)")
        return self


@dataclass
class Outcome:
    """Reports plus an optional table {series name: TruncSeries or list}."""

    reports: list
    tables: dict | None = None
    extra: dict | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidSpec(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="msplab", description="Exact checks for MSP genus-zero data and R-matrices.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--k", type=int, choices=(6, 8, 10))
    p.add_argument("--N", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--zdepth", type=int)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--config", help="key=value file overriding the defaults")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--specialize", help="a,i,alpha")
    p.add_argument("--series", help="named series (membership) or table column (generators)")
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--guard", type=int, default=8)
    p.add_argument("--jobs", type=int, default=1)
    return p


def read_config(path: str) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidSpec(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidSpec(f"config line {n}: expected key=value")
        key, val = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise InvalidSpec(f"config line {n}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](val)
        except ValueError as exc:
            raise InvalidSpec(f"config line {n}: bad value for {key}") from exc
    return out


def parse_job(argv: list) -> JobSpec:
    ns = build_parser().parse_args(argv)
    merged = dict(DEFAULTS)
    explicit = set()
    if ns.config:
        cfg = read_config(ns.config)
        merged.update(cfg)
        explicit |= set(cfg)
    for key in DEFAULTS:
        v = getattr(ns, key)
        if v is not None:
            merged[key] = v
            explicit.add(key)
    if ns.command == "membership" and "order" not in explicit:
        merged["order"] = MEMBERSHIP_DEFAULT_ORDER
    spec = None
    if ns.specialize:
        try:
            spec = tuple(int(x) for x in ns.specialize.split(","))
        except ValueError as exc:
            raise InvalidSpec("--specialize expects a,i,alpha") from exc
        if len(spec) != 3:
            raise InvalidSpec("--specialize expects a,i,alpha")
    k = merged["k"] if (ns.command != "verify-all" or "k" in explicit) else None
    return JobSpec(ns.command, k, merged["N"], merged["order"], merged["zdepth"], merged["format"],
                   merged["cache_dir"], frozenset(explicit), ns.level, spec, ns.series, ns.degree, ns.guard,
                   ns.jobs).validate()


# ---------------------------------------------------------------------------
# commands


def _gens(job: JobSpec, cache: Cache | None, order: int | None = None):
    return cached_generators(target_config(job.k), order or job.order, cache)


def cmd_generators(job: JobSpec, cache) -> Outcome:
    g, ref = _gens(job, cache)
    tables = {"I0": g.I0, "I11": g.I11, "I22": g.I22, "J1": g.J1, "J2": g.J2, "J3": g.J3, "Y": g.Y}
    if job.series:
        if job.series not in tables:
            raise InvalidSpec(f"unknown generator {job.series!r}; expected one of {sorted(tables)}")
        tables = {job.series: tables[job.series]}
    rep = CheckReport(f"generators-k{job.k}", PASS, job.order, payload_ref=ref)
    return Outcome([rep], tables)


def cmd_gw0(job: JobSpec, cache) -> Outcome:
    g, ref = _gens(job, cache, max(job.order, 2))
    out = genus0_invariants(target_config(job.k), job.order, g)
    cid = f"gw0-k{job.k}"
    if out.routes_agree:
        rep = CheckReport(cid, PASS, job.order, payload_ref=ref)
    else:
        d = next(i for i, (a, b) in enumerate(zip(out.invariants, out.invariants_jfunction), 1) if a != b)
        rep = CheckReport(cid, FAIL, job.order, payload_ref=ref,
                          first_failure={"module": "gw-genus0", "op": "genus0_invariants", "coefficient": d})
    return Outcome([rep], {"N0d": [None] + out.invariants})


def cmd_yukawa(job: JobSpec, cache) -> Outcome:
    g, ref = _gens(job, cache)
    rep = verify_yukawa_identity(target_config(job.k), job.order, g)
    rep.payload_ref = ref
    return Outcome([rep])


def cmd_smatrix(job: JobSpec, cache) -> Outcome:
    t = target_config(job.k)
    if job.specialize is None:
        S = solve_SM(t, job.N, job.order, job.zdepth)
        rep = symplectic_check(S)
        rep.check_id = f"smatrix-k{t.k}-N{job.N}"
        return Outcome([rep])
    a, i, alpha = job.specialize
    if not (1 <= a and 0 <= i < job.N + 4):
        raise InvalidSpec(f"need a >= 1 and 0 <= i < {job.N + 4}")
    fs = specialize_recursive(t, job.N, a, job.order)
    f = fs[i]
    cid = f"specialized-k{t.k}-N{job.N}-a{a}-i{i}"
    parts = [CheckReport(f"{cid}-degree", PASS if f.degree() <= degree_bound(t, job.N, a, i) else FAIL, job.order,
                         first_failure=None if f.degree() <= degree_bound(t, job.N, a, i) else
                         {"module": "msp-genus0", "op": "degree_bound", "coefficient": f.degree()})]
    rot = all(rotation_holds(f, job.N, i, alpha, b) for b in range(job.N))
    parts.append(CheckReport(f"{cid}-rotation", PASS if rot else FAIL, job.order,
                             first_failure=None if rot else {"module": "msp-genus0", "op": "rotation_holds",
                                                             "alpha": alpha}))
    if i == 0:
        d = specialize_closed(t, job.N, a, job.order).first_difference(f)
        parts.append(CheckReport(f"{cid}-closed", PASS if d is None else FAIL, job.order,
                                 first_failure=None if d is None else {"module": "msp-genus0",
                                                                       "op": "specialize_closed", "coefficient": d}))
    rep = combine(cid, parts)
    power = (2 * alpha + 1) * i
    rep.notes = [f"S^{alpha}_{{{a};{i}}} = (-1)^{i} t^{power} times the series below, t^{job.N} = -1"]
    return Outcome([rep], {f"f{i}": f})


def cmd_pf(job: JobSpec, cache) -> Outcome:
    return Outcome([pf_check(target_config(job.k), job.N, job.order, job.zdepth)])


def cmd_rmatrix(job: JobSpec, cache) -> Outcome:
    t = target_config(job.k)
    if job.level == 0:
        g, ref = _gens(job, cache)
        rep = level0_report(t, job.N, job.order, g)
        rep.payload_ref = ref
        return Outcome([rep])
    m_max = min(6, job.N - 1)
    tower = solve_r_tower(t, job.N, m_max)
    reps = [tower_report(tower), level1_degree_report(t, job.N, min(4, m_max), tower),
            level1_wrap_report(t, job.N, min(4, m_max), tower)]
    tables = {f"r{m}": poly_trim(r) or [0] for m, r in enumerate(tower.r)}
    return Outcome([combine(f"rmatrix-level1-k{t.k}-N{job.N}", reps)], tables)


def cmd_delta(job: JobSpec, cache) -> Outcome:
    return Outcome([delta_compare(target_config(job.k), job.N, 4)])


def cmd_tail(job: JobSpec, cache) -> Outcome:
    return Outcome([tail_constants(target_config(job.k))])


def cmd_membership(job: JobSpec, cache) -> Outcome:
    t = target_config(job.k)
    g, ref = _gens(job, cache)
    cert = search_polynomial(named_series(job.series, g), g, job.degree, job.guard)
    cid = f"membership-{job.series}-k{t.k}"
    rep = CheckReport(cid, PASS if cert.certified else FAIL, job.order, payload_ref=ref,
                      first_failure=None if cert.certified else {"module": "membership", "op": "search_polynomial",
                                                                  "series": job.series, "status": cert.status})
    return Outcome([rep], extra={"certificate": cert.to_dict()})


def cmd_zz(job: JobSpec, cache) -> Outcome:
    t = target_config(job.k)
    g, ref = _gens(job, cache)
    tower = ip_tower(t, job.order)
    reps = [verify_zz(t, job.order, tower), cross_check_generators(t, job.order, tower, g)]
    for r in reps:
        r.payload_ref = ref
    return Outcome(reps)


def _run_one(args: tuple) -> CheckReport:
    params, cid = args
    return run_suite(params, only=(cid,))[0]


def cmd_verify_all(job: JobSpec, cache) -> Outcome:
    params = SuiteParams(ks=(job.k,) if job.k is not None else None,
                         N=job.N if "N" in job.explicit else None,
                         order=job.order if "order" in job.explicit else None,
                         cache_dir=str(cache.root) if cache is not None else None)
    if job.jobs > 1:
        with ProcessPoolExecutor(max_workers=job.jobs) as pool:
            reports = list(pool.map(_run_one, [(params, cid) for cid in CHECK_IDS]))
    else:
        reports = run_suite(params)
    return Outcome(reports)


HANDLERS = {
    "generators": cmd_generators, "gw0": cmd_gw0, "yukawa-verify": cmd_yukawa, "smatrix": cmd_smatrix,
    "pf-check": cmd_pf, "rmatrix": cmd_rmatrix, "delta-compare": cmd_delta, "tail-constants": cmd_tail,
    "membership": cmd_membership, "zz-verify": cmd_zz, "verify-all": cmd_verify_all,
}


# ---------------------------------------------------------------------------
# output


def _coeffs(v) -> list:
    return list(v.coeffs) if isinstance(v, TruncSeries) else list(v)


def render(job: JobSpec, out: Outcome) -> str:
    if job.out_format == "json":
        doc = [r.to_dict() for r in out.reports]
        body = doc[0] if len(doc) == 1 and job.command != "verify-all" else doc
        if isinstance(body, dict):
            if out.tables:
                body["data"] = {name: [rat_str(c) if c is not None else None for c in _coeffs(v)]
                                for name, v in out.tables.items()}
            if out.extra:
                body.update(out.extra)
        return json.dumps(body, sort_keys=True, indent=1) + "\n"
    if job.out_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if out.tables:
            multi = len(out.tables) > 1
            w.writerow((["series"] if multi else []) + ["d", "numerator", "denominator"])
            for name, v in out.tables.items():
                for d, c in enumerate(_coeffs(v)):
                    if c is None:
                        continue
                    num, den = rat_str(c).split("/")
                    w.writerow(([name] if multi else []) + [d, num, den])
        else:
            w.writerow(["check_id", "status", "order"])
            for r in out.reports:
                w.writerow([r.check_id, r.status, r.order])
        return buf.getvalue()
    lines = []
    for r in out.reports:
        line = f"{r.check_id}: {r.status} (through order {r.order})"
        if r.first_failure:
            line += f" first failure {json.dumps(r.to_dict()['first_failure'], sort_keys=True)}"
        lines.append(line)
        lines.extend(f"  {n}" for n in r.notes)
    if out.extra:
        lines.append(json.dumps(out.extra, sort_keys=True))
    if out.tables:
        for name, v in out.tables.items():
            lines.append(f"{name}: " + ", ".join(rat_str(c) for c in _coeffs(v) if c is not None))
    return "\n".join(lines) + "\n"


def run(argv: list) -> tuple[int, str]:
    """(exit code, rendered report)."""
    try:
        job = parse_job(argv)
    except InvalidSpec as exc:
        return EXIT_INVALID, json.dumps({"error": "invalid spec", "message": str(exc)}, sort_keys=True) + "\n"
    try:
        cache = open_cache(job.cache_dir)
        out = HANDLERS[job.command](job, cache)
    except InvalidSpec as exc:
        return EXIT_INVALID, json.dumps({"error": "invalid spec", "message": str(exc)}, sort_keys=True) + "\n"
    except CheckFailed as exc:
        rep = CheckReport(job.command, FAIL, job.order, first_failure={"error": type(exc).__name__,
                                                                       "message": str(exc), "locus": exc.locus})
        return EXIT_FAIL, render(job, Outcome([rep]))
    except MsplabError as exc:
        rep = CheckReport(job.command, FAIL, job.order, first_failure={"error": type(exc).__name__,
                                                                       "message": str(exc)})
        return EXIT_FAIL, render(job, Outcome([rep]))
    return (EXIT_OK if out.passed else EXIT_FAIL), render(job, out)


def main(argv: list | None = None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
