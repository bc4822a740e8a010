"""The acceptance suite: ten criteria, each with a stable check ID.

Every criterion is a function returning a CheckReport whose ``order``
records the truncation it was verified through.  ``SuiteParams`` lets a
caller restrict targets, replace the MSP parameter N, or cap the series
order; criteria whose statement fixes a window keep it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .cache import Cache, cached_generators
from .errors import CheckFailed, VanishingFactor
from .exact import TruncSeries
from .genus0 import genus0_potentials_genpoly, genus0_potentials_series, verify_yukawa_identity
from .ifun import Generators, generators, msp_ifunction
from .level0 import (level0_dual_route_report, level0_membership, level0_R_direct, level0_window_report,
                     membership_report, r_entries_level0, vanishing_report)
from .level1 import (PF2_CONSTANTS, delta_compare, pf2_constant, pf_expansion_report, solve_r_tower,
                     tail_constants, tower_report)
from .membership import dclosure_witnesses, named_series
from .msp import (birkhoff_connection, connection_AM, degree_bound, lemma_degree_bound, pf_check, rotation_holds,
                  solve_SM, specialize_closed, specialize_recursive, symplectic_check)
from .report import FAIL, PASS, CheckReport, combine, series_check
from .targets import TargetConfig, target_config
from .zagier_zinger import cross_check_generators, ip_tower, sextic_display_report, verify_zz


@dataclass(frozen=True)
class SuiteParams:
    """Optional overrides: target ks, a single N, and an order cap."""

    ks: tuple | None = None
    N: int | None = None
    order: int | None = None
    cache_dir: str | None = None

    def targets(self, default=(6, 8, 10)) -> list[TargetConfig]:
        return [target_config(k) for k in (self.ks or default)]

    def capped(self, order: int) -> int:
        return order if self.order is None else min(order, self.order)

    def n_values(self, default: tuple) -> tuple:
        return (self.N,) if self.N is not None else default

    def generators(self, t: TargetConfig, order: int) -> Generators:
        """Generator series, read through the cache when one is configured."""
        if self.cache_dir is None:
            return generators(t, order)
        return cached_generators(t, order, Cache(self.cache_dir))[0]


def _guarded(cid: str, order: int, fn: Callable[[], CheckReport]) -> CheckReport:
    """Turn a raised CheckFailed into a FAIL report carrying its locus."""
    try:
        return fn()
    except CheckFailed as exc:
        return CheckReport(cid, FAIL, order, first_failure={"error": type(exc).__name__, "message": str(exc),
                                                             "locus": exc.locus})


# ---------------------------------------------------------------------------
# criteria


def criterion_yukawa(p: SuiteParams = SuiteParams()) -> CheckReport:
    """I0^2 I11^2 I22 = 1/(1 - r q) through order 30."""
    order = p.capped(30)
    parts = [verify_yukawa_identity(t, order, p.generators(t, order)) for t in p.targets()]
    return combine("AC1-yukawa", parts)


def criterion_zagier_zinger(p: SuiteParams = SuiteParams()) -> CheckReport:
    """I_0 ... I_4 = Y, I_p = I_(4-p), and I_0, I_1, I_2 = I0, I11, I22 through order 25."""
    order = p.capped(25)
    parts = []
    for t in p.targets():
        tower = ip_tower(t, order)
        parts.append(verify_zz(t, order, tower))
        parts.append(cross_check_generators(t, order, tower, p.generators(t, order)))
    if 6 in (p.ks or (6,)):
        parts.append(sextic_display_report(min(5, order)))
    rep = combine("AC2-zagier-zinger", parts)
    rep.order = order
    return rep


def mirror_report(t: TargetConfig, N: int, order: int) -> CheckReport:
    """Column 0 of the S-matrix solved from A^M is I^M/z, the connection
    read back from I^M alone is A^M, and S(z) S(-z)* = Id."""
    cid = f"mirror-k{t.k}-N{N}"
    S = solve_SM(t, N, order)
    I = msp_ifunction(t, N, order, S.zdepth)
    col0 = (S.columns[0] - I.series.clip(e_hi=S.zdepth - 1))
    if not col0.is_zero():
        i, d, e = min(col0.terms, key=lambda k: (k[1], k[2], k[0]))
        return CheckReport(cid, FAIL, order, first_failure={"module": "msp-genus0", "op": "solve_SM",
                                                            "row": i, "coefficient": d, "z_power": -e})
    A = connection_AM(t, N)
    derived = birkhoff_connection(t, N, order)
    for key in sorted(set(A.entries) | set(derived)):
        const, qc = A.entry(*key)
        want = TruncSeries.from_coeffs([const, qc], order)
        got = derived.get(key, TruncSeries.constant(0, order))
        d = got.first_difference(want)
        if d is not None:
            return CheckReport(cid, FAIL, order, first_failure={"module": "msp-genus0", "op": "birkhoff_connection",
                                                                "entry": list(key), "coefficient": d})
    return combine(cid, [CheckReport(f"{cid}-connection", PASS, order), symplectic_check(S)])


def criterion_mirror(p: SuiteParams = SuiteParams()) -> CheckReport:
    order = p.capped(6)
    parts = []
    for t in p.targets(default=(6,)):
        for N in p.n_values((7,)):
            parts.append(_guarded(f"mirror-k{t.k}-N{N}", order, lambda t=t, N=N: mirror_report(t, N, order)))
    return combine("AC3-mirror-symplectic", parts)


def criterion_picard_fuchs(p: SuiteParams = SuiteParams()) -> CheckReport:
    order = p.capped(4)
    parts = [pf_check(t, N, order) for t in p.targets() for N in p.n_values((7,))]
    return combine("AC4-picard-fuchs", parts)


@dataclass
class SpecializedData:
    """Specialized entries f_i(k/a) for the narrow a <= 3k, and the skipped a."""

    t: TargetConfig
    N: int
    order: int
    entries: dict  # a -> [f_0, ..., f_(N+3)]
    skipped: list


def specialized_data(t: TargetConfig, N: int, order: int) -> SpecializedData:
    entries, skipped = {}, []
    for a in range(1, 3 * t.k + 1):
        try:
            entries[a] = specialize_recursive(t, N, a, order)
        except VanishingFactor:
            skipped.append(a)
    return SpecializedData(t, N, order, entries, skipped)


def specialized_report(data: SpecializedData, alphas=(0, 1, 2)) -> CheckReport:
    """S_{1;0} = 1, closed formula = recursion for f_0, rotation and q-degree bounds."""
    t, N, order = data.t, data.N, data.order
    cid = f"specialized-k{t.k}-N{N}"

    def fail(**locus) -> CheckReport:
        return CheckReport(cid, FAIL, order, first_failure={"module": "msp-genus0", **locus},
                           notes=[f"skipped non-narrow a: {data.skipped}"])

    if 1 in data.entries and data.entries[1][0] != TruncSeries.constant(1, order):
        return fail(op="specialize_recursive", a=1, i=0)
    for a, fs in sorted(data.entries.items()):
        d = specialize_closed(t, N, a, order).first_difference(fs[0])
        if d is not None:
            return fail(op="specialize_closed", a=a, i=0, coefficient=d)
        for i, f in enumerate(fs):
            if f.degree() > degree_bound(t, N, a, i):
                return fail(op="degree_bound", a=a, i=i, coefficient=f.degree())
            for al in alphas:
                for be in range(N):
                    if not rotation_holds(f, N, i, al, be):
                        return fail(op="rotation_holds", a=a, i=i, alpha=al, beta=be)
    return CheckReport(cid, PASS, order, payload={"checked": sorted(data.entries), "skipped": data.skipped},
                       notes=[f"skipped non-narrow a: {data.skipped}"])


def lemma_bound_report(data: SpecializedData) -> CheckReport:
    """deg_q f_i <= (a - 1)/k + i/N for every computed specialized entry."""
    t, N = data.t, data.N
    cid = f"lemma-bound-k{t.k}-N{N}"
    for a, fs in sorted(data.entries.items()):
        for i, f in enumerate(fs):
            if f.degree() > lemma_degree_bound(t, N, a, i):
                return CheckReport(cid, FAIL, data.order, first_failure={
                    "module": "msp-genus0", "op": "lemma_degree_bound", "a": a, "i": i, "coefficient": f.degree()})
    return CheckReport(cid, PASS, data.order, payload={"entries": sum(len(fs) for fs in data.entries.values())})


def specialized_all(p: SuiteParams) -> list:
    order = p.capped(6)
    return [specialized_data(t, N, order) for t in p.targets() for N in p.n_values((7,))]


def criterion_specialized(p: SuiteParams = SuiteParams(), data: list | None = None) -> CheckReport:
    data = data if data is not None else specialized_all(p)
    rep = combine("AC5-specialized-entries", [specialized_report(x) for x in data])
    rep.notes = [f"k={x.t.k} N={x.N} skipped non-narrow a: {x.skipped}" for x in data]
    return rep


def criterion_lemma_bound(p: SuiteParams = SuiteParams(), data: list | None = None) -> CheckReport:
    data = data if data is not None else specialized_all(p)
    return combine("AC10-degree-bound", [lemma_bound_report(x) for x in data])


def level1_report(t: TargetConfig, N: int) -> CheckReport:
    m_max = min(6, N - 1)
    tower = solve_r_tower(t, N, m_max)
    parts = [tower_report(tower), delta_compare(t, N, 4, tower)]
    rep = combine(f"level1-k{t.k}-N{N}", parts)
    if rep.passed and parts[1].payload.get("reading") != "k":
        return CheckReport(rep.check_id, FAIL, rep.order, first_failure={
            "module": "rmatrix-level1", "op": "delta_compare", "reading": parts[1].payload.get("reading")})
    rep.notes = list(parts[1].notes)
    return rep


def criterion_level1(p: SuiteParams = SuiteParams()) -> CheckReport:
    parts = [_guarded(f"level1-k{t.k}-N{N}", min(6, N - 1), lambda t=t, N=N: level1_report(t, N))
             for t in p.targets() for N in p.n_values((7, 11))]
    rep = combine("AC6-level1-tower", parts)
    rep.notes = sorted({n for x in parts for n in x.notes})
    return rep


def criterion_tail(p: SuiteParams = SuiteParams()) -> CheckReport:
    parts = []
    for t in p.targets():
        parts.append(_guarded(f"tail-constants-k{t.k}", 2, lambda t=t: tail_constants(t)))
        for N in p.n_values((7, 11)):
            parts.append(pf_expansion_report(t, N))
            c = pf2_constant(t, N)
            status = PASS if c == PF2_CONSTANTS[t.k] else FAIL
            ff = None if status == PASS else {"module": "rmatrix-level1", "op": "pf2_constant", "N": N, "value": c}
            parts.append(CheckReport(f"pf2-constant-k{t.k}-N{N}", status, 2, first_failure=ff))
    return combine("AC7-tail-constants", parts)


def level0_report(t: TargetConfig, N: int, order: int, gens: Generators | None = None) -> CheckReport:
    gens = gens or generators(t, order)
    m_max = min(4, N - 4)
    R = level0_R_direct(t, N, order, gens=gens, check=False)
    E = r_entries_level0(t, N, m_max, order, gens, check=False)
    certs = level0_membership(t, N, m_max, order, 6, gens, E)
    return combine(f"level0-k{t.k}-N{N}", [
        level0_window_report(R),
        vanishing_report(E, N, order, t.k),
        level0_dual_route_report(t, N, m_max, order, R, E),
        membership_report(certs, N, order, t.k),
    ])


def criterion_level0(p: SuiteParams = SuiteParams()) -> CheckReport:
    order = p.capped(18)
    parts = []
    for t in p.targets():
        gens = p.generators(t, order)
        for N in p.n_values((11,)):
            parts.append(_guarded(f"level0-k{t.k}-N{N}", order,
                                  lambda t=t, N=N, gens=gens: level0_report(t, N, order, gens)))
    return combine("AC8-level0", parts)


def finite_generation_report(t: TargetConfig, order: int = 30, guard: int = 8,
                             gens: Generators | None = None) -> CheckReport:
    """D-closure witnesses, and P_{0,3} -> P_{0,5} by both routes."""
    gens = gens or generators(t, order)
    cid = f"finite-generation-k{t.k}"
    certs = dclosure_witnesses(gens, max_degree=4, guard=guard)
    parts = []
    for name, cert in certs.items():
        ok = cert.certified and cert.verify(named_series(name, gens), gens)
        parts.append(CheckReport(f"{cid}-{name}", PASS if ok else FAIL, order,
                                 first_failure=None if ok else {"module": "membership", "op": "dclosure_witnesses",
                                                                "series": name, "status": cert.status}))
    series = genus0_potentials_series(t, 5, gens)
    polys = genus0_potentials_genpoly(5)
    parts.append(series_check(f"{cid}-P03", "gw-genus0", "genus0_potentials_series", series[3],
                              TruncSeries.constant(1, gens.order)))
    for n in (4, 5):
        parts.append(series_check(f"{cid}-P0{n}", "gw-genus0", "p_recursion", polys[n].evaluate(gens), series[n]))
    return combine(cid, parts)


def criterion_finite_generation(p: SuiteParams = SuiteParams()) -> CheckReport:
    parts = [finite_generation_report(t, gens=p.generators(t, 30)) for t in p.targets()]
    return combine("AC9-finite-generation", parts)


# ---------------------------------------------------------------------------
# the whole suite


CRITERIA = (
    ("AC1-yukawa", "Yukawa normalization through order 30", criterion_yukawa),
    ("AC2-zagier-zinger", "tower product and symmetry through order 25", criterion_zagier_zinger),
    ("AC3-mirror-symplectic", "S-matrix column 0, connection and symplectic identity", criterion_mirror),
    ("AC4-picard-fuchs", "Picard-Fuchs operator kills the MSP I-function", criterion_picard_fuchs),
    ("AC5-specialized-entries", "specialized S-entries: rotation and q-degree bounds", criterion_specialized),
    ("AC6-level1-tower", "level-1 scalar tower degrees and boundary comparison", criterion_level1),
    ("AC7-tail-constants", "tail constants and PF_2 constants", criterion_tail),
    ("AC8-level0", "level-0 windows, vanishing pattern and ring membership", criterion_level0),
    ("AC9-finite-generation", "D-closure witnesses and the genus-zero recursion", criterion_finite_generation),
    ("AC10-degree-bound", "genus-zero q-degree bound on specialized entries", criterion_lemma_bound),
)

CHECK_IDS = tuple(c[0] for c in CRITERIA)


def run_suite(p: SuiteParams = SuiteParams(), only: tuple | None = None) -> list[CheckReport]:
    """Run the criteria in order; errors other than check failures propagate."""
    out = []
    spec_data = None
    for cid, _title, fn in CRITERIA:
        if only and cid not in only:
            continue
        start = time.perf_counter()
        if fn in (criterion_specialized, criterion_lemma_bound):
            spec_data = spec_data if spec_data is not None else specialized_all(p)
            rep = fn(p, spec_data)
        else:
            rep = fn(p)
        rep.payload["seconds"] = time.perf_counter() - start
        out.append(rep)
    return out

