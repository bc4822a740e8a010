"""R-matrix of the master space restricted to Z.

Two routes to the same numbers:

* ``level0_R_direct`` expands the S-matrix columns at z = 0 after
  restricting p to H (a ring map Q[p]/(p^4 (p^N + 1)) -> Q[H]/H^4) and
  removes the S-matrix of Z: R* x|_Z = (S^Z*)^(-1) (S^M* x|_Z).
* ``r_entries_level0`` runs the recursion coming from the two quantum
  connections on the normalized entries (R_m)_j^b.

All series are taken under t^N = -1, where q' = q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import ExpansionWindowViolated, InvalidSpec, MembershipFailed, VanishingPatternViolated
from .exact import ONE, ZERO, TruncSeries, binom
from .genus0 import reduce_to_core, s_z_matrix
from .ifun import Generators, generators, z_ifunction_terms
from .membership import GenPoly, MembershipCertificate, b4_relation, find_polynomial, gp
from .msp import band_constants
from .report import FAIL, PASS, CheckReport
from .targets import TargetConfig, check_N

# ---------------------------------------------------------------------------
# series in q with coefficients in Q[H]/H^4 ((z))


@dataclass
class HZSeries:
    """sum over (i, e) of H^i z^e times a q-series; exact for e <= e_hi."""

    order: int
    e_hi: int
    terms: dict = field(default_factory=dict)

    def get(self, i: int, e: int) -> TruncSeries:
        return self.terms.get((i, e), TruncSeries.constant(0, self.order))

    def _acc(self, key, val: TruncSeries) -> None:
        if key[0] > 3 or key[1] > self.e_hi:
            return
        cur = self.terms.get(key)
        new = val if cur is None else cur + val
        if new.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    def __add__(self, other: "HZSeries") -> "HZSeries":
        out = HZSeries(min(self.order, other.order), min(self.e_hi, other.e_hi), {})
        for src in (self, other):
            for k, v in src.terms.items():
                out._acc(k, v.truncate(out.order))
        return out

    def __sub__(self, other: "HZSeries") -> "HZSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "HZSeries":
        return HZSeries(self.order, self.e_hi, {k: v * c for k, v in self.terms.items() if c != 0})

    def mul_H(self) -> "HZSeries":
        out = HZSeries(self.order, self.e_hi, {})
        for (i, e), v in self.terms.items():
            out._acc((i + 1, e), v)
        return out

    def zD(self) -> "HZSeries":
        out = HZSeries(self.order, self.e_hi, {})
        for (i, e), v in self.terms.items():
            out._acc((i, e + 1), v.D())
        return out

    def D_H(self) -> "HZSeries":
        """H + z D."""
        return self.mul_H() + self.zD()

    def q_times(self, c) -> "HZSeries":
        return HZSeries(self.order, self.e_hi, {k: v.shift(1) * c for k, v in self.terms.items()})

    def mul_series(self, s: TruncSeries, i_shift: int = 0, e_shift: int = 0) -> "HZSeries":
        out = HZSeries(self.order, self.e_hi, {})
        for (i, e), v in self.terms.items():
            out._acc((i + i_shift, e + e_shift), v * s)
        return out

    def min_z_power(self) -> int | None:
        return min((e for _, e in self.terms), default=None)


def _bivariate_div(G: dict, F: dict, e_hi: int) -> dict:
    """G / F for F = 1 + (terms of positive z-degree), in Q[H]/H^4 [[z]]."""
    out: dict = {}
    for e in range(e_hi + 1):
        for i in range(4):
            v = G.get((i, e), ZERO)
            for (fi, fe), fc in F.items():
                if (fi, fe) == (0, 0) or fi > i or fe > e:
                    continue
                v -= fc * out.get((i - fi, e - fe), ZERO)
            if v != 0:
                out[(i, e)] = v
    return out


def restricted_column0(t: TargetConfig, N: int, order: int, e_hi: int) -> HZSeries:
    """S^M* 1 restricted to Z and expanded at z = 0.

    The q^d term is the q^d term of the I-function of Z (a polynomial in
    u = H/z of degree 3) times 1 / prod_{m<=d}((H + m z)^N + 1).
    """
    zterms = z_ifunction_terms(t, order)
    out = HZSeries(order, e_hi, {})
    G = {(0, 0): ONE}
    span = e_hi + 3
    coeffs: dict = {}
    for d in range(order + 1):
        if d:
            F = {(0, 0): ONE}
            for i in range(4):
                c = binom(N, i) * mpq(d) ** (N - i)
                if N - i <= span:
                    F[(i, N - i)] = F.get((i, N - i), ZERO) + c
            G = _bivariate_div(G, F, span)
        for j, cj in enumerate(zterms[d]):
            if cj == 0:
                continue
            for (i, e), g in G.items():
                if i + j <= 3 and e - j <= e_hi:
                    key = (i + j, e - j)
                    coeffs.setdefault(key, [ZERO] * (order + 1))[d] += cj * g
    for key, cs in coeffs.items():
        out._acc(key, TruncSeries.from_coeffs(cs, order))
    return out


def restricted_columns(t: TargetConfig, N: int, order: int, e_hi: int) -> list:
    """S^M* p^j restricted to Z for j = 0..N+3, from the connection."""
    band = band_constants(t)
    cols = [restricted_column0(t, N, order, e_hi)]
    for J in range(1, N + 4):
        nxt = cols[J - 1].D_H()
        if J >= N:
            nxt = nxt - cols[J - N].q_times(band[J - N])
        cols.append(nxt)
    return cols


def _sz_inverse_apply(sz, x: HZSeries) -> HZSeries:
    """(S^Z*)^(-1) x via I - M + M^2 - M^3 with M = S^Z* - I nilpotent."""

    def apply_M(v: HZSeries) -> HZSeries:
        out = HZSeries(v.order, v.e_hi, {})
        for (j, e), ser in v.terms.items():
            for i in range(j + 1, 4):
                for p, s in sz.entries.get((i, j), {}).items():
                    if p:
                        out._acc((i, e - p), ser * s)
        return out

    out = x
    term = x
    for n in range(1, 4):
        term = apply_M(term)
        out = out + term.scale((-1) ** n)
    return out


@dataclass
class Level0Direct:
    """Columns R* p^j |_Z, j = 0..N+3, exact through z^e_hi."""

    t: TargetConfig
    N: int
    order: int
    e_hi: int
    columns: list
    gens: Generators

    def coefficient(self, j: int, i: int, m: int) -> TruncSeries:
        """[H^i z^m] of R* p^j |_Z."""
        return self.columns[j].get(i, m)


def level0_R_direct(t: TargetConfig, N: int, order: int, zdepth: int | None = None,
                    gens: Generators | None = None, check: bool = True) -> Level0Direct:
    """R* p^j|_Z = (S^Z*)^(-1)(S^M* p^j|_Z) expanded at z = 0 through z^zdepth.

    With ``check`` the columns must have no negative powers of z and the
    two low columns must match their known expansions (see
    ``level0_window_report``).
    """
    check_N(N)
    if order < 2:
        raise InvalidSpec("order must be at least 2")
    e_hi = N - 2 if zdepth is None else zdepth
    if e_hi < 0:
        raise InvalidSpec("zdepth must be nonnegative")
    gens = gens or generators(t, order)
    sz = s_z_matrix(t, order, gens)
    raw = restricted_columns(t, N, order, e_hi + 3)
    cols = []
    for c in raw:
        r = _sz_inverse_apply(sz, c)
        cols.append(HZSeries(order, e_hi, {k: v for k, v in r.terms.items() if k[1] <= e_hi}))
    out = Level0Direct(t, N, order, e_hi, cols, gens)
    if check:
        rep = level0_window_report(out)
        if not rep.passed:
            raise ExpansionWindowViolated("R-matrix restricted to Z leaves its window", locus=rep.first_failure)
    return out


def level0_window_report(R: Level0Direct) -> CheckReport:
    """R*1|_Z = I0 + O(z^(N-3)) and R*p|_Z = z D(I0) + I0 I11 H + O(z^(N-2)),
    and no negative powers of z in any column.
    """
    N, g = R.N, R.gens
    cid = f"level0-windows-k{R.t.k}-N{N}"
    zero = TruncSeries.constant(0, R.order)
    for j, col in enumerate(R.columns):
        lo = col.min_z_power()
        if lo is not None and lo < 0:
            return CheckReport(cid, FAIL, R.order, first_failure={"module": "rmatrix-level0", "op": "level0_R_direct",
                                                                  "column": j, "z_power": lo})
    expected = {
        0: {(0, 0): g.I0},
        1: {(0, 1): g.I0.D(), (1, 0): g.I0 * g.I11},
    }
    windows = {0: N - 3, 1: N - 2}
    for j, want in expected.items():
        for m in range(min(windows[j], R.e_hi + 1)):
            for i in range(4):
                got = R.coefficient(j, i, m)
                exp = want.get((i, m), zero)
                d = got.first_difference(exp)
                if d is not None:
                    return CheckReport(cid, FAIL, R.order, first_failure={
                        "module": "rmatrix-level0", "op": "level0_R_direct", "column": j,
                        "H_power": i, "z_power": m, "coefficient": d})
    return CheckReport(cid, PASS, R.order, payload={"windows": windows, "zdepth": R.e_hi})


# ---------------------------------------------------------------------------
# normalized entries (R_m)_j^b


def basis_scales(gens: Generators) -> list:
    """I0, I0 I11, I0 I11 I22, I0 I11 I22 I33 with I33 = I11."""
    out = [gens.I0]
    for f in (gens.I11, gens.I22, gens.I11):
        out.append(out[-1] * f)
    return out


def log_derivative_constants(gens: Generators) -> list:
    """C_b = D log(I0 I11 ... I_bb) as series."""
    return [s.D() / s for s in basis_scales(gens)]


def level1_band_for_level0(t: TargetConfig, N: int) -> list:
    return [ZERO] * N + list(band_constants(t)[:4])


def r_entries_level0(t: TargetConfig, N: int, m_max: int, order: int,
                     gens: Generators | None = None, check: bool = True) -> dict:
    """Table {(m, j, b): series} from

        E(m, j, b) = (D + C_b) E(m-1, j-1, b) + E(m, j-1, b-1) - c_j q E(m, j-N, b),

    with E(m, 0, b) = delta_{b0} delta_{m0}.  With ``check`` every entry off
    the residue class j = b + m (mod N) must vanish.
    """
    check_N(N)
    if m_max >= N - 3:
        raise InvalidSpec(f"m_max must be below N - 3 = {N - 3}")
    gens = gens or generators(t, order)
    C = log_derivative_constants(gens)
    band = level1_band_for_level0(t, N)
    zero = TruncSeries.constant(0, gens.order)
    one = TruncSeries.constant(1, gens.order)
    E: dict = {}
    for m in range(m_max + 1):
        for b in range(4):
            E[(m, 0, b)] = one if (m, b) == (0, 0) else zero
    for j in range(1, N + 4):
        for m in range(m_max + 1):
            for b in range(4):
                v = zero
                if m:
                    prev = E[(m - 1, j - 1, b)]
                    v = v + prev.D() + C[b] * prev
                if b:
                    v = v + E[(m, j - 1, b - 1)]
                if j >= N and band[j]:
                    v = v - E[(m, j - N, b)].shift(1) * band[j]
                E[(m, j, b)] = v
    if check:
        for (m, j, b), v in sorted(E.items()):
            if (j - b - m) % N and not v.is_zero():
                raise VanishingPatternViolated(
                    f"(R_{m})_{j}^{b} is nonzero off its residue class", locus={"m": m, "j": j, "b": b}
                )
    return E


def entries_from_direct(R: Level0Direct, m_max: int) -> dict:
    """(R_m)_j^b = [z^m H^b](R* p^j|_Z) / (I0 I11 ... I_bb)."""
    scales = basis_scales(R.gens)
    inv = [s.inverse() for s in scales]
    out = {}
    for m in range(min(m_max, R.e_hi) + 1):
        for j in range(R.N + 4):
            for b in range(4):
                out[(m, j, b)] = R.coefficient(j, b, m) * inv[b]
    return out


def level0_dual_route_report(t: TargetConfig, N: int, m_max: int, order: int,
                             R: Level0Direct | None = None, E: dict | None = None) -> CheckReport:
    """Compare the recursion table with the direct Birkhoff columns."""
    gens = R.gens if R is not None else generators(t, order)
    R = R or level0_R_direct(t, N, order, gens=gens)
    E = E or r_entries_level0(t, N, m_max, order, gens)
    direct = entries_from_direct(R, m_max)
    cid = f"level0-dual-route-k{t.k}-N{N}"
    for key in sorted(direct):
        if key not in E:
            continue
        d = E[key].first_difference(direct[key])
        if d is not None:
            m, j, b = key
            return CheckReport(cid, FAIL, order, first_failure={"module": "rmatrix-level0", "op": "r_entries_level0",
                                                                "m": m, "j": j, "b": b, "coefficient": d})
    return CheckReport(cid, PASS, order, payload={"m_max": m_max})


def vanishing_report(E: dict, N: int, order: int, k: int) -> CheckReport:
    cid = f"level0-vanishing-k{k}-N{N}"
    for (m, j, b), v in sorted(E.items()):
        if (j - b - m) % N and not v.is_zero():
            return CheckReport(cid, FAIL, order, first_failure={"module": "rmatrix-level0", "op": "r_entries_level0",
                                                                "m": m, "j": j, "b": b,
                                                                "coefficient": v.valuation()})
    return CheckReport(cid, PASS, order)


# ---------------------------------------------------------------------------
# the same recursion on polynomials in the generators


def log_derivative_genpolys() -> list:
    """C_b in the generators, using I0^2 I11^2 I22 = Y (so D log I22 = Y - 1 - 2A - 2B)."""
    A, B, Y = gp("A"), gp("B"), gp("Y")
    return [B, A + B, Y - 1 - A - B, Y - 1 - B]


def core_relations(gens: Generators, guard: int = 8) -> dict:
    """Relations expressing A2 and B4 in the core generators.

    B4 comes from the Picard-Fuchs equation of I0; A2 is certified by the
    membership solver on the supplied generator series.
    """
    cert = find_polynomial(gens.A_m(2), gens, 2, guard)
    if not cert.certified:
        raise MembershipFailed("no relation for A2", locus="A2")
    return {"A2": cert.poly, "B4": b4_relation(gens.t)}


def _reduce(P: GenPoly, relations: dict) -> GenPoly:
    return reduce_to_core(P, relations)


def r_entries_level0_genpoly(t: TargetConfig, N: int, m_max: int, relations: dict) -> dict:
    """The recursion of ``r_entries_level0`` on GenPolys, reduced to the core.

    q enters as (1 - 1/Y)/r.
    """
    check_N(N)
    C = log_derivative_genpolys()
    band = level1_band_for_level0(t, N)
    q = (GenPoly.const(ONE) - GenPoly.var("Y", -1)) * mpq(1, t.r)
    zero, one = GenPoly(), GenPoly.const(ONE)
    E: dict = {}
    for m in range(m_max + 1):
        for b in range(4):
            E[(m, 0, b)] = one if (m, b) == (0, 0) else zero
    for j in range(1, N + 4):
        for m in range(m_max + 1):
            for b in range(4):
                v = zero
                if m:
                    prev = E[(m - 1, j - 1, b)]
                    v = v + prev.D() + C[b] * prev
                if b:
                    v = v + E[(m, j - 1, b - 1)]
                if j >= N and band[j]:
                    v = v - q * E[(m, j - N, b)] * band[j]
                E[(m, j, b)] = _reduce(v, relations)
    return E


def surviving_entries(N: int, m_max: int) -> list:
    """Keys (m, j, b, twisted) of the entries expected to lie in the ring:
    (R_m)_{b+m}^b and -Y (R_m)_{b+N+m}^b (twisted)."""
    out = []
    for m in range(m_max + 1):
        for b in range(4):
            out.append((m, b + m, b, False))
            if b + N + m <= N + 3:
                out.append((m, b + N + m, b, True))
    return out


def _is_core(P: GenPoly) -> bool:
    for mono in P.terms:
        for s, e in mono:
            if s not in ("A", "B", "B2", "B3", "Y") or e < 0:
                return False
    return True


def level0_membership(t: TargetConfig, N: int, m_max: int, order: int = 18, guard: int = 6,
                      gens: Generators | None = None, E: dict | None = None,
                      relations: dict | None = None) -> dict:
    """Certificates for every surviving entry.

    Each candidate polynomial is produced by the recursion on generator
    polynomials and must (a) involve only A, B, B2, B3 and nonnegative
    powers of Y and (b) reproduce the entry's q-series through ``order``;
    the last ``guard`` coefficients serve as the guard.
    """
    gens = gens or generators(t, order)
    E = E or r_entries_level0(t, N, m_max, order, gens)
    if relations is None:
        relations = core_relations(generators(t, max(30, order)))
    P = r_entries_level0_genpoly(t, N, m_max, relations)
    out = {}
    for m, j, b, twisted in surviving_entries(N, m_max):
        s = E[(m, j, b)]
        poly = P[(m, j, b)]
        if twisted:
            s = -(s * gens.Y)
            poly = _reduce(poly * gp("Y") * -1, relations)
        deg = max((sum(e for _, e in mono) for mono in poly.terms), default=0)
        status = "certified"
        if not _is_core(poly):
            status = "refuted-at-degree"
        cert = MembershipCertificate(t.k, deg, poly if status == "certified" else None,
                                     order - guard, guard, status)
        if cert.certified and not cert.verify(s, gens):
            cert = MembershipCertificate(t.k, deg, None, order - guard, guard, "refuted-at-degree")
        out[(m, j, b, twisted)] = cert
    return out


def membership_report(certs: dict, N: int, order: int, k: int) -> CheckReport:
    cid = f"level0-membership-k{k}-N{N}"
    for key, cert in sorted(certs.items()):
        if not cert.certified:
            m, j, b, tw = key
            return CheckReport(cid, FAIL, order, first_failure={"module": "rmatrix-level0", "op": "level0_membership",
                                                                "m": m, "j": j, "b": b, "twisted": tw})
    return CheckReport(cid, PASS, order, payload={"count": len(certs)})
