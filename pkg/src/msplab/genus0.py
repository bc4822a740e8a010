"""Genus-zero theory of Z: Yukawa coupling, invariants, S-matrix and the
recursion for normalized genus-zero potentials."""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import ConnectionResidualNonzero, InvalidSpec, NeitherReadingMatches, NonUnitConstantTerm
from .exact import ONE, TruncSeries
from .ifun import I22_READINGS, Generators, generators
from .membership import GenPoly, gp
from .report import FAIL, PASS, CheckReport, series_check
from .targets import TargetConfig


def yukawa(t: TargetConfig, order: int, gens: Generators | None = None) -> TruncSeries:
    """p_k I22 / I11 as a series in q."""
    g = gens or generators(t, order)
    return t.p_k * g.I22 / g.I11


def verify_yukawa_identity(
    t: TargetConfig, order: int, gens: Generators | None = None, perturb: TruncSeries | None = None
) -> CheckReport:
    """PASS iff I0^2 I11^2 I22 = 1/(1 - r q) through ``order``.

    ``perturb`` is added to I22 first (used to show defects are caught).
    """
    g = gens or generators(t, order)
    i22 = g.I22 if perturb is None else g.I22 + perturb
    lhs = g.I0 ** 2 * g.I11 ** 2 * i22
    return series_check(f"yukawa-k{t.k}", "gw-genus0", "verify_yukawa_identity", lhs, g.Y, k=t.k)


def resolve_i22_reading(t: TargetConfig, order: int) -> dict:
    """Try both readings of I22 against the Yukawa and connection checks.

    Returns {reading: {"yukawa": report, "connection": report}, "chosen": name}.
    Raises NeitherReadingMatches if no reading passes both.
    """
    out: dict = {}
    chosen = None
    for reading in I22_READINGS:
        g = generators(t, order, reading)
        yk = verify_yukawa_identity(t, order, g)
        try:
            conn = s_z_matrix(t, order, g).residual_report()
        except NonUnitConstantTerm:
            conn = CheckReport(
                "sz-connection", FAIL, order,
                first_failure={"module": "gw-genus0", "op": "s_z_matrix", "coefficient": 0,
                               "reason": "I22 has zero constant term"},
            )
        out[reading] = {"yukawa": yk, "connection": conn}
        if chosen is None and yk.passed and conn.passed:
            chosen = reading
    if chosen is None:
        raise NeitherReadingMatches("no reading of I22 passes both checks", locus=t.k)
    out["chosen"] = chosen
    return out


# ---------------------------------------------------------------------------
# mirror map and invariants


def mirror_map(gens: Generators) -> TruncSeries:
    """Q(q) = q exp(I1/I0)."""
    return gens.J1.exp().shift(1)


def inverse_mirror_map(gens: Generators) -> TruncSeries:
    """q(Q), the compositional inverse of the mirror map."""
    return mirror_map(gens).revert()


@dataclass
class Genus0Report:
    yukawa: TruncSeries
    yukawa_Q: TruncSeries
    invariants: list  # N_{0,d} for d = 1..dmax
    invariants_jfunction: list

    @property
    def routes_agree(self) -> bool:
        return self.invariants == self.invariants_jfunction


def genus0_invariants(t: TargetConfig, dmax: int, gens: Generators | None = None) -> Genus0Report:
    """N_{0,d} for d <= dmax by two routes.

    Route one pushes the Yukawa coupling through the inverse mirror map and
    reads N_{0,d} = [Q^d]/d^3.  Route two reads the same numbers off the
    I-function normalized by I0 and re-expanded at Q:
        J2 - J1^2/2 = (1/p_k) sum d N_d Q^d,
        J3 - J1 J2 + J1^3/3 = -(2/p_k) sum N_d Q^d.
    The two routes share only the I-function and the mirror map.
    """
    if dmax < 1:
        raise InvalidSpec("dmax must be at least 1")
    g = gens or generators(t, max(dmax, 2))
    qQ = inverse_mirror_map(g).truncate(dmax)
    yk = yukawa(t, g.order, g).truncate(dmax)
    ykQ = yk.compose(qQ)
    inv = [ykQ[d] / d ** 3 for d in range(1, dmax + 1)]

    J1, J2, J3 = (x.truncate(dmax) for x in (g.J1, g.J2, g.J3))
    f2 = (J2 - J1 * J1 / 2).compose(qQ)
    f3 = (J3 - J1 * J2 + J1 * J1 * J1 / 3).compose(qQ)
    inv_j = []
    for d in range(1, dmax + 1):
        a = f2[d] * t.p_k / d
        b = -f3[d] * t.p_k / 2
        inv_j.append(a if a == b else None)
    return Genus0Report(yk, ykQ, inv, inv_j)


def bps_numbers(invariants: list) -> list:
    """Multiple-cover inversion: N_d = sum_{e | d} n_{d/e} / e^3."""
    n = []
    for d in range(1, len(invariants) + 1):
        s = invariants[d - 1]
        for e in range(2, d + 1):
            if d % e == 0:
                s -= n[d // e - 1] / mpq(e) ** 3
        n.append(s)
    return n


# ---------------------------------------------------------------------------
# S-matrix of Z


@dataclass
class SZMatrix:
    """S^Z(z)* in the basis 1, H, H^2, H^3 without the log q prefactor.

    ``entries[(i, j)]`` maps e -> series for the coefficient of z^(-e) in
    row H^i of the image of H^j.  ``A`` is the connection matrix: the only
    nonzero entries are A[(j+1, j)] = I11, I22, I11.
    """

    order: int
    entries: dict
    A: dict

    def entry(self, i: int, j: int, e: int) -> TruncSeries:
        return self.entries.get((i, j), {}).get(e, TruncSeries.constant(0, self.order))

    def residual(self) -> dict:
        """Coefficients of (H + zD) S* - S* A; {(i, j, e): series} for nonzero entries."""
        out = {}
        zero = TruncSeries.constant(0, self.order)
        for j in range(4):
            for i in range(4):
                for e in range(0, 4):
                    # H raises the row; zD lowers the power of 1/z by one.
                    val = self.entry(i - 1, j, e) if i else zero
                    val = val + self.entry(i, j, e + 1).D()
                    for l in range(4):
                        a = self.A.get((l, j))
                        if a is not None:
                            val = val - self.entry(i, l, e) * a
                    if not val.is_zero():
                        out[(i, j, e)] = val
        return out

    def residual_report(self) -> CheckReport:
        res = self.residual()
        if not res:
            return CheckReport("sz-connection", PASS, self.order)
        (i, j, e), val = min(res.items(), key=lambda kv: (kv[1].valuation(), kv[0]))
        return CheckReport(
            "sz-connection", FAIL, self.order,
            first_failure={"module": "gw-genus0", "op": "s_z_matrix", "row": i, "column": j,
                           "z_power": -e, "coefficient": val.valuation()},
        )


def s_z_matrix(t: TargetConfig, order: int, gens: Generators | None = None, check: bool = False) -> SZMatrix:
    """Build S^Z* from J_i = I_i / I0 and the connection entries.

    Column H^j is the solution whose leading entry is H^j:
      column 0: 1 + J1/z H + J2/z^2 H^2 + J3/z^3 H^3,
      column 1: H + (J2'/J1')/z H^2 + ((J2 + D J3)/I11)/z^2 H^3,
      column 2: H^2 + ((J2'/J1' + D((J2 + D J3)/I11)) / I22)/z H^3,
      column 3: H^3,
    with J1' = I11 and J2' = J1 + D J2.
    """
    if order < 2:
        raise InvalidSpec("order must be at least 2")
    g = gens or generators(t, order)
    n = g.order
    one = TruncSeries.constant(1, n)
    J1, J2, J3 = g.J1, g.J2, g.J3
    ratio21 = (J1 + J2.D()) / g.I11
    s31 = (J2 + J3.D()) / g.I11
    s32 = (ratio21 + s31.D()) / g.I22
    entries = {
        (0, 0): {0: one}, (1, 0): {1: J1}, (2, 0): {2: J2}, (3, 0): {3: J3},
        (1, 1): {0: one}, (2, 1): {1: ratio21}, (3, 1): {2: s31},
        (2, 2): {0: one}, (3, 2): {1: s32},
        (3, 3): {0: one},
    }
    A = {(1, 0): g.I11, (2, 1): g.I22, (3, 2): g.I11}
    S = SZMatrix(n, entries, A)
    if check:
        rep = S.residual_report()
        if not rep.passed:
            raise ConnectionResidualNonzero("quantum connection residual is nonzero", locus=rep.first_failure)
    return S


# ---------------------------------------------------------------------------
# recursion for normalized genus-zero potentials


def p_operator_genpoly(P: GenPoly, g: int, n: int) -> GenPoly:
    """(D + (g-1)(2B + 1 - Y) - nA) P on polynomials in the generators."""
    return P.D() + (g - 1) * (2 * gp("B") + 1 - gp("Y")) * P - n * gp("A") * P


def p_recursion(P, g: int, n: int, gens: Generators | None = None):
    """P_{g,n+1} from P_{g,n}; accepts a GenPoly or a TruncSeries."""
    if 2 * g - 2 + n <= 0:
        raise InvalidSpec("need 2g - 2 + n > 0")
    if isinstance(P, GenPoly):
        return p_operator_genpoly(P, g, n)
    if gens is None:
        raise InvalidSpec("series input needs the generator series")
    return P.D() + (g - 1) * (2 * gens.B + 1 - gens.Y) * P - n * gens.A * P


def genus0_potentials_series(t: TargetConfig, n_max: int, gens: Generators) -> dict:
    """P_{0,n} for 3 <= n <= n_max straight from the definition.

    P_{0,n} = (p_k Y)^(-1) I11^n I0^2 (Q d/dQ)^n F_0 at Q = q e^(I1/I0); on
    functions of q, Q d/dQ = (1/I11) D, and (Q d/dQ)^3 F_0 is the Yukawa
    coupling p_k I22 / I11.
    """
    yk = yukawa(t, gens.order, gens)
    inv11 = gens.I11.inverse()
    pre = (gens.Y * t.p_k).inverse() * gens.I0 ** 2
    out = {}
    deriv = yk
    for n in range(3, n_max + 1):
        if n > 3:
            deriv = deriv.D() * inv11
        out[n] = pre * gens.I11 ** n * deriv
    return out


def genus0_potentials_genpoly(n_max: int) -> dict:
    """P_{0,n} for 3 <= n <= n_max via the recursion from P_{0,3} = 1."""
    out = {3: GenPoly.const(ONE)}
    for n in range(3, n_max):
        out[n + 1] = p_recursion(out[n], 0, n)
    return out


def reduce_to_core(P: GenPoly, relations: dict) -> GenPoly:
    """Eliminate A2, B4, ... using certified relations {symbol: GenPoly}."""
    for _ in range(16):
        extra = P.symbols() & set(relations)
        if not extra:
            return P
        P = P.substitute({s: relations[s] for s in extra})
    return P
