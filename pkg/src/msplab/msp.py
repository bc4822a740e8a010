"""Genus-zero theory of the master space under t^N = -1.

Conventions.  The state ring is Q[p]/(p^4 (p^N + 1)) with basis p^0..p^(N+3).
S-matrix columns are StateSeries in p, q and w = 1/z; column j is S*(z) p^j.
Restriction to the fixed point pt_alpha sends p to -t_alpha with
t_alpha = -t^(2 alpha + 1) in Q[t]/(t^N + 1), so t_alpha^N = 1 and
zeta_N = t^2 is a primitive N-th root of unity.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

from gmpy2 import mpq

from .errors import (
    CheckFailed,
    ConnectionResidualNonzero,
    DepthTooSmall,
    ExpansionWindowViolated,
    InvalidSpec,
    VanishingFactor,
)
from .exact import (
    ONE,
    ZERO,
    QElem,
    TruncSeries,
    binom,
    linsolve,
    p_ring,
    poly_divmod,
    poly_eval,
    poly_mul,
    t_ring,
)
from .ifun import default_zdepth, msp_ifunction
from .report import FAIL, PASS, CheckReport
from .state import StateSeries
from .targets import TargetConfig, check_N

# ---------------------------------------------------------------------------
# state space


@dataclass(frozen=True)
class StateSpace:
    N: int
    p_k: mpq
    eta: tuple  # (N+4) x (N+4) rationals
    eta_inv: tuple

    @property
    def dim(self) -> int:
        return self.N + 4

    @property
    def ring(self):
        return p_ring(self.N)

    def pair(self, x: QElem, y: QElem):
        """(x, y) = p_k [p^(N+3)] (x y) in the reduced basis."""
        prod = x * y
        return self.p_k * prod.coeffs[self.N + 3] if len(prod.coeffs) > self.N + 3 else ZERO

    def dual_basis(self, j: int) -> QElem:
        """The element phi^j with (phi^j, p^i) = delta_ij."""
        R = self.ring
        N = self.N
        if j <= 3:
            return R.gen_power(3 - j) * (R.gen_power(N) + R.one()) / self.p_k
        return R.gen_power(N + 3 - j) / self.p_k


def state_pairing(t: TargetConfig, N: int) -> StateSpace:
    check_N(N)
    dim = N + 4
    eta = [[ZERO] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            if i + j == N + 3:
                eta[i][j] = t.p_k
            elif i + j == 2 * N + 3:
                eta[i][j] = -t.p_k  # p_k t^N with t^N = -1
    inv = _invert(eta)
    return StateSpace(N, t.p_k, tuple(map(tuple, eta)), tuple(map(tuple, inv)))


def _invert(m: list) -> list:
    n = len(m)
    cols = []
    for j in range(n):
        e = [ONE if i == j else ZERO for i in range(n)]
        sol = linsolve(m, e)
        if not sol.consistent or sol.rank < n:
            raise CheckFailed("pairing is degenerate")
        cols.append(sol.solution)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# quantum connection


@dataclass(frozen=True)
class AMMatrix:
    """A^M = A0 + q A1 with A0 multiplication by p and A1 the corner band.

    ``entries`` maps (row, col) -> (constant, q-coefficient).
    """

    N: int
    entries: dict

    def entry(self, i: int, j: int) -> tuple:
        return self.entries.get((i, j), (ZERO, ZERO))

    def column(self, j: int) -> dict:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}


def band_constants(t: TargetConfig) -> tuple:
    c1, c2, c3 = t.c_vec
    return (mpq(c1), mpq(c2), mpq(c3), mpq(c2), mpq(c1))


def connection_AM(t: TargetConfig, N: int) -> AMMatrix:
    if N < 5:
        raise InvalidSpec("the connection matrix needs N >= 5")
    dim = N + 4
    ent = {}
    for i in range(dim - 1):
        ent[(i + 1, i)] = (ONE, ZERO)
    for i, c in enumerate(band_constants(t)):
        const = mpq(-1) if i == 4 else ZERO  # t^N = -1 at (4, N+3)
        ent[(i, N - 1 + i)] = (const, c)
    return AMMatrix(N, ent)


def classical_limit_ok(A: AMMatrix) -> bool:
    """At q = 0, column j of A^M is p * p^j reduced in the state ring."""
    R = p_ring(A.N)
    for j in range(A.N + 4):
        img = R.gen() * R.gen_power(j)
        for i in range(A.N + 4):
            if A.entry(i, j)[0] != img.coeffs[i]:
                return False
    return True


# ---------------------------------------------------------------------------
# S-matrix


@dataclass
class SMMatrix:
    t: TargetConfig
    N: int
    order: int
    zdepth: int
    columns: list  # StateSeries, column j = S*(z) p^j

    def entry(self, i: int, j: int) -> dict:
        """(d, e) -> coefficient of p^i in column j."""
        return self.columns[j].entries_at(i)


def _drop_window(s: StateSeries, e_hi: int) -> StateSeries:
    return s.clip(e_hi=e_hi)


def solve_SM(t: TargetConfig, N: int, order: int, zdepth: int | None = None) -> SMMatrix:
    """Solve D_p S* = S* A^M starting from column 0 = I^M / z.

    Column j+1 = D_p(column j) - c q column(j-N+1) along the band.  Every
    column must have z^0 part exactly p^j and no positive powers of z; the
    wrap-around column must satisfy D_p(column N+3) = (c1 q - 1) column 4.
    Violations raise ConnectionResidualNonzero.
    """
    check_N(N)
    if zdepth is None:
        zdepth = default_zdepth(N, order)
    if zdepth < default_zdepth(N, order):
        raise DepthTooSmall(f"zdepth {zdepth} too small for order {order}")
    dim = N + 4
    top = zdepth - 1
    I = msp_ifunction(t, N, order, zdepth + dim)
    band = band_constants(t)
    cols = [I.series]
    for j in range(dim - 1):
        nxt = cols[j].D_p()
        if j >= N - 1:
            nxt = nxt - cols[j - N + 1].q_times(band[j - N + 1])
        cols.append(nxt)
    cols = [_drop_window(c, top) for c in cols]
    res = connection_residual(cols, t, N)
    if not res.passed:
        raise ConnectionResidualNonzero("S-matrix columns violate the connection", locus=res.first_failure)
    return SMMatrix(t, N, order, zdepth, cols)


def connection_residual(cols: list, t: TargetConfig, N: int) -> CheckReport:
    """Normalization and wrap-around checks for the S-matrix columns."""
    order = cols[0].q_order
    for j, c in enumerate(cols):
        for (i, d, e), v in c.terms.items():
            if e < 0:
                return CheckReport("sm-connection", FAIL, order, first_failure={
                    "module": "msp-genus0", "op": "solve_SM", "column": j, "row": i,
                    "coefficient": d, "z_power": -e})
            if e == 0 and not (d == 0 and i == j and v == 1):
                return CheckReport("sm-connection", FAIL, order, first_failure={
                    "module": "msp-genus0", "op": "solve_SM", "column": j, "row": i,
                    "coefficient": d, "z_power": 0})
        if not any(k == (j, 0, 0) for k in c.terms):
            return CheckReport("sm-connection", FAIL, order, first_failure={
                "module": "msp-genus0", "op": "solve_SM", "column": j, "coefficient": 0})
    c1 = band_constants(t)[4]
    last = cols[N + 3]
    wrap = last.D_p() - cols[4].q_times(c1) + cols[4]
    if not wrap.is_zero():
        i, d, e = min(wrap.terms, key=lambda k: (k[1], k[2]))
        return CheckReport("sm-connection", FAIL, order, first_failure={
            "module": "msp-genus0", "op": "solve_SM", "column": N + 3, "row": i,
            "coefficient": d, "z_power": -e})
    return CheckReport("sm-connection", PASS, order)


def birkhoff_connection(t: TargetConfig, N: int, order: int, zdepth: int | None = None) -> dict:
    """Derive A^M from column 0 alone.

    Column j's z^0 part is p^j, so the z^0 part of D_p(column j) is the
    j-th column of A^M.  Subtracting the lower columns it names gives
    column j+1.  Returns {(i, j): TruncSeries} of nonzero entries.
    """
    check_N(N)
    if zdepth is None:
        zdepth = default_zdepth(N, order)
    dim = N + 4
    I = msp_ifunction(t, N, order, zdepth + dim)
    cols = [I.series]
    A: dict = {}
    for j in range(dim):
        v = cols[j].D_p()
        col_entries = {}
        for (i, d, e), c in v.terms.items():
            if e < 0:
                raise ConnectionResidualNonzero("positive power of z in D_p S*", locus=(i, j, d, e))
            if e == 0:
                col_entries.setdefault(i, [ZERO] * (order + 1))[d] += c
        for i, cs in col_entries.items():
            A[(i, j)] = TruncSeries.from_coeffs(cs, order)
        if j == dim - 1:
            break
        sub = None
        for i, ser in col_entries.items():
            if i == j + 1:
                continue
            if i > j:
                raise ConnectionResidualNonzero("connection is not lower-banded", locus=(i, j))
            for d in range(order + 1):
                if ser[d] != 0:
                    piece = cols[i].scale(ser[d])
                    for _ in range(d):
                        piece = piece.q_times()
                    sub = piece if sub is None else sub + piece
        lead = A.get((j + 1, j))
        if lead is None or lead != TruncSeries.constant(1, order):
            raise ConnectionResidualNonzero("subdiagonal entry is not 1", locus=(j + 1, j))
        cols.append(v if sub is None else v - sub)
    return A


# ---------------------------------------------------------------------------
# symplectic identity


def _rows(col: StateSeries) -> dict:
    out: dict = {}
    for (i, d, e), c in col.terms.items():
        out.setdefault(i, []).append((d, e, c))
    return out


def symplectic_check(S: SMMatrix, space: StateSpace | None = None) -> CheckReport:
    """M(-z)^T eta M(z) = eta through q^order and the full w-window."""
    N = S.N
    space = space or state_pairing(S.t, N)
    dim = N + 4
    top = S.zdepth - 1
    rows = [_rows(c) for c in S.columns]
    partners = {a: [b for b in (N + 3 - a, 2 * N + 3 - a) if 0 <= b < dim] for a in range(dim)}
    for j in range(dim):
        for l in range(j, dim):
            acc: dict = {}
            for a, terms_a in rows[j].items():
                for b in partners[a]:
                    eta_ab = space.eta[a][b]
                    for d1, e1, c1 in terms_a:
                        s1 = -c1 if e1 % 2 else c1
                        for d2, e2, c2 in rows[l].get(b, ()):
                            if d1 + d2 <= S.order and e1 + e2 <= top:
                                key = (d1 + d2, e1 + e2)
                                acc[key] = acc.get(key, 0) + s1 * eta_ab * c2
            acc[(0, 0)] = acc.get((0, 0), 0) - space.eta[j][l]
            bad = sorted(k for k, v in acc.items() if v != 0)
            if bad:
                d, e = bad[0]
                return CheckReport("sm-symplectic", FAIL, S.order, first_failure={
                    "module": "msp-genus0", "op": "symplectic_check", "column_pair": [j, l],
                    "coefficient": d, "z_power": -e})
    return CheckReport("sm-symplectic", PASS, S.order, payload={"zwindow": top})


# ---------------------------------------------------------------------------
# Picard-Fuchs operator


def pf_apply(t: TargetConfig, N: int, order: int, zdepth: int | None = None, ordinary=None) -> StateSeries:
    """Apply D_p^5 (D_p^N + 1) - c q prod_{j ordinary}(k D_p + j z) to I^M."""
    check_N(N)
    ordinary = sorted(t.ordinary if ordinary is None else ordinary)
    if zdepth is None:
        zdepth = default_zdepth(N, order) + N + 6
    I = msp_ifunction(t, N, order, zdepth).full()
    x = I
    for _ in range(N):
        x = x.D_p()
    x = x + I.clip(e_hi=x.e_hi)
    for _ in range(5):
        x = x.D_p()
    y = I
    for j in ordinary:
        y = y.D_p().scale(t.k) + y.times_z().scale(j)
    y = y.q_times(t.pf_constant)
    return x - y


def pf_check(t: TargetConfig, N: int, order: int, zdepth: int | None = None, ordinary=None) -> CheckReport:
    res = pf_apply(t, N, order, zdepth, ordinary)
    if res.is_zero():
        return CheckReport(f"pf-k{t.k}-N{N}", PASS, order, payload={"zwindow": res.e_hi})
    i, d, e = min(res.terms, key=lambda k: (k[1], k[2], k[0]))
    return CheckReport(f"pf-k{t.k}-N{N}", FAIL, order, first_failure={
        "module": "msp-genus0", "op": "pf_check", "coefficient": d, "z_power": -e, "p_power": i})


# ---------------------------------------------------------------------------
# specialized entries


def t_alpha(N: int, alpha: int, ring=None) -> QElem:
    """-t^(2 alpha + 1) in Q[t]/(t^N + 1) (or in another quotient of Q[t])."""
    return -(ring or t_ring(N)).gen_power(2 * alpha + 1)


def zeta(N: int) -> QElem:
    return t_ring(N).gen_power(2)


def product_of_weight_differences(N: int, alpha: int, ring=None) -> QElem:
    """prod_{beta != alpha}(t_beta - t_alpha) by brute force.

    In Q[t]/(t^N + 1) this product vanishes on the t = -1 factor, where all
    t_beta coincide; pass ``primitive_t_ring(N)`` to compute in the field
    factor, where it equals N t_alpha^(N-1).
    """
    ring = ring or t_ring(N)
    ta = t_alpha(N, alpha, ring)
    out = ring.one()
    for beta in range(1, N + 1):
        if beta % N != alpha % N:
            out = out * (t_alpha(N, beta, ring) - ta)
    return out


def weight_difference_formula(N: int, alpha: int, ring=None) -> QElem:
    """N t_alpha^(N-1), the derivative of x^N - 1 at x = t_alpha."""
    return t_alpha(N, alpha, ring) ** (N - 1) * N


def degree_bound(t: TargetConfig, N: int, a: int, i: int) -> int:
    base = ceil(mpq(a, t.k)) - 1
    return base if i < N else base + 1


def lemma_degree_bound(t: TargetConfig, N: int, a: int, i: int) -> mpq:
    """Per-vertex genus-zero bound (a - 1)/k + i/N (its floor bounds the degree)."""
    return mpq(a - 1, t.k) + mpq(i, N)


def vanishing_orders(t: TargetConfig, a: int, order: int) -> list:
    """Degrees d <= order at which a denominator factor vanishes at z = k t_alpha / a."""
    out = []
    for d in range(1, order + 1):
        for ai in t.weights:
            x = mpq(ai * a, t.k)
            if x.denominator == 1 and 1 <= x <= ai * d:
                out.append(d)
                break
    return out


def _den_factors(t: TargetConfig, N: int, d: int, s) -> list:
    """Denominator factors introduced at degree d, evaluated at s = z / t_alpha."""
    out = []
    for ai in t.weights:
        for m in range(ai * (d - 1) + 1, ai * d + 1):
            out.append(m * s - ai)
    out.append((d * s - 1) ** N + 1)
    return out


def _num_factors(t: TargetConfig, d: int, s) -> list:
    return [m * s - t.k for m in range(t.k * (d - 1) + 1, t.k * d + 1)]


def _den_factor_polys(t: TargetConfig, N: int, d: int) -> list:
    """The factors of ``_den_factors`` as polynomials in s (low degree first)."""
    out = [[mpq(-ai), mpq(m)] for ai in t.weights for m in range(ai * (d - 1) + 1, ai * d + 1)]
    shifted = [binom(N, j) * mpq(d) ** j * (-1) ** (N - j) for j in range(N + 1)]
    shifted[0] += 1
    out.append(shifted)
    return out


def _num_factor_polys(t: TargetConfig, d: int) -> list:
    return [[mpq(-t.k), mpq(m)] for m in range(t.k * (d - 1) + 1, t.k * d + 1)]


def restricted_column0(t: TargetConfig, N: int, a: int, order: int, allow_limit: bool = False) -> TruncSeries:
    """Column 0 at pt_alpha and z = k t_alpha / a, a series in q with rational coefficients.

    The q^d coefficient is prod_{m<=kd}(m s - k) / [prod_i prod_{m<=a_i d}(m s - a_i)
    prod_{m<=d}((m s - 1)^N + 1)] with s = k/a; the powers of t_alpha cancel.
    A vanishing denominator raises VanishingFactor unless ``allow_limit``,
    in which case the limit in s is taken (only meaningful for 0/0).
    """
    s = mpq(t.k, a)
    if not allow_limit:
        out = [ONE]
        acc = ONE
        for d in range(1, order + 1):
            dens = _den_factors(t, N, d, s)
            if any(f == 0 for f in dens):
                raise VanishingFactor(f"denominator vanishes at a={a}, degree {d}", degree=d,
                                      order_of_zero=sum(1 for f in dens if f == 0))
            for f in _num_factors(t, d, s):
                acc *= f
            for f in dens:
                acc /= f
            out.append(acc)
        return TruncSeries.from_coeffs(out, order)
    # Limit: work with polynomials in s, cancel the common (s - k/a) power.
    out = [ONE]
    num, den = [ONE], [ONE]
    for d in range(1, order + 1):
        for f in _num_factor_polys(t, d):
            num = poly_mul(num, f)
        for f in _den_factor_polys(t, N, d):
            den = poly_mul(den, f)
        out.append(_limit_ratio(num, den, s, d))
    return TruncSeries.from_coeffs(out, order)


def _limit_ratio(num: list, den: list, s, d: int):
    root = [-s, ONE]
    zn = 0
    while poly_eval(num, s) == 0 and any(num):
        num, _ = poly_divmod(num, root)
        zn += 1
    zd = 0
    while poly_eval(den, s) == 0:
        den, _ = poly_divmod(den, root)
        zd += 1
    if zd > zn:
        raise VanishingFactor("pole at the evaluation point", degree=d, order_of_zero=zd - zn)
    if zn > zd:
        return ZERO
    return poly_eval(num, s) / poly_eval(den, s)


def specialize_recursive(t: TargetConfig, N: int, a: int, order: int, allow_limit: bool = False) -> list:
    """f_i for i = 0..N+3 with S^alpha_{a;i} = t_alpha^i f_i.

    Restricting D_p S* = S* A^M to pt_alpha at z = k t_alpha / a gives
    f_(i+1) = (s D - 1) f_i - c q f_(i-N+1) along the band, s = k/a.
    """
    s = mpq(t.k, a)
    band = band_constants(t)
    f = [restricted_column0(t, N, a, order, allow_limit)]
    for j in range(N + 3):
        nxt = f[j].D() * s - f[j]
        if j >= N - 1:
            nxt = nxt - f[j - N + 1].shift(1) * band[j - N + 1]
        f.append(nxt)
    return f


def specialize_closed(t: TargetConfig, N: int, a: int, order: int) -> TruncSeries:
    """S^alpha_{a;0} from the closed falling-Pochhammer formula.

    1 + sum_d q^d (a-1)_{kd} (a/k)^{Nd} (-1)^d
        / [prod_i (a_i a/k - 1)_{a_i d} prod_{m<=d}((a/k - m)^N - (a/k)^N)].
    """
    x = mpq(a, t.k)
    out = [ONE]
    for d in range(1, order + 1):
        num = _falling(mpq(a - 1), t.k * d) * x ** (N * d) * (-1) ** d
        den = ONE
        for ai in t.weights:
            den *= _falling(ai * x - 1, ai * d)
        for m in range(1, d + 1):
            den *= (x - m) ** N - x ** N
        if den == 0:
            raise VanishingFactor(f"closed formula denominator vanishes at a={a}", degree=d)
        out.append(num / den)
    return TruncSeries.from_coeffs(out, order)


def _falling(x, m: int):
    out = ONE
    for j in range(m):
        out *= x - j
    return out


def specialize_from_SM(S: SMMatrix, a: int, i: int) -> TruncSeries:
    """f_i(k/a) read off the solved S-matrix.

    Restricted to pt_alpha, column i is t_alpha^i f_i(s) with s = z/t_alpha,
    and its q^d coefficient is rational in s with denominator Den_d(s) of
    degree (k + N) d.  The w-expansion times Den_d must be a polynomial in s;
    its negative-power part is checked to vanish on the available window,
    then the polynomial is evaluated at s = k/a.
    """
    t, N = S.t, S.N
    s0 = mpq(t.k, a)
    top = S.zdepth - 1
    col = S.columns[i]
    gammas: dict = {}
    for (ii, d, e), c in col.terms.items():
        if (ii - e - i) % N:
            raise CheckFailed("grading violated in S-matrix column", locus=(ii, d, e))
        sign = -c if ii % 2 else c
        gammas[(d, e)] = gammas.get((d, e), 0) + sign
    out = []
    den = [ONE]
    for d in range(0, S.order + 1):
        if d:
            for f in _den_factor_polys(t, N, d):
                den = poly_mul(den, f)
        deg_den = len(den) - 1
        # Laurent series sum_e gamma_e s^(-e) times den, coefficient of s^m.
        need = deg_den + 8
        if top < need:
            raise DepthTooSmall(f"route B needs zdepth > {need} for degree {d}")
        coeffs: dict = {}
        for (dd, e), g in gammas.items():
            if dd != d or g == 0:
                continue
            for n, dn in enumerate(den):
                if dn != 0:
                    m = n - e
                    coeffs[m] = coeffs.get(m, 0) + g * dn
        # terms s^m with m < 0 are complete only when e <= top
        for m, v in coeffs.items():
            if m < 0 and m >= deg_den - top and v != 0:
                raise ExpansionWindowViolated(
                    f"column {i} at q^{d} is not Num/Den_d", locus={"coefficient": d, "s_power": m})
        numer = [coeffs.get(m, ZERO) for m in range(0, deg_den + i + 1)]
        dv = poly_eval(den, s0)
        if dv == 0:
            raise VanishingFactor(f"denominator vanishes at a={a}, degree {d}", degree=d)
        out.append(poly_eval(numer, s0) / dv)
    return TruncSeries.from_coeffs(out, S.order)


def specialized_entry(f_i: TruncSeries, N: int, alpha: int, i: int) -> TruncSeries:
    """S^alpha_{a;i} = t_alpha^i f_i as a series over Q[t]/(t^N + 1)."""
    ta_i = t_alpha(N, alpha) ** i
    return f_i.map(lambda c: ta_i * c)


def rotation_holds(f_i: TruncSeries, N: int, i: int, alpha: int, beta: int) -> bool:
    """S^alpha_{a;i} = zeta^(i (alpha - beta)) S^beta_{a;i} in Q[t]/(t^N + 1)."""
    sa = specialized_entry(f_i, N, alpha, i)
    sb = specialized_entry(f_i, N, beta, i)
    z = zeta(N) ** ((i * (alpha - beta)) % (2 * N))
    return all(x == z * y for x, y in zip(sa.coeffs, sb.coeffs))


# ---------------------------------------------------------------------------
# two-point function


def two_point_W(S: SMMatrix, max_total: int, space: StateSpace | None = None) -> dict:
    """Regular part of W^M: {(i, j): {(d, s, u): coeff of z1^(-s-1) z2^(-u-1)}}.

    W^M = -M(-z1) eta^{-1} M(-z2)^T / (z1 + z2) with M the matrix of S*.
    Writing M(-z1) eta^{-1} M(-z2)^T - eta^{-1} = (w1 + w2) G(w1, w2), the
    correlator part is -w1 w2 G.  Divisibility by w1 + w2 is checked.
    """
    N = S.N
    dim = N + 4
    space = space or state_pairing(S.t, N)
    if S.zdepth - 1 < max_total:
        raise DepthTooSmall("w-window too small for the requested two-point table")
    entries = [[S.entry(i, a) for a in range(dim)] for i in range(dim)]
    inv_nz = {a: [(b, space.eta_inv[a][b]) for b in range(dim) if space.eta_inv[a][b] != 0] for a in range(dim)}
    out = {}
    for i in range(dim):
        for j in range(dim):
            F: dict = {}
            for a in range(dim):
                ea = entries[i][a]
                if not ea:
                    continue
                for b, hab in inv_nz[a]:
                    eb = entries[j][b]
                    for (d1, e1), c1 in ea.items():
                        if e1 > max_total:
                            continue
                        s1 = -c1 if e1 % 2 else c1
                        for (d2, e2), c2 in eb.items():
                            if d1 + d2 <= S.order and e1 + e2 <= max_total:
                                s2 = -c2 if e2 % 2 else c2
                                key = (d1 + d2, e1, e2)
                                F[key] = F.get(key, 0) + s1 * hab * s2
            F[(0, 0, 0)] = F.get((0, 0, 0), 0) - space.eta_inv[i][j]
            G = _divide_by_sum(F, S.order, max_total, (i, j))
            table = {(d, s, u): -g for (d, s, u), g in G.items() if g != 0}
            if table:
                out[(i, j)] = table
    return out


def _divide_by_sum(F: dict, order: int, max_total: int, where) -> dict:
    """Solve F = (w1 + w2) G coefficientwise, checking exact divisibility."""
    G = {}
    for d in range(order + 1):
        for n in range(0, max_total + 1):
            if n == 0:
                if F.get((d, 0, 0), 0) != 0:
                    raise CheckFailed("two-point function has a constant term", locus=where)
                continue
            prev = ZERO
            for a in range(n):
                # coefficient of w1^a w2^(n-a): G[a-1, n-a] + G[a, n-a-1]
                g = F.get((d, a, n - a), 0) - prev
                G[(d, a, n - 1 - a)] = g
                prev = g
            if F.get((d, n, 0), 0) != prev:
                raise CheckFailed("two-point numerator not divisible by w1 + w2", locus=(where, d, n))
    return G


def contracted_two_point(table: dict, space: StateSpace) -> dict:
    """(W, 1 (x) 1) = sum_ij W_ij (p^i, 1)(p^j, 1)."""
    N = space.N
    w = table.get((N + 3, N + 3), {})
    return {k: v * space.p_k ** 2 for k, v in w.items()}
