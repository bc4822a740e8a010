"""The operator M F = w^(-1) (w + x d/dx)(F / F(0, x)) applied to the
hypergeometric series F(w, x), and the identities satisfied by the
resulting tower I_0, ..., I_4.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import InvalidSpec, WValuationViolated
from .exact import ONE, ZERO, TruncSeries
from .ifun import Generators, generators
from .report import CheckReport, combine, series_check
from .targets import TargetConfig, target_config

DEFAULT_GUARD = 4
TOWER_LENGTH = 5


@dataclass
class WSeries:
    """sum_e w^e cols[e](x); each column is a series in x, exact for w^e
    with e < len(cols)."""

    cols: list

    @property
    def w_order(self) -> int:
        return len(self.cols)

    @property
    def x_order(self) -> int:
        return self.cols[0].order

    def coefficient(self, d: int, e: int) -> mpq:
        return self.cols[e][d]

    def at_zero(self) -> TruncSeries:
        """F(0, x)."""
        return self.cols[0]

    def __eq__(self, other):
        return isinstance(other, WSeries) and all(a == b for a, b in zip(self.cols, other.cols)) \
            and self.w_order == other.w_order


def _times_linear(v: list, c, m) -> list:
    """v(w) * (c w + m), truncated to len(v)."""
    return [m * v[e] + (c * v[e - 1] if e else 0) for e in range(len(v))]


def _over_linear(v: list, c, m) -> list:
    """v(w) / (c w + m) for m != 0."""
    out = []
    for e in range(len(v)):
        s = v[e] - (c * out[e - 1] if e else 0)
        out.append(mpq(s) / m)
    return out


def _from_rows(rows: list, x_order: int, w_order: int) -> WSeries:
    cols = [TruncSeries.from_coeffs([rows[d][e] for d in range(x_order + 1)], x_order) for e in range(w_order)]
    return WSeries(cols)


def f_series(t: TargetConfig, x_order: int, w_order: int) -> WSeries:
    """sum_d x^d prod_{m<=kd}(k w + m) / prod_i prod_{m<=a_i d}(a_i w + m)."""
    if x_order < 0 or w_order < 1:
        raise InvalidSpec("need x_order >= 0 and w_order >= 1")
    v = [ONE] + [ZERO] * (w_order - 1)
    rows = [list(v)]
    for d in range(1, x_order + 1):
        for m in range(t.k * (d - 1) + 1, t.k * d + 1):
            v = _times_linear(v, t.k, m)
        for a in t.weights:
            for m in range(a * (d - 1) + 1, a * d + 1):
                v = _over_linear(v, a, m)
        rows.append(list(v))
    return _from_rows(rows, x_order, w_order)


def f_series_sextic_display(x_order: int, w_order: int) -> WSeries:
    """The k = 6 series in its regrouped form
    sum_d x^d prod_{r<=6d}(6w + r) / (2^d prod_{r<=d}((w + r)^5 (2w + 2r - 1)))."""
    v = [ONE] + [ZERO] * (w_order - 1)
    rows = [list(v)]
    for d in range(1, x_order + 1):
        for r in range(6 * (d - 1) + 1, 6 * d + 1):
            v = _times_linear(v, 6, r)
        for _ in range(5):
            v = _over_linear(v, 1, d)
        v = _over_linear(v, 2, 2 * d - 1)
        v = [c / 2 for c in v]
        rows.append(list(v))
    return _from_rows(rows, x_order, w_order)


def M_operator(F: WSeries, step: int = 0) -> WSeries:
    """M F = w^(-1) D_w (F / F(0, x)) with D_w = w + x d/dx.

    The w^0 part of D_w(F/F(0,x)) must vanish; otherwise
    WValuationViolated is raised.  The result has one fewer w-coefficient.
    """
    if F.w_order < 2:
        raise InvalidSpec("w-window exhausted")
    base = F.at_zero().inverse()
    G = [c * base for c in F.cols]
    H0 = G[0].D()
    if not H0.is_zero():
        raise WValuationViolated("D_w(F/F(0,x)) is not divisible by w",
                                 locus={"step": step, "coefficient": H0.valuation()})
    cols = [G[e - 1] + G[e].D() for e in range(1, F.w_order)]
    return WSeries(cols)


def ip_tower(t: TargetConfig, x_order: int, guard: int = DEFAULT_GUARD) -> list:
    """[I_0, ..., I_4] with I_p = (M^p F)(0, x)."""
    F = f_series(t, x_order, TOWER_LENGTH + guard)
    out = [F.at_zero()]
    for p in range(1, TOWER_LENGTH):
        F = M_operator(F, p)
        out.append(F.at_zero())
    return out


def verify_zz(t: TargetConfig, x_order: int, tower: list | None = None) -> CheckReport:
    """I_0 ... I_4 = Y and I_p = I_(4-p) through x^x_order."""
    tower = tower or ip_tower(t, x_order)
    Y = TruncSeries.geometric(t.r, x_order)
    prod = tower[0]
    for s in tower[1:]:
        prod = prod * s
    parts = [series_check(f"zz-product-k{t.k}", "zagier-zinger", "verify_zz", prod, Y)]
    for p in range(2):
        parts.append(series_check(f"zz-symmetry-{p}-k{t.k}", "zagier-zinger", "verify_zz", tower[p], tower[4 - p]))
    return combine(f"zz-verify-k{t.k}", parts)


def cross_check_generators(t: TargetConfig, x_order: int, tower: list | None = None,
                           gens: Generators | None = None) -> CheckReport:
    """I_0, I_1, I_2 of the tower against I0, I11, I22 built from the I-function."""
    tower = tower or ip_tower(t, x_order)
    gens = gens or generators(t, x_order)
    pairs = [("I0", tower[0], gens.I0), ("I11", tower[1], gens.I11), ("I22", tower[2], gens.I22)]
    parts = [series_check(f"zz-vs-{name}-k{t.k}", "zagier-zinger", "ip_tower", a, b) for name, a, b in pairs]
    return combine(f"zz-generators-k{t.k}", parts)


def sextic_display_report(x_order: int = 5, w_order: int = 7) -> CheckReport:
    """The generic and the regrouped k = 6 series agree coefficient by coefficient."""
    a = f_series(target_config(6), x_order, w_order)
    b = f_series_sextic_display(x_order, w_order)
    parts = [series_check(f"zz-display-w{e}", "zagier-zinger", "f_series", a.cols[e], b.cols[e])
             for e in range(w_order)]
    return combine("zz-display-k6", parts)
