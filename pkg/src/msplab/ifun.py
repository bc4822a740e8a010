"""Hypergeometric series: the I-function of Z, its generators, the I-function
of the master space and the level-1 mirror-map integral."""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import DepthTooSmall, InvalidSpec
from .exact import ONE, ZERO, TruncSeries, binom
from .state import StateSeries
from .targets import TargetConfig, check_N

# Two readings of the second connection entry I22, see ``generators``.
I22_READINGS = ("log-prefactor", "literal")
DEFAULT_I22_READING = "log-prefactor"


# ---------------------------------------------------------------------------
# I-function of Z


@dataclass(frozen=True)
class ZIFunction:
    """Components of I(q, z)/z = I0 + I1 u + I2 u^2 + I3 u^3 with u = H/z."""

    I0: TruncSeries
    I1: TruncSeries
    I2: TruncSeries
    I3: TruncSeries

    @property
    def order(self) -> int:
        return self.I0.order

    def components(self) -> tuple:
        return (self.I0, self.I1, self.I2, self.I3)


def _mul_linear(v: list, c, m) -> list:
    """v * (m + c u) in Q[u]/u^4."""
    return [m * v[0]] + [m * v[j] + c * v[j - 1] for j in range(1, 4)]


def _div_linear(v: list, c, m) -> list:
    """v / (m + c u) in Q[u]/u^4."""
    out = []
    for j in range(4):
        s = v[j] - (c * out[j - 1] if j else 0)
        out.append(mpq(s) / m)
    return out


def z_ifunction_terms(t: TargetConfig, order: int) -> list[list]:
    """Per-degree coefficients in u = H/z of the q^d term of I/z.

    The q^d term is prod_{m<=kd}(kH + mz) / prod_i prod_{m<=a_i d}(a_i H + mz);
    the total z-degree cancels because sum a_i = k, leaving a polynomial in u.
    """
    if order < 0:
        raise InvalidSpec("order must be nonnegative")
    v = [ONE, ZERO, ZERO, ZERO]
    out = [list(v)]
    for d in range(1, order + 1):
        for m in range(t.k * (d - 1) + 1, t.k * d + 1):
            v = _mul_linear(v, t.k, m)
        for a in t.weights:
            for m in range(a * (d - 1) + 1, a * d + 1):
                v = _div_linear(v, a, m)
        out.append(list(v))
    return out


def z_ifunction(t: TargetConfig, order: int) -> ZIFunction:
    if order < 1:
        raise InvalidSpec("order must be at least 1")
    terms = z_ifunction_terms(t, order)
    comps = [TruncSeries.from_coeffs([terms[d][j] for d in range(order + 1)], order) for j in range(4)]
    return ZIFunction(*comps)


# ---------------------------------------------------------------------------
# generators


@dataclass
class Generators:
    """Series generating the ring of normalized potentials.

    ``A_m(m)`` and ``B_m(m)`` are built lazily from D^m I11 / I11 and
    D^m I0 / I0.
    """

    t: TargetConfig
    order: int
    I: ZIFunction
    I11: TruncSeries
    I22: TruncSeries
    Y: TruncSeries
    J1: TruncSeries
    J2: TruncSeries
    J3: TruncSeries
    i22_reading: str = DEFAULT_I22_READING
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def I0(self) -> TruncSeries:
        return self.I.I0

    def A_m(self, m: int) -> TruncSeries:
        return self._ratio("A", self.I11, m)

    def B_m(self, m: int) -> TruncSeries:
        return self._ratio("B", self.I0, m)

    def _ratio(self, tag: str, base: TruncSeries, m: int) -> TruncSeries:
        key = (tag, m)
        if key not in self._cache:
            if m < 0:
                raise InvalidSpec("generator index must be nonnegative")
            f = base
            for _ in range(m):
                f = f.D()
            self._cache[key] = f / base
        return self._cache[key]

    @property
    def A(self) -> TruncSeries:
        return self.A_m(1)

    @property
    def B(self) -> TruncSeries:
        return self.B_m(1)

    @property
    def B2(self) -> TruncSeries:
        return self.B_m(2)

    @property
    def B3(self) -> TruncSeries:
        return self.B_m(3)

    @property
    def X(self) -> TruncSeries:
        """1 - Y = -rq/(1 - rq)."""
        return 1 - self.Y

    def named(self) -> dict:
        return {"A": self.A, "B": self.B, "B2": self.B2, "B3": self.B3, "Y": self.Y}


def i22_series(J1: TruncSeries, J2: TruncSeries, I11: TruncSeries, reading: str) -> TruncSeries:
    """The second connection entry of Z under either reading.

    ``literal``: D((D J2 + J1) / I11) with J_i = I_i / I0 as plain series.
    ``log-prefactor``: the J_i carry their log q prefactor, so the ratio
    J2'/J1' acquires a log q that D turns into the leading 1; the result is
    1 + D((J1 + D J2) / I11).
    """
    inner = (J2.D() + J1) / I11
    if reading == "literal":
        return inner.D()
    if reading == "log-prefactor":
        return 1 + inner.D()
    raise InvalidSpec(f"unknown I22 reading {reading!r}; expected one of {I22_READINGS}")


def generators(t: TargetConfig, order: int, i22_reading: str = DEFAULT_I22_READING) -> Generators:
    if order < 2:
        raise InvalidSpec("order must be at least 2")
    return generators_from_ifunction(t, z_ifunction(t, order), i22_reading)


def generators_from_ifunction(t: TargetConfig, I: ZIFunction,
                              i22_reading: str = DEFAULT_I22_READING) -> Generators:
    order = I.order
    inv0 = I.I0.inverse()
    J1, J2, J3 = I.I1 * inv0, I.I2 * inv0, I.I3 * inv0
    I11 = 1 + J1.D()
    I22 = i22_series(J1, J2, I11, i22_reading)
    Y = TruncSeries.geometric(t.r, order)
    return Generators(t, order, I, I11, I22, Y, J1, J2, J3, i22_reading)


# ---------------------------------------------------------------------------
# I-function of the master space, expanded at z = infinity


def default_zdepth(N: int, order: int) -> int:
    """Smallest window holding w^(N*order), the leading term of q^order."""
    return N * order + 1


@dataclass
class MSPIFunction:
    """I^M(q, z)/z as a sparse series in p, q and w = 1/z.

    The q^d coefficient equals w^(N d) times a power series in w; entries
    are exact for w-exponents 0..zdepth-1.  ``full`` returns I^M itself
    (one extra power of z).
    """

    t: TargetConfig
    N: int
    order: int
    zdepth: int
    series: StateSeries

    def full(self) -> StateSeries:
        return self.series.times_z()

    def coefficient(self, i: int, d: int, e: int):
        """[p^i q^d w^e] of I^M / z."""
        return self.series.get(i, d, e)


def _pmul(v: list, j: int, N: int) -> list:
    """Multiply a dense PRing vector by p^j (p^(N+4) = -p^4)."""
    dim = N + 4
    for _ in range(j):
        top = v[dim - 1]
        v = [ZERO] + v[: dim - 1]
        if top != 0:
            v[4] -= top
    return v


def _vadd(a: list, b: list, s=ONE) -> list:
    return [x + s * y for x, y in zip(a, b)]


def _series_mul_linear(F: list, m, c, N: int) -> list:
    """F * (m + c p w) where F[e] is the dense PRing coefficient of w^e."""
    out = []
    for e in range(len(F)):
        g = [m * x for x in F[e]]
        if e:
            g = _vadd(g, _pmul(F[e - 1], 1, N), c)
        out.append(g)
    return out


def _series_div_linear(F: list, m, c, N: int) -> list:
    """F / (m + c p w)."""
    out = []
    for e in range(len(F)):
        g = F[e]
        if e:
            g = _vadd(g, _pmul(out[e - 1], 1, N), -c)
        out.append([x / m for x in g])
    return out


def _series_div_shifted_power(F: list, m: int, N: int) -> list:
    """F / ((m + p w)^N + w^N)."""
    # P(w) = sum_j P_j w^j with P_j = C(N,j) m^(N-j) p^j, plus 1 at w^N.
    P = [(binom(N, j) * mpq(m) ** (N - j), j) for j in range(N + 1)]
    lead = P[0][0]
    out = []
    for e in range(len(F)):
        g = list(F[e])
        for j in range(1, min(e, N) + 1):
            cj, pj = P[j]
            g = _vadd(g, _pmul(out[e - j], pj, N), -cj)
            if j == N:
                g = _vadd(g, out[e - j], -ONE)
        out.append([x / lead for x in g])
    return out


def msp_ifunction(t: TargetConfig, N: int, order: int, zdepth: int | None = None) -> MSPIFunction:
    """Expand I^M/z at z = infinity under t^N = -1.

    The q^d term of I^M/z is

        w^(N d) prod_{m<=kd}(m + k p w)
        / [prod_i prod_{m<=a_i d}(m + a_i p w) * prod_{m<=d}((m + p w)^N + w^N)],

    computed degree by degree by multiplying and dividing by one factor at
    a time.  Each factor has nonzero constant term in w, so the divisions
    are exact power-series divisions.
    """
    check_N(N)
    if order < 0:
        raise InvalidSpec("order must be nonnegative")
    if zdepth is None:
        zdepth = default_zdepth(N, order)
    if zdepth < default_zdepth(N, order):
        raise DepthTooSmall(
            f"zdepth {zdepth} cannot hold w^{N * order}, the leading exponent of q^{order}"
        )
    dim = N + 4
    top_e = zdepth - 1
    out = StateSeries(N, order, 0, top_e)
    unit = [ONE] + [ZERO] * (dim - 1)
    out.add_term(0, 0, 0, ONE)
    F = [unit] + [[ZERO] * dim for _ in range(top_e)]
    for d in range(1, order + 1):
        width = top_e - N * d + 1
        if width <= 0:
            break
        F = F[:width]
        for m in range(t.k * (d - 1) + 1, t.k * d + 1):
            F = _series_mul_linear(F, m, t.k, N)
        for a in t.weights:
            for m in range(a * (d - 1) + 1, a * d + 1):
                F = _series_div_linear(F, m, a, N)
        F = _series_div_shifted_power(F, d, N)
        for e, vec in enumerate(F):
            for i, c in enumerate(vec):
                if c != 0:
                    out.add_term(i, d, e + N * d, c)
    return MSPIFunction(t, N, order, zdepth, out)


# ---------------------------------------------------------------------------
# level-1 mirror map


def level1_L(t: TargetConfig, N: int, order: int) -> TruncSeries:
    """L = (1 - r q)^(1/N)."""
    base = TruncSeries.from_coeffs([ONE, -t.r], order)
    return base.power(mpq(1, N))


def tau_level1(t: TargetConfig, N: int, order: int) -> TruncSeries:
    """The integral of (L(x) - 1) dx/x from 0 to q.

    The level-1 flat coordinate is -t_alpha times this series.
    """
    if order < 1:
        raise InvalidSpec("order must be at least 1")
    check_N(N)
    return (level1_L(t, N, order) - 1).integrate_dlog()
