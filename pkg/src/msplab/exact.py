"""Exact arithmetic substrate.

Rationals are ``gmpy2.mpq``.  Everything else here is built on top of them:
dense polynomials (lists of coefficients, lowest degree first), truncated
power series in q, univariate quotient rings, Laurent blocks in z and
differential operators in D = q d/dq with coefficients in Q[X].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from gmpy2 import mpq

from .errors import (
    NonUnitConstantTerm,
    NonZeroInnerConstant,
    NotInvertible,
)

Rat = mpq
ZERO = mpq(0)
ONE = mpq(1)


def rat(x) -> mpq:
    """Coerce ints, Fractions, mpq and "num/den" strings to a rational."""
    if isinstance(x, str):
        return mpq(x.strip())
    return mpq(x)


def rat_str(x) -> str:
    """Serialize a rational as "num/den" (denominator always written)."""
    x = mpq(x)
    return f"{x.numerator}/{x.denominator}"


def binom(n, m: int) -> mpq:
    """Binomial coefficient for rational or integer ``n`` and integer m >= 0."""
    out = ONE
    for i in range(m):
        out = out * (n - i) / (i + 1)
    return out


# ---------------------------------------------------------------------------
# dense polynomials over Q, coefficient lists lowest degree first


def poly_trim(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    out = [ZERO] * n
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return poly_trim(out)


def poly_scale(a: Sequence, c) -> list:
    return poly_trim([c * x for x in a])


def poly_sub(a: Sequence, b: Sequence) -> list:
    return poly_add(a, poly_scale(b, -1))


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return poly_trim(out)


def poly_deriv(a: Sequence) -> list:
    return poly_trim([i * a[i] for i in range(1, len(a))])


def poly_eval(a: Sequence, x):
    out = ZERO
    for c in reversed(a):
        out = out * x + c
    return out


def poly_compose_affine(a: Sequence, u, v) -> list:
    """Return a(u + v*x) as a coefficient list."""
    out: list = []
    lin = [mpq(u), mpq(v)]
    for c in reversed(a):
        out = poly_add(poly_mul(out, lin), [c])
    return out


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = poly_trim([mpq(x) for x in a])
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] -= c * y
        a = poly_trim(a)
    return poly_trim(q), a


# ---------------------------------------------------------------------------
# exact linear algebra


@dataclass(frozen=True)
class LinearSolution:
    solution: tuple | None
    pivots: tuple
    rank: int
    consistent: bool


def linsolve(rows: Sequence[Sequence], rhs: Sequence) -> LinearSolution:
    """Solve ``rows @ x = rhs`` over Q by Gauss-Jordan elimination.

    Pivot columns are taken left to right; free variables are set to zero,
    which makes the returned solution deterministic.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [[mpq(x) for x in row] + [mpq(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if aug[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                row_r = aug[r]
                aug[i] = [x - f * y for x, y in zip(aug[i], row_r)]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return LinearSolution(None, tuple(pivots), r, False)
    x = [ZERO] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]
    return LinearSolution(tuple(x), tuple(pivots), r, True)


# ---------------------------------------------------------------------------
# truncated power series in q


def _zero_like(c):
    return c * 0


@dataclass(frozen=True, eq=False)
class TruncSeries:
    """Power series in q known exactly through q^order.

    Coefficients may be rationals or quotient-ring elements; any mix of
    orders contracts to the smaller one.
    """

    coeffs: tuple
    order: int

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coefficient count must be order + 1")

    # construction ---------------------------------------------------------
    @classmethod
    def from_coeffs(cls, coeffs: Iterable, order: int | None = None, zero=ZERO) -> "TruncSeries":
        cs = list(coeffs)
        if order is None:
            order = len(cs) - 1
        if len(cs) < order + 1:
            z = _zero_like(cs[0]) if cs else zero
            cs = cs + [z] * (order + 1 - len(cs))
        cs = [c if isinstance(c, QElem) else mpq(c) for c in cs[: order + 1]]
        return cls(tuple(cs), order)

    @classmethod
    def constant(cls, c, order: int) -> "TruncSeries":
        c = mpq(c) if isinstance(c, int) else c
        z = _zero_like(c)
        return cls((c,) + (z,) * order, order)

    @classmethod
    def monomial(cls, d: int, order: int, c=ONE) -> "TruncSeries":
        z = _zero_like(c)
        cs = [z] * (order + 1)
        if d <= order:
            cs[d] = c
        return cls(tuple(cs), order)

    @classmethod
    def geometric(cls, ratio, order: int) -> "TruncSeries":
        """1/(1 - ratio*q)."""
        ratio = mpq(ratio)
        return cls(tuple(ratio**d for d in range(order + 1)), order)

    # access ----------------------------------------------------------------
    def __getitem__(self, d: int):
        return self.coeffs[d]

    def __len__(self):
        return self.order + 1

    @property
    def zero(self):
        return _zero_like(self.coeffs[0])

    def valuation(self) -> int | None:
        for d, c in enumerate(self.coeffs):
            if c != 0:
                return d
        return None

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncSeries(self.coeffs[: order + 1], order)

    def degree(self) -> int:
        """Index of the highest nonzero retained coefficient (-1 if none)."""
        for d in range(self.order, -1, -1):
            if self.coeffs[d] != 0:
                return d
        return -1

    def map(self, f: Callable) -> "TruncSeries":
        return TruncSeries(tuple(f(c) for c in self.coeffs), self.order)

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries.constant(other, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return TruncSeries(tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)), n)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries(tuple(c * other for c in self.coeffs), self.order)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        zero = self.zero * other.zero
        out = []
        for d in range(n + 1):
            s = None
            for i in range(d + 1):
                x = a[i]
                if x == 0:
                    continue
                y = b[d - i]
                if y == 0:
                    continue
                s = x * y if s is None else s + x * y
            out.append(s if s is not None else zero)
        return TruncSeries(tuple(out), n)

    def __rmul__(self, other):
        return TruncSeries(tuple(other * c for c in self.coeffs), self.order)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        return TruncSeries(tuple(c / other for c in self.coeffs), self.order)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = TruncSeries.constant(ONE if not _is_ring(self.coeffs[0]) else self.coeffs[0].ring.one(), self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def inverse(self) -> "TruncSeries":
        a = self.coeffs
        a0 = a[0]
        try:
            inv0 = 1 / a0 if not _is_ring(a0) else a0.inverse()
        except (ZeroDivisionError, NotInvertible) as exc:
            raise NonUnitConstantTerm("constant term is not a unit") from exc
        out = [inv0]
        for d in range(1, self.order + 1):
            s = None
            for i in range(1, d + 1):
                if a[i] == 0:
                    continue
                t = a[i] * out[d - i]
                s = t if s is None else s + t
            out.append(_zero_like(inv0) if s is None else -(s * inv0))
        return TruncSeries(tuple(out), self.order)

    def D(self) -> "TruncSeries":
        """The derivation q d/dq."""
        return TruncSeries(tuple(d * c for d, c in enumerate(self.coeffs)), self.order)

    def shift(self, n: int) -> "TruncSeries":
        """Multiply by q^n, keeping the order."""
        z = self.zero
        return TruncSeries(((z,) * n + self.coeffs)[: self.order + 1], self.order)

    def integrate_dlog(self) -> "TruncSeries":
        """Return the series with zero constant term whose D equals self."""
        if self.coeffs[0] != 0:
            raise NonZeroInnerConstant("integrand has a nonzero constant term")
        return TruncSeries((self.zero,) + tuple(c / d for d, c in enumerate(self.coeffs) if d), self.order)

    def exp(self) -> "TruncSeries":
        """exp of a rational series with zero constant term."""
        a = self.coeffs
        if a[0] != 0:
            raise NonZeroInnerConstant("exp needs a zero constant term")
        # D(e) = e * D(a)
        da = [d * a[d] for d in range(self.order + 1)]
        out = [ONE]
        for n in range(1, self.order + 1):
            s = ZERO
            for i in range(1, n + 1):
                if da[i] != 0:
                    s += da[i] * out[n - i]
            out.append(s / n)
        return TruncSeries(tuple(out), self.order)

    def log(self) -> "TruncSeries":
        """log of a rational series with constant term 1."""
        if self.coeffs[0] != 1:
            raise NonUnitConstantTerm("log needs constant term 1")
        return (self.D() / self).integrate_dlog()

    def power(self, e) -> "TruncSeries":
        """self**e for rational e, constant term 1."""
        a = self.coeffs
        if a[0] != 1:
            raise NonUnitConstantTerm("rational powers need constant term 1")
        e = mpq(e)
        out = [ONE]
        for n in range(1, self.order + 1):
            s = ZERO
            for k in range(1, n + 1):
                if a[k] != 0:
                    s += (e * k - (n - k)) * a[k] * out[n - k]
            out.append(s / n)
        return TruncSeries(tuple(out), self.order)

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """self(inner(q)) for an inner series with zero constant term."""
        if inner.coeffs[0] != 0:
            raise NonZeroInnerConstant("inner series must have zero constant term")
        n = min(self.order, inner.order)
        inner = inner.truncate(n)
        out = TruncSeries.constant(self.coeffs[n], n)
        for d in range(n - 1, -1, -1):
            out = out * inner + self.coeffs[d]
        return out

    def revert(self) -> "TruncSeries":
        """Compositional inverse of a series q + O(q^2)."""
        if self.coeffs[0] != 0 or self.order < 1 or self.coeffs[1] != 1:
            raise NonUnitConstantTerm("reversion needs the shape q + O(q^2)")
        n = self.order
        # self = q*(1 + h);  g = Q / (1 + h(g)) by fixed-point iteration.
        h = TruncSeries(self.coeffs[1:] + (ZERO,), n) - 1
        g = TruncSeries.monomial(1, n)
        for _ in range(n):
            g = TruncSeries.monomial(1, n) * (h.compose(g) + 1).inverse()
        return g

    # comparison ------------------------------------------------------------
    def first_difference(self, other) -> int | None:
        other = self._coerce(other)
        n = min(self.order, other.order)
        for d in range(n + 1):
            if self.coeffs[d] != other.coeffs[d]:
                return d
        return None

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            try:
                other = self._coerce(other)
            except Exception:
                return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self):
        terms = []
        for d, c in enumerate(self.coeffs[:6]):
            if c != 0:
                terms.append(f"({c})q^{d}")
        tail = f" + O(q^{self.order + 1})"
        return "TruncSeries(" + (" + ".join(terms) or "0") + tail + ")"


def _is_ring(c) -> bool:
    return isinstance(c, QElem)


def series_arith(a: TruncSeries, b: TruncSeries | None, kind: str) -> TruncSeries:
    """Dispatch helper: ``mul``, ``invert`` (of a) or ``compose`` (a after b)."""
    if kind == "mul":
        return a * b
    if kind == "invert":
        return a.inverse()
    if kind == "compose":
        return a.compose(b)
    raise ValueError(f"unknown series operation {kind!r}")


# ---------------------------------------------------------------------------
# quotient rings Q[x]/(modulus)


class QuotientRing:
    """Q[var]/(modulus) for a monic modulus given lowest degree first."""

    def __init__(self, name: str, var: str, modulus: Sequence):
        mod = poly_trim([mpq(c) for c in modulus])
        if not mod or mod[-1] != 1:
            raise ValueError("modulus must be monic")
        self.name = name
        self.var = var
        self.modulus = tuple(mod)
        self.dim = len(mod) - 1
        self._tail = [(i, c) for i, c in enumerate(mod[:-1]) if c != 0]

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and self.modulus == other.modulus and self.var == other.var

    def __hash__(self):
        return hash((self.var, self.modulus))

    def __repr__(self):
        return f"QuotientRing({self.name})"

    def reduce(self, poly: Sequence) -> "QElem":
        c = [mpq(x) for x in poly]
        n = self.dim
        for deg in range(len(c) - 1, n - 1, -1):
            lead = c[deg]
            if lead == 0:
                continue
            c[deg] = ZERO
            s = deg - n
            for i, m in self._tail:
                c[s + i] -= lead * m
        c = c[:n] + [ZERO] * max(0, n - len(c))
        return QElem(self, tuple(c))

    def elem(self, coeffs: Sequence) -> "QElem":
        return self.reduce(coeffs)

    def zero(self) -> "QElem":
        return QElem(self, (ZERO,) * self.dim)

    def one(self) -> "QElem":
        return self.reduce([ONE])

    def gen(self, power: int = 1) -> "QElem":
        return self.gen_power(power)

    def gen_power(self, power: int) -> "QElem":
        if power < self.dim:
            c = [ZERO] * self.dim
            c[power] = ONE
            return QElem(self, tuple(c))
        return self.reduce([ZERO] * power + [ONE])

    def scalar(self, c) -> "QElem":
        return self.reduce([mpq(c)])


@dataclass(frozen=True, eq=False)
class QElem:
    ring: QuotientRing
    coeffs: tuple

    def _other(self, other) -> "QElem":
        if isinstance(other, QElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("elements of different rings")
            return other
        return self.ring.scalar(other)

    def __add__(self, other):
        o = self._other(other)
        return QElem(self.ring, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return QElem(self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._other(other)
        return QElem(self.ring, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QElem):
            return QElem(self.ring, tuple(a * other for a in self.coeffs))
        o = self._other(other)
        return self.ring.reduce(poly_mul(self.coeffs, o.coeffs) or [ZERO])

    def __rmul__(self, other):
        return QElem(self.ring, tuple(other * a for a in self.coeffs))

    def __truediv__(self, other):
        if isinstance(other, QElem):
            return self * other.inverse()
        return QElem(self.ring, tuple(a / other for a in self.coeffs))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, QElem):
            return self.ring == other.ring and self.coeffs == other.coeffs
        if isinstance(other, (int, type(ZERO))):
            return self.coeffs == self.ring.scalar(other).coeffs
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def mult_matrix(self) -> list[list]:
        """Matrix of multiplication by self in the monomial basis."""
        cols = [(self * self.ring.gen_power(j)).coeffs for j in range(self.ring.dim)]
        return [[cols[j][i] for j in range(self.ring.dim)] for i in range(self.ring.dim)]

    def inverse(self) -> "QElem":
        n = self.ring.dim
        rhs = [ONE] + [ZERO] * (n - 1)
        sol = linsolve(self.mult_matrix(), rhs)
        if not sol.consistent or sol.rank < n:
            raise NotInvertible(f"element is a zero divisor in {self.ring.name}")
        return QElem(self.ring, sol.solution)

    def scalar_value(self):
        """The rational value if the element is a constant, else ValueError."""
        if any(c != 0 for c in self.coeffs[1:]):
            raise ValueError("element is not a constant")
        return self.coeffs[0]

    def __repr__(self):
        terms = [f"({c}){self.ring.var}^{i}" for i, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(terms) or "0"


@lru_cache(maxsize=None)
def t_ring(N: int) -> QuotientRing:
    """Q[t]/(t^N + 1)."""
    return QuotientRing(f"TRing(N={N})", "t", [ONE] + [ZERO] * (N - 1) + [ONE])


@lru_cache(maxsize=None)
def p_ring(N: int) -> QuotientRing:
    """Q[p]/(p^4 (p^N + 1)), the state ring with t^N = -1."""
    mod = [ZERO] * (N + 5)
    mod[4] = ONE
    mod[N + 4] = ONE
    return QuotientRing(f"PRing(N={N})", "p", mod)


@lru_cache(maxsize=None)
def h_ring() -> QuotientRing:
    """Q[H]/(H^4)."""
    return QuotientRing("HRing", "H", [ZERO, ZERO, ZERO, ZERO, ONE])


@lru_cache(maxsize=None)
def cyclotomic_ring(N: int) -> QuotientRing:
    """Q[x]/(1 + x + ... + x^{N-1}); a field when N is prime."""
    return QuotientRing(f"Cyclotomic({N})", "x", [ONE] * N)


@lru_cache(maxsize=None)
def primitive_t_ring(N: int) -> QuotientRing:
    """Q[t]/(Phi_2N(t)) = Q[t]/(1 - t + t^2 - ... + t^(N-1)) for odd prime N.

    This is the field factor of Q[t]/(t^N + 1) = Q x Q[t]/(Phi_2N); the
    other factor is t = -1, where every t_alpha collapses to 1.
    """
    return QuotientRing(f"PrimitiveT({N})", "t", [mpq((-1) ** j) for j in range(N)])


def quotient_reduce(poly: Sequence, ring: QuotientRing) -> QElem:
    return ring.reduce(poly)


# ---------------------------------------------------------------------------
# Laurent blocks in z


@dataclass(frozen=True, eq=False)
class LaurentBlock:
    """Sum of c_e z^e for e = lead .. lead+len(coeffs)-1.

    ``closed`` means every exponent above the window is known to vanish;
    otherwise the window top is a truncation and products shrink it.
    Coefficients are TruncSeries sharing one q-order.
    """

    lead: int
    coeffs: tuple
    closed: bool = True

    @property
    def top(self) -> int:
        return self.lead + len(self.coeffs) - 1

    @property
    def q_order(self) -> int:
        return min(c.order for c in self.coeffs)

    def coeff(self, e: int) -> TruncSeries:
        if self.lead <= e <= self.top:
            return self.coeffs[e - self.lead]
        if e > self.top and not self.closed:
            raise IndexError("exponent above the truncated window")
        return TruncSeries.constant(ZERO, self.q_order)

    @classmethod
    def from_dict(cls, terms: dict, q_order: int, closed: bool = True, lo=None, hi=None):
        if lo is None:
            lo = min(terms) if terms else 0
        if hi is None:
            hi = max(terms) if terms else lo
        zero = TruncSeries.constant(ZERO, q_order)
        return cls(lo, tuple(terms.get(e, zero).truncate(q_order) for e in range(lo, hi + 1)), closed)

    def __add__(self, other: "LaurentBlock") -> "LaurentBlock":
        lo = min(self.lead, other.lead)
        if self.closed and other.closed:
            hi, closed = max(self.top, other.top), True
        else:
            cands = [b.top for b in (self, other) if not b.closed]
            hi, closed = min(cands), False
        qo = min(self.q_order, other.q_order)
        terms = {}
        for e in range(lo, hi + 1):
            terms[e] = self._get(e, qo) + other._get(e, qo)
        return LaurentBlock.from_dict(terms, qo, closed, lo, hi)

    def _get(self, e, qo):
        if self.lead <= e <= self.top:
            return self.coeffs[e - self.lead].truncate(qo)
        return TruncSeries.constant(ZERO, qo)

    def __neg__(self):
        return LaurentBlock(self.lead, tuple(-c for c in self.coeffs), self.closed)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "LaurentBlock":
        return LaurentBlock(self.lead, tuple(c * s for c in self.coeffs), self.closed)

    def __mul__(self, other: "LaurentBlock") -> "LaurentBlock":
        if not isinstance(other, LaurentBlock):
            return self.scale(other)
        lo = self.lead + other.lead
        cands = []
        if not self.closed:
            cands.append(self.top + other.lead)
        if not other.closed:
            cands.append(other.top + self.lead)
        hi = min(cands) if cands else self.top + other.top
        qo = min(self.q_order, other.q_order)
        terms = {}
        for e in range(lo, hi + 1):
            acc = TruncSeries.constant(ZERO, qo)
            for i, a in enumerate(self.coeffs):
                ea = self.lead + i
                eb = e - ea
                if other.lead <= eb <= other.top:
                    acc = acc + a.truncate(qo) * other.coeffs[eb - other.lead].truncate(qo)
            terms[e] = acc
        return LaurentBlock.from_dict(terms, qo, not cands, lo, hi)

    def zD(self) -> "LaurentBlock":
        """Apply z*D: raise every exponent by one and differentiate in q."""
        return LaurentBlock(self.lead + 1, tuple(c.D() for c in self.coeffs), self.closed)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)


# ---------------------------------------------------------------------------
# differential operators sum f_j(X) D^j with D X = X(1-X)


class PFOperator:
    """Operator sum_j c_j(X) D^j, coefficients in Q[X], D on the right.

    D = q d/dq acts on functions of X through DX = X(1 - X).
    """

    def __init__(self, terms: dict | None = None):
        clean = {}
        for j, c in (terms or {}).items():
            c = poly_trim([mpq(x) for x in c])
            if c:
                clean[j] = tuple(c)
        self.terms = clean

    @classmethod
    def scalar(cls, poly) -> "PFOperator":
        return cls({0: poly})

    @classmethod
    def D(cls) -> "PFOperator":
        return cls({1: [ONE]})

    @classmethod
    def X(cls) -> "PFOperator":
        return cls({0: [ZERO, ONE]})

    def order(self) -> int:
        return max(self.terms, default=-1)

    def coeff(self, j: int) -> list:
        return list(self.terms.get(j, ()))

    def __add__(self, other: "PFOperator") -> "PFOperator":
        t = dict(self.terms)
        for j, c in other.terms.items():
            t[j] = poly_add(t.get(j, []), c)
        return PFOperator(t)

    def __neg__(self):
        return PFOperator({j: poly_scale(c, -1) for j, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "PFOperator":
        return PFOperator({j: poly_scale(c, s) for j, c in self.terms.items()})

    def left_mul_poly(self, f) -> "PFOperator":
        return PFOperator({j: poly_mul(f, c) for j, c in self.terms.items()})

    def left_mul_D(self) -> "PFOperator":
        # D f(X) D^j = f D^{j+1} + X(1-X) f' D^j
        out: dict = {}
        for j, c in self.terms.items():
            out[j + 1] = poly_add(out.get(j + 1, []), c)
            out[j] = poly_add(out.get(j, []), poly_mul([ZERO, ONE, -ONE], poly_deriv(c)))
        return PFOperator(out)

    def __mul__(self, other: "PFOperator") -> "PFOperator":
        """Composition self o other."""
        if not isinstance(other, PFOperator):
            return self.scale(other)
        out = PFOperator()
        for j, c in self.terms.items():
            part = other
            for _ in range(j):
                part = part.left_mul_D()
            out = out + part.left_mul_poly(c)
        return out

    def substitute_D(self, shift_poly) -> "PFOperator":
        """Replace D by D + s(X) in every term (as operator composition)."""
        d_new = PFOperator({1: [ONE], 0: shift_poly})
        out = PFOperator()
        power = PFOperator({0: [ONE]})
        for j in range(self.order() + 1):
            if j in self.terms:
                out = out + power.left_mul_poly(self.terms[j])
            power = d_new * power
        return out

    def apply(self, f) -> list:
        """Apply to a polynomial f(X) (coefficient list)."""
        out: list = []
        cur = poly_trim([mpq(x) for x in f])
        for j in range(self.order() + 1):
            if j in self.terms:
                out = poly_add(out, poly_mul(self.terms[j], cur))
            cur = poly_mul([ZERO, ONE, -ONE], poly_deriv(cur))
        return out

    def __eq__(self, other):
        return isinstance(other, PFOperator) and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        parts = []
        for j in sorted(self.terms, reverse=True):
            parts.append(f"[{', '.join(str(c) for c in self.terms[j])}](X) D^{j}")
        return " + ".join(parts) or "0"
