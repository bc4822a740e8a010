"""Polynomials in the generator series and exact membership certificates."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

from gmpy2 import mpq

from .errors import GuardFailed, InsufficientOrder, InvalidSpec, MembershipFailed
from .exact import ONE, TruncSeries, linsolve, rat_str
from .ifun import Generators
from .targets import TargetConfig

CORE = ("A", "B", "B2", "B3", "Y")
_INDEXED = re.compile(r"^([AB])(\d*)$")


def _rank(name: str):
    if name in CORE:
        return (0, CORE.index(name), 0)
    m = _INDEXED.match(name)
    if m:
        return (1, "AB".index(m.group(1)), int(m.group(2) or 1))
    return (2, 0, name)


def _split(name: str):
    """'A' -> ('A', 1), 'B3' -> ('B', 3); None for other names."""
    m = _INDEXED.match(name)
    if not m:
        return None
    return m.group(1), int(m.group(2) or 1)


def _name(letter: str, m: int) -> str:
    return letter if m == 1 else f"{letter}{m}"


def _canon(mono: dict) -> tuple:
    return tuple(sorted(((v, e) for v, e in mono.items() if e), key=lambda ve: _rank(ve[0])))


class GenPoly:
    """Polynomial in named generator symbols with rational coefficients.

    Symbols are A, B, B2, B3, Y and, when derivatives produce them, A2,
    A3, ..., B4, ....  Y may carry a negative exponent (1/Y = 1 - rq).
    Terms are stored as {monomial: coefficient} where a monomial is a
    sorted tuple of (symbol, exponent) pairs.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: mpq(v) for k, v in (terms or {}).items() if v != 0}

    # construction ----------------------------------------------------------
    @classmethod
    def const(cls, c) -> "GenPoly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "GenPoly":
        return cls({_canon({name: exp}): ONE})

    @classmethod
    def from_exponents(cls, exps: tuple, coeff=ONE) -> "GenPoly":
        """Monomial in (A, B, B2, B3, Y) from its exponent vector."""
        return cls({_canon(dict(zip(CORE, exps))): coeff})

    # arithmetic -------------------------------------------------------------
    def _lift(self, other):
        return other if isinstance(other, GenPoly) else GenPoly.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return GenPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return GenPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                mono = dict(k1)
                for s, e in k2:
                    mono[s] = mono.get(s, 0) + e
                key = _canon(mono)
                out[key] = out.get(key, 0) + v1 * v2
        return GenPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers of a GenPoly are not supported")
        out = GenPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        return (self - other).terms == {}

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def symbols(self) -> set:
        return {s for k in self.terms for s, _ in k}

    # derivation -------------------------------------------------------------
    @staticmethod
    def D_symbol(name: str) -> "GenPoly":
        """D of one symbol: D A_m = A_(m+1) - A A_m, D B_m likewise, DY = Y^2 - Y."""
        if name == "Y":
            return GenPoly.var("Y", 2) - GenPoly.var("Y")
        sp = _split(name)
        if sp is None:
            raise InvalidSpec(f"no derivative rule for symbol {name!r}")
        letter, m = sp
        return GenPoly.var(_name(letter, m + 1)) - GenPoly.var(letter) * GenPoly.var(name)

    def D(self) -> "GenPoly":
        out = GenPoly()
        for mono, c in self.terms.items():
            for idx, (s, e) in enumerate(mono):
                rest = dict(mono)
                rest[s] = e - 1
                out = out + GenPoly({_canon(rest): c * e}) * GenPoly.D_symbol(s)
        return out

    def substitute(self, mapping: dict) -> "GenPoly":
        """Replace symbols by polynomials (nonnegative exponents only)."""
        out = GenPoly()
        for mono, c in self.terms.items():
            term = GenPoly.const(c)
            keep = {}
            for s, e in mono:
                if s in mapping:
                    if e < 0:
                        raise ValueError(f"cannot substitute into a negative power of {s}")
                    term = term * mapping[s] ** e
                else:
                    keep[s] = e
            out = out + term * GenPoly({_canon(keep): ONE})
        return out

    # evaluation -------------------------------------------------------------
    def evaluate(self, gens: Generators) -> TruncSeries:
        cache: dict = {}

        def power(s, e):
            if (s, e) in cache:
                return cache[(s, e)]
            if s == "Y":
                base = gens.Y if e > 0 else TruncSeries.from_coeffs([ONE, -gens.t.r], gens.order)
            else:
                letter, m = _split(s)
                base = gens.A_m(m) if letter == "A" else gens.B_m(m)
            val = base ** abs(e)
            cache[(s, e)] = val
            return val

        total = TruncSeries.constant(0, gens.order)
        for mono, c in self.terms.items():
            term = TruncSeries.constant(c, gens.order)
            for s, e in mono:
                term = term * power(s, e)
            total = total + term
        return total

    # presentation -----------------------------------------------------------
    def core_exponents(self) -> list[tuple]:
        """[(exponent 5-tuple, coeff)] in graded lex order, core symbols only."""
        out = []
        for mono, c in self.terms.items():
            d = dict(mono)
            if set(d) - set(CORE) or any(e < 0 for e in d.values()):
                raise ValueError("polynomial uses symbols outside A, B, B2, B3, Y")
            out.append((tuple(d.get(v, 0) for v in CORE), c))
        out.sort(key=lambda ec: _grlex_key(ec[0]))
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        def key(kv):
            return (sum(e for _, e in kv[0]), [(_rank(s), e) for s, e in kv[0]])

        parts = []
        for mono, c in sorted(self.terms.items(), key=key):
            m = "*".join(s if e == 1 else f"{s}^{e}" for s, e in mono)
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(m)
            elif c == -1:
                parts.append("-" + m)
            else:
                parts.append(f"{c}*{m}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def gp(name: str) -> GenPoly:
    return GenPoly.var(name)


def b4_relation(t: TargetConfig) -> GenPoly:
    """B4 = (Y - 1)(s1 B3 + s2 B2 + s3 B + s4).

    Dividing the Picard-Fuchs equation D^4 I0 = r q prod_{j narrow}(D + j/k) I0
    by I0 and using r q Y = Y - 1; s_i are the elementary symmetric
    functions of the narrow fractions j/k.
    """
    roots = [mpq(j, t.k) for j in sorted(t.narrow)]
    # prod (x + root) = x^4 + s1 x^3 + ... + s4
    poly = [ONE]
    for rt in roots:
        poly = [a + rt * b for a, b in zip(poly + [0], [0] + poly)]
    s1, s2, s3, s4 = poly[1], poly[2], poly[3], poly[4]
    inner = GenPoly({(("B3", 1),): s1, (("B2", 1),): s2, (("B", 1),): s3, (): s4})
    return (gp("Y") - 1) * inner


# ---------------------------------------------------------------------------
# membership search


def _grlex_key(exps: tuple):
    return (sum(exps), tuple(-e for e in exps))


def monomials(degree_bound: int) -> list[tuple]:
    """Exponent vectors over (A, B, B2, B3, Y) of total degree <= bound, grlex."""
    out = []
    for deg in range(degree_bound + 1):
        for combo in combinations_with_replacement(range(5), deg):
            e = [0] * 5
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
    out.sort(key=_grlex_key)
    return out


def monomial_count(degree_bound: int) -> int:
    return comb(degree_bound + 5, 5)


@dataclass
class MembershipCertificate:
    target: int
    degree_bound: int
    poly: GenPoly | None
    matched_order: int
    guard_order: int
    status: str  # certified | refuted-at-degree | underdetermined

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_dict(self) -> dict:
        mons = []
        if self.poly is not None:
            mons = [{"exponents": list(e), "coeff": rat_str(c)} for e, c in self.poly.core_exponents()]
        return {
            "target": self.target,
            "degree_bound": self.degree_bound,
            "monomials": mons,
            "matched_order": self.matched_order,
            "guard_order": self.guard_order,
            "status": self.status,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "MembershipCertificate":
        poly = GenPoly()
        for m in data["monomials"]:
            poly = poly + GenPoly.from_exponents(tuple(m["exponents"]), mpq(m["coeff"]))
        return cls(data["target"], data["degree_bound"], poly, data["matched_order"], data["guard_order"],
                   data["status"])

    def verify(self, s: TruncSeries, gens: Generators) -> bool:
        """Re-expand the polynomial and compare through matched + guard."""
        if self.poly is None:
            return False
        n = min(self.matched_order + self.guard_order, s.order, gens.order)
        return self.poly.evaluate(gens).truncate(n).first_difference(s.truncate(n)) is None


def _monomial_series(gens: Generators, exps_list: list[tuple]) -> list[TruncSeries]:
    base = [gens.A, gens.B, gens.B2, gens.B3, gens.Y]
    pw: dict = {}

    def power(v, e):
        if (v, e) not in pw:
            pw[(v, e)] = TruncSeries.constant(1, gens.order) if e == 0 else power(v, e - 1) * base[v]
        return pw[(v, e)]

    out = []
    for exps in exps_list:
        s = TruncSeries.constant(1, gens.order)
        for v, e in enumerate(exps):
            if e:
                s = s * power(v, e)
        out.append(s)
    return out


def find_polynomial(s: TruncSeries, gens: Generators, degree_bound: int, guard: int = 8) -> MembershipCertificate:
    """Fit s by a polynomial of total degree <= degree_bound in (A, B, B2, B3, Y).

    The coefficients q^0..q^(order-guard) determine a linear system; free
    unknowns are set to zero (the sparsest solution in the fixed grlex
    order).  The remaining ``guard`` coefficients must then match exactly.
    """
    order = min(s.order, gens.order)
    mons = monomials(degree_bound)
    if order < len(mons) + guard:
        raise InsufficientOrder(
            f"degree {degree_bound} needs order >= {len(mons) + guard}, have {order}"
        )
    fit = order - guard
    series = _monomial_series(gens, mons)
    rows = [[ms[d] for ms in series] for d in range(fit + 1)]
    rhs = [s[d] for d in range(fit + 1)]
    sol = linsolve(rows, rhs)
    if not sol.consistent:
        return MembershipCertificate(gens.t.k, degree_bound, None, fit, guard, "refuted-at-degree")
    poly = GenPoly()
    for exps, c in zip(mons, sol.solution):
        if c != 0:
            poly = poly + GenPoly.from_exponents(exps, c)
    status = "certified" if guard > 0 else "underdetermined"
    expanded = poly.evaluate(gens)
    bad = expanded.truncate(order).first_difference(s.truncate(order))
    if bad is not None:
        raise GuardFailed(
            f"fit through q^{fit} fails at guard coefficient q^{bad}", locus={"coefficient": bad}
        )
    return MembershipCertificate(gens.t.k, degree_bound, poly, fit, guard, status)


def search_polynomial(s: TruncSeries, gens: Generators, max_degree: int, guard: int = 8) -> MembershipCertificate:
    """Try degree bounds 0, 1, ... until a certificate is found.

    Degrees the available order cannot support stop the search with the
    last refutation (or raise InsufficientOrder if none was attempted).
    """
    last = None
    order = min(s.order, gens.order)
    for deg in range(max_degree + 1):
        if order < monomial_count(deg) + guard:
            break
        cert = find_polynomial(s, gens, deg, guard)
        if cert.certified:
            return cert
        last = cert
    if last is None:
        raise InsufficientOrder(f"order {order} supports no degree bound with guard {guard}")
    return last


# ---------------------------------------------------------------------------
# D-closure witnesses


def named_series(name: str, gens: Generators) -> TruncSeries:
    """Series for the names accepted by the membership command."""
    simple = {"A": gens.A, "B": gens.B, "B2": gens.B2, "B3": gens.B3, "Y": gens.Y}
    if name in simple:
        return simple[name]
    if name == "yukawa-normalized":
        return gens.I0 ** 2 * gens.I11 ** 2 * gens.I22
    if name.startswith("D"):
        return named_series(name[1:], gens).D()
    sp = _split(name)
    if sp is not None:
        letter, m = sp
        return gens.A_m(m) if letter == "A" else gens.B_m(m)
    raise InvalidSpec(f"unknown series name {name!r}")


WITNESS_SERIES = ("DA", "DB2", "DB3", "A2", "B4")


def dclosure_witnesses(gens: Generators, max_degree: int = 4, guard: int = 8) -> dict:
    """Certificates for DA, DB2, DB3, A2, B4 (searching degree bounds upward)."""
    out = {}
    for name in WITNESS_SERIES:
        out[name] = search_polynomial(named_series(name, gens), gens, max_degree, guard)
    return out


def require_certified(cert: MembershipCertificate, what: str) -> MembershipCertificate:
    if not cert.certified:
        raise MembershipFailed(f"{what}: no certificate up to degree {cert.degree_bound}", locus=what)
    return cert
