"""Sparse carriers for state-ring valued series in q and w = 1/z.

A :class:`StateSeries` stores the nonzero coefficients of

    sum  c[i, d, e] * p^i * q^d * w^e,      w = 1/z,

with p the generator of Q[p]/(p^4 (p^N + 1)).  Entries are exact for
q-degree d <= q_order and w-exponent e <= e_hi; nothing lies below e_lo.
The mod-N grading of the master space makes these objects very sparse,
which is why a dictionary is used rather than dense arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq


@dataclass
class StateSeries:
    N: int
    q_order: int
    e_lo: int
    e_hi: int
    terms: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.N + 4

    def copy(self) -> "StateSeries":
        return StateSeries(self.N, self.q_order, self.e_lo, self.e_hi, dict(self.terms))

    def get(self, i: int, d: int, e: int):
        return self.terms.get((i, d, e), mpq(0))

    def _put(self, key, val):
        if val == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = val

    def add_term(self, i: int, d: int, e: int, c) -> None:
        if c == 0 or d > self.q_order or e > self.e_hi:
            return
        key = (i, d, e)
        self._put(key, self.terms.get(key, 0) + c)

    def clip(self, q_order: int | None = None, e_hi: int | None = None) -> "StateSeries":
        qo = self.q_order if q_order is None else min(q_order, self.q_order)
        eh = self.e_hi if e_hi is None else min(e_hi, self.e_hi)
        terms = {k: v for k, v in self.terms.items() if k[1] <= qo and k[2] <= eh}
        return StateSeries(self.N, qo, self.e_lo, eh, terms)

    def __add__(self, other: "StateSeries") -> "StateSeries":
        qo = min(self.q_order, other.q_order)
        eh = min(self.e_hi, other.e_hi)
        out = self.clip(qo, eh)
        out.e_lo = min(self.e_lo, other.e_lo)
        for (i, d, e), c in other.terms.items():
            if d <= qo and e <= eh:
                out._put((i, d, e), out.terms.get((i, d, e), 0) + c)
        return out

    def scale(self, s) -> "StateSeries":
        if s == 0:
            return StateSeries(self.N, self.q_order, self.e_lo, self.e_hi, {})
        return StateSeries(self.N, self.q_order, self.e_lo, self.e_hi, {k: v * s for k, v in self.terms.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def mul_p(self) -> "StateSeries":
        """Multiply by p, using p^(N+4) = -p^4."""
        top = self.N + 3
        out = {}
        for (i, d, e), c in self.terms.items():
            key = (i + 1, d, e) if i < top else (4, d, e)
            val = c if i < top else -c
            out[key] = out.get(key, 0) + val
        return StateSeries(self.N, self.q_order, self.e_lo, self.e_hi, {k: v for k, v in out.items() if v != 0})

    def times_z(self) -> "StateSeries":
        return StateSeries(
            self.N, self.q_order, self.e_lo - 1, self.e_hi - 1,
            {(i, d, e - 1): c for (i, d, e), c in self.terms.items()},
        )

    def zD(self) -> "StateSeries":
        """z * q d/dq."""
        return StateSeries(
            self.N, self.q_order, self.e_lo - 1, self.e_hi - 1,
            {(i, d, e - 1): d * c for (i, d, e), c in self.terms.items() if d},
        )

    def D_p(self) -> "StateSeries":
        """p + z q d/dq; the valid window drops by one exponent."""
        a = self.mul_p().clip(e_hi=self.e_hi - 1)
        b = self.zD()
        out = a + b
        out.e_lo = self.e_lo - 1
        return out

    def q_times(self, c=1) -> "StateSeries":
        return StateSeries(
            self.N, self.q_order, self.e_lo, self.e_hi,
            {(i, d + 1, e): v * c for (i, d, e), v in self.terms.items() if d + 1 <= self.q_order},
        )

    def is_zero(self) -> bool:
        return not self.terms

    def entries_at(self, i: int) -> dict:
        """Map (d, e) -> coefficient for fixed p-power i."""
        return {(d, e): c for (ii, d, e), c in self.terms.items() if ii == i}

    def w_window(self, e: int) -> dict:
        """Map (i, d) -> coefficient of w^e."""
        return {(i, d): c for (i, d, ee), c in self.terms.items() if ee == e}
