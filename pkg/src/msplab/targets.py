"""The three Calabi-Yau hypersurface targets and their constants."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from gmpy2 import mpq

from .errors import InvalidSpec, UnknownTarget

WEIGHTS = {
    6: (1, 1, 1, 1, 2),
    8: (1, 1, 1, 1, 4),
    10: (1, 1, 1, 2, 5),
}

# Table values: a1k is the (log Q)^3 coefficient of F_0, a2k the log Q
# coefficient of F_1.
_A1K = {6: mpq(1, 2), 8: mpq(1, 3), 10: mpq(1, 6)}
_A2K = {6: mpq(-7, 4), 8: mpq(-11, 6), 10: mpq(-17, 12)}

# Constants of the quantum connection of the master space.
_C_VEC = {
    6: (360, 2772, 5400),
    8: (1680, 15808, 30560),
    10: (15120, 179520, 410720),
}


@dataclass(frozen=True)
class TargetConfig:
    weights: tuple
    k: int
    p_k: mpq
    r: mpq
    a1k: mpq
    a2k: mpq
    ordinary: frozenset
    c_vec: tuple

    @property
    def narrow(self) -> frozenset:
        return frozenset(m for m in self.ordinary if m != self.k)

    def is_narrow_residue(self, a: int) -> bool:
        """True when a*a_i is never divisible by k."""
        return all((a * ai) % self.k for ai in self.weights)

    @property
    def pf_constant(self) -> mpq:
        """k^(k-5) / prod a_i^a_i, the q-coefficient of the master-space PF operator."""
        return mpq(self.k ** (self.k - 5), prod(ai**ai for ai in self.weights))


def narrow_set(weights: tuple, k: int) -> frozenset:
    return frozenset(m for m in range(1, k + 1) if all((m * ai) % k for ai in weights))


def ordinary_set(weights: tuple, k: int) -> frozenset:
    return narrow_set(weights, k) | {k}


def target_config(k: int) -> TargetConfig:
    if k not in WEIGHTS:
        raise UnknownTarget(f"no target with k={k}; expected one of 6, 8, 10")
    a = WEIGHTS[k]
    if sum(a) != k:
        raise InvalidSpec("weights violate the Calabi-Yau condition")
    ordinary = ordinary_set(a, k)
    if len(ordinary) != 5:
        raise InvalidSpec(f"ordinary set for k={k} has {len(ordinary)} elements, expected 5")
    return TargetConfig(
        weights=a,
        k=k,
        p_k=mpq(k, prod(a)),
        r=mpq(k**k, prod(ai**ai for ai in a)),
        a1k=_A1K[k],
        a2k=_A2K[k],
        ordinary=ordinary,
        c_vec=_C_VEC[k],
    )


def all_targets() -> list[TargetConfig]:
    return [target_config(k) for k in (6, 8, 10)]


def is_odd_prime(n: int) -> bool:
    if n < 3 or n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_N(N: int, minimum: int = 7) -> None:
    if not is_odd_prime(N) or N < minimum:
        raise InvalidSpec(f"N must be an odd prime >= {minimum}, got {N}")
