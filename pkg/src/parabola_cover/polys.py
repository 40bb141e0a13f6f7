"""Integer quadratics a2 x^2 + a1 x + a0 and dyadic height blocks.

Block ``n`` holds every triple with ``a2 >= 1``,
``2**n <= max(a2, |a1|) < 2**(n+1)`` and ``|a0| < 2**(n+2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator

from .exact import QuadIrr, integer_quadratic_roots

DEFAULT_LEVEL_CAP = 8


class ResourceCapError(RuntimeError):
    """A requested level exceeds the configured resource cap."""


class RootKind(str, Enum):
    REPEATED = "repeated"
    DISTINCT_REAL = "distinct_real"
    COMPLEX = "complex"


@dataclass(frozen=True)
class IntegerQuadratic:
    a2: int
    a1: int
    a0: int

    def __post_init__(self) -> None:
        if self.a2 == 0:
            raise ValueError("a2 = 0 is a linear form, not a quadratic")
        if self.a2 < 0:
            object.__setattr__(self, "a2", -self.a2)
            object.__setattr__(self, "a1", -self.a1)
            object.__setattr__(self, "a0", -self.a0)

    @property
    def discriminant(self) -> int:
        return self.a1 * self.a1 - 4 * self.a2 * self.a0

    def __call__(self, x: Fraction | int) -> Fraction:
        return (self.a2 * x + self.a1) * x + self.a0

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a2, self.a1, self.a0)


@dataclass(frozen=True)
class RootData:
    kind: RootKind
    discriminant: int
    roots: tuple[QuadIrr, QuadIrr] | None
    deriv_abs: QuadIrr | None
    repeated_params: tuple[int, int, int] | None = None

    @property
    def left(self) -> QuadIrr:
        if self.roots is None:
            raise ValueError("no real roots")
        return self.roots[0]

    @property
    def right(self) -> QuadIrr:
        if self.roots is None:
            raise ValueError("no real roots")
        return self.roots[1]


@dataclass(frozen=True)
class DyadicBlock:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("block level must be nonnegative")

    @property
    def lower(self) -> int:
        return 1 << self.n

    @property
    def upper(self) -> int:
        return 1 << (self.n + 1)

    @property
    def a0_bound(self) -> int:
        return 1 << (self.n + 2)

    def contains(self, F: IntegerQuadratic) -> bool:
        return self.lower <= height(F) < self.upper and abs(F.a0) < self.a0_bound

    def pair_count(self) -> int:
        return block_pair_count(self.n)

    def triple_count(self) -> int:
        return block_pair_count(self.n) * (2 * self.a0_bound - 1)


def height(F: IntegerQuadratic) -> int:
    return max(F.a2, abs(F.a1))


def classify(F: IntegerQuadratic) -> RootData:
    D = F.discriminant
    if D < 0:
        return RootData(RootKind.COMPLEX, D, None, None)
    roots = integer_quadratic_roots(F.a2, F.a1, F.a0)
    if D == 0:
        k = gcd(gcd(F.a2, F.a1), F.a0)
        u = isqrt(F.a2 // k)
        v = -F.a1 // (2 * k * u)
        assert k * u * u == F.a2 and -2 * k * u * v == F.a1 and k * v * v == F.a0, F
        return RootData(RootKind.REPEATED, 0, roots, QuadIrr(0), (k, u, v))
    return RootData(RootKind.DISTINCT_REAL, D, roots, QuadIrr(0, 1, D, 1))


def block_pair_count(n: int) -> int:
    """#{(a2, a1): a2 >= 1, 2^n <= max(a2, |a1|) < 2^(n+1)}."""
    hi, lo = 1 << (n + 1), 1 << n
    return (hi - 1) * (2 * hi - 1) - (lo - 1) * (2 * lo - 1)


def block_pairs(n: int, a2: int | None = None) -> Iterator[tuple[int, int]]:
    """(a2, a1) pairs of block n in lexicographic order (optionally one a2 row)."""
    lo, hi = 1 << n, 1 << (n + 1)
    rows = range(1, hi) if a2 is None else (a2,)
    for b in rows:
        if b >= lo:
            yield from ((b, a1) for a1 in range(-hi + 1, hi))
        else:
            yield from ((b, a1) for a1 in range(-hi + 1, -lo + 1))
            yield from ((b, a1) for a1 in range(lo, hi))


def check_level(n: int, cap: int | None) -> None:
    if n < 0:
        raise ValueError("level must be nonnegative")
    if cap is not None and n > cap:
        raise ResourceCapError(f"level {n} exceeds the configured cap {cap}")


def enumerate_block(n: int, cap: int | None = DEFAULT_LEVEL_CAP) -> Iterator[IntegerQuadratic]:
    check_level(n, cap)
    bound = 1 << (n + 2)
    for a2, a1 in block_pairs(n):
        for a0 in range(-bound + 1, bound):
            yield IntegerQuadratic(a2, a1, a0)


def deriv_bound_check(F: IntegerQuadratic, n: int) -> bool:
    """1 <= |F'(alpha)| <= 10*2^n, i.e. 1 <= D <= 100*4^n."""
    D = F.discriminant
    return 1 <= D <= 100 * 4**n


def repeated_block_members(n: int) -> Iterator[IntegerQuadratic]:
    """All D = 0 members of block n, i.e. k(ux - v)^2 with gcd(u, v) = 1."""
    lo, hi, bound = 1 << n, 1 << (n + 1), 1 << (n + 2)
    out = []
    for u in range(1, isqrt(hi) + 1):
        for k in range(1, (hi - 1) // (u * u) + 1):
            vmax = isqrt((bound - 1) // k)
            for v in range(-vmax, vmax + 1):
                if gcd(u, v) != 1:
                    continue
                a2, a1, a0 = k * u * u, -2 * k * u * v, k * v * v
                if lo <= max(a2, abs(a1)) < hi and abs(a0) < bound:
                    out.append(IntegerQuadratic(a2, a1, a0))
    out.sort(key=IntegerQuadratic.as_tuple)
    return iter(out)


def relevant_a0_range(
    a2: int,
    a1: int,
    n: int,
    margin: int = 1,
    x_lo: Fraction | int = 0,
    x_hi: Fraction | int = 1,
) -> range:
    """a0 values for which |F| can drop below ``margin`` somewhere on [x_lo, x_hi].

    P(x) = a2 x^2 + a1 x ranges over [pmin, pmax] there; |P + a0| < margin
    somewhere needs -a0 within ``margin`` of that range.  Clipped to the block.
    """
    x_lo, x_hi = Fraction(x_lo), Fraction(x_hi)
    ends = ((a2 * x_lo + a1) * x_lo, (a2 * x_hi + a1) * x_hi)
    pmax = max(ends)
    pmin = min(ends)
    vertex = Fraction(-a1, 2 * a2)
    if x_lo < vertex < x_hi:
        pmin = Fraction(-a1 * a1, 4 * a2)
    bound = 1 << (n + 2)
    lo = max(-math.ceil(pmax) - margin, -bound + 1)
    hi = min(-math.floor(pmin) + margin, bound - 1)
    return range(lo, hi + 1)
