"""Exact rationals, quadratic irrationals and outward-rounded float enclosures.

Rationals are :class:`fractions.Fraction`.  A :class:`QuadIrr` stores
``(p + q*sqrt(d)) / r`` with integer ``p, q, d, r`` so that ordering can be
decided with integer arithmetic only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[int, Fraction, str]

LESS, EQUAL, GREATER = -1, 0, 1

_SMALL_PRIMES = (3, 5, 7)
_MAX_BITS = 1 << 14


def as_rational(x: RationalLike | float) -> Fraction:
    """Coerce ``x`` to a Fraction.  Strings use the ``"num/den"`` form."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        if not text:
            raise ValueError("empty rational")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def format_rational(x: Fraction | int) -> str:
    return str(Fraction(x))


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def sign2(a: int, b: int, d: int) -> int:
    """Sign of ``a + b*sqrt(d)`` for integers, ``d >= 0``."""
    if b == 0 or d == 0:
        return _sign(a)
    sa, sb = _sign(a), _sign(b)
    if sa == 0 or sa == sb:
        return sb
    c = a * a - b * b * d
    if c > 0:
        return sa
    if c < 0:
        return sb
    return 0


def sign3(a: int, b: int, d1: int, c: int, d2: int) -> int:
    """Sign of ``a + b*sqrt(d1) + c*sqrt(d2)``, decided exactly by one squaring."""
    if c == 0 or d2 == 0:
        return sign2(a, b, d1)
    if b == 0 or d1 == 0:
        return sign2(a, c, d2)
    if d1 == d2:
        return sign2(a, b + c, d1)
    s1 = sign2(a, b, d1)
    s2 = _sign(c)
    if s1 == 0 or s1 == s2:
        return s2
    # |a + b sqrt(d1)| against |c| sqrt(d2)
    k = sign2(a * a + b * b * d1 - c * c * d2, 2 * a * b, d1)
    if k > 0:
        return s1
    if k < 0:
        return s2
    return 0


@lru_cache(maxsize=1 << 16)
def _square_part(d: int) -> tuple[int, int]:
    """(s, d') with d = s^2 * d', stripping full squares, powers of 4 and 9, 25, 49."""
    s = isqrt(d)
    if s * s == d:
        return s, 1
    f = 1
    tz = (d & -d).bit_length() - 1
    if tz >= 2:
        half = tz // 2
        d >>= 2 * half
        f <<= half
    for p in _SMALL_PRIMES:
        pp = p * p
        if pp > d:
            break
        while d % pp == 0:
            d //= pp
            f *= p
    return f, d


def _strip_squares(q: int, d: int) -> tuple[int, int]:
    """Move perfect-square integer factors of ``d`` into ``q``."""
    if d == 0 or q == 0:
        return 0, 0
    f, d = _square_part(d)
    return q * f, d


class QuadIrr:
    """Exact real number ``(p + q*sqrt(d)) / r`` with integer parts.

    ``d`` keeps only as many square factors as are cheap to strip, so two
    representations of one value may differ; equality is semantic.
    """

    __slots__ = ("p", "q", "d", "r")

    def __init__(self, p: int, q: int = 0, d: int = 0, r: int = 1) -> None:
        if r == 0:
            raise ZeroDivisionError("QuadIrr with zero denominator")
        if d < 0:
            raise ValueError("negative radicand")
        q, d = _strip_squares(q, d)
        if d == 1:
            p, q, d = p + q, 0, 0
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(p, q), r)
        if g > 1:
            p //= g
            q //= g
            r //= g
        self.p, self.q, self.d, self.r = p, q, d, r

    @classmethod
    def from_rationals(
        cls, p: RationalLike, q: RationalLike = 0, d: RationalLike = 0
    ) -> QuadIrr:
        """Build ``p + q*sqrt(d)`` from rational parts."""
        p, q, d = as_rational(p), as_rational(q), as_rational(d)
        if d < 0:
            raise ValueError("negative radicand")
        # sqrt(dn/dd) = sqrt(dn*dd)/dd
        radicand = d.numerator * d.denominator
        coeff = q / d.denominator
        den = p.denominator * coeff.denominator // gcd(p.denominator, coeff.denominator)
        return cls(
            p.numerator * (den // p.denominator),
            coeff.numerator * (den // coeff.denominator),
            radicand,
            den,
        )

    @classmethod
    def rational(cls, x: RationalLike) -> QuadIrr:
        x = as_rational(x)
        return cls(x.numerator, 0, 0, x.denominator)

    @property
    def rational_part(self) -> Fraction:
        return Fraction(self.p, self.r)

    @property
    def irrational_coeff(self) -> Fraction:
        return Fraction(self.q, self.r)

    @property
    def radicand(self) -> int:
        return self.d

    def is_rational(self) -> bool:
        return self.q == 0

    def as_fraction(self) -> Fraction:
        if self.q:
            raise ValueError(f"{self!r} is irrational")
        return Fraction(self.p, self.r)

    def parts(self) -> dict[str, int]:
        return {"p": self.p, "q": self.q, "d": self.d, "r": self.r}

    def __repr__(self) -> str:
        return f"QuadIrr({self.p}, {self.q}, {self.d}, {self.r})"

    def __str__(self) -> str:
        if not self.q:
            return format_rational(Fraction(self.p, self.r))
        return f"({self.p}{self.q:+}*sqrt({self.d}))/{self.r}"

    def __float__(self) -> float:
        return _approx(self)[0]

    def __neg__(self) -> QuadIrr:
        return QuadIrr(-self.p, -self.q, self.d, self.r)

    def _coerce(self, other: object) -> QuadIrr | None:
        if isinstance(other, QuadIrr):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadIrr.rational(other)
        return None

    def __add__(self, other: object) -> QuadIrr:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.q and o.q and self.d != o.d:
            raise ValueError("sum of quadratic irrationals with different radicands")
        d = self.d or o.d
        return QuadIrr(
            self.p * o.r + o.p * self.r, self.q * o.r + o.q * self.r, d, self.r * o.r
        )

    __radd__ = __add__

    def __sub__(self, other: object) -> QuadIrr:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> QuadIrr:
        return (-self) + other

    def __mul__(self, other: object) -> QuadIrr:
        if isinstance(other, bool) or not isinstance(other, (int, Fraction)):
            if isinstance(other, QuadIrr) and other.q == 0:
                other = Fraction(other.p, other.r)
            elif isinstance(other, QuadIrr) and self.q == 0:
                return other * Fraction(self.p, self.r)
            else:
                return NotImplemented
        c = Fraction(other)
        return QuadIrr(
            self.p * c.numerator, self.q * c.numerator, self.d, self.r * c.denominator
        )

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> QuadIrr:
        if isinstance(other, bool) or not isinstance(other, (int, Fraction)):
            return NotImplemented
        c = Fraction(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / c)

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qi_compare(self, o) == EQUAL

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qi_compare(self, o) == LESS

    def __le__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qi_compare(self, o) != GREATER

    def __gt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qi_compare(self, o) == GREATER

    def __ge__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qi_compare(self, o) != LESS

    __hash__ = None  # type: ignore[assignment]

    def sign(self) -> int:
        return sign2(self.p, self.q, self.d)


ZERO = QuadIrr(0)
ONE = QuadIrr(1)


def _approx(x: QuadIrr) -> tuple[float, float]:
    """Float value of ``x`` and a bound on its absolute error."""
    a = x.p / x.r
    if not x.q:
        return a, abs(a) * 2.0**-52
    b = (x.q / x.r) * math.sqrt(x.d)
    v = a + b
    return v, (abs(a) + abs(b)) * 2.0**-50


def qi_compare(x: QuadIrr, y: QuadIrr) -> int:
    """Exact ordering of ``x`` and ``y``: -1, 0 or 1."""
    try:
        fx, ex = _approx(x)
        fy, ey = _approx(y)
    except OverflowError:
        pass
    else:
        diff = fx - fy
        if abs(diff) > 4.0 * (ex + ey) + 1e-290:
            return GREATER if diff > 0 else LESS
    return sign3(
        x.p * y.r - y.p * x.r, x.q * y.r, x.d, -y.q * x.r, y.d
    )


def qi_min(x: QuadIrr, y: QuadIrr) -> QuadIrr:
    return x if qi_compare(x, y) <= 0 else y


def qi_max(x: QuadIrr, y: QuadIrr) -> QuadIrr:
    return x if qi_compare(x, y) >= 0 else y


def quadratic_roots(
    a: RationalLike, b: RationalLike, c: RationalLike
) -> tuple[QuadIrr, QuadIrr] | None:
    """Real roots ``(lo, hi)`` of ``a x^2 + b x + c`` (``a != 0``), or None."""
    a, b, c = as_rational(a), as_rational(b), as_rational(c)
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    den = a.denominator * b.denominator * c.denominator
    den //= gcd(gcd(a.denominator, b.denominator), c.denominator) or 1
    A = int(a * den)
    B = int(b * den)
    C = int(c * den)
    return integer_quadratic_roots(A, B, C)


def integer_quadratic_roots(A: int, B: int, C: int) -> tuple[QuadIrr, QuadIrr] | None:
    disc = B * B - 4 * A * C
    if disc < 0:
        return None
    if A < 0:
        A, B = -A, -B
    lo = QuadIrr(-B, -1, disc, 2 * A)
    hi = QuadIrr(-B, 1, disc, 2 * A)
    return lo, hi


# --------------------------------------------------------------------------
# Enclosures


def _down(num: int, den: int) -> float:
    """Largest float <= num/den (den > 0)."""
    f = num / den
    m, e = f.as_integer_ratio()
    if m * den > num * e:
        f = math.nextafter(f, -math.inf)
    return f


def _up(num: int, den: int) -> float:
    f = num / den
    m, e = f.as_integer_ratio()
    if m * den < num * e:
        f = math.nextafter(f, math.inf)
    return f


def round_down(x: Fraction | int) -> float:
    x = Fraction(x)
    return _down(x.numerator, x.denominator)


def round_up(x: Fraction | int) -> float:
    x = Fraction(x)
    return _up(x.numerator, x.denominator)


@dataclass(frozen=True)
class Enclosure:
    """Closed float interval ``[lo, hi]`` known to contain a real value."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (self.lo <= self.hi):
            raise ValueError(f"invalid enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x: Fraction | int) -> Enclosure:
        return cls(round_down(x), round_up(x))

    @classmethod
    def point(cls, x: float) -> Enclosure:
        return cls(x, x)

    @classmethod
    def from_float(cls, x: float, rel_err: float) -> Enclosure:
        """Widen a float result with relative error at most ``rel_err``."""
        err = abs(x) * rel_err
        return cls(math.nextafter(x - err, -math.inf), math.nextafter(x + err, math.inf))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: Fraction | int | float) -> bool:
        x = Fraction(x)
        return Fraction(self.lo) <= x <= Fraction(self.hi)

    def contains_enclosure(self, other: Enclosure) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def certainly_le(self, bound: Fraction | int) -> bool:
        return Fraction(self.hi) <= Fraction(bound)

    def certainly_lt(self, other: Enclosure) -> bool:
        return self.hi < other.lo

    def __add__(self, other: Enclosure) -> Enclosure:
        return Enclosure(
            math.nextafter(self.lo + other.lo, -math.inf),
            math.nextafter(self.hi + other.hi, math.inf),
        )

    def __sub__(self, other: Enclosure) -> Enclosure:
        return Enclosure(
            math.nextafter(self.lo - other.hi, -math.inf),
            math.nextafter(self.hi - other.lo, math.inf),
        )

    def __mul__(self, other: Enclosure | int | float) -> Enclosure:
        if not isinstance(other, Enclosure):
            other = Enclosure(float(other), float(other))
        prods = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Enclosure(
            math.nextafter(min(prods), -math.inf), math.nextafter(max(prods), math.inf)
        )

    __rmul__ = __mul__

    def hull(self, other: Enclosure) -> Enclosure:
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)


ZERO_ENCLOSURE = Enclosure(0.0, 0.0)


def enclosure_sum(items: Iterable[Enclosure]) -> Enclosure:
    """Outward-rounded sum; fsum is correctly rounded so one ulp suffices."""
    los: list[float] = []
    his: list[float] = []
    for e in items:
        los.append(e.lo)
        his.append(e.hi)
    return bounds_sum(los, his)


def bounds_sum(los: Sequence[float], his: Sequence[float]) -> Enclosure:
    if not los:
        return ZERO_ENCLOSURE
    lo = math.fsum(los)
    hi = math.fsum(his)
    if len(los) > 1:
        lo = math.nextafter(lo, -math.inf)
        hi = math.nextafter(hi, math.inf)
    return Enclosure(lo, hi)


def _bracket_combo(
    a: int, terms: Sequence[tuple[int, int]], den: int, bits: int
) -> tuple[int, int, int]:
    """Integer bracket ``[lo, hi] / scale`` of ``(a + sum c*sqrt(d)) / den``."""
    scale = 1 << bits
    lo = hi = a << bits
    for c, d in terms:
        if c == 0 or d == 0:
            continue
        s = isqrt(d << (2 * bits))
        exact = s * s == d << (2 * bits)
        s_hi = s if exact else s + 1
        if c > 0:
            lo += c * s
            hi += c * s_hi
        else:
            lo += c * s_hi
            hi += c * s
    return lo, hi, scale * den


def enclose_combo(
    a: int,
    terms: Sequence[tuple[int, int]],
    den: int,
    *,
    abs_tol: Fraction | None = None,
    rel_bits: int = 50,
    start_bits: int = 64,
) -> Enclosure:
    """Enclose ``(a + sum c_i sqrt(d_i)) / den`` by precision doubling.

    Refines until the float enclosure has width ``<= abs_tol`` when given, or
    relative width about ``2**-rel_bits`` otherwise.
    """
    bits = start_bits
    while True:
        lo, hi, scale = _bracket_combo(a, terms, den, bits)
        if abs_tol is not None:
            if Fraction(hi - lo, scale) <= abs_tol / 4 or bits >= _MAX_BITS:
                enc = Enclosure(_down(lo, scale), _up(hi, scale))
                if Fraction(enc.hi) - Fraction(enc.lo) <= abs_tol:
                    return enc
                if bits >= _MAX_BITS or Fraction(hi - lo, scale) <= abs_tol / 2**20:
                    raise ValueError(
                        f"tolerance {abs_tol} is below float resolution at this value"
                    )
        else:
            mag = max(abs(lo), abs(hi))
            if mag == 0 or (hi - lo) << rel_bits <= mag or bits >= _MAX_BITS:
                return Enclosure(_down(lo, scale), _up(hi, scale))
        bits *= 2


def qi_enclose(x: QuadIrr, abs_tol: RationalLike, start_bits: int = 64) -> Enclosure:
    """Enclosure of ``x`` of width at most ``abs_tol``."""
    tol = as_rational(abs_tol)
    if tol <= 0:
        raise ValueError("abs_tol must be positive")
    return enclose_combo(x.p, [(x.q, x.d)], x.r, abs_tol=tol, start_bits=start_bits)


def qi_enclose_diff(x: QuadIrr, y: QuadIrr, rel_bits: int = 50) -> Enclosure:
    """Relative-precision enclosure of ``x - y`` with no cancellation loss."""
    return enclose_combo(
        x.p * y.r - y.p * x.r,
        [(x.q * y.r, x.d), (-y.q * x.r, y.d)],
        x.r * y.r,
        rel_bits=rel_bits,
    )
