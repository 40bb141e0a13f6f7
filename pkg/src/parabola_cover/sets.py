"""Exact solution sets {x in [0,1] : |F(x)| < t} and the unions built from them.

Endpoints are :class:`QuadIrr`; every containment and ordering test is exact.
Lebesgue measures come back as :class:`Enclosure`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Iterator

from .exact import (
    ONE,
    ZERO,
    Enclosure,
    QuadIrr,
    as_rational,
    bounds_sum,
    integer_quadratic_roots,
    qi_compare,
    qi_enclose_diff,
)
from .polys import IntegerQuadratic, RootKind, block_pairs, classify, relevant_a0_range
from .scales import PsiSpec, psi_eval, psi_exact


@dataclass(frozen=True)
class Interval:
    lo: QuadIrr
    hi: QuadIrr
    lo_open: bool = False
    hi_open: bool = False

    def is_empty(self) -> bool:
        c = qi_compare(self.lo, self.hi)
        return c > 0 or (c == 0 and (self.lo_open or self.hi_open))

    def length(self) -> Enclosure:
        return qi_enclose_diff(self.hi, self.lo)

    def contains_point(self, x: QuadIrr) -> bool:
        c = qi_compare(self.lo, x)
        if c > 0 or (c == 0 and self.lo_open):
            return False
        c = qi_compare(x, self.hi)
        return c < 0 or (c == 0 and not self.hi_open)

    def contains(self, other: Interval) -> bool:
        """``other`` is a subset of ``self`` (openness honoured exactly)."""
        if other.is_empty():
            return True
        c = qi_compare(self.lo, other.lo)
        if c > 0 or (c == 0 and self.lo_open and not other.lo_open):
            return False
        c = qi_compare(other.hi, self.hi)
        return c < 0 or (c == 0 and not (self.hi_open and not other.hi_open))

    def to_json(self) -> dict:
        return {
            "lo": self.lo.parts(),
            "hi": self.hi.parts(),
            "lo_open": self.lo_open,
            "hi_open": self.hi_open,
        }

    def __str__(self) -> str:
        return f"{'(' if self.lo_open else '['}{self.lo}, {self.hi}{')' if self.hi_open else ']'}"


def _lo_key(a: Interval, b: Interval) -> int:
    c = qi_compare(a.lo, b.lo)
    if c:
        return c
    return int(a.lo_open) - int(b.lo_open)


def _clip(iv: Interval, lo: QuadIrr, hi: QuadIrr, lo_open: bool, hi_open: bool) -> Interval:
    """Intersection of two intervals."""
    c = qi_compare(iv.lo, lo)
    if c < 0:
        new_lo, new_lo_open = lo, lo_open
    elif c == 0:
        new_lo, new_lo_open = lo, lo_open or iv.lo_open
    else:
        new_lo, new_lo_open = iv.lo, iv.lo_open
    c = qi_compare(iv.hi, hi)
    if c > 0:
        new_hi, new_hi_open = hi, hi_open
    elif c == 0:
        new_hi, new_hi_open = hi, hi_open or iv.hi_open
    else:
        new_hi, new_hi_open = iv.hi, iv.hi_open
    return Interval(new_lo, new_hi, new_lo_open, new_hi_open)


class IntervalUnion:
    """Sorted, disjoint, merged union of intervals, clipped to [0, 1]."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[Interval] = (), *, clip: bool = True) -> None:
        items = []
        for iv in intervals:
            if clip:
                iv = _clip(iv, ZERO, ONE, False, False)
            if not iv.is_empty():
                items.append(iv)
        items.sort(key=cmp_to_key(_lo_key))
        merged: list[Interval] = []
        for iv in items:
            if merged:
                cur = merged[-1]
                c = qi_compare(iv.lo, cur.hi)
                if c < 0 or (c == 0 and not (cur.hi_open and iv.lo_open)):
                    c2 = qi_compare(iv.hi, cur.hi)
                    if c2 > 0:
                        merged[-1] = Interval(cur.lo, iv.hi, cur.lo_open, iv.hi_open)
                    elif c2 == 0 and cur.hi_open and not iv.hi_open:
                        merged[-1] = Interval(cur.lo, cur.hi, cur.lo_open, False)
                    continue
            merged.append(iv)
        self.intervals: tuple[Interval, ...] = tuple(merged)

    @classmethod
    def empty(cls) -> IntervalUnion:
        return cls(())

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __repr__(self) -> str:
        return "IntervalUnion(" + " u ".join(str(iv) for iv in self.intervals) + ")"

    def is_empty(self) -> bool:
        return not self.intervals

    def union(self, other: IntervalUnion) -> IntervalUnion:
        return IntervalUnion(self.intervals + other.intervals, clip=False)

    __or__ = union

    def restrict(
        self,
        lo: QuadIrr | Fraction | int | None = None,
        hi: QuadIrr | Fraction | int | None = None,
        lo_open: bool = False,
        hi_open: bool = False,
    ) -> IntervalUnion:
        """Intersection with the interval between ``lo`` and ``hi``."""
        lo_q = ZERO if lo is None else _as_qi(lo)
        hi_q = ONE if hi is None else _as_qi(hi)
        lo_open = lo_open and lo is not None
        hi_open = hi_open and hi is not None
        return IntervalUnion(
            (_clip(iv, lo_q, hi_q, lo_open, hi_open) for iv in self.intervals), clip=False
        )

    def intersect(self, other: IntervalUnion) -> IntervalUnion:
        parts = []
        for a in self.intervals:
            for b in other.intervals:
                parts.append(_clip(a, b.lo, b.hi, b.lo_open, b.hi_open))
        return IntervalUnion(parts, clip=False)

    def contains(self, other: IntervalUnion | Interval) -> bool:
        """Exact subset test; each connected piece must sit in one component."""
        pieces = (other,) if isinstance(other, Interval) else other.intervals
        for piece in pieces:
            if piece.is_empty():
                continue
            if not any(iv.contains(piece) for iv in self.intervals):
                return False
        return True

    def contains_point(self, x: QuadIrr | Fraction | int) -> bool:
        xq = _as_qi(x)
        return any(iv.contains_point(xq) for iv in self.intervals)

    def measure(self) -> Enclosure:
        los, his = [], []
        for iv in self.intervals:
            e = iv.length()
            los.append(e.lo)
            his.append(e.hi)
        return bounds_sum(los, his)

    def to_json(self) -> list[dict]:
        return [iv.to_json() for iv in self.intervals]


def _as_qi(x: QuadIrr | Fraction | int) -> QuadIrr:
    return x if isinstance(x, QuadIrr) else QuadIrr.rational(x)


# --------------------------------------------------------------------------
# solution sets


def _shifted_roots(F: IntegerQuadratic, c: Fraction) -> tuple[QuadIrr, QuadIrr] | None:
    """Real roots of F(x) - c."""
    return integer_quadratic_roots(
        F.a2 * c.denominator, F.a1 * c.denominator, F.a0 * c.denominator - c.numerator
    )


def delta_intervals(F: IntegerQuadratic, t: Fraction) -> list[Interval]:
    """Components of {x in R : |F(x)| < t} (unclipped, at most two)."""
    below = _shifted_roots(F, t)
    if below is None:
        return []
    r_lo, r_hi = below
    above = _shifted_roots(F, -t)
    if above is None:
        return [Interval(r_lo, r_hi, True, True)]
    s_lo, s_hi = above
    return [Interval(r_lo, s_lo, True, True), Interval(s_hi, r_hi, True, True)]


def delta_set(F: IntegerQuadratic, t: Fraction | int) -> IntervalUnion:
    """{x in [0, 1] : |F(x)| < t}."""
    t = as_rational(t)
    if t <= 0:
        raise ValueError("threshold must be positive")
    return IntervalUnion(delta_intervals(F, t))


def _require_distinct(F: IntegerQuadratic):
    rd = classify(F)
    if rd.kind is not RootKind.DISTINCT_REAL:
        raise ValueError(f"{F} has {rd.kind.value} roots; distinct real roots required")
    return rd


def split_delta(F: IntegerQuadratic, t: Fraction | int) -> tuple[IntervalUnion, IntervalUnion]:
    """(Delta_1, Delta_2): points of Delta nearer the left / right root.

    The equidistant point is the rational midpoint -a1/(2 a2) and belongs to
    neither part.
    """
    _require_distinct(F)
    delta = delta_set(F, t)
    mid = Fraction(-F.a1, 2 * F.a2)
    return delta.restrict(hi=mid, hi_open=True), delta.restrict(lo=mid, lo_open=True)


def _inv_sqrt_scaled(c: Fraction, D: int) -> QuadIrr:
    """c / sqrt(D) as a QuadIrr with radicand D."""
    return QuadIrr(0, c.numerator, D, c.denominator * D)


def width_bound_check(F: IntegerQuadratic, t: Fraction | int, n: int | None = None) -> bool:
    """Delta_i lies within 2t/|F'(alpha_i)| of alpha_i, for both roots."""
    t = as_rational(t)
    rd = _require_distinct(F)
    d1, d2 = split_delta(F, t)
    w = _inv_sqrt_scaled(2 * t, rd.discriminant)
    for part, root in ((d1, rd.left), (d2, rd.right)):
        if part and not IntervalUnion(
            [Interval(root - w, root + w, True, True)], clip=False
        ).contains(part):
            return False
    return True


def psi_level_bounds(psi: PsiSpec, n: int) -> tuple[Fraction, Fraction]:
    """Rational (lower, upper) bounds for psi(2^n); equal when exact."""
    q = Fraction(2**n)
    exact = psi_exact(psi, q)
    if exact is not None:
        return exact, exact
    enc = psi_eval(psi, q)
    return Fraction(enc.lo), Fraction(enc.hi)


def sigma_sets_t(
    F: IntegerQuadratic, n: int, t: Fraction
) -> tuple[IntervalUnion, IntervalUnion]:
    rd = _require_distinct(F)
    a1 = rd.left
    r1 = t / (20 * 2**n)
    r2 = _inv_sqrt_scaled(t / 2, rd.discriminant)
    sigma1 = IntervalUnion([Interval(a1 - r1, a1 + r1)])
    sigma2 = IntervalUnion([Interval(a1 - r2, a1 + r2)])
    return sigma1, sigma2


def sigma_sets(F: IntegerQuadratic, n: int, psi: PsiSpec) -> tuple[IntervalUnion, IntervalUnion]:
    """Closed neighbourhoods of the left root with radii psi/(20*2^n) and psi/(2|F'|)."""
    _, t_hi = psi_level_bounds(psi, n)
    return sigma_sets_t(F, n, t_hi)


def inclusion_check_t(F: IntegerQuadratic, n: int, t_lo: Fraction, t_hi: Fraction) -> bool:
    sigma1, sigma2 = sigma_sets_t(F, n, t_hi)
    if not sigma1 and not sigma2:
        return True
    if not sigma2.contains(sigma1):
        return False
    d1, _ = split_delta(F, t_lo)
    return d1.contains(sigma2)


def inclusion_check(F: IntegerQuadratic, n: int, psi: PsiSpec) -> bool:
    """sigma_1 within sigma_2 within Delta_1(n, F).

    With an irrational psi(2^n) the sigmas use its upper bound and Delta_1
    its lower bound, so a pass is conservative.
    """
    t_lo, t_hi = psi_level_bounds(psi, n)
    return inclusion_check_t(F, n, t_lo, t_hi)


# --------------------------------------------------------------------------
# per-pair measure bound


@dataclass(frozen=True)
class LemmaOneReport:
    a2: int
    a1: int
    n: int
    measure: Enclosure
    bound: Fraction
    passed: bool
    components: int = 0

    def row(self) -> dict:
        return {
            "n": self.n,
            "a2": self.a2,
            "a1": self.a1,
            "measure_lo": repr(self.measure.lo),
            "measure_hi": repr(self.measure.hi),
            "bound": str(self.bound),
            "passed": str(self.passed).lower(),
        }


def split_parts(F: IntegerQuadratic, t: Fraction) -> list[Interval]:
    """Unclipped pieces of Delta_1 and Delta_2 (midpoint removed)."""
    mid = QuadIrr(-F.a1, 0, 0, 2 * F.a2)
    out = []
    for iv in delta_intervals(F, t):
        if qi_compare(iv.lo, mid) < 0 < qi_compare(iv.hi, mid):
            out.append(Interval(iv.lo, mid, iv.lo_open, True))
            out.append(Interval(mid, iv.hi, True, iv.hi_open))
        else:
            out.append(iv)
    return out


def pair_delta_union(a2: int, a1: int, n: int, t: Fraction) -> IntervalUnion:
    """Union over |a0| < 2^(n+2) of Delta_1 u Delta_2 for distinct-real F."""
    parts: list[Interval] = []
    for a0 in relevant_a0_range(a2, a1, n, margin=int(t) + 1):
        D = a1 * a1 - 4 * a2 * a0
        if D <= 0:
            continue
        parts.extend(split_parts(IntegerQuadratic(a2, a1, a0), t))
    return IntervalUnion(parts)


def _check_pair_in_block(a2: int, a1: int, n: int) -> None:
    if a2 < 1 or not (2**n <= max(a2, abs(a1)) < 2 ** (n + 1)):
        raise ValueError(f"({a2}, {a1}) is not a pair of block {n}")


def lemma1_verify(a2: int, a1: int, n: int, psi: PsiSpec) -> LemmaOneReport:
    """Measure of the (a2, a1) union against 16*psi(2^n)."""
    _check_pair_in_block(a2, a1, n)
    t_lo, t_hi = psi_level_bounds(psi, n)
    union = pair_delta_union(a2, a1, n, t_hi)
    measure = union.measure()
    bound = 16 * t_lo
    return LemmaOneReport(
        a2, a1, n, measure, bound, Fraction(measure.hi) <= bound, len(union)
    )


def lemma1_block(n: int, psi: PsiSpec) -> Iterator[LemmaOneReport]:
    for a2, a1 in block_pairs(n):
        yield lemma1_verify(a2, a1, n, psi)
