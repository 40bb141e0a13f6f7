"""Exhaustive per-level sweeps checking the quantitative steps of the cover.

One pass over the (a2, a1) pairs of a block computes, for each pair, the
exact union of the Delta sets, its measure against 16*psi(2^n), the chop
count against 640*2^n, and per-polynomial derivative, width and inclusion
checks.  Complex and repeated roots get their own (cheap) sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cover import chop_delta, chop_summary, piece_bound
from .exact import ONE, ZERO, QuadIrr, qi_compare
from .parallel import ordered_map
from .polys import (
    IntegerQuadratic,
    block_pairs,
    check_level,
    classify,
    deriv_bound_check,
    relevant_a0_range,
    repeated_block_members,
)
from .scales import PsiSpec
from .sets import (
    Interval,
    IntervalUnion,
    LemmaOneReport,
    delta_intervals,
    delta_set,
    lemma1_verify,
    psi_level_bounds,
    _clip,
    split_parts,
)


@dataclass
class PairAudit:
    a2: int
    a1: int
    measure_hi: float
    lemma1_ok: bool
    pieces: int
    deriv_checked: int = 0
    deriv_bad: int = 0
    width_bad: int = 0
    incl_checked: int = 0
    incl_bad: int = 0


@dataclass
class LevelAudit:
    n: int
    pairs: int = 0
    lemma1_bad: int = 0
    max_measure_ratio: float = 0.0
    pieces: int = 0
    max_pair_pieces: int = 0
    piece_bad: int = 0
    deriv_checked: int = 0
    deriv_bad: int = 0
    width_bad: int = 0
    incl_checked: int = 0
    incl_bad: int = 0
    examples: list[str] = field(default_factory=list)

    def add(self, p: PairAudit, bound: Fraction, pbound: int) -> None:
        self.pairs += 1
        self.lemma1_bad += not p.lemma1_ok
        self.max_measure_ratio = max(self.max_measure_ratio, p.measure_hi / float(bound))
        self.pieces += p.pieces
        self.max_pair_pieces = max(self.max_pair_pieces, p.pieces)
        self.piece_bad += p.pieces > pbound
        self.deriv_checked += p.deriv_checked
        self.deriv_bad += p.deriv_bad
        self.width_bad += p.width_bad
        self.incl_checked += p.incl_checked
        self.incl_bad += p.incl_bad
        bad = (not p.lemma1_ok) or p.pieces > pbound or p.deriv_bad or p.width_bad or p.incl_bad
        if bad and len(self.examples) < 10:
            self.examples.append(f"({p.a2},{p.a1})")

    @property
    def ok(self) -> bool:
        return not (
            self.lemma1_bad or self.piece_bad or self.deriv_bad or self.width_bad or self.incl_bad
        )


def _width_ok(parts: list[Interval], F: IntegerQuadratic, t: Fraction, D: int) -> bool:
    rd = classify(F)
    w = QuadIrr(0, (2 * t).numerator, D, (2 * t).denominator * D)
    mid = QuadIrr(-F.a1, 0, 0, 2 * F.a2)
    for iv in parts:
        root = rd.left if qi_compare(iv.hi, mid) <= 0 else rd.right
        if not Interval(root - w, root + w, True, True).contains(iv):
            return False
    return True


def _inclusion_ok(
    a2: int, a1: int, D: int, n: int, t_sigma: Fraction, delta_parts: list[Interval]
) -> bool | None:
    """sigma_1 within sigma_2 within Delta_1; None when sigma_2 is empty.

    Same answer as :func:`sets.inclusion_check` without building unions.
    """
    alpha = QuadIrr(-a1, -1, D, 2 * a2)
    r2 = QuadIrr(0, t_sigma.numerator, D, 2 * t_sigma.denominator * D)
    s2 = _clip(Interval(alpha - r2, alpha + r2), ZERO, ONE, False, False)
    if D > 100 * 4**n:
        # r1 > r2: only clipping can save sigma_1 within sigma_2
        r1 = t_sigma / (20 * 2**n)
        s1 = _clip(Interval(alpha - r1, alpha + r1), ZERO, ONE, False, False)
        if not s1.is_empty() and (s2.is_empty() or not s2.contains(s1)):
            return False
    if s2.is_empty():
        return None
    mid = QuadIrr(-a1, 0, 0, 2 * a2)
    for part in delta_parts:
        if qi_compare(part.hi, mid) <= 0:
            return _clip(part, ZERO, ONE, False, False).contains(s2)
    return False


def audit_pair(a2: int, a1: int, n: int, t_lo: Fraction, t_hi: Fraction) -> PairAudit:
    delta = chop_delta(t_hi, n)
    union_parts: list[Interval] = []
    deriv_checked = deriv_bad = width_bad = incl_checked = incl_bad = 0
    core = relevant_a0_range(a2, a1, n, margin=int(t_hi) + 1)
    wide = relevant_a0_range(
        a2, a1, n, margin=int(t_hi) + 1, x_lo=Fraction(-1, 2), x_hi=Fraction(3, 2)
    )
    for a0 in wide:
        D = a1 * a1 - 4 * a2 * a0
        if D <= 0:
            continue
        F = IntegerQuadratic(a2, a1, a0)
        parts = split_parts(F, t_hi)
        if a0 in core:
            clipped = IntervalUnion(parts)
            if clipped:
                union_parts.extend(clipped)
                deriv_checked += 1
                deriv_bad += not deriv_bound_check(F, n)
                width_bad += not _width_ok(list(clipped), F, t_hi, D)
        lo_parts = parts if t_lo == t_hi else split_parts(F, t_lo)
        ok = _inclusion_ok(a2, a1, D, n, t_hi, lo_parts)
        if ok is not None:
            incl_checked += 1
            incl_bad += not ok
    union = IntervalUnion(union_parts, clip=False)
    measure = union.measure()
    pieces = chop_summary(union, delta).count
    return PairAudit(
        a2,
        a1,
        measure.hi,
        Fraction(measure.hi) <= 16 * t_lo,
        pieces,
        deriv_checked,
        deriv_bad,
        width_bad,
        incl_checked,
        incl_bad,
    )


def _audit_row(args) -> list[PairAudit]:
    n, a2, t_lo, t_hi = args
    return [audit_pair(b, a1, n, t_lo, t_hi) for b, a1 in block_pairs(n, a2)]


def audit_level(n: int, psi: PsiSpec, threads: int = 1, cap: int | None = 8) -> LevelAudit:
    """Exhaustive exact audit of block n (pairs processed in lexicographic order)."""
    check_level(n, cap)
    t_lo, t_hi = psi_level_bounds(psi, n)
    rows = ordered_map(
        _audit_row, [(n, a2, t_lo, t_hi) for a2 in range(1, 2 ** (n + 1))], threads
    )
    out = LevelAudit(n)
    bound, pbound = 16 * t_lo, piece_bound(n)
    for row in rows:
        for p in row:
            out.add(p, bound, pbound)
    return out


# --------------------------------------------------------------------------
# complex and repeated roots


@dataclass
class ComplexAudit:
    n: int
    pairs_checked: int
    nonempty: int
    examples: list[tuple[int, int, int]]


def _complex_row(args) -> tuple[int, int, list]:
    n, a2, t = args
    bound = 1 << (n + 2)
    checked = nonempty = 0
    examples = []
    for _, a1 in block_pairs(n, a2):
        # Delta shrinks as a0 grows once F > 0, so the least a0 with D < 0
        # decides every complex member of the pair
        a0 = a1 * a1 // (4 * a2) + 1
        if a0 >= bound:
            continue
        checked += 1
        if IntervalUnion(delta_intervals(IntegerQuadratic(a2, a1, a0), t)):
            for b in range(a0, bound):
                if IntervalUnion(delta_intervals(IntegerQuadratic(a2, a1, b), t)):
                    nonempty += 1
                    if len(examples) < 5:
                        examples.append((a2, a1, b))
                else:
                    break
    return checked, nonempty, examples


def audit_complex(n: int, psi: PsiSpec, threads: int = 1, cap: int | None = 8) -> ComplexAudit:
    """Count D < 0 members of block n whose Delta meets [0, 1]."""
    check_level(n, cap)
    _, t_hi = psi_level_bounds(psi, n)
    rows = ordered_map(_complex_row, [(n, a2, t_hi) for a2 in range(1, 2 ** (n + 1))], threads)
    ex = [e for r in rows for e in r[2]][:5]
    return ComplexAudit(n, sum(r[0] for r in rows), sum(r[1] for r in rows), ex)


def complex_threshold(audits: list[ComplexAudit]) -> int | None:
    """Least n_c with no nonempty complex Delta on [n_c, max n]; None if the top level fails."""
    audits = sorted(audits, key=lambda a: a.n)
    n_c = None
    for a in reversed(audits):
        if a.nonempty:
            break
        n_c = a.n
    return n_c


def analytic_complex_threshold(psi: PsiSpec, cap: int = 64) -> int:
    """Least n_c with 4*(2^(n+1) - 1)*psi(2^n) <= 1 for all n in [n_c, cap].

    For D <= -1 the minimum of F is |D|/(4 a2) >= 1/(4 a2), so this forces
    |F| >= psi(2^n) everywhere.
    """
    n_c = cap + 1
    for n in range(cap, -1, -1):
        _, t_hi = psi_level_bounds(psi, n)
        if 4 * (2 ** (n + 1) - 1) * t_hi <= 1:
            n_c = n
        else:
            break
    return n_c


@dataclass
class RepeatedAudit:
    n: int
    members: int
    nonempty: int
    k1_checked: int
    violations: list[tuple[int, int, int]]


def audit_repeated(n: int, psi: PsiSpec) -> RepeatedAudit:
    """Parameter bounds for every D = 0 member of block n with nonempty Delta.

    All such members need -1 < v <= 1 + u; k = 1 members also need
    2^((n-3)/2) < u < 2^((n+1)/2).
    """
    _, t_hi = psi_level_bounds(psi, n)
    members = nonempty = k1 = 0
    bad = []
    for F in repeated_block_members(n):
        members += 1
        if delta_set(F, t_hi).is_empty():
            continue
        nonempty += 1
        k, u, v = classify(F).repeated_params
        ok = -1 < v <= 1 + u
        if k == 1:
            k1 += 1
            ok = ok and 2**n < 8 * u * u and u * u < 2 ** (n + 1)
        if not ok:
            bad.append(F.as_tuple())
    return RepeatedAudit(n, members, nonempty, k1, bad)


def _lemma1_row(args) -> list[LemmaOneReport]:
    n, a2, psi = args
    return [lemma1_verify(b, a1, n, psi) for b, a1 in block_pairs(n, a2)]


def lemma1_all(n: int, psi: PsiSpec, threads: int = 1) -> list[LemmaOneReport]:
    """Measure-bound report for every pair of block n, in lexicographic order."""
    rows = ordered_map(_lemma1_row, [(n, a2, psi) for a2 in range(1, 2 ** (n + 1))], threads)
    return [r for row in rows for r in row]
