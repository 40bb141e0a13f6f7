"""Level-n covers and their Hausdorff g-sums.

A level-n cover has two parts.  Repeated-root polynomials k(ux - v)^2 give
intervals of radius sqrt(psi/k)/u around v/u.  Distinct-root polynomials
give the per-pair unions Delta(a2, a1), chopped into pieces of length
between delta/2 and delta with delta = psi(2^n) / (20 * 2^n).

Three evaluation methods:

``exact``
    QuadIrr endpoints, exact chopping, certified enclosures.
``numeric``
    every triple of the block in float64 (numpy), with cancellation-free
    length formulas.  Rounding can only matter when a length is within a
    few ulp of a multiple of delta.
``sampled``
    the numeric kernel on uniformly sampled (a2, a1) pairs, scaled up to
    the whole block; reports a relative standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

import numpy as np

from .exact import (
    ZERO_ENCLOSURE,
    Enclosure,
    QuadIrr,
    enclosure_sum,
    qi_compare,
)
from .parallel import ordered_map
from .polys import (
    IntegerQuadratic,
    block_pair_count,
    block_pairs,
    check_level,
    classify,
    repeated_block_members,
)
from .scales import (
    FLOAT_REL_ERR,
    DimFnSpec,
    PsiSpec,
    decay_threshold,
    g_eval,
    g_enclose_fast,
    g_float,
)
from .sets import (
    Interval,
    IntervalUnion,
    delta_set,
    pair_delta_union,
    psi_level_bounds,
    split_parts,
)

CHOP_DIVISOR = 20
PIECE_BOUND = 640
EXACT_MAX_LEVEL = 4
NUMERIC_MAX_LEVEL = 8
SAMPLED_MAX_LEVEL = 14
METHODS = ("exact", "numeric", "sampled")
DEFAULT_SAMPLES = 4000
DEFAULT_SEED = 20240501


def resolve_method(n: int, method: str = "auto") -> str:
    if method == "auto":
        if n <= EXACT_MAX_LEVEL:
            return "exact"
        return "numeric" if n <= NUMERIC_MAX_LEVEL else "sampled"
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of auto, {', '.join(METHODS)}")
    return method


def chop_delta(t: Fraction, n: int) -> Fraction:
    return t / (CHOP_DIVISOR * 2**n)


def piece_bound(n: int) -> int:
    return PIECE_BOUND * 2**n


# --------------------------------------------------------------------------
# chopping


@dataclass(frozen=True)
class Piece:
    interval: Interval
    length: Enclosure
    short: bool = False


@dataclass
class ChopSummary:
    """Piece statistics without materialising the pieces."""

    count: int = 0
    full: int = 0
    halves: int = 0
    tails: list[Enclosure] = field(default_factory=list)
    short: int = 0

    def gsum(self, g: DimFnSpec, delta: Fraction) -> Enclosure:
        parts = []
        if self.full:
            parts.append(g_eval(g, delta) * self.full)
        if self.halves:
            parts.append(g_eval(g, delta / 2) * self.halves)
        parts.extend(g_enclose_fast(g, e) for e in self.tails)
        return enclosure_sum(parts) if parts else ZERO_ENCLOSURE

    def lengths_sum(self, delta: Fraction) -> Enclosure:
        parts = [Enclosure.exact(delta * self.full + delta / 2 * self.halves)]
        parts.extend(self.tails)
        return enclosure_sum(parts)


def _floor_ratio(iv: Interval, delta: Fraction) -> tuple[int, Enclosure]:
    """(floor(length / delta), length enclosure), decided exactly."""
    L = iv.length()
    d = float(delta)
    q_lo, q_hi = L.lo / d * (1 - 2.0**-50), L.hi / d * (1 + 2.0**-50)
    if d > 0 and math.isfinite(q_hi):
        m_lo, m_hi = math.floor(q_lo), math.floor(q_hi)
    else:
        m_lo = math.floor(Fraction(L.lo) / delta)
        m_hi = math.floor(Fraction(L.hi) / delta)
    for m in range(m_hi, m_lo - 1, -1):
        if m <= 0 or qi_compare(iv.lo + m * delta, iv.hi) <= 0:
            return max(m, 0), L
    return m_lo, L


def _plan(iv: Interval, delta: Fraction) -> tuple[int, str, Enclosure, Enclosure]:
    """Chop plan for one component.

    Returns (m, mode, length, remainder) where mode is ``single``, ``even``
    (m pieces of delta), ``tail`` (m of delta plus the remainder) or
    ``merge`` (m-1 of delta, one of delta/2, one of delta/2 + remainder).
    """
    m, L = _floor_ratio(iv, delta)
    if m == 0 or (m == 1 and qi_compare(iv.lo + delta, iv.hi) >= 0):
        return 1, "single", L, L
    end = iv.lo + m * delta
    c = qi_compare(end, iv.hi)
    if c == 0:
        return m, "even", L, ZERO_ENCLOSURE
    rem = L - Enclosure.exact(m * delta)
    rem = Enclosure(max(rem.lo, 0.0), max(rem.hi, 0.0))
    if qi_compare(end + delta / 2, iv.hi) <= 0:
        return m, "tail", L, rem
    return m, "merge", L, rem


def chop(U: IntervalUnion, delta: Fraction | int) -> list[Piece]:
    """Greedy left-to-right chop of each component into [delta/2, delta] pieces.

    A component shorter than delta stays whole; if it is shorter than
    delta/2 (only possible for boundary-clipped intervals) it is tagged
    ``short``.  A leftover shorter than delta/2 is absorbed by re-splitting
    the last full piece as delta/2 followed by delta/2 + leftover.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    out: list[Piece] = []
    for iv in U:
        m, mode, L, rem = _plan(iv, delta)
        if mode == "single":
            short = qi_compare(iv.lo + delta / 2, iv.hi) > 0
            out.append(Piece(iv, L, short))
            continue
        full = m if mode in ("even", "tail") else m - 1
        cursor = iv.lo
        cursor_open = iv.lo_open
        d_enc = Enclosure.exact(delta)
        for _ in range(full):
            nxt = cursor + delta
            out.append(Piece(Interval(cursor, nxt, cursor_open, False), d_enc))
            cursor, cursor_open = nxt, True
        if mode == "tail":
            out.append(Piece(Interval(cursor, iv.hi, cursor_open, iv.hi_open), rem))
        elif mode == "merge":
            nxt = cursor + delta / 2
            out.append(Piece(Interval(cursor, nxt, cursor_open, False), Enclosure.exact(delta / 2)))
            out.append(
                Piece(
                    Interval(nxt, iv.hi, True, iv.hi_open),
                    Enclosure.exact(delta / 2) + rem,
                )
            )
        else:
            last = out[-1]
            out[-1] = Piece(
                Interval(last.interval.lo, last.interval.hi, last.interval.lo_open, iv.hi_open),
                last.length,
            )
    return out


def chop_summary(U: IntervalUnion, delta: Fraction | int) -> ChopSummary:
    """Same piece multiset as :func:`chop`, without building intervals."""
    delta = Fraction(delta)
    s = ChopSummary()
    for iv in U:
        m, mode, L, rem = _plan(iv, delta)
        if mode == "single":
            s.count += 1
            s.tails.append(L)
            if qi_compare(iv.lo + delta / 2, iv.hi) > 0:
                s.short += 1
        elif mode == "even":
            s.count += m
            s.full += m
        elif mode == "tail":
            s.count += m + 1
            s.full += m
            s.tails.append(rem)
        else:
            s.count += m + 1
            s.full += m - 1
            s.halves += 1
            s.tails.append(Enclosure.exact(delta / 2) + rem)
    return s


# --------------------------------------------------------------------------
# repeated roots


def repeated_params_in_range(n: int) -> list[tuple[int, int]]:
    """(u, v) with 2^((n-3)/2) < u < 2^((n+1)/2) and -1 < v <= 1 + u."""
    out = []
    for u in range(1, isqrt(2 ** (n + 1)) + 2):
        # u^2 strictly between 2^(n-3) and 2^(n+1)
        if 8 * u * u <= 2**n or u * u >= 2 ** (n + 1):
            continue
        out.extend((u, v) for v in range(0, u + 2))
    return out


def repeated_interval(k: int, u: int, v: int, t: Fraction) -> Interval:
    """|x - v/u| < sqrt(t/k)/u as an open interval (unclipped)."""
    c = t / k
    radius = QuadIrr(0, 1, c.numerator * c.denominator, c.denominator * u)
    centre = Fraction(v, u)
    return Interval(radius * -1 + centre, radius + centre, True, True)


def repeated_cover(
    n: int, psi: PsiSpec, realized_only: bool = False
) -> list[tuple[tuple[int, int, int], Interval]]:
    """Clipped repeated-root cover intervals as ((k, u, v), interval) pairs.

    Default: the proof's k=1 parameter grid plus realized k > 1 members with
    nonempty Delta.  ``realized_only``: realized members of any k only.
    """
    if n < 1:
        raise ValueError("repeated-root cover needs n >= 1")
    _, t_hi = psi_level_bounds(psi, n)
    out = []
    if not realized_only:
        for u, v in repeated_params_in_range(n):
            out.append(((1, u, v), repeated_interval(1, u, v, t_hi)))
    for F in repeated_block_members(n):
        k, u, v = classify(F).repeated_params
        if k == 1 and not realized_only:
            continue
        if delta_set(F, t_hi).is_empty():
            continue
        out.append(((k, u, v), repeated_interval(k, u, v, t_hi)))
    clipped = []
    for params, iv in out:
        u_ = IntervalUnion([iv])
        if u_:
            clipped.append((params, u_.intervals[0]))
    return clipped


def cover_repeated(
    n: int, psi: PsiSpec, g: DimFnSpec, realized_only: bool = False
) -> tuple[int, Enclosure]:
    """(interval count, sum of g(clipped diameter))."""
    cover = repeated_cover(n, psi, realized_only)
    gsum = enclosure_sum(g_enclose_fast(g, iv.length()) for _, iv in cover)
    return len(cover), gsum if cover else ZERO_ENCLOSURE


def repeated_box_count(n: int, psi: PsiSpec, delta: Fraction) -> int:
    """ceil(length / delta) summed over components of the merged repeated-root cover."""
    union = IntervalUnion([iv for _, iv in repeated_cover(n, psi)], clip=False)
    total = 0
    for iv in union:
        L = iv.length()
        total += max(1, math.ceil(Fraction(L.hi) / delta))
    return total


# --------------------------------------------------------------------------
# numeric kernel


def pair_from_index(n: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised inverse of the lexicographic order of :func:`block_pairs`."""
    lo, hi = 1 << n, 1 << (n + 1)
    idx = np.asarray(idx, dtype=np.int64)
    split = (lo - 1) * 2 * lo
    a2 = np.empty_like(idx)
    a1 = np.empty_like(idx)
    low = idx < split
    i = idx[low]
    a2[low] = i // (2 * lo) + 1
    j = i % (2 * lo)
    a1[low] = np.where(j < lo, -hi + 1 + j, j)
    i = idx[~low] - split
    a2[~low] = lo + i // (2 * hi - 1)
    a1[~low] = -hi + 1 + i % (2 * hi - 1)
    return a2, a1


def _a0_bounds(a2: np.ndarray, a1: np.ndarray, n: int, margin: int = 1):
    """Vectorised :func:`relevant_a0_range` on [0, 1]."""
    a2f = a2.astype(np.int64)
    pmax = np.maximum(0, a2f + a1)
    inside = (-a1 > 0) & (-a1 < 2 * a2f)
    # floor(-a1^2 / (4 a2)) for the vertex value
    vert = -((a1 * a1 + 4 * a2f - 1) // (4 * a2f))
    pmin = np.where(inside, vert, np.minimum(0, a2f + a1))
    bound = 1 << (n + 2)
    lo = np.maximum(-pmax - margin, -bound + 1)
    hi = np.minimum(-pmin + margin, bound - 1)
    return lo, np.maximum(hi, lo - 1)


@dataclass
class KernelResult:
    pieces: np.ndarray  # per pair
    gsums: list[np.ndarray]  # per g, per pair
    fallback: list[tuple[int, int, int]]  # triples needing the exact path


def _chop_lengths(L: np.ndarray, delta: float):
    """Piece counts and per-piece length categories for float lengths."""
    q = L / delta
    m = np.floor(q)
    rem = L - m * delta
    single = q <= 1.0
    even = ~single & (rem == 0)
    tail = ~single & ~even & (rem >= 0.5 * delta)
    merge = ~single & ~even & ~tail
    count = np.where(single, 1, np.where(even, m, m + 1)).astype(np.int64)
    full = np.where(single, 0, np.where(merge, m - 1, m))
    return count, single, tail, merge, full, rem


def numeric_kernel(
    n: int, a2: np.ndarray, a1: np.ndarray, t: float, delta: float, gs: Sequence[DimFnSpec]
) -> KernelResult:
    """Pieces and g-sums per pair, over every a0 with Delta possibly nonempty."""
    a2 = np.asarray(a2, dtype=np.int64)
    a1 = np.asarray(a1, dtype=np.int64)
    npairs = len(a2)
    lo, hi = _a0_bounds(a2, a1, n)
    sizes = hi - lo + 1
    owner = np.repeat(np.arange(npairs), sizes)
    starts = np.repeat(lo - np.concatenate(([0], np.cumsum(sizes)[:-1])), sizes)
    a0 = starts + np.arange(owner.size, dtype=np.int64)
    A2, A1 = a2[owner], a1[owner]
    D = A1 * A1 - 4 * A2 * a0
    gap = 4.0 * A2 * t
    # D < -gap: F > t everywhere.  D = 0 belongs to the repeated-root cover.
    keep = (D != 0) & (D > -gap)
    owner, A2, A1, a0, D, gap = owner[keep], A2[keep], A1[keep], a0[keep], D[keep], gap[keep]
    low_d = D <= gap
    fallback = [
        (int(o), int(x), int(y), int(z))
        for o, x, y, z in zip(owner[low_d], A2[low_d], A1[low_d], a0[low_d])
    ]
    ok = ~low_d
    owner, A2, A1, a0, D = owner[ok], A2[ok], A1[ok], a0[ok], D[ok]
    Df = D.astype(np.float64)
    gap = gap[ok]
    sq = np.sqrt(Df)
    sq_p = np.sqrt(Df + gap)
    sq_m = np.sqrt(Df - gap)
    L_full = 4.0 * t / (sq_p + sq_m)
    L_between = 2.0 * t / (sq + sq_m)
    L_outside = 2.0 * t / (sq + sq_p)

    F0 = a0
    F1 = A2 + A1 + a0
    neg_b = -A1
    # roots strictly inside (0, 1), decided from the integer signs of F(0),
    # F(1) and the vertex position; a root at 0 or 1 pins the other one
    left_in = (
        (F0 > 0)
        & (neg_b > 0)
        & ((F1 < 0) | ((F1 > 0) & (neg_b < 2 * A2)) | ((F1 == 0) & (a0 < A2)))
    )
    right_in = (
        ((F0 < 0) | ((F0 > 0) & (neg_b > 0)) | ((F0 == 0) & (A1 < 0)))
        & (F1 > 0)
        & (neg_b < 2 * A2)
    )
    # roots exactly at 0 or 1 (clipped components)
    left_at0 = (F0 == 0) & (A1 < 0)
    right_at0 = (F0 == 0) & (A1 > 0)
    left_at1 = (F1 == 0) & (a0 > A2)
    right_at1 = (F1 == 0) & (a0 < A2)

    owners = []
    lengths = []
    for mask, L in (
        (left_in, L_full),
        (right_in, L_full),
        (left_at0, L_between),
        (right_at1, L_between),
        (right_at0, L_outside),
        (left_at1, L_outside),
    ):
        owners.append(owner[mask])
        lengths.append(L[mask])
    owner_c = np.concatenate(owners)
    L = np.concatenate(lengths)

    count, single, tail, merge, full, rem = _chop_lengths(L, delta)
    pieces = np.bincount(owner_c, weights=count, minlength=npairs).astype(np.int64)
    gsums = []
    for g in gs:
        g_d = float(g_float(g, delta))
        g_h = float(g_float(g, 0.5 * delta))
        val = full * g_d
        val = val + np.where(single, g_float(g, np.where(single, L, delta)), 0.0)
        val = val + np.where(tail, g_float(g, np.where(tail, rem, delta)), 0.0)
        val = val + np.where(
            merge, g_h + g_float(g, np.where(merge, 0.5 * delta + rem, delta)), 0.0
        )
        gsums.append(np.bincount(owner_c, weights=val, minlength=npairs))
    return KernelResult(pieces, gsums, fallback)


# --------------------------------------------------------------------------
# distinct roots


@dataclass(frozen=True)
class DistinctLevel:
    n: int
    method: str
    pairs: int
    pieces: int
    max_pair_pieces: int
    violations: int
    gsums: tuple[Enclosure, ...]
    rel_se: tuple[float, ...] = ()
    pieces_rel_se: float = 0.0
    sampled_pairs: int = 0


def _level_inputs(n: int, psi: PsiSpec) -> tuple[Fraction, Fraction, Fraction]:
    t_lo, t_hi = psi_level_bounds(psi, n)
    return t_lo, t_hi, chop_delta(t_hi, n)


def _exact_row(args) -> tuple[list[int], list[list[Enclosure]]]:
    n, a2, t_hi, delta, gs = args
    pieces, sums = [], [[] for _ in gs]
    for a2_, a1 in block_pairs(n, a2):
        U = pair_delta_union(a2_, a1, n, t_hi)
        s = chop_summary(U, delta)
        pieces.append(s.count)
        for k, g in enumerate(gs):
            sums[k].append(s.gsum(g, delta))
    return pieces, sums


def _float_enclosure(total: float) -> Enclosure:
    return Enclosure.from_float(total, FLOAT_REL_ERR + 2.0**-48)


def _exact_triple_gsums(triples, t_hi, delta, gs) -> tuple[list[int], list[Enclosure]]:
    counts = []
    sums: list[list[Enclosure]] = [[] for _ in gs]
    for a2, a1, a0 in triples:
        F = IntegerQuadratic(a2, a1, a0)
        s = chop_summary(IntervalUnion(split_parts(F, t_hi)), delta)
        counts.append(s.count)
        for k, g in enumerate(gs):
            sums[k].append(s.gsum(g, delta))
    return counts, [enclosure_sum(x) if x else ZERO_ENCLOSURE for x in sums]


def _numeric_chunk(args):
    """Per-pair piece counts (fallback triples included) and g-sums."""
    n, idx, t, delta, gs, t_hi, delta_q = args
    a2, a1 = pair_from_index(n, idx)
    res = numeric_kernel(n, a2, a1, t, delta, gs)
    counts, fb_sums = _exact_triple_gsums([f[1:] for f in res.fallback], t_hi, delta_q, gs)
    pieces = res.pieces.copy()
    np.add.at(pieces, np.array([f[0] for f in res.fallback], dtype=np.int64), counts)
    return pieces, res.gsums, fb_sums


def _chunks(total: int, size: int) -> list[np.ndarray]:
    return [np.arange(s, min(s + size, total), dtype=np.int64) for s in range(0, total, size)]


def cover_distinct_level(
    n: int,
    psi: PsiSpec,
    gs: Sequence[DimFnSpec],
    method: str = "auto",
    threads: int = 1,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    cap: int | None = None,
) -> DistinctLevel:
    """Distinct-root cover statistics at level n for several g at once.

    ``cap`` bounds the exhaustive methods; sampling is allowed up to
    SAMPLED_MAX_LEVEL whatever the cap.
    """
    method = resolve_method(n, method)
    check_level(n, cap if method != "sampled" else SAMPLED_MAX_LEVEL)
    t_lo, t_hi, delta = _level_inputs(n, psi)
    P = block_pair_count(n)
    bound = piece_bound(n)

    if method == "exact":
        rows = ordered_map(
            _exact_row,
            [(n, a2, t_hi, delta, tuple(gs)) for a2 in range(1, 2 ** (n + 1))],
            threads,
        )
        pieces = [p for row, _ in rows for p in row]
        gsums = tuple(
            enclosure_sum(e for _, sums in rows for e in sums[k]) for k in range(len(gs))
        )
        return DistinctLevel(
            n,
            "exact",
            P,
            sum(pieces),
            max(pieces),
            sum(p > bound for p in pieces),
            gsums,
            tuple(0.0 for _ in gs),
        )

    t_f = float(t_hi)
    d_f = float(delta)
    if method == "numeric":
        chunks = _chunks(P, 1 << 10)
    else:
        rng = np.random.default_rng([seed, n])
        idx = np.sort(rng.integers(0, P, size=samples))
        chunks = [idx[s : s + 512] for s in range(0, samples, 512)]
    results = ordered_map(
        _numeric_chunk, [(n, c, t_f, d_f, tuple(gs), t_hi, delta) for c in chunks], threads
    )
    pieces = np.concatenate([r[0] for r in results])
    per_g = [np.concatenate([r[1][k] for r in results]) for k in range(len(gs))]
    fb_sums = [enclosure_sum(r[2][k] for r in results) for k in range(len(gs))]

    if method == "numeric":
        gsums = tuple(
            _float_enclosure(math.fsum(v.tolist())) + fb_sums[k] for k, v in enumerate(per_g)
        )
        return DistinctLevel(
            n,
            "numeric",
            P,
            int(pieces.sum()),
            int(pieces.max()),
            int((pieces > bound).sum()),
            gsums,
            tuple(0.0 for _ in gs),
        )

    S = len(pieces)
    scale = P / S

    def est(v: np.ndarray) -> tuple[float, float]:
        mean = math.fsum(v.tolist()) / S
        sd = float(np.std(v, ddof=1)) if S > 1 else 0.0
        return P * mean, (sd / math.sqrt(S)) / mean if mean else 0.0

    gsums, rel = [], []
    for k, v in enumerate(per_g):
        total, r = est(v)
        gsums.append(_float_enclosure(total) + fb_sums[k] * scale)
        rel.append(r)
    p_total, p_rel = est(pieces.astype(np.float64))
    return DistinctLevel(
        n,
        "sampled",
        P,
        int(round(p_total)),
        int(pieces.max()),
        int((pieces > bound).sum()),
        tuple(gsums),
        tuple(rel),
        p_rel,
        S,
    )


def cover_distinct(
    n: int,
    psi: PsiSpec,
    g: DimFnSpec,
    method: str = "auto",
    threads: int = 1,
    **kw,
) -> tuple[int, int, Enclosure]:
    """(pair count, piece count, g-sum) of the chopped distinct-root cover."""
    n0 = decay_threshold(psi)
    if n < n0:
        raise ValueError(f"level {n} below the decay threshold {n0}")
    lvl = cover_distinct_level(n, psi, [g], method, threads, **kw)
    return lvl.pairs, lvl.pieces, lvl.gsums[0]


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CoverLevelReport:
    n: int
    repeated_count: int
    repeated_gsum: Enclosure
    distinct_pair_count: int
    chopped_piece_count: int
    chop_bound: int
    distinct_gsum: Enclosure
    total_gsum: Enclosure
    method: str = "exact"
    max_pair_pieces: int = 0
    violations: int = 0
    rel_se: float = 0.0

    CSV_HEADER = (
        "n,rep_count,rep_gsum_lo,rep_gsum_hi,pairs,pieces,gsum_lo,gsum_hi,"
        "total_lo,total_hi,method,max_pair_pieces,chop_bound,violations,rel_se"
    )

    def csv_fields(self) -> list[str]:
        return [
            str(self.n),
            str(self.repeated_count),
            repr(self.repeated_gsum.lo),
            repr(self.repeated_gsum.hi),
            str(self.distinct_pair_count),
            str(self.chopped_piece_count),
            repr(self.distinct_gsum.lo),
            repr(self.distinct_gsum.hi),
            repr(self.total_gsum.lo),
            repr(self.total_gsum.hi),
            self.method,
            str(self.max_pair_pieces),
            str(self.chop_bound),
            str(self.violations),
            repr(self.rel_se),
        ]

    def to_json(self) -> dict:
        return dict(zip(self.CSV_HEADER.split(","), self.csv_fields()))


def cover_level_multi(
    n: int,
    psi: PsiSpec,
    gs: Sequence[DimFnSpec],
    method: str = "auto",
    threads: int = 1,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    cap: int | None = None,
) -> list[CoverLevelReport]:
    """One level report per g, sharing a single pass over the block."""
    dist = cover_distinct_level(n, psi, gs, method, threads, samples, seed, cap)
    cover = repeated_cover(n, psi)
    out = []
    for k, g in enumerate(gs):
        rep = enclosure_sum(g_enclose_fast(g, iv.length()) for _, iv in cover)
        out.append(
            CoverLevelReport(
                n,
                len(cover),
                rep,
                dist.pairs,
                dist.pieces,
                piece_bound(n),
                dist.gsums[k],
                rep + dist.gsums[k],
                dist.method,
                dist.max_pair_pieces,
                dist.violations,
                dist.rel_se[k] if dist.rel_se else 0.0,
            )
        )
    return out


def cover_level(
    n: int,
    psi: PsiSpec,
    g: DimFnSpec,
    method: str = "auto",
    threads: int = 1,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    cap: int | None = None,
) -> CoverLevelReport:
    n0 = decay_threshold(psi)
    if n < max(n0, 1):
        raise ValueError(f"level {n} below the decay threshold {max(n0, 1)}")
    return cover_level_multi(n, psi, [g], method, threads, samples, seed, cap)[0]


@dataclass(frozen=True)
class TailSumReport:
    n_start: int
    n_end: int
    tail: Enclosure
    trend: tuple[tuple[int, Enclosure], ...]
    levels: tuple[CoverLevelReport, ...]

    TREND_HEADER = "N,tail_lo,tail_hi,level_lo,level_hi,method"

    def trend_rows(self) -> list[list[str]]:
        rows = []
        by_n = {r.n: r for r in self.levels}
        for N, enc in self.trend:
            lvl = by_n[N].total_gsum
            rows.append(
                [str(N), repr(enc.lo), repr(enc.hi), repr(lvl.lo), repr(lvl.hi), by_n[N].method]
            )
        return rows

    def to_json(self) -> dict:
        return {
            "N_start": self.n_start,
            "N_end": self.n_end,
            "tail": [self.tail.lo, self.tail.hi],
            "trend": [{"N": N, "tail": [e.lo, e.hi]} for N, e in self.trend],
            "levels": [r.to_json() for r in self.levels],
        }


def tail_from_levels(levels: Sequence[CoverLevelReport]) -> TailSumReport:
    levels = sorted(levels, key=lambda r: r.n)
    trend = []
    acc = ZERO_ENCLOSURE
    for r in reversed(levels):
        acc = acc + r.total_gsum
        trend.append((r.n, acc))
    trend.reverse()
    return TailSumReport(levels[0].n, levels[-1].n, trend[0][1], tuple(trend), tuple(levels))


def tail_sum(
    n_start: int,
    n_end: int,
    psi: PsiSpec,
    g: DimFnSpec,
    method: str = "auto",
    threads: int = 1,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    cap: int | None = None,
) -> TailSumReport:
    """Sum of level g-sums over [n_start, n_end] with partial tails per N."""
    n0 = max(decay_threshold(psi), 1)
    if n_start < n0:
        raise ValueError(f"N_start={n_start} below the decay threshold {n0}")
    if n_end < n_start:
        raise ValueError("N_end must be >= N_start")
    levels = [
        cover_level_multi(n, psi, [g], method, threads, samples, seed, cap)[0]
        for n in range(n_start, n_end + 1)
    ]
    return tail_from_levels(levels)
