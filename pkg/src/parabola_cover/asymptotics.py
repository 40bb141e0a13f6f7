"""Convergence of sum_q g(psi(q)/q) q^2, and empirical dimension estimates."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cover import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    chop_delta,
    cover_distinct_level,
    repeated_box_count,
)
from .exact import Enclosure, as_rational, format_rational
from .scales import FLOAT_REL_ERR, DimFnSpec, PsiSpec, g_float, psi_float
from .sets import psi_level_bounds

DEFAULT_QMAX = 10**6
MAX_LOG_DEPTH = 8
_CHUNK = 1 << 18


class SeriesClass(str, Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    UNDECIDED = "boundary-undecided"


def term_exponents(psi: PsiSpec, g: DimFnSpec) -> tuple[Fraction, ...]:
    """(e0, e1, ...) with g(psi(q)/q) q^2 of exact order q^e0 prod log_i(q)^e_i.

    log(1/r) = (tau+1) log q + O(log log q) for r = psi(q)/q, so every
    iterated log of 1/r has the order of the same iterated log of q.
    """
    depth = max(psi.depth, g.depth)
    psi_logs = list(psi.log_powers()) + [Fraction(0)] * (depth - psi.depth)
    g_logs = list(g.log_exponents) + [Fraction(0)] * (depth - g.depth)
    e0 = 2 - g.s * (psi.tau + 1)
    return (e0,) + tuple(g.s * a + b for a, b in zip(psi_logs, g_logs))


def bertrand_rule(exponents: Sequence[Fraction], max_depth: int = MAX_LOG_DEPTH) -> SeriesClass:
    """Convergence of sum q^e0 prod log_i(q)^e_i by the iterated Bertrand test."""
    for i, e in enumerate(exponents):
        if i > max_depth:
            return SeriesClass.UNDECIDED
        if e < -1:
            return SeriesClass.CONVERGENT
        if e > -1:
            return SeriesClass.DIVERGENT
    # every exponent is -1: sum 1/(q log q log log q ...) diverges
    if len(exponents) > max_depth + 1:
        return SeriesClass.UNDECIDED
    return SeriesClass.DIVERGENT


@dataclass
class SeriesReport:
    classification: SeriesClass
    exact_rule_applied: bool
    exponents: tuple[Fraction, ...]
    partial_sums: list[tuple[int, Enclosure]] = field(default_factory=list)
    condensation_ratio: list[tuple[int, Enclosure]] = field(default_factory=list)
    last_term: float = math.nan
    growth_exponent: float = math.nan

    def to_json(self) -> dict:
        return {
            "classification": self.classification.value,
            "exact_rule_applied": self.exact_rule_applied,
            "exponents": [format_rational(e) for e in self.exponents],
            "partial_sums": [
                {"q_max": q, "lo": e.lo, "hi": e.hi} for q, e in self.partial_sums
            ],
            "condensation_ratio": [
                {"n": n, "lo": e.lo, "hi": e.hi} for n, e in self.condensation_ratio
            ],
            "last_term": self.last_term,
            "growth_exponent": self.growth_exponent,
        }


def series_start(psi: PsiSpec, g: DimFnSpec) -> int:
    """First q where both psi(q) and g(psi(q)/q) are inside their domains."""
    q0 = max(1, math.floor(psi.q_min) + 1)
    while float(psi_float(psi, q0)) / q0 >= g.r_max:
        q0 += 1
    return q0


def series_terms(psi: PsiSpec, g: DimFnSpec, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    return g_float(g, psi_float(psi, q) / q) * q * q


def partial_sums(
    psi: PsiSpec, g: DimFnSpec, checkpoints: Sequence[int]
) -> list[tuple[int, Enclosure]]:
    """Float partial sums from :func:`series_start` up to each checkpoint."""
    q0 = series_start(psi, g)
    out = []
    acc: list[float] = []
    start = q0
    for cp in sorted(checkpoints):
        while start <= cp:
            stop = min(cp, start + _CHUNK - 1)
            acc.append(math.fsum(series_terms(psi, g, np.arange(start, stop + 1)).tolist()))
            start = stop + 1
        total = math.fsum(acc)
        out.append((cp, Enclosure.from_float(total, FLOAT_REL_ERR)))
    return out


def growth_exponent(sums: Sequence[tuple[int, Enclosure]]) -> float:
    """Least-squares slope of log S(q) against log q."""
    pts = [(math.log(q), math.log(e.mid)) for q, e in sums if e.mid > 0]
    if len(pts) < 2:
        return math.nan
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def classify_series(
    psi: PsiSpec,
    g: DimFnSpec,
    q_max: int = DEFAULT_QMAX,
    max_depth: int = MAX_LOG_DEPTH,
    condensation_levels: int = 12,
) -> SeriesReport:
    """Exact classification for power-log families plus numerical corroboration."""
    exps = term_exponents(psi, g)
    cls = bertrand_rule(exps, max_depth)
    q0 = series_start(psi, g)
    checkpoints = []
    q = 10
    while q < q_max:
        if q >= q0:
            checkpoints.append(q)
        q *= 10
    checkpoints.append(q_max)
    sums = partial_sums(psi, g, checkpoints)
    ratios = condensation_compare(psi, g, 2, condensation_levels)
    return SeriesReport(
        cls,
        cls is not SeriesClass.UNDECIDED,
        exps,
        sums,
        ratios,
        float(series_terms(psi, g, np.array([q_max]))[0]),
        growth_exponent([s for s in sums if s[0] >= 1000] or sums),
    )


def condensation_compare(
    psi: PsiSpec, g: DimFnSpec, a: int = 2, n_max: int = 12
) -> list[tuple[int, Enclosure]]:
    """(n, block sum over [a^n, a^(n+1)) divided by g(psi(a^n)/a^n) a^(3n))."""
    if a < 2:
        raise ValueError("condensation base must be >= 2")
    q0 = series_start(psi, g)
    out = []
    for n in range(0, n_max + 1):
        lo = a**n
        if lo < q0:
            continue
        block = math.fsum(series_terms(psi, g, np.arange(lo, a * lo)).tolist())
        cond = float(series_terms(psi, g, np.array([lo]))[0]) * lo
        out.append((n, Enclosure.from_float(block / cond, 4 * FLOAT_REL_ERR)))
    return out


def condensation_bracket(psi: PsiSpec, g: DimFnSpec, a: int, n: int) -> tuple[float, float]:
    """Monotone bounds for the level-n condensation ratio.

    g(psi(q)/q) decreases and q^2 increases, so the block sum lies between
    (a-1) a^n g(psi(a^(n+1))/a^(n+1)) a^(2n) and (a-1) a^n g(psi(a^n)/a^n) a^(2n+2).
    """
    lo, hi = float(a**n), float(a ** (n + 1))
    h = lambda q: float(g_float(g, psi_float(psi, q) / q))  # noqa: E731
    return (a - 1) * h(hi) / h(lo), float((a - 1) * a * a)


# --------------------------------------------------------------------------
# dimension


@dataclass
class DimensionReport:
    tau: Fraction
    levels: list[int]
    box_counts: list[tuple[int, int, Fraction]]
    slope_estimate: float
    target: Fraction
    methods: list[str] = field(default_factory=list)

    CSV_HEADER = "n,delta,count,method"

    def csv_rows(self) -> list[list[str]]:
        return [
            [str(n), repr(float(d)), str(c), m]
            for (n, c, d), m in zip(self.box_counts, self.methods)
        ]

    def to_json(self) -> dict:
        return {
            "tau": format_rational(self.tau),
            "levels": self.levels,
            "box_counts": [
                {"n": n, "count": c, "delta": repr(float(d)), "method": m}
                for (n, c, d), m in zip(self.box_counts, self.methods)
            ],
            "slope_estimate": self.slope_estimate,
            "target": format_rational(self.target),
        }


def level_box_count(
    n: int,
    psi: PsiSpec,
    method: str = "auto",
    threads: int = 1,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    cap: int | None = None,
) -> tuple[int, Fraction, str]:
    """(boxes, delta, method): chopped distinct pieces plus repeated intervals in delta units."""
    _, t_hi = psi_level_bounds(psi, n)
    delta = chop_delta(t_hi, n)
    dist = cover_distinct_level(n, psi, [], method, threads, samples, seed, cap)
    return dist.pieces + repeated_box_count(n, psi, delta), delta, dist.method


def dimension_slope(box_counts: Sequence[tuple[int, int, Fraction]]) -> float:
    """Least-squares slope of log count against -log delta."""
    if len(box_counts) < 2:
        return math.nan
    x = np.array([-math.log(float(d)) for _, _, d in box_counts])
    y = np.array([math.log(c) for _, c, _ in box_counts])
    return float(np.polyfit(x, y, 1)[0])


def estimate_dimension(
    tau: Fraction | int | str,
    n_min: int,
    n_max: int,
    method: str = "auto",
    threads: int = 1,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    cap: int | None = None,
) -> DimensionReport:
    tau = as_rational(tau)
    if tau <= 2:
        raise ValueError("estimate_dimension needs tau > 2")
    if n_max < n_min:
        raise ValueError("n_max must be >= n_min")
    if n_min < 1:
        raise ValueError("n_min must be >= 1")
    if n_max - n_min + 1 < 3:
        warnings.warn("fewer than 3 levels: slope is unreliable", RuntimeWarning, stacklevel=2)
    psi = PsiSpec(tau)
    counts, methods = [], []
    for n in range(n_min, n_max + 1):
        c, d, m = level_box_count(n, psi, method, threads, samples, seed, cap)
        counts.append((n, c, d))
        methods.append(m)
    return DimensionReport(
        tau,
        list(range(n_min, n_max + 1)),
        counts,
        dimension_slope(counts),
        Fraction(3) / (tau + 1),
        methods,
    )


# --------------------------------------------------------------------------
# pointwise exponent


@dataclass
class PointwiseReport:
    x: Fraction
    q_max: int
    exponent: float
    witness: tuple[int, int, int] | None
    algebraic_hits: int
    first_hit: tuple[int, int, int] | None
    h_min: int = 2

    @property
    def algebraic(self) -> bool:
        return self.algebraic_hits > 0


def pointwise_exponent(
    x: Fraction | int | str, q_max: int, h_min: int = 2
) -> PointwiseReport:
    """max of -log|F(x)| / log H(F) over F with h_min <= H(F) = max(a2, |a1|) <= q_max.

    For each (a2, a1) only the a0 nearest to -(a2 x^2 + a1 x) matters.
    F(x) = 0 hits are counted separately (at every height) and excluded from
    the maximum.  Raising ``h_min`` drops the small-height terms, which
    otherwise dominate the maximum at desk-scale q_max.
    """
    x = as_rational(x)
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    if not 2 <= h_min <= q_max:
        raise ValueError("need 2 <= h_min <= q_max")
    u, w = x.numerator, x.denominator
    W = w * w
    best, witness = -math.inf, None
    hits, first = 0, None
    for a2 in range(1, q_max + 1):
        base = a2 * u * u
        step = u * w
        # a1 from -q_max upward; N = (a2 u^2 + a1 u w) mod w^2
        N = (base - q_max * step) % W
        step %= W
        for a1 in range(-q_max, q_max + 1):
            H = max(a2, abs(a1))
            dist = min(N, W - N)
            if dist == 0:
                hits += 1
                if first is None:
                    a0 = -(a2 * u * u + a1 * u * w) // W
                    first = (a2, a1, a0)
            elif H >= h_min:
                e = (math.log(W) - math.log(dist)) / math.log(H)
                if e > best:
                    best = e
                    a0 = -round(Fraction(a2 * u * u + a1 * u * w, W))
                    witness = (a2, a1, a0)
            N += step
            if N >= W:
                N -= W
    return PointwiseReport(x, q_max, best, witness, hits, first, h_min)
