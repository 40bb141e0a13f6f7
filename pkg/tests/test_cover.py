from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parabola_cover.cover import (
    chop,
    chop_delta,
    chop_summary,
    cover_distinct_level,
    cover_level,
    cover_level_multi,
    cover_repeated,
    pair_from_index,
    piece_bound,
    repeated_cover,
    repeated_params_in_range,
    resolve_method,
    tail_from_levels,
)
from parabola_cover.exact import QuadIrr
from parabola_cover.polys import ResourceCapError, block_pairs, classify, repeated_block_members
from parabola_cover.scales import DimFnSpec, PsiSpec
from parabola_cover.sets import Interval, IntervalUnion, delta_set, pair_delta_union

Q = QuadIrr.rational
PSI3 = PsiSpec(3)
G35 = DimFnSpec(Fraction(3, 5))
G1 = DimFnSpec(1)


def iv(lo, hi, lo_open=False, hi_open=False):
    return Interval(Q(Fraction(lo)), Q(Fraction(hi)), lo_open, hi_open)


def _lengths(pieces):
    return [p.interval.hi - p.interval.lo for p in pieces]


def test_chop_unit_interval():
    pieces = chop(IntervalUnion([iv(0, 1)]), Fraction(1, 4))
    assert len(pieces) == 4
    assert all(L == Q(Fraction(1, 4)) for L in _lengths(pieces))


def test_chop_three_eighths():
    pieces = chop(IntervalUnion([iv(0, "3/8")]), Fraction(1, 4))
    assert _lengths(pieces) == [Q(Fraction(1, 4)), Q(Fraction(1, 8))]


def test_chop_two_components():
    U = IntervalUnion([iv(0, "1/4"), iv("1/2", 1)])
    assert len(chop(U, Fraction(1, 4))) == 3
    assert chop_summary(U, Fraction(1, 4)).count == 3


def test_chop_merge_keeps_half_delta_floor():
    # 1/4 + 1/4 + 1/32: the short leftover is absorbed
    pieces = chop(IntervalUnion([iv(0, "17/32")]), Fraction(1, 4))
    assert _lengths(pieces) == [Q(Fraction(1, 4)), Q(Fraction(1, 8)), Q(Fraction(5, 32))]


def test_chop_short_boundary_fragment_is_tagged():
    pieces = chop(IntervalUnion([iv(0, "1/16")]), Fraction(1, 4))
    assert len(pieces) == 1 and pieces[0].short


fracs = st.fractions(min_value=0, max_value=1, max_denominator=64)


@st.composite
def unions(draw):
    items = []
    for _ in range(draw(st.integers(1, 4))):
        a, b = sorted((draw(fracs), draw(fracs)))
        items.append(iv(a, b, draw(st.booleans()), draw(st.booleans())))
    return IntervalUnion(items)


@settings(max_examples=200, deadline=None)
@given(unions(), st.fractions(min_value=Fraction(1, 200), max_value=Fraction(1, 2)))
def test_chop_properties(U, delta):
    pieces = chop(U, delta)
    summary = chop_summary(U, delta)
    assert summary.count == len(pieces)
    # pieces cover U exactly and are disjoint
    rebuilt = IntervalUnion([p.interval for p in pieces])
    assert rebuilt.contains(U) and U.contains(rebuilt)
    for a, b in zip(pieces, pieces[1:]):
        assert a.interval.hi <= b.interval.lo
    half = Q(delta / 2)
    full = Q(delta)
    shorts = 0
    for p in pieces:
        L = p.interval.hi - p.interval.lo
        assert L <= full
        if L < half:
            assert p.short
            shorts += 1
    assert shorts <= len(U)
    # count is ceil(L / delta) per component, at least one
    for comp in U:
        L = Fraction(comp.hi.as_fraction() - comp.lo.as_fraction())
        k = sum(1 for p in pieces if comp.contains(p.interval))
        assert k == max(1, -(-L // delta))


def test_repeated_grid_n2():
    assert repeated_params_in_range(2) == [(1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2), (2, 3)]


def test_realized_repeated_matches_brute_force():
    for n in range(1, 6):
        t = Fraction(1, 2 ** (3 * n))
        realized = [
            F for F in repeated_block_members(n) if not delta_set(F, t).is_empty()
        ]
        cover = repeated_cover(n, PSI3, realized_only=True)
        assert len(cover) == len(realized)
        for (k, u, v), piece in cover:
            F = next(F for F in realized if classify(F).repeated_params == (k, u, v))
            assert IntervalUnion([piece]).contains(delta_set(F, t))


def test_repeated_lebesgue_sanity():
    for n in range(1, 7):
        count, gsum = cover_repeated(n, PSI3, G1)
        t = 2.0 ** (-3 * n)
        u_min = min(u for u, _ in repeated_params_in_range(n))
        assert gsum.hi <= count * 2 * t**0.5 / u_min * (1 + 1e-9)


def test_frozen_level3_totals():
    lvl = cover_distinct_level(3, PSI3, [G35, G1], "exact")
    assert (lvl.pairs, lvl.pieces, lvl.max_pair_pieces) == (360, 123452, 842)
    assert lvl.pieces <= piece_bound(3) * lvl.pairs
    assert lvl.gsums[0].contains(137.247910275225)
    assert lvl.gsums[1].contains(1.476119114604)
    # Lebesgue sanity: total length <= 16 psi(2^n) per pair
    assert lvl.gsums[1].hi <= 16 * 2.0**-9 * lvl.pairs


def test_level2_gsum_against_high_precision_oracle():
    n = 2
    t = Fraction(1, 64)
    delta = chop_delta(t, n)
    total = mpmath.mpf(0)
    with mpmath.workdps(40):
        for a2, a1 in block_pairs(n):
            for p in chop(pair_delta_union(a2, a1, n, t), delta):
                ends = []
                for x in (p.interval.lo, p.interval.hi):
                    ends.append((mpmath.mpf(x.p) + x.q * mpmath.sqrt(x.d)) / x.r)
                total += (ends[1] - ends[0]) ** (mpmath.mpf(3) / 5)
        oracle = float(total)
    lvl = cover_distinct_level(n, PSI3, [G35], "exact")
    assert lvl.gsums[0].lo <= oracle <= lvl.gsums[0].hi


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_numeric_agrees_with_exact(n):
    e = cover_distinct_level(n, PSI3, [G35], "exact")
    m = cover_distinct_level(n, PSI3, [G35], "numeric")
    assert (m.pieces, m.max_pair_pieces) == (e.pieces, e.max_pair_pieces)
    assert abs(m.gsums[0].mid - e.gsums[0].mid) <= 1e-10 * e.gsums[0].mid


def test_sampled_estimate_is_close_and_seeded():
    psi = PsiSpec(4)
    exact = cover_distinct_level(6, psi, [G35], "numeric")
    a = cover_distinct_level(6, psi, [G35], "sampled", samples=4000, seed=7)
    b = cover_distinct_level(6, psi, [G35], "sampled", samples=4000, seed=7)
    assert a == b
    assert abs(a.gsums[0].mid / exact.gsums[0].mid - 1) < 5 * a.rel_se[0]
    assert abs(a.pieces / exact.pieces - 1) < 5 * a.pieces_rel_se


def test_pair_from_index_matches_order():
    for n in range(0, 5):
        pairs = list(block_pairs(n))
        a2, a1 = pair_from_index(n, np.arange(len(pairs)))
        assert list(zip(a2.tolist(), a1.tolist())) == pairs


def test_resolve_method_and_caps():
    assert resolve_method(4) == "exact"
    assert resolve_method(8) == "numeric"
    assert resolve_method(9) == "sampled"
    with pytest.raises(ValueError):
        resolve_method(3, "bogus")
    with pytest.raises(ResourceCapError):
        cover_distinct_level(9, PSI3, [G35], "numeric", cap=8)


def test_level_report_and_tail():
    psi = PsiSpec(4)
    reports = [cover_level(n, psi, G35) for n in (1, 2, 3)]
    multi = [cover_level_multi(n, psi, [G35, G1])[0] for n in (1, 2, 3)]
    assert reports == multi
    for r in reports:
        assert r.total_gsum.lo <= r.repeated_gsum.hi + r.distinct_gsum.hi
        assert r.violations == 0
        assert r.csv_fields()[0] == str(r.n)
    tail = tail_from_levels(reports)
    assert [N for N, _ in tail.trend] == [1, 2, 3]
    assert tail.tail.contains(sum(r.total_gsum.mid for r in reports))
    with pytest.raises(ValueError):
        cover_level(0, psi, G35)


def test_threads_do_not_change_results():
    one = cover_distinct_level(3, PSI3, [G35], "exact", threads=1)
    four = cover_distinct_level(3, PSI3, [G35], "exact", threads=4)
    assert one == four
    one = cover_distinct_level(6, PSI3, [G35], "numeric", threads=1)
    four = cover_distinct_level(6, PSI3, [G35], "numeric", threads=4)
    assert one == four
