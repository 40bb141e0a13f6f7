import math
import random
import statistics
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parabola_cover.asymptotics import (
    SeriesClass,
    bertrand_rule,
    classify_series,
    condensation_bracket,
    condensation_compare,
    estimate_dimension,
    pointwise_exponent,
    term_exponents,
)
from parabola_cover.scales import DimFnSpec, PsiSpec

F = Fraction


def test_series_examples():
    conv = classify_series(PsiSpec(4), DimFnSpec(F(7, 10)), q_max=10**5)
    assert conv.classification is SeriesClass.CONVERGENT and conv.exact_rule_applied
    assert conv.exponents[0] == F(-3, 2)
    assert classify_series(PsiSpec(2), DimFnSpec(1), q_max=10**4).classification is (
        SeriesClass.DIVERGENT
    )
    div = classify_series(PsiSpec(4), DimFnSpec(F(1, 2)), q_max=10**5)
    assert div.classification is SeriesClass.DIVERGENT
    assert div.growth_exponent == pytest.approx(0.5, abs=0.05)


def test_critical_log_family():
    # g = r^(3/5) (log 1/r)^(3/5 * alpha) against psi_eps = q^-4 (log q)^(-alpha) (log q)^eps
    tau, alpha = F(4), F(1)
    s = F(3) / (tau + 1)
    g = DimFnSpec(s, [s * alpha - 1])
    psi0 = PsiSpec(tau, [alpha])
    psi_eps = PsiSpec(tau, [alpha], F(-1, 2))
    assert term_exponents(psi0, g) == (F(-1), F(-1))
    assert bertrand_rule(term_exponents(psi0, g)) is SeriesClass.DIVERGENT
    assert bertrand_rule(term_exponents(psi_eps, g)) is SeriesClass.CONVERGENT


def test_bertrand_rule_depth():
    assert bertrand_rule([F(-1)] * 3) is SeriesClass.DIVERGENT
    assert bertrand_rule([F(-1), F(-1), F(-2)]) is SeriesClass.CONVERGENT
    assert bertrand_rule([F(-1)] * 12, max_depth=8) is SeriesClass.UNDECIDED


def test_condensation_bracket_q3_g1():
    psi, g = PsiSpec(3), DimFnSpec(1)
    ratios = condensation_compare(psi, g, 2, 12)
    assert [n for n, _ in ratios] == list(range(0, 13))
    for n, e in ratios:
        lo, hi = condensation_bracket(psi, g, 2, n)
        assert 2.0**-4 <= e.lo and e.hi <= 2.0**4
        assert lo * (1 - 1e-9) <= e.mid <= hi * (1 + 1e-9)


def test_condensation_log_family_bounded():
    ratios = condensation_compare(PsiSpec(3, [2]), DimFnSpec(F(9, 10)), 2, 12)
    vals = [e.mid for _, e in ratios]
    assert vals and max(vals) < 16 and min(vals) > 1 / 16


@settings(max_examples=60, deadline=None)
@given(
    st.fractions(min_value=F(1, 2), max_value=8, max_denominator=8),
    st.fractions(min_value=F(1, 10), max_value=1, max_denominator=20),
)
def test_pure_power_sign_rule(tau, s):
    cls = bertrand_rule(term_exponents(PsiSpec(tau), DimFnSpec(s)))
    expect = SeriesClass.CONVERGENT if s * (tau + 1) > 3 else SeriesClass.DIVERGENT
    assert cls is expect


@settings(max_examples=40, deadline=None)
@given(
    st.fractions(min_value=F(5, 2), max_value=6, max_denominator=4),
    st.fractions(min_value=F(1, 10), max_value=1, max_denominator=20),
    st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=4), max_size=2),
)
def test_term_exponents_shape(tau, s, alphas):
    # a constant factor on psi never enters the exponent vector
    psi = PsiSpec(tau, alphas)
    g = DimFnSpec(s)
    assert term_exponents(psi, g)[0] == 2 - s * (tau + 1)
    assert len(term_exponents(psi, g)) == 1 + len(alphas)


def test_dimension_short_run_warns_and_reports():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = estimate_dimension(4, 3, 3)
    assert any("fewer than 3" in str(w.message) for w in caught)
    assert math.isnan(rep.slope_estimate)
    assert rep.target == F(3, 5)
    with pytest.raises(ValueError):
        estimate_dimension(2, 3, 5)


def test_dimension_near_critical_rises():
    low = estimate_dimension(F(5), 3, 6).slope_estimate
    high = estimate_dimension(F(21, 10), 3, 6).slope_estimate
    assert high > low


def test_pointwise_half_is_algebraic():
    r = pointwise_exponent(F(1, 2), 8)
    assert r.algebraic
    a2, a1, a0 = r.first_hit
    assert a2 * F(1, 4) + a1 * F(1, 2) + a0 == 0
    # (4, -4, 1) has height 4 and vanishes at 1/2, so it is among the hits
    assert r.algebraic_hits >= 1 and 4 * F(1, 4) - 4 * F(1, 2) + 1 == 0


def test_pointwise_sqrt2_minus_1_approximation():
    x = F(round((math.sqrt(2) - 1) * 10**15), 10**15)
    r = pointwise_exponent(x, 50)
    assert not r.algebraic
    assert r.witness == (1, 2, -1)
    assert r.exponent > 20


def test_pointwise_generic_near_two():
    rng = random.Random(1)
    exps = []
    for _ in range(6):
        w = rng.randrange(10**12, 10**13)
        r = pointwise_exponent(F(rng.randrange(w), w), 400, h_min=100)
        exps.append(r.exponent)
    assert min(exps) >= 1.8
    assert 2.0 <= statistics.median(exps) <= 3.0
