import math
from fractions import Fraction

import mpmath
import pytest

from parabola_cover.scales import (
    DecayNotFound,
    DimFnSpec,
    GrowthWindow,
    PsiSpec,
    check_growth_window,
    decay_threshold,
    dyadic_grid,
    g_eval,
    parse_g,
    parse_psi,
    psi_eval,
    psi_exact,
)


def test_psi_pure_power_exact():
    assert psi_exact(PsiSpec(2), 4) == Fraction(1, 16)
    for n in range(0, 8):
        assert psi_exact(PsiSpec(3), 2**n) == Fraction(1, 2 ** (3 * n))
        assert psi_eval(PsiSpec(3), 2**n).contains(Fraction(1, 2 ** (3 * n)))


def test_psi_log_factor_at_e_squared():
    # q^-3 / log q at q = e^2 is e^-6 / 2
    with mpmath.workdps(50):
        q = mpmath.e**2
        oracle = mpmath.e**-6 / 2
    q_rat = Fraction(mpmath.nstr(q, 40))
    e = psi_eval(PsiSpec(3, [1]), q_rat)
    assert e.lo <= float(oracle) * (1 + 1e-30) + 1e-35
    assert abs(e.mid - float(oracle)) < 1e-15


def test_g_pure_power():
    assert g_eval(DimFnSpec(1), Fraction(1, 8)).contains(Fraction(1, 8))
    e = g_eval(DimFnSpec(Fraction(3, 5)), Fraction(1, 2**10))
    assert e.contains(Fraction(1, 64))


def test_g_log_factor():
    with mpmath.workdps(50):
        r = mpmath.e**-4
        oracle = mpmath.e**-2 * 4
    e = g_eval(DimFnSpec(Fraction(1, 2), [1]), Fraction(mpmath.nstr(r, 40)))
    assert abs(e.mid - float(oracle)) < 1e-14


def test_growth_window_power():
    grid = dyadic_grid(4, 40)
    g = DimFnSpec(Fraction(3, 5))
    # on x < 1, x^s1 < x^(3/5) < x^s2 needs s1 > 3/5 > s2
    ok, witness = check_growth_window(g, GrowthWindow("7/10", "1/2"), grid)
    assert ok and witness is None
    ok, witness = check_growth_window(g, GrowthWindow("1/2", "7/10"), grid)
    assert not ok and witness == Fraction(1, 16)
    ok, witness = check_growth_window(DimFnSpec(Fraction(3, 5)), GrowthWindow("3/5", "1"), grid)
    assert not ok and witness == Fraction(1, 16)


def test_growth_window_log_needs_deep_grid():
    g = DimFnSpec(1, [1])
    window = GrowthWindow("1", "9/10")
    # r log(1/r) < r^(9/10) only once log(1/r) < r^(-1/10), past k of about 60
    assert not check_growth_window(g, window, dyadic_grid(4, 40))[0]
    assert check_growth_window(g, window, dyadic_grid(60, 200))[0]


def test_decay_threshold():
    assert decay_threshold(PsiSpec(3)) == 1
    assert decay_threshold(PsiSpec(4)) == 1
    with pytest.raises(DecayNotFound):
        decay_threshold(PsiSpec(2))
    n0 = decay_threshold(PsiSpec(3, [-1]))
    assert n0 <= 5
    # direct enumeration oracle: n log 2 < 2^n for all n >= n0
    assert all(n * math.log(2) < 2**n for n in range(n0, 64))


def test_parse_round_trip():
    for text in ("pow:3", "pow:5/2", "powlog:3;1,2;1/10"):
        assert parse_psi(text).compact() == text
        assert PsiSpec.from_dict(parse_psi(text).to_dict()) == parse_psi(text)
    for text in ("pow:3/5", "powlog:1/2;2"):
        assert parse_g(text).compact() == text


@pytest.mark.parametrize("bad", ["pow:-1", "pow:0", "exp:3", "powlog:3", "pow:x"])
def test_parse_psi_rejects(bad):
    with pytest.raises(ValueError):
        parse_psi(bad)
