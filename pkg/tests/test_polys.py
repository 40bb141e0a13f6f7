from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parabola_cover.exact import QuadIrr
from parabola_cover.polys import (
    DyadicBlock,
    IntegerQuadratic,
    ResourceCapError,
    RootKind,
    block_pair_count,
    block_pairs,
    classify,
    deriv_bound_check,
    enumerate_block,
    height,
    relevant_a0_range,
    repeated_block_members,
)


@pytest.mark.parametrize(
    "coeffs, h", [((4, -4, 1), 4), ((1, 0, 0), 1), ((2, 3, 1), 3)]
)
def test_height(coeffs, h):
    assert height(IntegerQuadratic(*coeffs)) == h


def test_classify_examples():
    rd = classify(IntegerQuadratic(1, 0, 0))
    assert rd.kind is RootKind.REPEATED and rd.discriminant == 0
    assert rd.repeated_params == (1, 1, 0) and rd.left == QuadIrr(0)

    rd = classify(IntegerQuadratic(1, -1, 0))
    assert rd.kind is RootKind.DISTINCT_REAL and rd.discriminant == 1
    assert (rd.left, rd.right) == (QuadIrr(0), QuadIrr(1))
    assert rd.deriv_abs == QuadIrr(1)

    rd = classify(IntegerQuadratic(1, 0, 1))
    assert rd.kind is RootKind.COMPLEX and rd.discriminant == -4

    rd = classify(IntegerQuadratic(4, -4, 1))
    assert rd.repeated_params == (1, 2, 1) and rd.left == QuadIrr(1, 0, 0, 2)


def test_block_counts():
    assert block_pair_count(0) == 3
    assert len(list(enumerate_block(0))) == 21
    assert block_pair_count(2) == 84
    assert DyadicBlock(2).triple_count() == 2604
    assert len(list(enumerate_block(2))) == 2604


def test_block_pairs_brute_force():
    for n in range(0, 5):
        lo, hi = 2**n, 2 ** (n + 1)
        brute = [
            (a2, a1)
            for a2 in range(1, hi)
            for a1 in range(-hi + 1, hi)
            if lo <= max(a2, abs(a1)) < hi
        ]
        assert list(block_pairs(n)) == brute
        assert block_pair_count(n) == len(brute)


def test_enumerate_heights_in_block():
    for n in range(0, 4):
        for F in enumerate_block(n):
            assert 2**n <= height(F) < 2 ** (n + 1)
            assert abs(F.a0) < 2 ** (n + 2)


def test_cap():
    with pytest.raises(ResourceCapError):
        next(enumerate_block(9, cap=8))


def test_deriv_bound_examples():
    assert deriv_bound_check(IntegerQuadratic(2, 3, 1), 1)
    assert deriv_bound_check(IntegerQuadratic(1, -1, 0), 0)
    assert not deriv_bound_check(IntegerQuadratic(1, 0, 1), 0)


def test_repeated_members_match_brute_force():
    for n in range(0, 6):
        brute = [F for F in enumerate_block(n) if F.discriminant == 0]
        assert list(repeated_block_members(n)) == brute


def test_leading_sign_normalised():
    assert IntegerQuadratic(-1, 2, -3).as_tuple() == (1, -2, 3)
    with pytest.raises(ValueError):
        IntegerQuadratic(0, 1, 1)


@given(st.integers(1, 60), st.integers(-60, 60), st.integers(0, 5))
def test_relevant_a0_range_is_complete(a2, a1, margin):
    n = max(a2, abs(a1)).bit_length() - 1
    bound = 2 ** (n + 2)
    rng = relevant_a0_range(a2, a1, n, margin)
    grid = [Fraction(i, 64) for i in range(65)]
    for a0 in range(-bound + 1, bound):
        F = IntegerQuadratic(a2, a1, a0)
        if any(abs(F(x)) < margin for x in grid):
            assert a0 in rng


@given(st.integers(1, 40), st.integers(-40, 40), st.integers(-200, 200))
def test_classify_roots_are_roots(a2, a1, a0):
    F = IntegerQuadratic(a2, a1, a0)
    rd = classify(F)
    assert rd.discriminant == a1 * a1 - 4 * a2 * a0
    if rd.kind is RootKind.COMPLEX:
        assert rd.roots is None
        return
    lo, hi = rd.roots
    # Vieta: sum -a1/a2 and gap sqrt(D)/a2
    assert lo + hi == QuadIrr.rational(Fraction(-a1, a2))
    assert hi - lo == QuadIrr(0, 1, rd.discriminant, a2)
