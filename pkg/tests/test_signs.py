import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from curvops import (
    Permutation,
    Rational,
    enumerate_inverse_shuffles,
    enumerate_shuffles,
    factorial_inverse,
    koszul_sign,
)
from curvops.errors import PositionError
from curvops.signs import is_block_monotone, sort_sign


def brute_force_shuffles(p, q):
    """Oracle: filter the whole symmetric group by the monotonicity predicate."""
    out = []
    for images in itertools.permutations(range(1, p + q + 1)):
        perm = Permutation(images)
        if is_block_monotone(perm, p, q):
            out.append(perm)
    return sorted(out)


def test_empty_shuffle():
    assert enumerate_inverse_shuffles(0, 0) == [Permutation(())]


def test_one_one_shuffles():
    got = enumerate_inverse_shuffles(1, 1)
    assert got == [Permutation((1, 2)), Permutation((2, 1))]


def test_two_one_shuffles_against_oracle():
    got = enumerate_inverse_shuffles(2, 1)
    want = sorted(s.inverse() for s in brute_force_shuffles(2, 1))
    assert len(got) == 3
    assert got == want


@pytest.mark.parametrize("p,q", [(p, q) for p in range(0, 5) for q in range(0, 5) if p + q <= 6])
def test_shuffle_counts_and_monotonicity(p, q):
    inv = enumerate_inverse_shuffles(p, q)
    assert len(inv) == math.comb(p + q, p)
    assert len(set(inv)) == len(inv)
    for sigma in inv:
        assert is_block_monotone(sigma.inverse(), p, q)
    assert enumerate_shuffles(p, q) == brute_force_shuffles(p, q)


def test_koszul_sign_examples():
    assert koszul_sign(Permutation((1, 2)), [5, 7]) == 1
    assert koszul_sign(Permutation((2, 1)), [-1, -1]) == -1
    assert koszul_sign(Permutation((2, 1)), [0, -1]) == 1


def test_koszul_sign_length_mismatch():
    with pytest.raises(PositionError):
        koszul_sign(Permutation((1, 2)), [1])


@st.composite
def perm_and_degrees(draw, max_n=6):
    n = draw(st.integers(min_value=1, max_value=max_n))
    images = draw(st.permutations(list(range(1, n + 1))))
    degrees = draw(st.lists(st.integers(min_value=-2, max_value=2), min_size=n, max_size=n))
    return Permutation(images), degrees


@settings(max_examples=60, deadline=None)
@given(perm_and_degrees(), st.permutations(list(range(1, 6))))
def test_koszul_cocycle(sd, other_images):
    sigma, degrees = sd
    n = sigma.size
    tau = Permutation(list(other_images)[:n] if n <= 5 else range(1, n + 1))
    if tau.size != n:
        tau = Permutation(sorted(range(1, n + 1)))
    lhs = koszul_sign(sigma * tau, degrees)
    rhs = koszul_sign(sigma, tau.permute(degrees)) * koszul_sign(tau, degrees)
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(perm_and_degrees())
def test_inverse_is_involution(sd):
    sigma, _ = sd
    assert sigma.inverse().inverse() == sigma
    assert (sigma * sigma.inverse()).is_identity()


def test_sort_sign_tracks_bubble_swaps():
    sign, order = sort_sign([3, 1, 2], [-1, -1, -1])
    assert order == [1, 2, 0]
    # two adjacent swaps of odd items
    assert sign == 1
    sign2, order2 = sort_sign([2, 1], [-1, -1])
    assert (sign2, order2) == (-1, [1, 0])


def test_factorial_inverse():
    assert factorial_inverse(0) == 1
    assert factorial_inverse(1) == 1
    assert factorial_inverse(4) == Fraction(1, 24)
    with pytest.raises(PositionError):
        factorial_inverse(-1)


@settings(max_examples=60, deadline=None)
@given(
    st.fractions(max_denominator=40),
    st.fractions(max_denominator=40),
    st.fractions(max_denominator=40),
)
def test_rational_field_laws(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert Rational(a) == a
    # stored in lowest terms with positive denominator
    x = Rational(a)
    assert x.denominator > 0
    assert math.gcd(x.numerator, x.denominator) == 1
