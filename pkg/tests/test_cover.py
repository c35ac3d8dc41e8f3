from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equicap.cover import cover_count, cover_fraction, gardner_limit, pooled_capacity_bounds, vc_dimension


def naive_count(p, n):
    return 2 * sum(comb(p - 1, k) for k in range(n))


@pytest.mark.parametrize(
    "p,n,count,frac",
    [
        (1, 1, 2, Fraction(1)),
        (2, 1, 2, Fraction(1, 2)),
        (3, 2, 6, Fraction(3, 4)),
        (4, 2, 8, Fraction(1, 2)),
        (5, 5, 32, Fraction(1)),
        (10, 5, 512, Fraction(1, 2)),
    ],
)
def test_known_values(p, n, count, frac):
    assert cover_count(p, n) == count
    assert cover_fraction(p, n) == frac


def test_n_zero_gives_zero():
    assert cover_count(7, 0) == 0


def test_large_p_stays_exact():
    # half of all dichotomies at P = 2N, checked against math.comb
    assert cover_fraction(200, 100) == Fraction(1, 2)
    assert cover_count(300, 40) == naive_count(300, 40)


@pytest.mark.parametrize("p,n", [(0, 1), (-3, 2), (3, -1)])
def test_invalid_arguments(p, n):
    with pytest.raises(ValueError):
        cover_count(p, n)


def test_gardner_limit():
    assert gardner_limit(1.0) == 1.0
    assert gardner_limit(2.0) == 0.5
    assert gardner_limit(3.0) == 0.0
    assert float(cover_fraction(2000, 1000)) == 0.5
    assert float(cover_fraction(2400, 1000)) < 1e-6
    assert float(cover_fraction(1600, 1000)) > 1 - 1e-6


def test_vc_dimension():
    assert [vc_dimension(n) for n in range(5)] == [0, 1, 2, 3, 4]


def test_pooled_bounds():
    assert pooled_capacity_bounds(40, 20, 4) == (cover_fraction(40, 5), cover_fraction(40, 20))
    with pytest.raises(ValueError):
        pooled_capacity_bounds(4, 2, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.integers(0, 60))
def test_matches_binomial_oracle(p, n):
    assert cover_count(p, n) == naive_count(p, n)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60))
def test_recursion(p, n):
    # adding a point: C(P+1, N) = C(P, N) + C(P, N-1)
    assert cover_count(p + 1, n) == cover_count(p, n) + cover_count(p, n - 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60))
def test_monotone_and_saturating(p, n):
    f = cover_fraction(p, n)
    assert 0 < f <= 1
    assert (f == 1) == (p <= n)
    assert cover_fraction(p, n + 1) >= f
    assert cover_fraction(p + 1, n) <= f


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40))
def test_half_at_twice_capacity(n):
    assert cover_fraction(2 * n, n) == Fraction(1, 2)
