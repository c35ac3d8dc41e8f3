"""Cover's function-counting theorem in exact integer/rational arithmetic."""

from __future__ import annotations

from fractions import Fraction


def cover_count(p: int, n: int) -> int:
    """C(P, N) = 2 * sum_{k<N} binom(P-1, k): separable dichotomies of P general-position points.

    Binomials are accumulated multiplicatively, binom(P-1, k) from binom(P-1, k-1),
    so nothing larger than the final terms is ever formed.
    """
    if p < 1:
        raise ValueError(f"P must be >= 1, got {p}")
    if n < 0:
        raise ValueError(f"N must be >= 0, got {n}")
    top = p - 1
    total = 0
    term = 1
    for k in range(min(n, p)):
        if k:
            term = term * (top - k + 1) // k
        total += term
    return 2 * total


def cover_fraction(p: int, n: int) -> Fraction:
    return Fraction(cover_count(p, n), 2**p)


def gardner_limit(alpha: float) -> float:
    """Large-N limit of f(alpha N, N): a step at alpha = 2, taking the value 1/2 on the step."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if alpha < 2:
        return 1.0
    if alpha == 2:
        return 0.5
    return 0.0


def vc_dimension(n0: int) -> int:
    """Largest P for which some anchor set makes every dichotomy of P orbits separable.

    For a G-invariant perceptron this is the fixed-subspace dimension itself.
    """
    if n0 < 0:
        raise ValueError("N0 must be nonnegative")
    return n0


def pooled_capacity_bounds(p: int, n0: int, k: int) -> tuple[Fraction, Fraction]:
    """(f(P, floor(N0/k)), f(P, N0)) for a code pooled down to a subgroup of index k."""
    if k < 1:
        raise ValueError("pooling index k must be >= 1")
    return cover_fraction(p, n0 // k), cover_fraction(p, n0)
