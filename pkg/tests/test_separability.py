from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equicap.cover import cover_fraction
from equicap.groups import cyclic_group
from equicap.representation import (
    augment_trivial,
    cyclic_direct_sum,
    direct_sum,
    fixed_subspace_dim,
    regular_representation,
    rotation_representation,
)
from equicap.separability import (
    OrbitSet,
    brute_force_fraction,
    centroid_reduce,
    check_certificate,
    decide_separable,
    dichotomy,
    empirical_fraction,
    general_position_violations,
    logistic_separable,
    sample_orbit_instance,
    separable_trials,
    separating_w_lift,
    wilson_interval,
)
from equicap.verify import centroid_agreement, centroid_instance

XOR_POINTS = np.array([[1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]])
XOR_LABELS = np.array([1, 1, -1, -1])


def test_simple_separable_pair():
    v = decide_separable([[1.0, 0.0], [-1.0, 0.0]], [1, -1])
    assert v.separable
    assert v.min_margin > 0
    assert v.witness_w[0] > 0


def test_xor_not_separable_through_origin():
    v = decide_separable(XOR_POINTS, XOR_LABELS)
    assert not v.separable
    signed = XOR_LABELS[:, None] * XOR_POINTS
    # several convex combinations vanish; any valid one is acceptable
    assert check_certificate(v.certificate, signed)


def test_single_point_and_zero_point():
    assert decide_separable([[0.0, 2.0]], [-1]).separable
    v = decide_separable([[0.0, 0.0]], [1])
    assert not v.separable


def test_identical_points_with_opposite_labels():
    assert not decide_separable([[1.0, 2.0], [1.0, 2.0]], [1, -1]).separable
    assert brute_force_fraction(np.array([[1.0, 2.0], [1.0, 2.0]])) == Fraction(1, 2)


def test_bad_inputs():
    with pytest.raises(ValueError):
        decide_separable([[1.0, 0.0]], [1, -1])
    with pytest.raises(ValueError):
        decide_separable([[1.0, 0.0]], [0])


def test_three_points_in_plane():
    pts = np.random.default_rng(5).standard_normal((3, 2))
    assert brute_force_fraction(pts) == Fraction(3, 4) == cover_fraction(3, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12), st.integers(1, 6))
def test_verdicts_carry_valid_evidence(seed, p, n):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((p, n))
    y = rng.choice([-1, 1], size=p)
    v = decide_separable(x, y)
    signed = y[:, None] * x
    if v.separable:
        assert np.all(signed @ v.witness_w > 0)
    else:
        assert check_certificate(v.certificate, signed)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 12), st.integers(1, 6))
def test_logistic_agrees_on_clear_cases(seed, p, n):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((p, n))
    y = rng.choice([-1, 1], size=p)
    lp = decide_separable(x, y).separable
    if lp:
        # a positive-margin witness gives an easy separable instance for logistic too
        assert logistic_separable(x, y) or decide_separable(x, y).min_margin < 1e-3
    else:
        assert not logistic_separable(x, y)


def test_general_position_check():
    rng = np.random.default_rng(0)
    assert general_position_violations(rng.standard_normal((6, 3))) == []
    x = rng.standard_normal((5, 3))
    x[4] = x[0]
    assert general_position_violations(x) != []


def test_centroid_lift_separates_orbits():
    # rotation(4) + trivial: the centroid separator lifted to R^3 separates both orbits
    rep = augment_trivial(rotation_representation(4), 1)
    orbits = OrbitSet(rep, np.array([[1.0, 0.0, 2.0], [0.0, 1.0, -1.0]]))
    w = separating_w_lift(np.array([0.0, 0.0, 1.0]), rep)
    np.testing.assert_allclose(w, [0.0, 0.0, 1.0], atol=1e-15)
    y = np.array([1, -1])
    assert np.all(y[:, None] * (orbits.points @ w) > 0)


def test_rotation_only_orbits_not_separable():
    rep = rotation_representation(4)
    inst = sample_orbit_instance(rep, 2, 3)
    np.testing.assert_allclose(centroid_reduce(inst), 0.0, atol=1e-15)
    v = decide_separable(inst.points.reshape(-1, 2), np.repeat([1, -1], 4))
    assert not v.separable


def test_sampled_centroids_have_full_rank():
    rep = direct_sum([regular_representation(cyclic_group(5))] * 4)
    for seed in range(100):
        for p in (2, 4, 7):
            c = centroid_reduce(sample_orbit_instance(rep, p, seed))
            assert np.linalg.matrix_rank(c) == min(p, 4)


def test_sampling_is_deterministic():
    rep = regular_representation(cyclic_group(3))
    a = sample_orbit_instance(rep, 4, 11).anchors
    np.testing.assert_array_equal(a, sample_orbit_instance(rep, 4, 11).anchors)
    assert not np.array_equal(a, sample_orbit_instance(rep, 4, 12).anchors)
    np.testing.assert_array_equal(dichotomy(6, 1, 2), dichotomy(6, 1, 2))


def test_verdicts_vary_with_seed():
    rep = direct_sum([regular_representation(cyclic_group(3))] * 3)
    outcomes = set()
    for seed in range(20):
        pts = centroid_reduce(sample_orbit_instance(rep, 6, seed))[:, None, :]
        outcomes.add(separable_trials(pts, 1, seed)[0])
    assert outcomes == {True, False}


def test_wilson_interval_reference():
    # Wilson score interval for 50/100, computed by hand
    z = 1.959963984540054
    centre = (0.5 + z * z / 200) / (1 + z * z / 100)
    half = z * np.sqrt(0.25 / 100 + z * z / 40000) / (1 + z * z / 100)
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(centre - half, abs=1e-12)
    assert hi == pytest.approx(centre + half, abs=1e-12)


def test_empirical_fraction_at_half_capacity():
    rep = direct_sum([regular_representation(cyclic_group(5))] * 8)
    est = empirical_fraction(rep, 16, 200, 1)
    assert est.theory == Fraction(1, 2)
    assert est.contains_theory()
    assert est.n0 == 8
    assert est.to_json()["theory"] == "1/2"


def test_empirical_fraction_raw_matches_reduced():
    rep = cyclic_direct_sum([2, 3])
    a = empirical_fraction(rep, 4, 40, 9)
    b = empirical_fraction(rep, 4, 40, 9, raw_orbits=True)
    assert a.separable_count == b.separable_count


def test_empirical_fraction_rejects_small_p():
    with pytest.raises(ValueError):
        empirical_fraction(regular_representation(cyclic_group(3)), 1, 10, 0)


def test_brute_force_on_representation():
    rep = cyclic_direct_sum([2, 3])
    assert fixed_subspace_dim(rep) == 2
    assert brute_force_fraction(rep, 4, seed=2) == cover_fraction(4, 2)
    assert brute_force_fraction(rep, 3, seed=2, raw_orbits=True) == cover_fraction(3, 2)


def test_brute_force_rejects_huge_p():
    with pytest.raises(ValueError):
        brute_force_fraction(np.zeros((21, 2)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_orbit_and_centroid_verdicts_agree(seed):
    rep, anchors, labels = centroid_instance(np.random.default_rng(seed))
    full, cent = centroid_agreement(rep, anchors, labels)
    assert full == cent


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 7), st.integers(1, 4))
def test_brute_force_matches_full_enumeration(seed, p, n):
    from equicap.separability import all_dichotomies

    x = np.random.default_rng(seed).standard_normal((p, n))
    full = sum(decide_separable(x, y).separable for y in all_dichotomies(p))
    assert brute_force_fraction(x) == Fraction(full, 2**p)
