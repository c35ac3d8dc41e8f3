import numpy as np
import pytest

from equicap.representation import fixed_subspace_dim
from equicap.separability import empirical_fraction
from equicap.verify import INDUCED_CASES, SUITES, induced_case, suite_general_position, verify_suites


@pytest.mark.parametrize("name", sorted(SUITES))
def test_each_suite_passes(name):
    assert verify_suites([name], seed=1)["passed"]


def test_duplicate_anchor_flagged():
    anchors = np.random.default_rng(0).standard_normal((8, 12))
    anchors[3] = anchors[5]
    res = suite_general_position(anchors_override=anchors)
    assert not res["passed"] and res["details"]["violations"]


@pytest.mark.parametrize("case", INDUCED_CASES, ids=lambda c: f"{c[0]}-{len(c[1])}-{c[2]}")
def test_induced_fractions_agree(case):
    label, h, kind = case
    ind, rho = induced_case(int(label[1:]), h, kind)
    assert fixed_subspace_dim(ind) == fixed_subspace_dim(rho)
    a = empirical_fraction(ind, 8, 100, 3)
    b = empirical_fraction(rho, 8, 100, 3)
    assert a.theory == b.theory


def test_unknown_suite():
    with pytest.raises(ValueError):
        verify_suites(["nope"])
