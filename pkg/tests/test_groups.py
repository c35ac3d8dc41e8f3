import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equicap.groups import (
    FiniteGroup,
    InvalidOrderError,
    NotASubgroupError,
    coset_decompose,
    cyclic_group,
    direct_product,
    parse_group,
    shift_group,
    subgroup,
    verify_group_axioms,
)


def test_cyclic_examples():
    assert cyclic_group(1).order == 1
    assert cyclic_group(1).mul(0, 0) == 0
    assert cyclic_group(3).mul(2, 2) == 1
    assert cyclic_group(6).inv(4) == 2


def test_cyclic_zero_order_rejected():
    with pytest.raises(InvalidOrderError):
        cyclic_group(0)


def test_direct_product_order_and_encoding():
    g = direct_product(cyclic_group(2), cyclic_group(3))
    assert g.order == 6
    # (1, 2) * (1, 2) = (0, 1) -> 0 * 3 + 1
    assert g.mul(1 * 3 + 2, 1 * 3 + 2) == 1


def test_z2_x_z3_is_cyclic():
    g = direct_product(cyclic_group(2), cyclic_group(3))
    orders = [g.element_order(a) for a in g.elements]
    assert 6 in orders


def test_z2_x_z2_has_no_element_of_order_4():
    g = direct_product(cyclic_group(2), cyclic_group(2))
    assert sorted(g.element_order(a) for a in g.elements) == [1, 2, 2, 2]


def test_coset_examples():
    g = cyclic_group(6)
    dec = coset_decompose(g, [0, 3])
    assert dec.representatives == (0, 1, 2)
    assert coset_decompose(g, range(6)).representatives == (0,)


def test_non_subgroup_reports_pair():
    with pytest.raises(NotASubgroupError) as err:
        coset_decompose(cyclic_group(6), [0, 2])
    assert err.value.pair == (2, 2)


def test_axioms_clean_groups():
    assert verify_group_axioms(cyclic_group(5)) == []
    assert verify_group_axioms(direct_product(cyclic_group(4), cyclic_group(4))) == []
    assert verify_group_axioms(shift_group(10, 10)) == []  # sampled associativity path


def test_axioms_corrupted_table():
    table = np.array(cyclic_group(2).mul_table)
    table[1, 1] = 1
    report = verify_group_axioms(FiniteGroup(table, 0, inverse_table=[0, 1]))
    assert report
    assert any("inverse" in r or "associativity" in r for r in report)


def test_json_roundtrip(tmp_path):
    g = direct_product(cyclic_group(3), cyclic_group(4))
    path = tmp_path / "g.json"
    path.write_text(json.dumps(g.to_json()))
    h = FiniteGroup.load(path)
    assert h.same_table(g) and h.label == g.label
    assert parse_group(str(path)).same_table(g)


def test_parse_group_names():
    assert parse_group("Z6").order == 6
    assert parse_group("Z_10 x Z_8").order == 80


def test_tables_are_immutable():
    g = cyclic_group(4)
    with pytest.raises(ValueError):
        g.mul_table[0, 0] = 3


def test_subgroup_relabelling():
    h = subgroup(cyclic_group(6), [4, 0, 2])
    assert h.parent_elements.tolist() == [0, 2, 4]
    assert h.same_table(cyclic_group(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8))
def test_products_satisfy_axioms(m1, m2):
    g = direct_product(cyclic_group(m1), cyclic_group(m2))
    assert g.order == m1 * m2
    assert verify_group_axioms(g) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 24), st.data())
def test_coset_map_is_bijection(m, data):
    divisors = [d for d in range(1, m + 1) if m % d == 0]
    d = data.draw(st.sampled_from(divisors))
    g = cyclic_group(m)
    h = list(range(0, m, m // d))  # the subgroup of order d
    dec = coset_decompose(g, h)
    assert len(dec.representatives) * len(h) == m
    assert set(dec.coset_of.values()) == {(r, x) for r in dec.representatives for x in h}
    assert all(g.mul(r, x) == e for e, (r, x) in dec.coset_of.items())
    assert all(r == min(e for e, (r2, _) in dec.coset_of.items() if r2 == r) for r in dec.representatives)
