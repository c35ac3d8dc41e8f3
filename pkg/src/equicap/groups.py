"""Finite groups as dense multiplication tables.

Elements are the integers ``0..order-1``; the group law lives in ``mul_table``.
Tables are O(|G|^2), which is cheap for the groups used here (image shift
groups top out around 32x32 = 1024 elements).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

EXHAUSTIVE_ASSOC_LIMIT = 64
SAMPLED_ASSOC_TRIPLES = 10_000


class InvalidOrderError(ValueError):
    pass


class NotASubgroupError(ValueError):
    """Raised when an element list is not closed under the group law.

    ``pair`` holds the offending ``(a, b)``; for a missing inverse it is ``(a, None)``.
    """

    def __init__(self, message: str, pair: tuple):
        super().__init__(message)
        self.pair = pair


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul_table: np.ndarray
    identity: int
    label: str = "G"
    inverse_table: np.ndarray = field(default=None)
    # for subgroups built by ``subgroup()``: element i here is parent_elements[i] upstairs
    parent_elements: np.ndarray | None = None

    def __post_init__(self):
        table = _frozen(self.mul_table)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise InvalidOrderError(f"multiplication table must be square and non-empty, got {table.shape}")
        object.__setattr__(self, "mul_table", table)
        if self.inverse_table is None:
            inv = np.argmax(table == self.identity, axis=1)
            object.__setattr__(self, "inverse_table", _frozen(inv))
        else:
            object.__setattr__(self, "inverse_table", _frozen(self.inverse_table))
        if self.parent_elements is not None:
            object.__setattr__(self, "parent_elements", _frozen(self.parent_elements))

    @property
    def order(self) -> int:
        return self.mul_table.shape[0]

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse_table[a])

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def same_table(self, other: FiniteGroup) -> bool:
        return self is other or (
            self.identity == other.identity and np.array_equal(self.mul_table, other.mul_table)
        )

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "order": self.order,
            "mul_table": self.mul_table.ravel().tolist(),
            "identity": self.identity,
        }

    @classmethod
    def from_json(cls, data: dict) -> FiniteGroup:
        n = int(data["order"])
        table = np.asarray(data["mul_table"], dtype=np.int64).reshape(n, n)
        return cls(table, int(data["identity"]), label=data.get("label", "G"))

    @classmethod
    def load(cls, path) -> FiniteGroup:
        return cls.from_json(json.loads(Path(path).read_text()))

    def __repr__(self):
        return f"FiniteGroup({self.label}, order={self.order})"


def cyclic_group(m: int) -> FiniteGroup:
    """Integers mod ``m`` under addition."""
    if m < 1:
        raise InvalidOrderError(f"cyclic group order must be >= 1, got {m}")
    idx = np.arange(m)
    table = (idx[:, None] + idx[None, :]) % m
    return FiniteGroup(table, 0, label=f"Z_{m}", inverse_table=(-idx) % m)


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """Componentwise product; the pair (a, b) is encoded as ``a * |G2| + b``."""
    n1, n2 = g1.order, g2.order
    a = np.repeat(np.arange(n1), n2)
    b = np.tile(np.arange(n2), n1)
    table = g1.mul_table[a[:, None], a[None, :]] * n2 + g2.mul_table[b[:, None], b[None, :]]
    inv = g1.inverse_table[a] * n2 + g2.inverse_table[b]
    return FiniteGroup(
        table, g1.identity * n2 + g2.identity, label=f"{g1.label} x {g2.label}", inverse_table=inv
    )


def shift_group(width: int, length: int) -> FiniteGroup:
    """Z_W x Z_L: cyclic translations of a W x L grid, element (s, t) -> s * L + t."""
    return direct_product(cyclic_group(width), cyclic_group(length))


def check_subgroup(g: FiniteGroup, elements) -> np.ndarray:
    """Return the sorted element array, raising NotASubgroupError on failure."""
    elems = np.unique(np.asarray(list(elements), dtype=np.int64))
    if elems.size == 0:
        raise NotASubgroupError("empty element list", (None, None))
    if elems.min() < 0 or elems.max() >= g.order:
        raise NotASubgroupError("element index out of range", (int(elems.min()), int(elems.max())))
    members = np.zeros(g.order, dtype=bool)
    members[elems] = True
    prods = g.mul_table[np.ix_(elems, elems)]
    bad = np.argwhere(~members[prods])
    if bad.size:
        i, j = bad[0]
        a, b = int(elems[i]), int(elems[j])
        raise NotASubgroupError(f"not closed: {a}*{b}={g.mul(a, b)} is outside the set", (a, b))
    bad_inv = elems[~members[g.inverse_table[elems]]]
    if bad_inv.size:
        raise NotASubgroupError(f"inverse of {int(bad_inv[0])} is outside the set", (int(bad_inv[0]), None))
    return elems


def subgroup(g: FiniteGroup, elements, label: str | None = None) -> FiniteGroup:
    """The subgroup on ``elements`` as a standalone group, relabelled 0..|H|-1 in sorted order."""
    elems = check_subgroup(g, elements)
    pos = np.full(g.order, -1, dtype=np.int64)
    pos[elems] = np.arange(elems.size)
    table = pos[g.mul_table[np.ix_(elems, elems)]]
    return FiniteGroup(
        table,
        int(pos[g.identity]),
        label=label or f"H<{g.label}",
        parent_elements=elems,
    )


@dataclass(frozen=True)
class CosetDecomposition:
    """Left cosets rH with canonical (minimal-index) representatives.

    ``coset_of[g] = (r, h)`` with ``g = r * h``.
    """

    subgroup_elements: tuple[int, ...]
    representatives: tuple[int, ...]
    coset_of: dict[int, tuple[int, int]]

    def index(self) -> int:
        return len(self.representatives)


def coset_decompose(g: FiniteGroup, subgroup_elements) -> CosetDecomposition:
    elems = check_subgroup(g, subgroup_elements)
    reps: list[int] = []
    coset_of: dict[int, tuple[int, int]] = {}
    for x in g.elements:
        if x in coset_of:
            continue
        # x is the smallest element not yet covered, hence minimal in its coset
        reps.append(x)
        for h in elems:
            coset_of[g.mul(x, int(h))] = (x, int(h))
    return CosetDecomposition(tuple(int(e) for e in elems), tuple(reps), coset_of)


def verify_group_axioms(g: FiniteGroup, rng: np.random.Generator | None = None) -> list[str]:
    """List of violated axioms with witnesses; empty when the table is a group."""
    problems = []
    t = g.mul_table
    n = g.order
    if t.min() < 0 or t.max() >= n:
        bad = np.argwhere((t < 0) | (t >= n))[0]
        problems.append(f"closure: mul{tuple(int(v) for v in bad)} = {int(t[tuple(bad)])}")
        return problems
    e = g.identity
    idx = np.arange(n)
    for side, vals in (("left", t[e, :]), ("right", t[:, e])):
        bad = np.flatnonzero(vals != idx)
        if bad.size:
            problems.append(f"identity ({side}): mul with {e} sends {int(bad[0])} to {int(vals[bad[0]])}")
    bad = np.flatnonzero(t[idx, g.inverse_table] != e)
    if bad.size:
        a = int(bad[0])
        problems.append(f"inverse: mul({a}, inv({a})={g.inv(a)}) != identity")
    if n <= EXHAUSTIVE_ASSOC_LIMIT:
        lhs = t[t[:, :, None], idx[None, None, :]]  # (ab)c
        rhs = t[idx[:, None, None], t[None, :, :]]  # a(bc)
        bad = np.argwhere(lhs != rhs)
    else:
        rng = rng or np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, SAMPLED_ASSOC_TRIPLES))
        mask = t[t[a, b], c] != t[a, t[b, c]]
        bad = np.stack([a[mask], b[mask], c[mask]], axis=1)
    if len(bad):
        a, b, c = (int(v) for v in bad[0])
        problems.append(f"associativity: ({a}*{b})*{c} != {a}*({b}*{c})")
    return problems


def parse_group(spec: str) -> FiniteGroup:
    """Parse ``Z6``, ``Z_6``, ``Z10xZ8`` or a path to a JSON group."""
    s = spec.strip()
    if s.endswith(".json"):
        return FiniteGroup.load(s)
    factors = [f.strip() for f in s.replace(" ", "").split("x")]
    groups = []
    for f in factors:
        body = f[1:].lstrip("_") if f[:1] in "Zz" else ""
        if not body.isdigit():
            raise ValueError(f"cannot parse group spec {spec!r}")
        groups.append(cyclic_group(int(body)))
    out = groups[0]
    for h in groups[1:]:
        out = direct_product(out, h)
    return out
