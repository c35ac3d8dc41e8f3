"""Real linear representations of finite groups, stored as one dense matrix per element."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .groups import (
    FiniteGroup,
    check_subgroup,
    coset_decompose,
    cyclic_group,
    parse_group,
    shift_group,
    subgroup,
)

HOM_TOL = 1e-10
RANK_TOL = 1e-8
CHAR_INT_TOL = 1e-6


class InconsistentRepresentationError(ValueError):
    pass


class HomomorphismError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Representation:
    group: FiniteGroup
    matrices: np.ndarray  # (|G|, N, N)
    label: str = "pi"

    def __post_init__(self):
        mats = np.array(self.matrices, dtype=np.float64)
        if mats.ndim != 3 or mats.shape[0] != self.group.order or mats.shape[1] != mats.shape[2]:
            raise ValueError(
                f"expected ({self.group.order}, N, N) matrices for {self.group.label}, got {mats.shape}"
            )
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __call__(self, g: int) -> np.ndarray:
        return self.matrices[g]

    def orbit(self, v: np.ndarray) -> np.ndarray:
        """All points pi(g) v, shape (|G|, N)."""
        return self.matrices @ np.asarray(v, dtype=np.float64)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "group_label": self.group.label,
            "dim": self.dim,
            "matrices": self.matrices.tolist(),
            "group": self.group.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> Representation:
        if "group" in data:
            group = FiniteGroup.from_json(data["group"])
        else:
            group = parse_group(data["group_label"])
        mats = np.asarray(data["matrices"], dtype=np.float64)
        if mats.shape[1] != int(data["dim"]):
            raise ValueError(f"dim field {data['dim']} does not match matrices {mats.shape}")
        return cls(group, mats, label=data.get("label", "pi"))

    def __repr__(self):
        return f"Representation({self.label}, group={self.group.label}, dim={self.dim})"


def homomorphism_residual(rep: Representation) -> float:
    """max_{a,b} ||pi(ab) - pi(a) pi(b)||_inf."""
    mats = rep.matrices
    worst = 0.0
    for a in rep.group.elements:
        prod = mats[a] @ mats  # pi(a) pi(b) for every b
        diff = mats[rep.group.mul_table[a]] - prod
        worst = max(worst, float(np.abs(diff).max()))
    return worst


def invertibility_floor(rep: Representation) -> float:
    return float(np.abs(np.linalg.det(rep.matrices)).min())


def trivial_representation(g: FiniteGroup, dim: int = 1) -> Representation:
    mats = np.broadcast_to(np.eye(dim), (g.order, dim, dim))
    return Representation(g, mats, label=f"trivial^{dim}({g.label})")


def regular_representation(g: FiniteGroup) -> Representation:
    """Permutation matrices of left multiplication: pi(g) e_h = e_{gh}.

    For Z_m this is the cyclic shift by g places.
    """
    n = g.order
    mats = np.zeros((n, n, n))
    cols = np.arange(n)
    for a in g.elements:
        mats[a, g.mul_table[a], cols] = 1.0
    return Representation(g, mats, label=f"regular({g.label})")


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _snap(mats: np.ndarray) -> np.ndarray:
    # exact zeros/ones where cos/sin land within rounding of them
    out = mats.copy()
    for v in (0.0, 1.0, -1.0):
        out[np.abs(out - v) < 1e-14] = v
    return out


def rotation_representation(m: int, frequency: int = 1) -> Representation:
    """Z_m acting on R^2 by R(2 pi frequency g / m)."""
    g = cyclic_group(m)
    mats = np.stack([rotation_matrix(2 * np.pi * frequency * k / m) for k in range(m)])
    return Representation(g, _snap(mats), label=f"rotation({m})" if frequency == 1 else f"rotation({m},k={frequency})")


def element_map(parent: FiniteGroup, factor: FiniteGroup, fn: Callable[[int], int]) -> np.ndarray:
    return np.array([fn(a) for a in parent.elements], dtype=np.int64)


def cyclic_reduction(m: int, m_factor: int) -> np.ndarray:
    """g -> g mod m_factor, as an element map Z_m -> Z_{m_factor}."""
    return np.arange(m, dtype=np.int64) % m_factor


def shift_reduction(width: int, length: int, w_factor: int, l_factor: int) -> np.ndarray:
    """(s, t) -> (s mod w_factor, t mod l_factor) between shift groups."""
    s, t = np.divmod(np.arange(width * length), length)
    return (s % w_factor) * l_factor + (t % l_factor)


def check_homomorphism(parent: FiniteGroup, factor: FiniteGroup, emap: np.ndarray) -> None:
    emap = np.asarray(emap, dtype=np.int64)
    if emap.shape != (parent.order,) or emap.min() < 0 or emap.max() >= factor.order:
        raise HomomorphismError(f"element map has wrong shape or range for {parent.label} -> {factor.label}")
    lhs = emap[parent.mul_table]
    rhs = factor.mul_table[emap[:, None], emap[None, :]]
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        a, b = (int(v) for v in bad[0])
        raise HomomorphismError(f"map is not a homomorphism {parent.label} -> {factor.label}: fails at ({a}, {b})")


def direct_sum(
    reps: Sequence[Representation],
    element_maps: Sequence[np.ndarray] | None = None,
    group: FiniteGroup | None = None,
    label: str | None = None,
) -> Representation:
    """Block-diagonal sum, g -> pi_1(phi_1(g)) + ... + pi_k(phi_k(g)).

    Without ``element_maps`` every summand must live on the same group.
    """
    reps = list(reps)
    if not reps:
        raise ValueError("direct_sum needs at least one summand")
    if element_maps is None:
        group = group or reps[0].group
        for r in reps:
            if not r.group.same_table(group):
                raise HomomorphismError(
                    f"summand {r.label} lives on {r.group.label}, not {group.label}; pass element_maps"
                )
        element_maps = [np.arange(group.order)] * len(reps)
    else:
        if group is None:
            raise ValueError("group is required together with element_maps")
        if len(element_maps) != len(reps):
            raise ValueError("one element map per summand")
        for r, emap in zip(reps, element_maps):
            check_homomorphism(group, r.group, emap)
    total = sum(r.dim for r in reps)
    mats = np.zeros((group.order, total, total))
    off = 0
    for r, emap in zip(reps, element_maps):
        mats[:, off : off + r.dim, off : off + r.dim] = r.matrices[np.asarray(emap)]
        off += r.dim
    return Representation(group, mats, label=label or " (+) ".join(r.label for r in reps))


def cyclic_direct_sum(moduli: Sequence[int]) -> Representation:
    """regular(Z_m1) (+) regular(Z_m2) (+) ... over Z_{m1 m2 ...} via the mod maps."""
    m = int(np.prod(moduli))
    parent = cyclic_group(m)
    reps = [regular_representation(cyclic_group(mi)) for mi in moduli]
    maps = [cyclic_reduction(m, mi) for mi in moduli]
    return direct_sum(reps, maps, group=parent, label="dsum(" + ",".join(map(str, moduli)) + ")")


def augment_trivial(rep: Representation, extra_dims: int) -> Representation:
    if extra_dims == 0:
        return rep
    return direct_sum([rep, trivial_representation(rep.group, extra_dims)], label=f"{rep.label} (+) I_{extra_dims}")


def group_average(rep: Representation) -> np.ndarray:
    """<pi> = (1/|G|) sum_g pi(g), a projection onto the fixed-point subspace."""
    return rep.matrices.mean(axis=0)


def character(rep: Representation) -> np.ndarray:
    return np.trace(rep.matrices, axis1=1, axis2=2)


def fixed_subspace_dim(rep: Representation) -> int:
    """N0, from the averaged character, cross-checked against rank <pi>."""
    chi = float(character(rep).mean())
    n0 = round(chi)
    if abs(chi - n0) > CHAR_INT_TOL:
        raise InconsistentRepresentationError(f"{rep.label}: character average {chi!r} is not an integer")
    sv = np.linalg.svd(group_average(rep), compute_uv=False)
    rank = int((sv > RANK_TOL).sum())
    if rank != n0:
        raise InconsistentRepresentationError(
            f"{rep.label}: character average gives N0={n0} but rank <pi> = {rank}"
        )
    return n0


def fixed_subspace_basis(rep: Representation) -> np.ndarray:
    """Orthonormal basis (columns) of V0 = range <pi>."""
    u, sv, _ = np.linalg.svd(group_average(rep))
    return u[:, sv > RANK_TOL]


def restrict_to_subgroup(rep: Representation, subgroup_elements) -> Representation:
    elems = check_subgroup(rep.group, subgroup_elements)
    h = subgroup(rep.group, elems, label=f"H<{rep.group.label}")
    return Representation(h, rep.matrices[elems], label=f"{rep.label}|{h.label}")


def induced_representation(g: FiniteGroup, subgroup_elements, rho: Representation) -> Representation:
    """Ind_H^G rho as block-permutation matrices.

    The basis is indexed by (coset representative r, basis vector of rho). For
    g' r = r'' h the block (r'', r) of pi(g') is rho(h); every other block is zero.
    ``rho.group`` element i is identified with the i-th smallest subgroup element.
    """
    cosets = coset_decompose(g, subgroup_elements)
    elems = np.array(cosets.subgroup_elements)
    h_group = subgroup(g, elems)
    if not rho.group.same_table(h_group):
        raise HomomorphismError(
            f"rho is defined on {rho.group.label}, whose table does not match the subgroup {elems.tolist()}"
        )
    pos = {int(e): i for i, e in enumerate(elems)}
    reps = cosets.representatives
    slot = {r: i for i, r in enumerate(reps)}
    d = rho.dim
    n = len(reps) * d
    mats = np.zeros((g.order, n, n))
    for a in g.elements:
        for r in reps:
            r2, h = cosets.coset_of[g.mul(a, r)]
            i, j = slot[r2], slot[r]
            mats[a, i * d : (i + 1) * d, j * d : (j + 1) * d] = rho.matrices[pos[h]]
    out = Representation(g, mats, label=f"Ind({rho.label})")
    resid = homomorphism_residual(out)
    if resid > HOM_TOL:
        raise HomomorphismError(f"induced representation is not a homomorphism (residual {resid:.3g})")
    return out


class IrrepBlock(NamedTuple):
    kind: str  # "trivial" | "sign" | "rotation"
    size: int
    frequency: int


@dataclass(frozen=True)
class IrrepDecomposition:
    basis: np.ndarray  # columns = real Fourier vectors
    blocks: tuple[IrrepBlock, ...]

    @property
    def trivial_count(self) -> int:
        return sum(b.kind == "trivial" for b in self.blocks)

    def block_slices(self):
        off = 0
        for b in self.blocks:
            yield b, slice(off, off + b.size)
            off += b.size


def irrep_decompose_cyclic(m: int) -> IrrepDecomposition:
    """Real Fourier basis that block-diagonalises the regular representation of Z_m.

    Blocks come out as trivial, rotation(1), ..., rotation(floor((m-1)/2)) and,
    for even m, the sign irrep (-1)^g.
    """
    j = np.arange(m)
    cols = [np.full(m, 1 / np.sqrt(m))]
    blocks = [IrrepBlock("trivial", 1, 0)]
    for k in range(1, (m - 1) // 2 + 1):
        theta = 2 * np.pi * k * j / m
        cols += [np.sqrt(2 / m) * np.cos(theta), np.sqrt(2 / m) * np.sin(theta)]
        blocks.append(IrrepBlock("rotation", 2, k))
    if m % 2 == 0:
        cols.append((-1.0) ** j / np.sqrt(m))
        blocks.append(IrrepBlock("sign", 1, m // 2))
    dec = IrrepDecomposition(np.stack(cols, axis=1), tuple(blocks))
    _check_block_diagonal(dec, regular_representation(cyclic_group(m)))
    return dec


def _expected_block(b: IrrepBlock, g: int, m: int) -> np.ndarray:
    if b.kind == "trivial":
        return np.ones((1, 1))
    if b.kind == "sign":
        return np.full((1, 1), (-1.0) ** g)
    return rotation_matrix(2 * np.pi * b.frequency * g / m)


def _check_block_diagonal(dec: IrrepDecomposition, rep: Representation, tol: float = 1e-8) -> None:
    v = dec.basis
    if np.abs(v.T @ v - np.eye(v.shape[1])).max() > 1e-10:
        raise InconsistentRepresentationError("Fourier basis is not orthogonal")
    m = rep.group.order
    conj = v.T @ rep.matrices @ v
    expected = np.zeros_like(conj)
    for g in range(m):
        for b, sl in dec.block_slices():
            expected[g, sl, sl] = _expected_block(b, g, m)
    err = np.abs(conj - expected).max()
    if err > tol:
        raise InconsistentRepresentationError(f"block diagonalisation off by {err:.3g}")


def so3_trivial_count(irrep_orders: Sequence[int]) -> int:
    """N0 for an SO(3) code built from Wigner blocks of orders k: the number of k = 0 blocks."""
    return sum(1 for k in irrep_orders if k == 0)


def parse_rep(spec: str, group: FiniteGroup | None = None) -> Representation:
    """Build a representation from a CLI spec string.

    ``regular`` (of ``group``), ``regular:m``, ``regular-sum:c`` (c copies of
    regular(group)), ``regular-augmented:k``, ``rotation:m``, ``rotation-augmented:m,k``,
    ``dsum:m1,m2[,...]``, ``trivial:n``, or a path to a JSON file.
    """
    s = spec.strip()
    if s.endswith(".json"):
        return Representation.from_json(json.loads(Path(s).read_text()))
    name, _, arg = s.partition(":")
    group = group or cyclic_group(5)
    ints = [int(a) for a in arg.split(",")] if arg else []
    if name == "regular":
        return regular_representation(cyclic_group(ints[0]) if ints else group)
    if name == "regular-sum":
        base = regular_representation(group)
        return direct_sum([base] * ints[0], label=f"regular({group.label})^{ints[0]}")
    if name == "regular-augmented":
        return augment_trivial(regular_representation(group), ints[0])
    if name == "rotation":
        return rotation_representation(ints[0])
    if name == "rotation-augmented":
        return augment_trivial(rotation_representation(ints[0]), ints[1])
    if name == "dsum":
        return cyclic_direct_sum(ints)
    if name == "trivial":
        return trivial_representation(group, ints[0] if ints else 1)
    raise ValueError(f"unknown representation spec {spec!r}")


def image_shift_representation(width: int, length: int) -> Representation:
    """Regular representation of Z_W x Z_L on flattened W x L maps (row-major)."""
    return regular_representation(shift_group(width, length))
