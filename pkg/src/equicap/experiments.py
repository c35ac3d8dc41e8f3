"""Capacity sweeps over random equivariant conv layers.

Each architecture reduces P inputs to the point sets that decide G-invariant
separability, shape (P, K, D):

conv            centroid of the relu-conv orbit = global average per channel, K = 1
conv-maxpool    pooled code is only equivariant to shifts by multiples of the window k;
conv-avgpool    one H-centroid per coset representative, K = k^2
dsum:m1,m2      block means of the direct-sum layer output, K = 1, D = 2N

``raw`` replaces the reduction by every shifted copy of every input.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .cover import cover_fraction
from .gcnn import (
    ConvLayer,
    avg_pool,
    coset_shifts,
    direct_sum_layer,
    dsum_centroid_coords,
    global_pool,
    grid_shifts,
    max_pool,
    periodic_conv,
    shift,
)
from .separability import separable_trials, wilson_interval

CSV_COLUMNS = ("channels", "n0", "alpha", "fraction", "wilson_lo", "wilson_hi", "theory_fraction")

_INPUT_STREAM = 2


@dataclass(frozen=True)
class Architecture:
    kind: str  # conv | conv-maxpool | conv-avgpool | dsum
    m1: int = 0
    m2: int = 0
    pool: int = 2

    @classmethod
    def parse(cls, spec: str, pool: int = 2) -> Architecture:
        name, _, arg = spec.partition(":")
        if name == "dsum":
            m1, m2 = (int(v) for v in arg.split(","))
            return cls("dsum", m1, m2, pool)
        if name in ("conv", "conv-maxpool", "conv-avgpool"):
            return cls(name, pool=pool)
        raise ValueError(f"unknown architecture {spec!r}")

    def n0(self, channels: int) -> int:
        return 2 * channels if self.kind == "dsum" else channels

    def default_size(self) -> int:
        return self.m1 * self.m2 if self.kind == "dsum" else 10

    def __str__(self):
        return f"dsum:{self.m1},{self.m2}" if self.kind == "dsum" else self.kind


def draw_inputs(p: int, size: int, in_channels: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((p, size, size, in_channels))


def reduced_points(
    arch: Architecture,
    inputs: np.ndarray,
    layer: ConvLayer,
    raw: bool = False,
    allow_non_coprime: bool = False,
) -> np.ndarray:
    """(P, K, D) point sets for ``layer`` with all its channels."""
    if arch.kind == "dsum":
        feat = lambda x: direct_sum_layer(x, layer, arch.m1, arch.m2, allow_non_coprime)  # noqa: E731
        if raw:
            shifts = grid_shifts(*inputs.shape[1:3])
            return np.stack([feat(shift(inputs, s, t)).reshape(len(inputs), -1) for s, t in shifts], axis=1)
        return dsum_centroid_coords(feat(inputs), arch.m1, arch.m2)[:, None, :]

    if arch.kind == "conv":
        code = lambda x: periodic_conv(x, layer)  # noqa: E731
    else:
        pool_fn = max_pool if arch.kind == "conv-maxpool" else avg_pool
        code = lambda x: pool_fn(periodic_conv(x, layer), arch.pool)  # noqa: E731
    if raw:
        shifts = grid_shifts(*inputs.shape[1:3])
        return np.stack([code(shift(inputs, s, t)).reshape(len(inputs), -1) for s, t in shifts], axis=1)
    if arch.kind == "conv":
        return global_pool(code(inputs))[:, None, :]
    return np.stack([global_pool(code(shift(inputs, a, b))) for a, b in coset_shifts(arch.pool)], axis=1)


def select_channels(arch: Architecture, points: np.ndarray, channels: int, total: int) -> np.ndarray:
    """Restrict reduced points (K = |cosets| or 1) to the first ``channels`` filters."""
    if arch.kind == "dsum":
        return np.concatenate([points[..., :channels], points[..., total : total + channels]], axis=-1)
    return points[..., :channels]


@dataclass
class CurvePoint:
    channels: int
    n0: int
    alpha: float
    fraction: float
    wilson_lo: float
    wilson_hi: float
    theory_fraction: float
    separable: int = 0
    trials: int = 0

    def theory_in_ci(self) -> bool:
        return self.wilson_lo <= self.theory_fraction <= self.wilson_hi


@dataclass
class CapacityCurve:
    points: list[CurvePoint]
    metadata: dict = field(default_factory=dict)

    def check(self) -> None:
        p = self.metadata["config"]["p"]
        for pt in self.points:
            if pt.alpha != p / pt.n0:
                raise AssertionError(f"alpha {pt.alpha} != {p}/{pt.n0}")
            if pt.theory_fraction != float(cover_fraction(p, pt.n0)):
                raise AssertionError(f"theory mismatch at n0={pt.n0}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for pt in self.points:
            writer.writerow([repr(getattr(pt, c)) if isinstance(getattr(pt, c), float) else getattr(pt, c) for c in CSV_COLUMNS])
        return buf.getvalue()

    def write(self, path) -> tuple[Path, Path]:
        path = Path(path)
        path.write_text(self.to_csv())
        meta = path.with_suffix(".json")
        meta.write_text(json.dumps({"points": [asdict(p) for p in self.points], **self.metadata}, indent=2))
        return path, meta


def read_curve_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        out.append(
            {
                "channels": int(r["channels"]),
                "n0": int(r["n0"]),
                **{k: float(r[k]) for k in ("alpha", "fraction", "wilson_lo", "wilson_hi", "theory_fraction")},
            }
        )
    return out


def gcnn_sweep(
    arch: Architecture | str,
    p: int,
    channels: Sequence[int],
    trials: int,
    seed: int,
    repeats: int = 1,
    size: int | None = None,
    in_channels: int = 3,
    kernel: int | None = None,
    probe: str = "lp",
    raw: bool = False,
    allow_non_coprime: bool = False,
) -> CapacityCurve:
    """Measure separable fractions as a function of output channel count.

    One layer with max(channels) filters is drawn per repeat and truncated to each
    channel count. Counts are pooled across repeats before the Wilson interval.
    """
    if isinstance(arch, str):
        arch = Architecture.parse(arch)
    size = size or arch.default_size()
    kernel = kernel or min(10, size)
    total = max(channels)
    started = time.time()
    counts = {c: 0 for c in channels}
    per_repeat: list[dict] = []
    for r in range(repeats):
        rng = np.random.default_rng([seed, _INPUT_STREAM, r])
        inputs = draw_inputs(p, size, in_channels, rng)
        layer = ConvLayer.random(in_channels, total, kernel, rng)
        full = reduced_points(arch, inputs, layer, raw=raw, allow_non_coprime=allow_non_coprime)
        row = {}
        for c in channels:
            pts = select_channels(arch, full, c, total) if not raw else _raw_select(arch, inputs, layer, c, allow_non_coprime)
            # label streams are shared across channel counts and disjoint across repeats
            outcome = separable_trials(pts, trials, seed, probe, first_trial=r * trials)
            row[c] = int(sum(outcome))
            counts[c] += row[c]
        per_repeat.append(row)
    pts_out = []
    n_total = trials * repeats
    for c in channels:
        n0 = arch.n0(c)
        lo, hi = wilson_interval(counts[c], n_total)
        pts_out.append(
            CurvePoint(
                channels=c,
                n0=n0,
                alpha=p / n0,
                fraction=counts[c] / n_total,
                wilson_lo=lo,
                wilson_hi=hi,
                theory_fraction=float(cover_fraction(p, n0)),
                separable=counts[c],
                trials=n_total,
            )
        )
    curve = CapacityCurve(
        pts_out,
        metadata={
            "config": {
                "arch": str(arch),
                "p": p,
                "channels": list(channels),
                "trials": trials,
                "seed": seed,
                "repeats": repeats,
                "size": size,
                "in_channels": in_channels,
                "kernel": kernel,
                "pool": arch.pool,
                "probe": probe,
                "raw": raw,
            },
            "per_repeat_counts": [{str(k): v for k, v in row.items()} for row in per_repeat],
            "wall_time_s": time.time() - started,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "version": __version__,
        },
    )
    curve.check()
    return curve


def _raw_select(arch, inputs, layer, channels, allow_non_coprime):
    return reduced_points(arch, inputs, layer.truncate(channels), raw=True, allow_non_coprime=allow_non_coprime)


def pooled_lower_bound(p: int, channels: int, pool: int) -> Fraction:
    return cover_fraction(p, channels // (pool * pool))


def figure1_data(seed: int = 0) -> dict:
    """Orbits, centroids and fixed subspaces of the three toy representations:
    rotation(4), rotation(4) (+) 1, and the regular representation of Z_3."""
    from .representation import (
        augment_trivial,
        fixed_subspace_basis,
        fixed_subspace_dim,
        group_average,
        regular_representation,
        rotation_representation,
    )
    from .groups import cyclic_group
    from .separability import centroid_reduce, decide_separable, sample_orbit_instance

    panels = {
        "a": rotation_representation(4),
        "b": augment_trivial(rotation_representation(4), 1),
        "c": regular_representation(cyclic_group(3)),
    }
    labels = np.array([1, -1])
    out = {"seed": seed, "labels": labels.tolist(), "panels": {}}
    for key, rep in panels.items():
        inst = sample_orbit_instance(rep, 2, seed)
        verdict = decide_separable(inst.points.reshape(-1, rep.dim), np.repeat(labels, rep.group.order))
        out["panels"][key] = {
            "representation": rep.label,
            "group": rep.group.label,
            "matrices": rep.matrices.tolist(),
            "group_average": group_average(rep).tolist(),
            "n0": fixed_subspace_dim(rep),
            "fixed_subspace_basis": fixed_subspace_basis(rep).T.tolist(),
            "anchors": inst.anchors.tolist(),
            "orbits": inst.points.tolist(),
            "centroids": centroid_reduce(inst).tolist(),
            "separable": verdict.separable,
        }
    return out
