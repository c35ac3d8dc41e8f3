"""Periodic convolution, pooling and the direct-sum layer on W x L x C feature maps.

Feature maps are plain arrays of shape (W, L, C), optionally with a leading batch
axis. A shift by (s, t) is ``np.roll(x, (s, t), axis=(-3, -2))``, which matches
the regular representation of Z_W x Z_L on row-major flattened maps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import gcd
from typing import Callable, Iterable

import numpy as np

from .groups import FiniteGroup, cyclic_group, direct_product, shift_group
from .representation import (
    Representation,
    direct_sum,
    regular_representation,
    shift_reduction,
)

FeatureMap = np.ndarray


def check_feature_map(x: FeatureMap) -> None:
    if x.ndim < 3 or min(x.shape[-3:]) < 1:
        raise ValueError(f"feature map must be (..., W, L, C), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature map contains NaN or Inf")


def shift(x: FeatureMap, s: int, t: int) -> FeatureMap:
    return np.roll(x, (s, t), axis=(-3, -2))


@dataclass(frozen=True)
class ConvLayer:
    """N filters of shape k x k' x M, stored as (k, k', M, N). Bias is always zero."""

    filters: np.ndarray
    boundary: str = "periodic"  # or "zero"
    padding: int = 0
    nonlinearity: str = "relu"  # or "identity"

    @property
    def in_channels(self) -> int:
        return self.filters.shape[2]

    @property
    def out_channels(self) -> int:
        return self.filters.shape[3]

    @classmethod
    def random(
        cls,
        in_channels: int,
        out_channels: int,
        kernel: int | tuple[int, int],
        rng: np.random.Generator,
        **kw,
    ) -> ConvLayer:
        """Xavier-normal filters, std = sqrt(2 / (fan_in + fan_out))."""
        kh, kw_ = (kernel, kernel) if isinstance(kernel, int) else kernel
        fan_in = in_channels * kh * kw_
        fan_out = out_channels * kh * kw_
        std = np.sqrt(2.0 / (fan_in + fan_out))
        return cls(rng.normal(0.0, std, size=(kh, kw_, in_channels, out_channels)), **kw)

    def truncate(self, channels: int) -> ConvLayer:
        """Keep the first ``channels`` filters."""
        return ConvLayer(self.filters[..., :channels], self.boundary, self.padding, self.nonlinearity)


def _activate(x: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(x, 0.0)
    if kind == "identity":
        return x
    raise ValueError(f"unknown nonlinearity {kind!r}")


def periodic_conv(x: FeatureMap, layer: ConvLayer) -> FeatureMap:
    """Cross-correlation out[i, j, n] = phi(sum_{a,b,m} F[a, b, m, n] x[i+a, j+b, m]).

    Indices wrap mod W and L in periodic mode. In zero mode the input is padded
    by ``layer.padding`` zeros and only fully covered positions are kept.
    """
    x = np.asarray(x, dtype=np.float64)
    check_feature_map(x)
    kh, kw, m, _ = layer.filters.shape
    if x.shape[-1] != m:
        raise ValueError(f"input has {x.shape[-1]} channels, filters expect {m}")
    if layer.boundary == "periodic":
        out = np.zeros(x.shape[:-1] + (layer.out_channels,))
        for a in range(kh):
            for b in range(kw):
                # np.roll by -a brings x[i + a] to position i, wrapping
                out += np.roll(x, (-a, -b), axis=(-3, -2)) @ layer.filters[a, b]
        return _activate(out, layer.nonlinearity)
    if layer.boundary == "zero":
        p = layer.padding
        pad = [(0, 0)] * (x.ndim - 3) + [(p, p), (p, p), (0, 0)]
        xp = np.pad(x, pad)
        w_out = xp.shape[-3] - kh + 1
        l_out = xp.shape[-2] - kw + 1
        if w_out < 1 or l_out < 1:
            raise ValueError("filter larger than padded input")
        out = np.zeros(x.shape[:-3] + (w_out, l_out, layer.out_channels))
        for a in range(kh):
            for b in range(kw):
                out += xp[..., a : a + w_out, b : b + l_out, :] @ layer.filters[a, b]
        return _activate(out, layer.nonlinearity)
    raise ValueError(f"unknown boundary {layer.boundary!r}")


def _windows(x: FeatureMap, k: int) -> np.ndarray:
    w, l, c = x.shape[-3:]
    if w % k or l % k:
        raise ValueError(f"pool window {k} does not divide {w} x {l}")
    return x.reshape(x.shape[:-3] + (w // k, k, l // k, k, c))


def avg_pool(x: FeatureMap, k: int) -> FeatureMap:
    return _windows(np.asarray(x, dtype=np.float64), k).mean(axis=(-4, -2))


def max_pool(x: FeatureMap, k: int) -> FeatureMap:
    return _windows(np.asarray(x, dtype=np.float64), k).max(axis=(-4, -2))


def global_pool(x: FeatureMap, kind: str = "avg") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if kind == "avg":
        return x.mean(axis=(-3, -2))
    if kind == "max":
        return x.max(axis=(-3, -2))
    raise ValueError(f"unknown global pooling {kind!r}")


def strided_average(y: FeatureMap, m: int) -> np.ndarray:
    """Average of entries spaced m apart on both axes: B[a, b] = mean_{i=a mod m, j=b mod m} y[i, j]."""
    w, l, c = y.shape[-3:]
    if w % m or l % m:
        raise ValueError(f"{m} does not divide the map size {w} x {l}")
    return y.reshape(y.shape[:-3] + (w // m, m, l // m, m, c)).mean(axis=(-5, -3))


def direct_sum_layer(
    x: FeatureMap,
    layer: ConvLayer,
    m1: int,
    m2: int,
    allow_non_coprime: bool = False,
    conv_nonlinearity: str = "identity",
) -> np.ndarray:
    """Periodic conv, then per channel an m1 x m1 and an m2 x m2 block of strided
    averages, flattened, stacked and passed through a final relu.

    Output shape (..., m1^2 + m2^2, N). The conv itself is linear by default: with a
    relu there every block entry is already nonnegative, the final relu is inert, and
    both blocks average to the same global mean, so only one trivial dimension per
    channel would carry information.
    """
    if gcd(m1, m2) != 1 and not allow_non_coprime:
        raise ValueError(f"m1={m1} and m2={m2} are not coprime (pass allow_non_coprime=True to override)")
    y = periodic_conv(x, replace(layer, nonlinearity=conv_nonlinearity))
    b1 = strided_average(y, m1)
    b2 = strided_average(y, m2)
    lead = y.shape[:-3]
    n = y.shape[-1]
    flat = np.concatenate([b1.reshape(lead + (m1 * m1, n)), b2.reshape(lead + (m2 * m2, n))], axis=-2)
    return np.maximum(flat, 0.0)


def direct_sum_output_representation(size: int, m1: int, m2: int) -> Representation:
    """How one channel of ``direct_sum_layer`` output transforms under input shifts of Z_size x Z_size.

    regular(Z_m1 x Z_m1) (+) regular(Z_m2 x Z_m2), through (s, t) -> (s mod m_i, t mod m_i).
    """
    parent = shift_group(size, size)
    parts = [regular_representation(shift_group(m, m)) for m in (m1, m2)]
    maps = [shift_reduction(size, size, m, m) for m in (m1, m2)]
    return direct_sum(parts, maps, group=parent, label=f"dsum-out({m1},{m2})")


def dsum_centroid_coords(features: np.ndarray, m1: int, m2: int) -> np.ndarray:
    """Coordinates of the orbit centroid in the fixed subspace: per channel, the mean of each block.

    ``features`` has shape (..., m1^2 + m2^2, N); returns (..., 2N).
    """
    a = features[..., : m1 * m1, :].mean(axis=-2)
    b = features[..., m1 * m1 :, :].mean(axis=-2)
    return np.concatenate([a, b], axis=-1)


@dataclass
class EquivarianceReport:
    max_residual: float
    tol: float
    checked: int

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def verify_equivariance(
    layer: Callable[[np.ndarray], np.ndarray],
    act_in: Callable[[np.ndarray, object], np.ndarray],
    act_out: Callable[[np.ndarray, object], np.ndarray],
    elements: Iterable,
    inputs: Iterable[np.ndarray],
    tol: float,
) -> EquivarianceReport:
    """max over g and x of ||layer(g.x) - g.layer(x)||_inf."""
    worst = 0.0
    count = 0
    elements = list(elements)
    for x in inputs:
        base = layer(x)
        for g in elements:
            lhs = layer(act_in(x, g))
            rhs = act_out(base, g)
            if lhs.shape != rhs.shape:
                worst = np.inf
            else:
                worst = max(worst, float(np.abs(lhs - rhs).max()))
            count += 1
    return EquivarianceReport(worst, tol, count)


def grid_shifts(w: int, l: int, step: int = 1) -> list[tuple[int, int]]:
    return [(s, t) for s in range(0, w, step) for t in range(0, l, step)]


def shift_action(x: np.ndarray, g: tuple[int, int]) -> np.ndarray:
    return shift(x, *g)


def coset_shifts(k: int) -> list[tuple[int, int]]:
    """Canonical representatives of Z_W x Z_L modulo shifts by multiples of k."""
    return [(a, b) for a in range(k) for b in range(k)]


def pooled_group(w: int, l: int, k: int) -> FiniteGroup:
    return direct_product(cyclic_group(w // k), cyclic_group(l // k))
