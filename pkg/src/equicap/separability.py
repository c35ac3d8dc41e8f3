"""Homogeneous linear separability of labelled points and of group orbits.

A dichotomy is decided by one LP,

    maximize t  subject to  y_i <w, x_i> >= t,  t <= 1,

which is always feasible (w = 0, t = 0). The optimum is 1 when some w separates
the points strictly and 0 otherwise; in the second case the LP dual is a
Gordan certificate, nonnegative weights summing to one with sum_i l_i y_i x_i = 0.
Both outcomes are re-checked in numpy before a verdict is returned.
"""

from __future__ import annotations

import itertools
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.stats import binomtest

from .cover import cover_fraction
from .representation import Representation, fixed_subspace_dim, group_average

MARGIN_TOL = 1e-7
CERT_TOL = 1e-7
BRUTE_FORCE_MAX_P = 20

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}

# stream tags for seeded generators: default_rng([seed, tag, ...])
_ANCHOR_STREAM = 0
_LABEL_STREAM = 1


class UndecidedError(RuntimeError):
    """The solver produced neither a verified witness nor a verified certificate."""


@dataclass
class SeparabilityVerdict:
    separable: bool
    witness_w: np.ndarray | None = None
    min_margin: float | None = None
    certificate: np.ndarray | None = None

    def __bool__(self):
        return self.separable


def _as_problem(points, labels) -> np.ndarray:
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    y = np.asarray(labels, dtype=np.float64).ravel()
    if x.shape[0] == 0:
        raise ValueError("need at least one point")
    if y.shape[0] != x.shape[0]:
        raise ValueError(f"{x.shape[0]} points but {y.shape[0]} labels")
    if not np.all(np.abs(y) == 1):
        raise ValueError("labels must be +1 or -1")
    return y[:, None] * x


def check_witness(w: np.ndarray, signed: np.ndarray) -> float:
    """Smallest y_i <w, x_i>; the point set is separated when this is positive."""
    return float((signed @ w).min())


def check_certificate(lam: np.ndarray, signed: np.ndarray) -> bool:
    return bool(
        lam.min() >= 0
        and abs(lam.sum() - 1) < CERT_TOL
        and np.linalg.norm(signed.T @ lam) < CERT_TOL
    )


def _polish_certificate(lam: np.ndarray, signed: np.ndarray) -> np.ndarray:
    """Least-squares cleanup of a near-certificate on its support."""
    support = np.flatnonzero(lam > 1e-9 * lam.max())
    a = signed[support]
    k = support.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = a @ a.T
    kkt[:k, k] = kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
    out = np.zeros_like(lam)
    out[support] = sol
    return out


def _finish_certificate(lam_normed: np.ndarray, norms: np.ndarray, signed: np.ndarray) -> np.ndarray | None:
    lam = np.clip(lam_normed, 0, None) / norms
    if lam.sum() <= 0:
        return None
    lam = lam / lam.sum()
    if check_certificate(lam, signed):
        return lam
    polished = _polish_certificate(lam, signed)
    if check_certificate(polished, signed):
        return polished
    return None


def _gordan_lp(unit: np.ndarray) -> np.ndarray | None:
    """Directly search for l >= 0, sum l = 1, sum l_i a_i = 0."""
    m, d = unit.shape
    a_eq = np.vstack([unit.T, np.ones((1, m))])
    b_eq = np.zeros(d + 1)
    b_eq[-1] = 1.0
    res = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=_HIGHS_OPTIONS)
    return res.x if res.status == 0 else None


def decide_separable(points, labels) -> SeparabilityVerdict:
    """Decide whether some w gives y_i <w, x_i> > 0 for every i.

    Returns a verdict carrying a witness (margin scaled to 1) or a convex-hull
    certificate. Raises UndecidedError if neither can be verified.
    """
    signed = _as_problem(points, labels)
    m, d = signed.shape
    norms = np.linalg.norm(signed, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        # a point at the origin can never be strictly separated
        lam = np.zeros(m)
        lam[zero[0]] = 1.0
        return SeparabilityVerdict(False, certificate=lam)
    unit = signed / norms[:, None]

    c = np.zeros(d + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-unit, np.ones((m, 1))])
    bounds = [(None, None)] * d + [(None, 1.0)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m), bounds=bounds, method="highs", options=_HIGHS_OPTIONS)
    if res.status != 0:
        raise UndecidedError(f"LP status {res.status}: {res.message}")

    t = res.x[-1]
    if t > 1e-6:
        w = res.x[:d]
        margin = check_witness(w, signed)
        if margin > 0:
            w = w / margin
            return SeparabilityVerdict(
                True, witness_w=w, min_margin=check_witness(w / np.linalg.norm(w), signed)
            )
    else:
        lam = _finish_certificate(-res.ineqlin.marginals, norms, signed)
        if lam is not None:
            return SeparabilityVerdict(False, certificate=lam)
    # the primary LP did not yield a checkable object; try the dual problem outright
    lam_normed = _gordan_lp(unit)
    if lam_normed is not None:
        lam = _finish_certificate(lam_normed, norms, signed)
        if lam is not None:
            return SeparabilityVerdict(False, certificate=lam)
    raise UndecidedError(f"neither witness nor certificate verified (m={m}, d={d}, t={t:.3g})")


def logistic_separable(points, labels) -> bool:
    """Logistic-regression probe: separable iff an (almost) unregularised fit classifies every point.

    Homogeneous separation of (x_i, y_i) is equivalent to that of the mirrored set
    {(x_i, y_i), (-x_i, -y_i)}, which always contains both classes.
    """
    from sklearn.linear_model import LogisticRegression

    signed = _as_problem(points, labels)
    x = np.vstack([signed, -signed])
    y = np.concatenate([np.ones(len(signed)), -np.ones(len(signed))])
    clf = LogisticRegression(C=1e8, tol=1e-18, max_iter=500, fit_intercept=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        clf.fit(x, y)
    return bool(np.all(clf.decision_function(signed) > 0))


PROBES: dict[str, Callable[[np.ndarray, np.ndarray], bool]] = {
    "lp": lambda x, y: decide_separable(x, y).separable,
    "logistic": logistic_separable,
}


@dataclass(frozen=True, eq=False)
class OrbitSet:
    rep: Representation
    anchors: np.ndarray  # (P, N)
    labels: np.ndarray | None = None

    @property
    def p(self) -> int:
        return self.anchors.shape[0]

    @cached_property
    def points(self) -> np.ndarray:
        """(P, |G|, N): points[mu, g] = pi(g) r^mu."""
        return np.einsum("gij,pj->pgi", self.rep.matrices, self.anchors)

    def with_labels(self, labels) -> OrbitSet:
        return OrbitSet(self.rep, self.anchors, np.asarray(labels))


def centroid_reduce(orbits: OrbitSet) -> np.ndarray:
    """Orbit centroids <pi> r^mu, shape (P, N)."""
    return orbits.anchors @ group_average(orbits.rep).T


def separating_w_lift(w_centroid: np.ndarray, rep: Representation) -> np.ndarray:
    """<pi>^T w: a centroid separator turned into one for every orbit point."""
    return group_average(rep).T @ np.asarray(w_centroid, dtype=np.float64)


def sample_orbit_instance(rep: Representation, p: int, rng_seed: int) -> OrbitSet:
    """P i.i.d. standard-normal anchors in R^N."""
    if p < 1:
        raise ValueError("P must be >= 1")
    rng = np.random.default_rng([rng_seed, _ANCHOR_STREAM])
    return OrbitSet(rep, rng.standard_normal((p, rep.dim)))


def orbit_points(orbits: OrbitSet, raw: bool = False) -> np.ndarray:
    """Points to classify per orbit, shape (P, K, N): the whole orbit or just its centroid."""
    if raw:
        return orbits.points
    return centroid_reduce(orbits)[:, None, :]


def dichotomy(p: int, seed: int, trial: int) -> np.ndarray:
    """Labels for one trial; uniform over all 2^P labelings, with its own counter-derived stream."""
    rng = np.random.default_rng([seed, _LABEL_STREAM, trial])
    return rng.choice(np.array([-1, 1]), size=p)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("EQUICAP_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items: Sequence):
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class CapacityEstimate:
    p: int
    n0: int
    trials: int
    separable_count: int
    fraction: float
    wilson_ci_95: tuple[float, float]
    seed: int
    theory: Fraction
    probe: str = "lp"
    extra: dict = field(default_factory=dict)

    def contains_theory(self) -> bool:
        lo, hi = self.wilson_ci_95
        return lo <= float(self.theory) <= hi

    def to_json(self) -> dict:
        out = asdict(self)
        out["wilson_ci_95"] = list(self.wilson_ci_95)
        out["theory"] = f"{self.theory.numerator}/{self.theory.denominator}"
        out["theory_float"] = float(self.theory)
        return out


def separable_trials(
    points: np.ndarray, trials: int, seed: int, probe: str = "lp", first_trial: int = 0
) -> list[bool]:
    """Decide random dichotomies ``first_trial .. first_trial + trials - 1`` of the point sets (P, K, D)."""
    pts = np.asarray(points, dtype=np.float64)
    p, k, d = pts.shape
    flat = pts.reshape(p * k, d)
    decide = PROBES[probe]

    def one(t: int) -> bool:
        y = dichotomy(p, seed, t)
        try:
            return decide(flat, np.repeat(y, k))
        except UndecidedError as exc:
            raise UndecidedError(f"trial {t} (seed {seed}, P={p}, K={k}, D={d}): {exc}") from exc

    return _map(one, list(range(first_trial, first_trial + trials)))


def estimate_from_points(
    points: np.ndarray, n0: int, trials: int, seed: int, probe: str = "lp", **extra
) -> CapacityEstimate:
    p = points.shape[0]
    outcomes = separable_trials(points, trials, seed, probe)
    k = int(sum(outcomes))
    return CapacityEstimate(
        p=p,
        n0=n0,
        trials=trials,
        separable_count=k,
        fraction=k / trials,
        wilson_ci_95=wilson_interval(k, trials),
        seed=seed,
        theory=cover_fraction(p, n0),
        probe=probe,
        extra=extra,
    )


def empirical_fraction(
    rep: Representation,
    p: int,
    dichotomy_trials: int,
    rng_seed: int,
    raw_orbits: bool = False,
    probe: str = "lp",
) -> CapacityEstimate:
    """Fraction of random dichotomies of P Gaussian-anchored orbits that are separable."""
    if p < 2:
        raise ValueError("P must be >= 2")
    if dichotomy_trials < 1:
        raise ValueError("need at least one trial")
    orbits = sample_orbit_instance(rep, p, rng_seed)
    n0 = fixed_subspace_dim(rep)
    return estimate_from_points(
        orbit_points(orbits, raw_orbits), n0, dichotomy_trials, rng_seed, probe, rep=rep.label
    )


def all_dichotomies(p: int) -> Iterable[np.ndarray]:
    for bits in itertools.product((1, -1), repeat=p):
        yield np.array(bits)


def brute_force_fraction(points_or_rep, p: int | None = None, seed: int = 0, raw_orbits: bool = False) -> Fraction:
    """Exact separable fraction over all 2^P dichotomies.

    Accepts plain points (P, D), orbit point sets (P, K, D), or a Representation
    together with ``p`` (Gaussian anchors drawn from ``seed``).
    """
    if isinstance(points_or_rep, Representation):
        if p is None:
            raise ValueError("p is required with a representation")
        pts = orbit_points(sample_orbit_instance(points_or_rep, p, seed), raw_orbits)
    else:
        pts = np.asarray(points_or_rep, dtype=np.float64)
        if pts.ndim == 2:
            pts = pts[:, None, :]
    n = pts.shape[0]
    if n > BRUTE_FORCE_MAX_P:
        raise ValueError(f"P={n} too large for enumeration (max {BRUTE_FORCE_MAX_P})")
    k = pts.shape[1]
    flat = pts.reshape(n * k, -1)
    # y and -y are separated by w and -w, so only labelings with y_0 = +1 are solved
    half = (y for y in all_dichotomies(n) if y[0] == 1)
    count = sum(decide_separable(flat, np.repeat(y, k)).separable for y in half)
    return Fraction(2 * count, 2**n)


def general_position_violations(points: np.ndarray, dim: int | None = None, tol: float = 1e-8) -> list[tuple]:
    """Subsets of at most ``dim`` points that are linearly dependent.

    Only the subsets of size min(P, dim) need checking: a dependent smaller set
    makes every superset dependent. Returns the offending index tuples.
    """
    x = np.asarray(points, dtype=np.float64)
    p = x.shape[0]
    dim = x.shape[1] if dim is None else dim
    size = min(p, dim)
    scale = max(1.0, float(np.abs(x).max()))
    bad = []
    for idx in itertools.combinations(range(p), size):
        sv = np.linalg.svd(x[list(idx)], compute_uv=False)
        if sv.size < size or sv[-1] < tol * scale:
            bad.append(idx)
    return bad
