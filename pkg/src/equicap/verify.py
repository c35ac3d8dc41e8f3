"""Property suites run by ``equicap verify``.

Every suite returns a plain dict ``{"suite", "passed", "details"}`` so the CLI can
dump the whole report as JSON. ``thorough=True`` uses the full acceptance sizes.
"""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from .cover import cover_count, cover_fraction
from .gcnn import (
    ConvLayer,
    avg_pool,
    direct_sum_layer,
    direct_sum_output_representation,
    grid_shifts,
    max_pool,
    periodic_conv,
    shift,
    shift_action,
    verify_equivariance,
)
from .groups import coset_decompose, cyclic_group, direct_product, shift_group, subgroup, verify_group_axioms
from .representation import (
    Representation,
    augment_trivial,
    cyclic_direct_sum,
    direct_sum,
    fixed_subspace_dim,
    group_average,
    homomorphism_residual,
    induced_representation,
    irrep_decompose_cyclic,
    regular_representation,
    restrict_to_subgroup,
    rotation_representation,
    trivial_representation,
)
from .separability import (
    all_dichotomies,
    brute_force_fraction,
    centroid_reduce,
    decide_separable,
    empirical_fraction,
    general_position_violations,
    sample_orbit_instance,
)


def _result(name: str, passed: bool, **details) -> dict:
    return {"suite": name, "passed": bool(passed), "details": details}


def structural_reps() -> list[Representation]:
    reps = [regular_representation(cyclic_group(m)) for m in range(1, 9)]
    reps += [rotation_representation(m) for m in range(1, 9)]
    reps += [
        cyclic_direct_sum([2, 3]),
        cyclic_direct_sum([3, 4]),
        cyclic_direct_sum([2, 3, 5]),
        augment_trivial(rotation_representation(4), 1),
        augment_trivial(rotation_representation(6), 3),
        regular_representation(direct_product(cyclic_group(2), cyclic_group(2))),
        regular_representation(shift_group(3, 4)),
        induced_representation(cyclic_group(6), [0, 3], trivial_representation(subgroup(cyclic_group(6), [0, 3]))),
        direct_sum_output_representation(6, 2, 3),
    ]
    return reps


def suite_structural(seed: int = 0, thorough: bool = False) -> dict:
    worst_hom = worst_idem = worst_inv = 0.0
    for rep in structural_reps():
        avg = group_average(rep)
        worst_hom = max(worst_hom, homomorphism_residual(rep))
        worst_idem = max(worst_idem, float(np.abs(avg @ avg - avg).max()))
        worst_inv = max(
            worst_inv,
            float(np.abs(rep.matrices @ avg - avg).max()),
            float(np.abs(avg @ rep.matrices - avg).max()),
        )
    worst_irrep = 0.0
    for m in range(1, 17):
        dec = irrep_decompose_cyclic(m)
        rep = regular_representation(cyclic_group(m))
        avg_blocks = dec.basis.T @ group_average(rep) @ dec.basis
        for b, sl in dec.block_slices():
            if b.kind != "trivial":
                worst_irrep = max(worst_irrep, float(np.abs(avg_blocks[sl, sl]).max()))
    recursion_failures = [
        (p, n)
        for p in range(1, 64)
        for n in range(1, p + 1)
        if cover_count(p + 1, n) != cover_count(p, n) + cover_count(p, n - 1)
    ]
    groups = [cyclic_group(m) for m in (1, 2, 5, 12)] + [
        direct_product(cyclic_group(4), cyclic_group(4)),
        shift_group(10, 10),
    ]
    axiom_failures = {g.label: verify_group_axioms(g) for g in groups if verify_group_axioms(g)}
    passed = (
        worst_hom < 1e-10
        and worst_idem < 1e-8
        and worst_inv < 1e-8
        and worst_irrep < 1e-10
        and not recursion_failures
        and not axiom_failures
    )
    return _result(
        "structural",
        passed,
        homomorphism_residual=worst_hom,
        idempotence_residual=worst_idem,
        invariance_residual=worst_inv,
        nontrivial_irrep_average=worst_irrep,
        cover_recursion_failures=recursion_failures,
        group_axiom_failures=axiom_failures,
    )


def suite_cover_oracle(seed: int = 0, thorough: bool = False) -> dict:
    seeds = range(seed, seed + (20 if thorough else 2))
    p_max = 8 if thorough else 6
    mismatches = []
    checked = 0
    for s in seeds:
        rng = np.random.default_rng([s, 7])
        for p in range(2, p_max + 1):
            for n in range(1, 6):
                pts = rng.standard_normal((p, n))
                got = brute_force_fraction(pts)
                checked += 1
                if got != cover_fraction(p, n):
                    mismatches.append({"seed": s, "p": p, "n": n, "got": str(got), "want": str(cover_fraction(p, n))})
    return _result("cover-oracle", not mismatches, checked=checked, mismatches=mismatches)


def centroid_instance(rng: np.random.Generator) -> tuple[Representation, np.ndarray, np.ndarray]:
    kind = rng.integers(3)
    if kind == 0:
        rep = regular_representation(cyclic_group(int(rng.integers(2, 7))))
        rep = direct_sum([rep] * int(rng.integers(1, 5)))
    elif kind == 1:
        moduli = [(2, 3), (3, 4), (2, 5), (3, 5)][rng.integers(4)]
        rep = cyclic_direct_sum(list(moduli))
    else:
        rep = augment_trivial(rotation_representation(int(rng.integers(3, 7))), int(rng.integers(1, 6)))
    p = int(rng.integers(2, 11))
    anchors = rng.standard_normal((p, rep.dim))
    labels = rng.choice(np.array([-1, 1]), size=p)
    return rep, anchors, labels


def centroid_agreement(rep: Representation, anchors: np.ndarray, labels: np.ndarray) -> tuple[bool, bool]:
    orbit = np.einsum("gij,pj->pgi", rep.matrices, anchors)
    g = rep.group.order
    full = decide_separable(orbit.reshape(-1, rep.dim), np.repeat(labels, g)).separable
    cent = decide_separable(anchors @ group_average(rep).T, labels).separable
    return full, cent


def suite_centroid(seed: int = 0, thorough: bool = False, instances: int = 200) -> dict:
    rng = np.random.default_rng([seed, 11])
    disagreements = []
    separable = 0
    for i in range(instances):
        rep, anchors, labels = centroid_instance(rng)
        full, cent = centroid_agreement(rep, anchors, labels)
        separable += full
        if full != cent:
            disagreements.append({"instance": i, "rep": rep.label, "p": len(labels)})
    return _result(
        "centroid",
        not disagreements,
        agreements=instances - len(disagreements),
        instances=instances,
        separable_instances=separable,
        disagreements=disagreements,
    )


def suite_capacity(seed: int = 0, thorough: bool = False) -> dict:
    base = regular_representation(cyclic_group(5))
    n0s = [4, 6, 8, 10, 12, 16] if thorough else [4, 8, 12]
    trials = 200 if thorough else 100
    rows = []
    for i, n0 in enumerate(n0s):
        est = empirical_fraction(direct_sum([base] * n0), 16, trials, seed + i)
        rows.append({"n0": n0, "fraction": est.fraction, "ci": est.wilson_ci_95, "theory": float(est.theory),
                     "in_ci": est.contains_theory()})
    hits = sum(r["in_ci"] for r in rows)
    return _result("capacity", hits >= len(rows) - 1, hits=hits, points=rows)


def vc_check(n0: int, seed: int) -> tuple[bool, bool]:
    """(all dichotomies separable at P = N0, some dichotomy fails at P = N0 + 1)."""
    rep = direct_sum([regular_representation(cyclic_group(3))] * n0)
    inst = sample_orbit_instance(rep, n0 + 1, seed)
    cents = centroid_reduce(inst)
    shattered = all(decide_separable(cents[:n0], y).separable for y in all_dichotomies(n0))
    fails = any(not decide_separable(cents, y).separable for y in all_dichotomies(n0 + 1))
    return shattered, fails


def suite_vc(seed: int = 0, thorough: bool = False) -> dict:
    n0s = range(2, 9 if thorough else 6)
    seeds = range(seed, seed + (10 if thorough else 3))
    bad = [(n0, s) for n0 in n0s for s in seeds if vc_check(n0, s) != (True, True)]
    return _result("vc", not bad, failures=bad)


def suite_subgroup(seed: int = 0, thorough: bool = False) -> dict:
    """Anything separable for G stays separable for a subgroup; N0 can only grow."""
    cases = [
        (regular_representation(cyclic_group(4)), [0, 2]),
        (regular_representation(cyclic_group(6)), [0, 2, 4]),
        (regular_representation(cyclic_group(6)), [0, 3]),
        (cyclic_direct_sum([2, 3]), [0, 3]),
        (regular_representation(shift_group(4, 4)), [0, 2, 8, 10]),
    ]
    rng = np.random.default_rng([seed, 13])
    violations = []
    for rep, h in cases:
        sub = restrict_to_subgroup(rep, h)
        if fixed_subspace_dim(sub) < fixed_subspace_dim(rep):
            violations.append({"rep": rep.label, "h": h, "issue": "N0 decreased"})
        for _ in range(20):
            p = int(rng.integers(2, 7))
            anchors = rng.standard_normal((p, rep.dim))
            y = rng.choice(np.array([-1, 1]), size=p)
            g_sep = centroid_agreement(rep, anchors, y)[0]
            h_sep = centroid_agreement(sub, anchors, y)[0]
            if g_sep and not h_sep:
                violations.append({"rep": rep.label, "h": h, "issue": "separable for G but not for H"})
    return _result("subgroup", not violations, violations=violations)


INDUCED_CASES = (
    ("Z6", [0, 3], "trivial"),
    ("Z6", [0, 2, 4], "regular"),
    ("Z4", [0, 2], "regular"),
)


def induced_case(order: int, h: list[int], rho_kind: str) -> tuple[Representation, Representation]:
    g = cyclic_group(order)
    hg = subgroup(g, h)
    rho = trivial_representation(hg) if rho_kind == "trivial" else regular_representation(hg)
    return induced_representation(g, h, rho), rho


def suite_induced(seed: int = 0, thorough: bool = False) -> dict:
    rows = []
    for label, h, kind in INDUCED_CASES:
        ind, rho = induced_case(int(label[1:]), h, kind)
        rows.append({"case": f"{label}/{h}/{kind}", "n0_induced": fixed_subspace_dim(ind), "n0_rho": fixed_subspace_dim(rho)})
    return _result("induced", all(r["n0_induced"] == r["n0_rho"] for r in rows), cases=rows)


def suite_gcnn(seed: int = 0, thorough: bool = False) -> dict:
    rng = np.random.default_rng([seed, 17])
    n_inputs = 50 if thorough else 8
    w = l = 8
    xs = [rng.standard_normal((w, l, 2)) for _ in range(n_inputs)]
    conv = ConvLayer.random(2, 3, 3, rng)
    report = {}
    report["periodic_conv"] = verify_equivariance(
        lambda x: periodic_conv(x, conv), shift_action, shift_action, grid_shifts(w, l), xs, 1e-10
    )
    zero = ConvLayer(conv.filters, boundary="zero", padding=1)
    report["zero_pad_conv"] = verify_equivariance(
        lambda x: periodic_conv(x, zero), shift_action, shift_action, grid_shifts(w, l), xs, 1e-10
    )
    k = 2
    pooled = lambda x: max_pool(periodic_conv(x, conv), k)  # noqa: E731
    report["max_pool_subgroup"] = verify_equivariance(
        pooled,
        shift_action,
        lambda y, g: shift(y, g[0] // k, g[1] // k),
        grid_shifts(w, l, step=k),
        xs,
        1e-12,
    )
    report["avg_pool_subgroup"] = verify_equivariance(
        lambda x: avg_pool(periodic_conv(x, conv), k),
        shift_action,
        lambda y, g: shift(y, g[0] // k, g[1] // k),
        grid_shifts(w, l, step=k),
        xs,
        1e-12,
    )
    # direct-sum layer: output permutes by the declared representation, per channel
    m1, m2 = 2, 3
    size = m1 * m2
    out_rep = direct_sum_output_representation(size, m1, m2)
    group = out_rep.group
    xs6 = [rng.standard_normal((size, size, 2)) for _ in range(n_inputs)]
    ds = lambda x: direct_sum_layer(x, conv, m1, m2)  # noqa: E731

    def act_out(y, g):
        gi = g[0] * size + g[1]
        return out_rep.matrices[gi] @ y

    report["direct_sum_layer"] = verify_equivariance(ds, shift_action, act_out, grid_shifts(size, size), xs6, 1e-10)
    n0_dsum = fixed_subspace_dim(out_rep)
    passed = (
        report["periodic_conv"].passed
        and not report["zero_pad_conv"].passed
        and report["max_pool_subgroup"].passed
        and report["avg_pool_subgroup"].passed
        and report["direct_sum_layer"].passed
        and n0_dsum == 2
        and group.order == size * size
    )
    return _result(
        "gcnn",
        passed,
        residuals={k_: v.max_residual for k_, v in report.items()},
        zero_pad_breaks_equivariance=not report["zero_pad_conv"].passed,
        direct_sum_n0_per_channel=n0_dsum,
    )


def suite_general_position(seed: int = 0, thorough: bool = False, anchors_override=None) -> dict:
    """Sampled centroids are in general position in V0; a duplicated anchor is flagged."""
    rep = direct_sum([regular_representation(cyclic_group(3))] * 4)
    findings = []
    for s in range(seed, seed + 5):
        inst = sample_orbit_instance(rep, 8, s)
        anchors = inst.anchors if anchors_override is None else np.asarray(anchors_override)
        bad = general_position_violations(anchors @ group_average(rep).T, dim=fixed_subspace_dim(rep))
        if bad:
            findings.append({"seed": s, "dependent_subsets": bad[:5]})
    # self-check: the detector must catch an injected duplicate
    inst = sample_orbit_instance(rep, 6, seed)
    dup = inst.anchors.copy()
    dup[1] = dup[0]
    detector_ok = bool(general_position_violations(dup @ group_average(rep).T, dim=4))
    return _result("general-position", not findings and detector_ok, violations=findings, detector_ok=detector_ok)


def suite_cosets(seed: int = 0, thorough: bool = False) -> dict:
    g = shift_group(4, 6)
    bad = []
    for h in ([0], [0, 6, 12, 18], [0, 2, 4], list(range(24))):
        dec = coset_decompose(g, h)
        pairs = set(dec.coset_of.values())
        if len(pairs) != g.order or len(dec.representatives) * len(h) != g.order:
            bad.append(h)
        if any(g.mul(r, hh) != x for x, (r, hh) in dec.coset_of.items()):
            bad.append(h)
    return _result("cosets", not bad, failures=bad)


SUITES: dict[str, Callable[..., dict]] = {
    "structural": suite_structural,
    "cosets": suite_cosets,
    "cover": suite_cover_oracle,
    "centroid": suite_centroid,
    "capacity": suite_capacity,
    "vc": suite_vc,
    "subgroup": suite_subgroup,
    "induced": suite_induced,
    "gcnn": suite_gcnn,
    "general-position": suite_general_position,
}


# older names accepted on the command line
SUITE_ALIASES = {"lemma1": "centroid", "theorem1": "capacity"}


def verify_suites(names: list[str] | None = None, seed: int = 0, thorough: bool = False) -> dict:
    names = list(SUITES) if not names or names == ["all"] else [SUITE_ALIASES.get(n, n) for n in names]
    results = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
        t0 = time.time()
        res = SUITES[name](seed=seed, thorough=thorough)
        res["seconds"] = round(time.time() - t0, 3)
        results.append(res)
    return {"seed": seed, "thorough": thorough, "passed": all(r["passed"] for r in results), "suites": results}
