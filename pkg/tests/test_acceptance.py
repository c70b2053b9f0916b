"""Acceptance gate: every criterion runs at its stated tolerance and prints
one PASS/FAIL line.

The ellipsoid residual bound used by criterion 2 was recorded before the
build by scripts/compute_congruence_oracle.py: an exhaustive O(3) grid
(62 icosahedral axis directions x 1-degree planar steps, both determinant
signs) over the (5,0,0)/(0,5,0) cone pair at 256 samples per cone, minus a
certified grid-covering slack.  The slack is large enough to push the
certified lower bound below zero, so the bound is loose; the witness
threshold and grid-dominance checks below carry the sharp content.
"""

import time

import numpy as np

from conekit.config import HarnessConfig
from conekit.congruence import congruence_distance
from conekit.cones import cross_section, support_cone
from conekit.geom import ConvexBody3, rotation_matrix, unit
from conekit.harness import Scene, scene_cones, verify_scene, _coverage_fraction
from conekit.symmetry import detect_symmetries
from conekit.topology import (
    icosphere,
    poincare_hopf_sum,
    polynomial_field,
    projected_constant_field,
    rotational_field,
    two_sequence_limits,
)
from conftest import random_cone, random_motion
from oracles import symmetry_group_order, witness_gap_mod_symmetry

BALL = ConvexBody3.ball([0, 0, 0], 1.0)
SPHERE3 = ConvexBody3.ball([0, 0, 0], 3.0)
SPHERE5 = ConvexBody3.ball([0, 0, 0], 5.0)
ELLIPSOID = ConvexBody3.ellipsoid([0, 0, 0], [2.0, 1.0, 1.0])
CUBE = ConvexBody3.polytope([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)])

# frozen golden values from scripts/compute_congruence_oracle.py
ORACLE_GRID_MIN = 0.1725321411457652
ORACLE_COVERING_SLACK = 0.6902282352840052
DELTA_STAR = ORACLE_GRID_MIN - ORACLE_COVERING_SLACK


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num} [{status}] {name}: {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def test_criterion_1_ball_golden_scene():
    scene = Scene(inner=BALL, outer=SPHERE3, count=50, strategy="fibonacci",
                  config=HarnessConfig(samples_per_cone=256))
    t0 = time.perf_counter()
    report = verify_scene(scene)
    elapsed = time.perf_counter() - t0
    half_err = float(np.max(np.abs(np.array(report.half_angles) - np.arcsin(1.0 / 3.0))))
    ok = (
        report.verdict == "consistent_with_ball"
        and report.matrix_max < 1e-3
        and half_err < 1e-3
        and elapsed < 60.0
    )
    _report(
        1,
        "ball golden scene",
        ok,
        f"verdict={report.verdict} max={report.matrix_max:.2e} "
        f"half_angle_err={half_err:.2e} elapsed={elapsed:.1f}s",
    )


def test_criterion_2_ellipsoid_golden_scene():
    scene = Scene(inner=ELLIPSOID, outer=SPHERE5, count=50, strategy="fibonacci",
                  config=HarnessConfig(samples_per_cone=256))
    t0 = time.perf_counter()
    report = verify_scene(scene)
    elapsed = time.perf_counter() - t0
    c_axis = support_cone(ELLIPSOID, [5.0, 0.0, 0.0], samples=256)
    c_side = support_cone(ELLIPSOID, [0.0, 5.0, 0.0], samples=256)
    pair = congruence_distance(c_axis, c_side)
    ok = (
        report.verdict == "non_congruence_witness"
        and pair.distance > DELTA_STAR
        and pair.distance > report.witness_threshold
        and pair.distance <= ORACLE_GRID_MIN + 1e-9
        and elapsed < 120.0
    )
    _report(
        2,
        "ellipsoid golden scene",
        ok,
        f"verdict={report.verdict} pair_distance={pair.distance:.6f} "
        f"delta_star={DELTA_STAR:.6f} grid_min={ORACLE_GRID_MIN:.6f} elapsed={elapsed:.1f}s",
    )


def test_criterion_3_witness_recovery():
    rng = np.random.default_rng(31)
    failures = 0
    worst_res, worst_gap = 0.0, 0.0
    for _ in range(100):
        cone = random_cone(rng, n_rays=int(rng.integers(4, 17)))
        phi = random_motion(rng)
        from conekit.cones import motion_image

        moved = motion_image(phi, cone)
        res = congruence_distance(cone, moved)
        gap = witness_gap_mod_symmetry(res.witness.omega, phi.omega, detect_symmetries(cone))
        worst_res = max(worst_res, res.distance)
        worst_gap = max(worst_gap, gap)
        if res.distance >= 1e-8 or gap >= 1e-6:
            failures += 1
    ok = failures == 0
    _report(
        3,
        "witness recovery",
        ok,
        f"failures={failures}/100 worst_residual={worst_res:.2e} worst_omega_gap={worst_gap:.2e}",
    )


def test_criterion_4_symmetry_suite():
    from conekit.cones import SupportCone

    cube_rep = detect_symmetries(support_cone(CUBE, [0, 0, 5]))
    ok = (
        len(cube_rep.axes) == 1
        and cube_rep.axes[0].order == 4
        and len(cube_rep.planes) == 4
    )
    detail = [f"cube: {len(cube_rep.axes)} axes(order {cube_rep.axes[0].order}), {len(cube_rep.planes)} planes"]
    for m in range(3, 9):
        ang = 2 * np.pi * np.arange(m) / m
        dirs = np.column_stack([0.5 * np.cos(ang), 0.5 * np.sin(ang), -np.ones(m)])
        cone = SupportCone.from_rays([0, 0, 0], dirs)
        rep = detect_symmetries(cone)
        oracle = symmetry_group_order(cone.rays, 1e-6)
        ok = ok and rep.axes and rep.axes[0].order == m and rep.group_order == oracle
        detail.append(f"m={m}:{rep.group_order}|{oracle}")
    scalene = SupportCone.from_rays([0, 0, 0], [[1, 0, -2], [-1, 0.3, -2], [0.2, 1, -2]])
    rep = detect_symmetries(scalene)
    oracle = symmetry_group_order(scalene.rays, 1e-6)
    ok = ok and rep.group_order == 1 and oracle == 1
    detail.append(f"scalene:{rep.group_order}|{oracle}")
    _report(4, "symmetry suite", bool(ok), " ".join(detail))


def test_criterion_5_poincare_hopf():
    tilt = rotation_matrix(unit([0.3, 0.5, 0.81]), 0.4321)
    sums = []
    for level in (3, 4, 5):
        mesh = icosphere(2**level, rotate=tilt)
        for make in (
            rotational_field,
            projected_constant_field,
            lambda m: polynomial_field(m, seed=7),
        ):
            sums.append(poincare_hopf_sum(make(mesh)))
    ok = all(s == 2 for s in sums) and len(sums) == 9
    _report(5, "Poincare-Hopf index sums", ok, f"sums={sums}")


def test_criterion_6_frame_field_obstruction():
    res = two_sequence_limits(np.array([0.0, 0.0, 1.0]), 0.0, np.pi / 2, steps=32)
    for lim in (res.limit1, res.limit2):
        assert np.max(np.abs(lim.omega.T @ lim.omega - np.eye(3))) <= 1e-12
    ok = res.relative_gap > 0.1 and res.cauchy1 <= 1e-8 and res.cauchy2 <= 1e-8
    _report(
        6,
        "frame-field obstruction",
        ok,
        f"relative_gap={res.relative_gap:.3f} cauchy=({res.cauchy1:.1e},{res.cauchy2:.1e})",
    )


def test_criterion_7_eta_injectivity_and_coverage():
    detail = []
    ok = True
    for name, inner, outer in (("ball", BALL, SPHERE3), ("ellipsoid", ELLIPSOID, SPHERE5)):
        scene = Scene(inner=inner, outer=outer, count=500, strategy="fibonacci",
                      config=HarnessConfig(samples_per_cone=256))
        _, cones = scene_cones(scene)
        etas = np.array([cross_section(c, 1.0).frame.normal for c in cones])
        gram = np.clip(etas @ etas.T, -1.0, 1.0)
        ang = np.arccos(gram)
        iu = np.triu_indices(len(etas), k=1)
        min_sep = float(ang[iu].min())
        coverage = _coverage_fraction(etas, 3)
        ok = ok and min_sep > 1e-4 and coverage >= 0.95
        detail.append(f"{name}: min_sep={min_sep:.2e} coverage={coverage:.3f}")
    _report(7, "eta injectivity and coverage", ok, " ".join(detail))


def test_criterion_8_pseudometric_suite():
    from conekit.cones import motion_image

    rng = np.random.default_rng(88)
    failures = 0
    worst_sym = worst_bi = 0.0
    worst_tri = np.inf
    for _ in range(1000):
        c1, c2, c3 = (random_cone(rng) for _ in range(3))
        d12 = congruence_distance(c1, c2).distance
        d21 = congruence_distance(c2, c1).distance
        d13 = congruence_distance(c1, c3).distance
        d23 = congruence_distance(c2, c3).distance
        dm = congruence_distance(
            motion_image(random_motion(rng), c1), motion_image(random_motion(rng), c2)
        ).distance
        sym = abs(d12 - d21)
        tri = d12 + d23 - d13
        bi = abs(d12 - dm)
        worst_sym = max(worst_sym, sym)
        worst_bi = max(worst_bi, bi)
        worst_tri = min(worst_tri, tri)
        if sym > 1e-9 or tri < -1e-6 or bi > 1e-8 or d12 < 0 or d13 < 0 or d23 < 0:
            failures += 1
    ok = failures == 0
    _report(
        8,
        "pseudometric property suite",
        ok,
        f"failures={failures}/1000 worst_symmetry={worst_sym:.1e} "
        f"worst_triangle_deficit={-min(worst_tri, 0):.1e} worst_bi_invariance={worst_bi:.1e}",
    )
