"""Scene ingestion, boundary sampling, the cone-axis field eta, and the
end-to-end verification pipeline.

A scene is an inner body M strictly inside an outer body K.  The pipeline
samples apexes on the boundary of K, builds the support cones of M, runs
the all-pairs congruence matrix and per-apex symmetry classification,
collects the axis field eta with injectivity and coverage statistics, cuts
the distance-1 cross-sections, and issues a verdict:

* ``consistent_with_ball`` when the cones are pairwise congruent, right
  circular, and their sections are circles,
* ``non_congruence_witness`` when some pair is distant beyond the witness
  threshold (a concrete counterexample pair is reported),
* ``continuity_violation`` when borderline residuals combine with
  diverging witness limits,
* ``inconclusive`` in the remaining borderline band.

Reports are pure functions of (scene, config): identical inputs give
bit-identical JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .config import EPS_GEO, HarnessConfig
from .cones import PlanarSection, SupportCone, cross_section, support_cone
from .congruence import (
    ContinuityProbeResult,
    PairwiseCongruence,
    continuity_probe,
    pairwise_congruence_matrix,
)
from .errors import SceneInvalidError
from .geom import ConvexBody3, as_point, fibonacci_directions, hausdorff_distance, unit
from .symmetry import SymmetryReport, case_split, detect_circle, detect_symmetries
from .topology import icosphere

__all__ = [
    "Scene",
    "EtaResult",
    "SectionFieldResult",
    "VerificationReport",
    "load_scene",
    "scene_from_dict",
    "sample_boundary",
    "scene_cones",
    "eta_map",
    "section_field",
    "verify_scene",
    "report_to_dict",
    "matrix_to_csv",
]

_INNER_CONTAINMENT_SAMPLES = 256


@dataclass(frozen=True, eq=False)
class Scene:
    """Inner body, enclosing outer body, and the apex sampling plan.

    The scene frame origin is an interior point of the inner body (its
    centroid unless overridden); apex sampling projects a deterministic
    unit-sphere point set from that origin onto the outer boundary.
    """

    inner: ConvexBody3
    outer: ConvexBody3
    count: int = 50
    seed: int = 0
    strategy: str = "fibonacci"
    containment_margin: float = 1e-6
    origin: np.ndarray | None = None
    config: HarnessConfig = field(default_factory=HarnessConfig)

    def __post_init__(self):
        if self.strategy not in ("fibonacci", "random"):
            raise SceneInvalidError(f"unknown sampling strategy {self.strategy!r}")
        if self.count < 2:
            raise SceneInvalidError("need at least 2 apex samples")
        if self.containment_margin <= 0:
            raise SceneInvalidError("containment margin must be positive")
        origin = self.inner.centroid() if self.origin is None else as_point(self.origin)
        origin = np.ascontiguousarray(origin)
        origin.flags.writeable = False
        object.__setattr__(self, "origin", origin)
        if not self.inner.contains(origin):
            raise SceneInvalidError("scene origin must lie inside the inner body")
        for p in self.inner.boundary_samples(_INNER_CONTAINMENT_SAMPLES):
            if not self.outer.contains(p, self.containment_margin):
                raise SceneInvalidError(
                    "inner body is not strictly inside the outer body",
                    offending_sample=p,
                )


def _body_from_dict(data: dict) -> ConvexBody3:
    kind = data.get("kind")
    if kind == "ball":
        return ConvexBody3.ball(data["center"], data["radius"])
    if kind == "ellipsoid":
        return ConvexBody3.ellipsoid(
            data["center"], data["semi_axes"], data.get("orientation")
        )
    if kind == "polytope":
        return ConvexBody3.polytope(data["vertices"])
    raise SceneInvalidError(f"unknown body kind {kind!r}")


_KNOWN_CONFIG_KEYS = {
    "tol",
    "witness_threshold",
    "samples_per_cone",
    "jobs",
    "coverage_frequency",
}


def scene_from_dict(data: dict) -> Scene:
    """Build a scene from the JSON schema:

    ``{"inner": {...}, "outer": {...}, "sampling": {"count", "seed",
    "strategy"}, "config": {"tol", "witness_threshold",
    "samples_per_cone"}}``
    """
    try:
        inner = _body_from_dict(data["inner"])
        outer = _body_from_dict(data["outer"])
    except (KeyError, ValueError, TypeError) as exc:
        raise SceneInvalidError(f"invalid body specification: {exc}") from exc
    sampling = data.get("sampling", {})
    raw_cfg = data.get("config", {})
    unknown = set(raw_cfg) - _KNOWN_CONFIG_KEYS
    if unknown:
        raise SceneInvalidError(f"unknown config keys: {sorted(unknown)}")
    cfg = HarnessConfig(
        tol=raw_cfg.get("tol"),
        witness_threshold=raw_cfg.get("witness_threshold"),
        samples_per_cone=raw_cfg.get("samples_per_cone", 256),
        jobs=raw_cfg.get("jobs", 1),
        coverage_frequency=raw_cfg.get("coverage_frequency", 3),
    )
    return Scene(
        inner=inner,
        outer=outer,
        count=sampling.get("count", 50),
        seed=sampling.get("seed", 0),
        strategy=sampling.get("strategy", "fibonacci"),
        containment_margin=data.get("containment_margin", 1e-6),
        config=cfg,
    )


def load_scene(path) -> Scene:
    """Read and validate a scene JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SceneInvalidError(f"cannot parse scene file: {exc}") from exc
    try:
        return scene_from_dict(data)
    except ValueError as exc:
        raise SceneInvalidError(str(exc)) from exc


def sample_boundary(body: ConvexBody3, n: int, seed: int = 0,
                    strategy: str = "fibonacci", origin=None) -> np.ndarray:
    """Deterministic boundary points: central projection of a unit-sphere
    point set onto the surface along rays from an interior origin."""
    if n < 2:
        raise ValueError("need at least 2 boundary samples")
    o = body.centroid() if origin is None else as_point(origin)
    if strategy == "fibonacci":
        dirs = fibonacci_directions(n)
    elif strategy == "random":
        rng = np.random.default_rng(seed)
        dirs = rng.standard_normal((n, 3))
        dirs = dirs / np.linalg.norm(dirs, axis=1)[:, None]
    else:
        raise ValueError(f"unknown sampling strategy {strategy!r}")
    return body.ray_exits(o, dirs)


def scene_apexes(scene: Scene) -> np.ndarray:
    apexes = sample_boundary(
        scene.outer, scene.count, scene.seed, scene.strategy, scene.origin
    )
    for x in apexes:
        if scene.inner.surface_margin(x) < scene.containment_margin:
            raise SceneInvalidError(
                "sampled apex is not outside the inner body by the containment margin",
                offending_sample=x,
            )
    return apexes


def scene_cones(scene: Scene) -> tuple[np.ndarray, list[SupportCone]]:
    """Apexes on the outer boundary and the inner body's support cones."""
    apexes = scene_apexes(scene)
    cones = [
        support_cone(scene.inner, x, samples=scene.config.samples_per_cone)
        for x in apexes
    ]
    return apexes, cones


@dataclass(frozen=True, eq=False)
class EtaResult:
    """The axis field over the sampled apexes: one unit direction per apex
    (the cross-section normal pointing out toward the apex), plus sampled
    injectivity and coverage statistics.

    Apexes whose cone has neither a rotation axis nor circular symmetry
    fall back to the canonical axis and are flagged.
    """

    etas: np.ndarray
    fallback: np.ndarray
    min_separation: float
    coverage_fraction: float


def _coverage_fraction(etas: np.ndarray, frequency: int) -> float:
    """Fraction of coverage-grid cells (icosphere faces) hit by the eta
    directions, locating each direction by ray-triangle containment."""
    grid = icosphere(frequency)
    tris = grid.triangles
    corners = grid.vertices[tris]  # (F, 3, 3)
    mats = np.linalg.inv(np.transpose(corners, (0, 2, 1)))  # (F, 3, 3)
    bary = np.einsum("fij,nj->fni", mats, etas)
    inside = np.all(bary >= -1e-12, axis=2)  # (F, n)
    hit = np.any(inside, axis=1)
    return float(hit.sum()) / len(tris)


def eta_map(
    cones: list[SupportCone],
    sections: list[PlanarSection],
    classes: list[str],
    coverage_frequency: int = 3,
) -> EtaResult:
    """Collect the per-apex axis directions from the section frames.

    The direction is the distance-1 cross-section normal, oriented toward
    the apex side; for a ball-in-sphere scene it reproduces the outward
    radial direction at each apex.
    """
    etas = np.array([s.frame.normal for s in sections])
    fallback = np.array(
        [cls not in ("right_circular", "axis_of_symmetry") for cls in classes]
    )
    n = len(etas)
    gram = np.clip(etas @ etas.T, -1.0, 1.0)
    ang = np.arccos(gram)
    iu = np.triu_indices(n, k=1)
    min_sep = float(ang[iu].min()) if len(iu[0]) else float("inf")
    coverage = _coverage_fraction(etas, coverage_frequency)
    return EtaResult(
        etas=etas,
        fallback=fallback,
        min_separation=min_sep,
        coverage_fraction=coverage,
    )


@dataclass(frozen=True, eq=False)
class SectionFieldResult:
    """Distance-1 cross-sections tagged by their axis directions.

    ``congruent_field`` is set when every pairwise cone congruence
    residual is within tolerance.  Continuity is probed, not assumed: for
    each apex and its nearest neighbour (by axis angle), the 3D Hausdorff
    gap between the embedded sections must stay within a data-estimated
    Lipschitz cone ``L * angle + 2 * tol``.
    """

    sections: list
    congruent_field: bool
    lipschitz_estimate: float
    continuity_violations: tuple
    circle_flags: tuple
    circle_radii: tuple


def section_field(
    cones: list[SupportCone],
    etas: np.ndarray,
    matrix: np.ndarray,
    tol: float,
    sections: list[PlanarSection] | None = None,
) -> SectionFieldResult:
    if sections is None:
        sections = [cross_section(c, 1.0) for c in cones]
    n = len(sections)
    congruent_field = bool(matrix.max() <= tol) if n > 1 else True

    embedded = [s.embedded() for s in sections]
    gram = np.clip(etas @ etas.T, -1.0, 1.0)
    ang = np.arccos(gram)
    np.fill_diagonal(ang, np.inf)
    ratios = []
    pairs = []
    for i in range(n):
        j = int(np.argmin(ang[i]))
        theta = float(ang[i, j])
        h = hausdorff_distance(embedded[i], embedded[j])
        pairs.append((i, j, h, theta))
        if theta > EPS_GEO:
            ratios.append(h / theta)
    lip = 2.0 * float(np.median(ratios)) if ratios else 0.0
    violations = tuple(
        (i, j, h, theta)
        for i, j, h, theta in pairs
        if h > lip * theta + 2.0 * tol
    )

    flags = []
    radii = []
    for s in sections:
        if len(s.polygon) >= 8:
            ok, _, radius = detect_circle(s, tol)
        else:
            ok, radius = False, float("nan")  # too coarse to be a sampled circle
        flags.append(bool(ok))
        radii.append(float(radius))
    return SectionFieldResult(
        sections=sections,
        congruent_field=congruent_field,
        lipschitz_estimate=lip,
        continuity_violations=violations,
        circle_flags=tuple(flags),
        circle_radii=tuple(radii),
    )


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """End-to-end scene verdict with the statistics that justify it."""

    verdict: str
    witness_pair: tuple | None
    matrix_max: float
    matrix_mean: float
    matrix_median: float
    tol: float
    witness_threshold: float
    symmetry_classes: tuple
    all_right_circular: bool
    half_angles: tuple
    eta: EtaResult
    sections: SectionFieldResult
    apexes: np.ndarray
    matrix: np.ndarray
    pairwise: PairwiseCongruence
    probe: ContinuityProbeResult | None
    config_echo: dict


def _probe_sequences(scene: Scene, apexes: np.ndarray, i: int, j: int):
    """Two boundary approach sequences to apex j: one sliding from apex i
    along the connecting great arc, one approaching from a perpendicular
    tangent direction."""
    o = scene.origin
    ui = unit(apexes[i] - o)
    uj = unit(apexes[j] - o)
    if abs(float(ui @ uj)) > 1.0 - 1e-9:
        ui = unit(np.roll(uj, 1) - float(np.roll(uj, 1) @ uj) * uj)
    t1 = unit(ui - float(ui @ uj) * uj)
    t2 = np.cross(uj, t1)
    deltas = np.geomspace(0.2, 1e-5, 12)

    def walk(t):
        dirs = np.array([np.cos(d) * uj + np.sin(d) * t for d in deltas])
        return scene.outer.ray_exits(o, dirs)

    return walk(t1), walk(t2), apexes[j]


def verify_scene(scene: Scene, config: HarnessConfig | None = None) -> VerificationReport:
    """Run the full pipeline and issue a verdict.

    The verdict is ``consistent_with_ball`` only when three independent
    statistics agree: the congruence matrix is within tolerance, every
    cone is right circular, and every section is a circle.  A matrix entry
    beyond the witness threshold names a concrete counterexample pair.
    Entries in between leave the scene in the inconclusive band, where a
    witness-limit probe distinguishes a continuity violation from plain
    borderline numerics.
    """
    cfg = config or scene.config
    apexes, cones = scene_cones(scene)
    sampled = any(c.is_sampled for c in cones)
    tol = cfg.resolve_tol(sampled)
    wit = cfg.resolve_witness_threshold(sampled)

    pairwise = pairwise_congruence_matrix(cones, cfg.congruence, tol, jobs=cfg.jobs)
    matrix = pairwise.matrix

    reports = [detect_symmetries(c, tol) for c in cones]
    classes = [case_split(r) for r in reports]
    all_rc = all(r.is_right_circular for r in reports)
    half_angles = tuple(
        float(r.half_angle) if r.half_angle is not None else float("nan")
        for r in reports
    )

    sections = [cross_section(c, 1.0) for c in cones]
    eta = eta_map(cones, sections, classes, cfg.coverage_frequency)
    sect = section_field(cones, eta.etas, matrix, tol, sections)

    iu = np.triu_indices(len(cones), k=1)
    entries = matrix[iu]
    mmax = float(entries.max())
    argmax_flat = int(np.argmax(entries))
    worst_pair = (int(iu[0][argmax_flat]), int(iu[1][argmax_flat]))

    probe = None
    if mmax <= tol and all_rc and all(sect.circle_flags):
        verdict = "consistent_with_ball"
        witness_pair = None
    elif mmax > wit:
        verdict = "non_congruence_witness"
        witness_pair = worst_pair
    else:
        seq1, seq2, xstar = _probe_sequences(scene, apexes, *worst_pair)
        probe = continuity_probe(
            lambda x: support_cone(scene.inner, x, samples=cfg.samples_per_cone),
            apexes[worst_pair[0]],
            xstar,
            seq1,
            seq2,
            cfg.congruence,
            tol,
        )
        diverging = probe.limits_differ or not (probe.converged1 and probe.converged2)
        if diverging and probe.hypothesis_violated:
            verdict = "continuity_violation"
            witness_pair = worst_pair
        else:
            verdict = "inconclusive"
            witness_pair = None

    return VerificationReport(
        verdict=verdict,
        witness_pair=witness_pair,
        matrix_max=mmax,
        matrix_mean=float(entries.mean()),
        matrix_median=float(np.median(entries)),
        tol=tol,
        witness_threshold=wit,
        symmetry_classes=tuple(classes),
        all_right_circular=all_rc,
        half_angles=half_angles,
        eta=eta,
        sections=sect,
        apexes=apexes,
        matrix=matrix,
        pairwise=pairwise,
        probe=probe,
        config_echo=cfg.echo(),
    )


# ---------------------------------------------------------------------------
# serialization


def _motion_to_dict(phi) -> dict:
    return {"omega": phi.omega.tolist(), "a": phi.a.tolist()}


def cone_to_dict(cone: SupportCone) -> dict:
    return {
        "apex": cone.apex.tolist(),
        "rays": cone.rays.tolist(),
        "is_sampled": cone.is_sampled,
        "source_samples": cone.source_samples,
    }


def frame_to_dict(frame) -> dict:
    return {
        "origin": frame.origin.tolist(),
        "normal": frame.normal.tolist(),
        "basis_u": frame.basis_u.tolist(),
        "basis_v": frame.basis_v.tolist(),
    }


def section_to_dict(section: PlanarSection) -> dict:
    return {"frame": frame_to_dict(section.frame), "polygon": section.polygon.tolist()}


def symmetry_report_to_dict(report: SymmetryReport) -> dict:
    return {
        "axes": [
            {
                "point": ax.point.tolist(),
                "direction": ax.direction.tolist(),
                "order": ax.order,
            }
            for ax in report.axes
        ],
        "planes": [frame_to_dict(p) for p in report.planes],
        "is_right_circular": report.is_right_circular,
        "half_angle": report.half_angle,
        "group_order": report.group_order,
    }


def report_to_dict(report: VerificationReport) -> dict:
    """JSON-ready view of a verification report (deterministic for fixed
    scene, seed and configuration)."""
    probe = None
    if report.probe is not None:
        probe = {
            "converged": [report.probe.converged1, report.probe.converged2],
            "cauchy": [report.probe.cauchy1, report.probe.cauchy2],
            "limits_differ": report.probe.limits_differ,
            "relative_gap": report.probe.relative_gap,
            "self_map_residual": report.probe.self_map_residual,
            "hypothesis_violated": report.probe.hypothesis_violated,
        }
    return {
        "verdict": report.verdict,
        "witness_pair": list(report.witness_pair) if report.witness_pair else None,
        "congruence_matrix_summary": {
            "max": report.matrix_max,
            "mean": report.matrix_mean,
            "median": report.matrix_median,
        },
        "tol": report.tol,
        "witness_threshold": report.witness_threshold,
        "symmetry_classes": list(report.symmetry_classes),
        "all_right_circular": report.all_right_circular,
        "half_angles": list(report.half_angles),
        "eta_samples": [
            {"apex": a.tolist(), "eta": e.tolist()}
            for a, e in zip(report.apexes, report.eta.etas)
        ],
        "eta_min_separation": report.eta.min_separation,
        "eta_coverage_fraction": report.eta.coverage_fraction,
        "eta_fallback_count": int(report.eta.fallback.sum()),
        "congruent_field": report.sections.congruent_field,
        "section_circles": list(report.sections.circle_flags),
        "section_radii": list(report.sections.circle_radii),
        "continuity_violations": [list(v) for v in report.sections.continuity_violations],
        "probe": probe,
        "config": report.config_echo,
    }


def matrix_to_csv(matrix: np.ndarray) -> str:
    """CSV rendering of the congruence matrix (row/column = apex index)."""
    n = len(matrix)
    lines = ["apex," + ",".join(str(j) for j in range(n))]
    for i in range(n):
        lines.append(str(i) + "," + ",".join(repr(float(x)) for x in matrix[i]))
    return "\n".join(lines) + "\n"
