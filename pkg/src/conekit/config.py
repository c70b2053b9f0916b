"""Tolerance constants and run-configuration dataclasses.

Every numeric threshold used by the geometry lives here, so predicates in
different modules agree on what "equal" means.  All geometry is plain
64-bit floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

#: Geometric predicate tolerance: salience margins, extremeness tests,
#: membership tests.
EPS_GEO = 1e-9

#: Unit-length / orthogonality tolerance for frames and orthogonal matrices.
EPS_ORTHO = 1e-12

#: Tolerance on ``abs(det) - 1`` for orthogonal parts of rigid motions.
EPS_DET = 1e-9

#: Apexes closer than this to the body surface are rejected; the tangent
#: cone degenerates (half-angles approach pi/2) as the apex approaches it.
APEX_MARGIN = 1e-6

#: Orthogonal parts are re-projected via polar decomposition once this many
#: compositions have accumulated, to control round-off drift.
REPROJECT_AFTER = 16

#: Congruence decision threshold for cones built from polytope vertices.
TOL_POLYHEDRAL = 1e-6

#: Congruence decision threshold for cones sampled from smooth bodies,
#: where discretization error dominates the residual.
TOL_SAMPLED = 1e-3


@dataclass(frozen=True)
class CongruenceConfig:
    """Knobs for the registration search over O(3).

    The defaults implement: canonical-axis alignment, a 720-step planar
    rotation grid (plus the reflected branch), local refinement by
    orthogonal-Procrustes iteration on nearest-neighbour correspondences,
    and a 60-seed orientation multistart reserved for cones whose canonical
    axis is numerically unreliable.
    """

    tol_polyhedral: float = TOL_POLYHEDRAL
    tol_sampled: float = TOL_SAMPLED
    # planar-rotation grid resolution after axis alignment
    grid_steps: int = 720
    # cyclic decimation cap for the grid stage; refinement uses all rays
    grid_max_rays: int = 24
    # grid candidates kept per branch (rotation / reflection) for refinement
    top_candidates: int = 2
    icp_max_iter: int = 100
    icp_converged: float = 1e-12
    # orientation seeds used when a canonical axis is unreliable
    multistart_seeds: int = 60
    # canonical-axis quality below this triggers the multistart fallback
    axis_quality_floor: float = 0.05
    # boundary angular spread under which a cone counts as an exact circle;
    # the planar grid is then redundant (every planar rotation is a symmetry)
    fast_circular_spread: float = 1e-9
    # witness-limit probe: trailing window size and Cauchy threshold
    probe_window: int = 5
    probe_cauchy_tol: float = 1e-6
    # Frobenius gap above which two limit witnesses count as distinct
    probe_differ_tol: float = 1e-3


@dataclass(frozen=True)
class HarnessConfig:
    """Scene-level configuration, echoed verbatim into every report.

    ``tol`` is the congruence flag threshold; ``None`` resolves to the
    kind-based default (polyhedral vs sampled cones).  The witness
    threshold defaults to ``10 * tol``, leaving an inconclusive band
    between the two rather than forcing a binary verdict on borderline
    scenes.
    """

    tol: float | None = None
    witness_threshold: float | None = None
    samples_per_cone: int = 256
    jobs: int = 1
    # icosphere frequency of the coverage grid used for the eta statistic
    coverage_frequency: int = 3
    congruence: CongruenceConfig = field(default_factory=CongruenceConfig)

    def resolve_tol(self, sampled: bool) -> float:
        if self.tol is not None:
            return self.tol
        return self.congruence.tol_sampled if sampled else self.congruence.tol_polyhedral

    def resolve_witness_threshold(self, sampled: bool) -> float:
        if self.witness_threshold is not None:
            return self.witness_threshold
        return 10.0 * self.resolve_tol(sampled)

    def echo(self) -> dict:
        """Configuration block for report serialization."""
        return {
            "tol": self.tol,
            "witness_threshold": self.witness_threshold,
            "samples_per_cone": self.samples_per_cone,
            "jobs": self.jobs,
            "coverage_frequency": self.coverage_frequency,
            "congruence": {
                "tol_polyhedral": self.congruence.tol_polyhedral,
                "tol_sampled": self.congruence.tol_sampled,
                "grid_steps": self.congruence.grid_steps,
                "grid_max_rays": self.congruence.grid_max_rays,
                "top_candidates": self.congruence.top_candidates,
                "icp_max_iter": self.congruence.icp_max_iter,
                "icp_converged": self.congruence.icp_converged,
                "multistart_seeds": self.congruence.multistart_seeds,
                "axis_quality_floor": self.congruence.axis_quality_floor,
                "fast_circular_spread": self.congruence.fast_circular_spread,
                "probe_window": self.congruence.probe_window,
                "probe_cauchy_tol": self.congruence.probe_cauchy_tol,
                "probe_differ_tol": self.congruence.probe_differ_tol,
            },
        }
