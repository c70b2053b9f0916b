"""Congruence of support cones over O(3).

Two cones are congruent when some orthogonal map (rotation or reflection)
carries one spherical image onto the other; translations are forced by the
apexes and never searched.  The congruence distance is the optimal-
registration Hausdorff residual between the two ray sets, and a congruence
verdict is that residual thresholded.

Search strategy: align canonical axes, sweep a planar rotation grid about
the common axis (with a reflected branch for the improper component of
O(3)), then polish the best grid candidates with an orthogonal-Procrustes
iteration on symmetrized nearest-neighbour correspondences.  Cones whose
boundary is an exact circle skip the grid: every planar rotation is a
symmetry, so axis alignment alone lands in the optimal basin.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import polar
from scipy.spatial.distance import cdist

from .config import CongruenceConfig
from .cones import SupportCone, canonical_axis
from .errors import RankDeficientError
from .geom import (
    RigidMotion,
    hausdorff_distance,
    minimal_rotation,
    orthonormal_basis,
    rotation_matrix,
    unit,
)

__all__ = [
    "CongruenceResult",
    "PairwiseCongruence",
    "ContinuityProbeResult",
    "procrustes_orthogonal",
    "congruence_distance",
    "pairwise_congruence_matrix",
    "continuity_probe",
]


@dataclass(frozen=True, eq=False)
class CongruenceResult:
    """Optimal registration residual between two cones, with the witness
    motion that achieves it.  The witness maps the first apex to the second
    exactly; for symmetric cones it is one of several optimal witnesses and
    no uniqueness is claimed."""

    distance: float
    witness: RigidMotion
    congruent: bool
    tol: float


def _procrustes_matrix(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Orthogonal matrix minimizing sum |omega p_i - q_i|^2 (det free)."""
    A = P.T @ Q
    U, _, Vt = np.linalg.svd(A)
    return Vt.T @ U.T


def procrustes_orthogonal(P, Q) -> RigidMotion:
    """Best orthogonal registration of matched point sets about the origin.

    Both determinant signs are examined (the unconstrained optimum over
    O(3) is returned).  Collinear correspondences leave the optimum
    underdetermined and are rejected.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if P.shape != Q.shape or P.shape[1] != 3:
        raise ValueError("point sets must be matched (n, 3) arrays")
    if len(P) < 3:
        raise RankDeficientError("need at least 3 correspondences")
    s = np.linalg.svd(P, compute_uv=False)
    if s[1] <= 1e-9 * max(s[0], 1.0):
        raise RankDeficientError("correspondences are collinear")
    return RigidMotion(omega=_procrustes_matrix(P, Q), a=np.zeros(3))


@lru_cache(maxsize=1)
def _icosahedral_rotations() -> tuple[np.ndarray, ...]:
    """The 60 rotations of the icosahedral group, by closure from two
    generators."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    g1 = rotation_matrix(unit([0.0, 1.0, phi]), 2.0 * np.pi / 5.0)
    g2 = rotation_matrix(unit([1.0, 1.0, 1.0]), 2.0 * np.pi / 3.0)
    elems = [np.eye(3)]
    frontier = [np.eye(3)]
    while frontier:
        nxt = []
        for r in frontier:
            for g in (g1, g2):
                cand = g @ r
                if all(np.max(np.abs(cand - e)) > 1e-8 for e in elems):
                    elems.append(cand)
                    nxt.append(cand)
        frontier = nxt
    assert len(elems) == 60
    return tuple(np.round(e, 15) for e in elems)


def _uniform_circle(cone: SupportCone, spread_tol: float) -> bool:
    """Whether the extreme rays lie on a common circle about the canonical
    axis at uniform angular spacing.  For such cones every planar rotation
    by a ray step is a symmetry of the ray set, so the planar grid is
    redundant and phase alignment alone finds the optimal basin."""
    axis = canonical_axis(cone)
    ang = np.arccos(np.clip(cone.rays @ axis, -1.0, 1.0))
    if float(ang.max() - ang.min()) > spread_tol:
        return False
    f1, f2 = orthonormal_basis(axis)
    theta = np.sort(np.arctan2(cone.rays @ f2, cone.rays @ f1))
    gaps = np.diff(np.concatenate([theta, [theta[0] + 2.0 * np.pi]]))
    return float(np.max(np.abs(gaps - 2.0 * np.pi / len(theta)))) <= 1e-9


def _decimate_cyclic(rays: np.ndarray, cap: int) -> np.ndarray:
    n = len(rays)
    if n <= cap:
        return rays
    idx = np.unique((np.arange(cap) * n) // cap)
    return rays[idx]


def _hausdorff_sq_scores(G: np.ndarray) -> np.ndarray:
    """For a stack of inner-product matrices between unit vectors, the
    score min(min_i max_j, min_j max_i); higher score = smaller Hausdorff
    distance (d^2 = 2 - 2 * score)."""
    m1 = G.max(axis=2).min(axis=1)
    m2 = G.max(axis=1).min(axis=1)
    return np.minimum(m1, m2)


def _top_local_maxima(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k best local maxima of a cyclic score curve (falls
    back to the global argmax when the curve is flat)."""
    left = np.roll(scores, 1)
    right = np.roll(scores, -1)
    peaks = np.nonzero((scores >= left) & (scores >= right))[0]
    if len(peaks) == 0:
        peaks = np.array([int(np.argmax(scores))])
    order = np.argsort(scores[peaks])[::-1]
    return peaks[order[:k]]


def _tangent_anchor(rays: np.ndarray, axis: np.ndarray) -> np.ndarray | None:
    """Equivariant in-plane reference: the tangential component of the mean
    ray direction.  None when the cone is too symmetric to define one."""
    m = rays.mean(axis=0)
    t = m - float(m @ axis) * axis
    n = float(np.linalg.norm(t))
    if n <= 1e-6:
        return None
    t = t / n
    # second orthogonalization pass: normalizing a small component degrades
    # orthogonality to the axis beyond frame tolerance
    t = t - float(t @ axis) * axis
    return t / np.linalg.norm(t)


def _aligned_frames(rays1, rays2, ax1, ax2):
    """Axis-aligning base rotation plus the in-plane phase frame at axis2.

    Both are anchored to the cones' own geometry wherever possible, so the
    whole candidate construction commutes with rigid motions of either
    cone; that is what makes the reported distance motion-invariant."""
    t1 = _tangent_anchor(rays1, ax1)
    t2 = _tangent_anchor(rays2, ax2)
    if t1 is not None and t2 is not None:
        F1 = np.column_stack([ax1, t1, np.cross(ax1, t1)])
        F2 = np.column_stack([ax2, t2, np.cross(ax2, t2)])
        return F2 @ F1.T, t2, np.cross(ax2, t2)
    f1, f2 = orthonormal_basis(ax2)
    return minimal_rotation(ax1, ax2), f1, f2


def _grid_candidates(
    rays1: np.ndarray,
    rays2: np.ndarray,
    axis2: np.ndarray,
    base: np.ndarray,
    f1: np.ndarray,
    f2: np.ndarray,
    cfg: CongruenceConfig,
) -> list[np.ndarray]:
    """Candidates from the planar grid about axis2 applied after the
    axis-aligning base rotation, for both branches of O(3).  The best
    local maxima of the score curve are kept per branch, so distinct
    basins get distinct refinement seeds."""
    P = _decimate_cyclic(rays1, cfg.grid_max_rays) @ base.T
    Q = _decimate_cyclic(rays2, cfg.grid_max_rays)
    a, b, z = P @ f1, P @ f2, P @ axis2
    al, be, ze = Q @ f1, Q @ f2, Q @ axis2
    Z = np.outer(z, ze).astype(np.float32)
    ts = 2.0 * np.pi * np.arange(cfg.grid_steps) / cfg.grid_steps
    cos_t = np.cos(ts)[:, None, None].astype(np.float32)
    sin_t = np.sin(ts)[:, None, None].astype(np.float32)
    refl = np.eye(3) - 2.0 * np.outer(f2, f2)  # mirror across plane(axis2, f1)
    out: list[np.ndarray] = []
    for sign in (1.0, -1.0):
        bb = sign * b
        C = (np.outer(a, al) + np.outer(bb, be)).astype(np.float32)
        S = (np.outer(a, be) - np.outer(bb, al)).astype(np.float32)
        scores = _hausdorff_sq_scores(cos_t * C + sin_t * S + Z)
        for idx in _top_local_maxima(scores, cfg.top_candidates):
            rot = rotation_matrix(axis2, float(ts[idx]))
            out.append(rot @ base if sign > 0 else rot @ refl @ base)
    return out


def _icp_refine(
    rays1: np.ndarray,
    rays2: np.ndarray,
    omega0: np.ndarray,
    cfg: CongruenceConfig,
    max_iter: int | None = None,
) -> tuple[float, np.ndarray]:
    """Polish a candidate by orthogonal Procrustes on the union of both
    directed nearest-neighbour matchings (symmetric in the two cones).
    Returns the best Hausdorff residual seen and its orthogonal map."""
    omega = omega0
    best_h = np.inf
    best_omega = omega0
    for _ in range(max_iter if max_iter is not None else cfg.icp_max_iter):
        D = cdist(rays1 @ omega.T, rays2)
        h = max(D.min(axis=1).max(), D.min(axis=0).max())
        if h < best_h:
            best_h = float(h)
            best_omega = omega
        src = np.vstack([rays1, rays1[D.argmin(axis=0)]])
        dst = np.vstack([rays2[D.argmin(axis=1)], rays2])
        omega_new = _procrustes_matrix(src, dst)
        if np.max(np.abs(omega_new - omega)) < cfg.icp_converged:
            break
        omega = omega_new
    D = cdist(rays1 @ omega.T, rays2)
    h = float(max(D.min(axis=1).max(), D.min(axis=0).max()))
    if h < best_h:
        best_h, best_omega = h, omega
    return best_h, best_omega


def _phase_angle(vec: np.ndarray, axis: np.ndarray) -> float:
    f1, f2 = orthonormal_basis(axis)
    return float(np.arctan2(vec @ f2, vec @ f1))


def congruence_distance(
    c1: SupportCone,
    c2: SupportCone,
    config: CongruenceConfig | None = None,
    tol: float | None = None,
) -> CongruenceResult:
    """Minimum over O(3) of the Hausdorff distance between the spherical
    images, with the witness motion achieving it.

    The verdict threshold defaults to the polyhedral tolerance, or the
    sampled tolerance when either cone was sampled from a smooth body.
    """
    cfg = config or CongruenceConfig()
    sampled = c1.is_sampled or c2.is_sampled
    if tol is None:
        tol = cfg.tol_sampled if sampled else cfg.tol_polyhedral
    r1, r2 = c1.rays, c2.rays
    ax1, ax2 = canonical_axis(c1), canonical_axis(c2)

    candidates: list[np.ndarray]
    if _uniform_circle(c1, cfg.fast_circular_spread) and _uniform_circle(c2, cfg.fast_circular_spread):
        # exact circles: planar rotations are symmetries, only the phase of
        # the sample points needs matching
        base = minimal_rotation(ax1, ax2)
        dt = _phase_angle(r2[0], ax2) - _phase_angle(base @ r1[0], ax2)
        rot = rotation_matrix(ax2, dt)
        f1, f2 = orthonormal_basis(ax2)
        refl = np.eye(3) - 2.0 * np.outer(f2, f2)
        dt_r = _phase_angle(r2[0], ax2) - _phase_angle(refl @ base @ r1[0], ax2)
        candidates = [rot @ base, rotation_matrix(ax2, dt_r) @ refl @ base]
    else:
        base, f1, f2 = _aligned_frames(r1, r2, ax1, ax2)
        g1, g2 = _aligned_frames(r2, r1, ax2, ax1)[1:]
        # the reversed problem's candidate grid is the exact transpose of
        # this one; refining the union makes the distance symmetric in the
        # two cones by construction
        candidates = _grid_candidates(r1, r2, ax2, base, f1, f2, cfg)
        candidates += [m.T for m in _grid_candidates(r2, r1, ax1, base.T, g1, g2, cfg)]
        if min(c1.axis_quality, c2.axis_quality) < cfg.axis_quality_floor:
            for rot in _icosahedral_rotations()[: cfg.multistart_seeds]:
                candidates.append(rot)
                candidates.append(-rot)

    # short polish on every candidate, full convergence on the winner only
    best_h = np.inf
    best_omega = candidates[0]
    for cand in candidates:
        h, om = _icp_refine(r1, r2, cand, cfg, max_iter=min(8, cfg.icp_max_iter))
        if h < best_h:
            best_h, best_omega = h, om
    h, om = _icp_refine(r1, r2, best_omega, cfg)
    if h < best_h:
        best_h, best_omega = h, om
    best_omega, _ = polar(best_omega)  # snap accumulated round-off back onto O(3)
    witness = RigidMotion(omega=best_omega, a=c2.apex - best_omega @ c1.apex)
    return CongruenceResult(
        distance=best_h, witness=witness, congruent=best_h <= tol, tol=tol
    )


@dataclass(frozen=True, eq=False)
class PairwiseCongruence:
    """Symmetric matrix of congruence distances over a cone list, with the
    per-pair results (witnesses included) keyed by index pairs i < j."""

    matrix: np.ndarray
    results: dict


def _pair_worker(args):
    i, j, c1, c2, cfg, tol = args
    return i, j, congruence_distance(c1, c2, cfg, tol)


def pairwise_congruence_matrix(
    cones: list[SupportCone],
    config: CongruenceConfig | None = None,
    tol: float | None = None,
    jobs: int = 1,
) -> PairwiseCongruence:
    """All-pairs congruence distances.  Entries are independent; with
    ``jobs > 1`` they are computed in a process pool with deterministic
    assembly (identical inputs and configuration give identical output
    regardless of scheduling)."""
    n = len(cones)
    if n < 2:
        raise ValueError("need at least 2 cones")
    cfg = config or CongruenceConfig()
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    results: dict[tuple[int, int], CongruenceResult] = {}
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        tasks = [(i, j, cones[i], cones[j], cfg, tol) for i, j in pairs]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, j, res in pool.map(_pair_worker, tasks, chunksize=32):
                results[(i, j)] = res
    else:
        for i, j in pairs:
            results[(i, j)] = congruence_distance(cones[i], cones[j], cfg, tol)
    matrix = np.zeros((n, n))
    for (i, j), res in results.items():
        matrix[i, j] = matrix[j, i] = res.distance
    return PairwiseCongruence(matrix=matrix, results=results)


@dataclass(frozen=True, eq=False)
class ContinuityProbeResult:
    """Witness-limit behaviour along two approach sequences to the same
    boundary point.

    ``limits_differ`` realizes the two-limit obstruction; when the
    congruence residuals vanish as well, ``self_map_residual`` reports how
    closely the relative limit maps the reference cone onto itself (it is
    then a symmetry of that cone).  Residuals that do not vanish mean the
    all-cones-congruent hypothesis fails for the scene.
    """

    omegas1: tuple
    omegas2: tuple
    residuals1: tuple
    residuals2: tuple
    limit1: np.ndarray
    limit2: np.ndarray
    converged1: bool
    converged2: bool
    cauchy1: float
    cauchy2: float
    limits_differ: bool
    relative_gap: float
    self_map_residual: float | None
    hypothesis_violated: bool


def _cauchy_gap(mats: list[np.ndarray], window: int) -> float:
    tail = mats[-window:]
    gap = 0.0
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            gap = max(gap, float(np.linalg.norm(tail[i] - tail[j])))
    return gap


def continuity_probe(
    cone_fn,
    x0,
    xstar,
    seq1,
    seq2,
    config: CongruenceConfig | None = None,
    tol: float | None = None,
    witness_rule=None,
) -> ContinuityProbeResult:
    """Track congruence witnesses from the cone at ``x0`` to the cones along
    two apex sequences converging to ``xstar``.

    ``cone_fn`` maps an apex to its support cone.  When ``witness_rule`` is
    given it assigns the orthogonal part per apex (for closed-form frame
    rules); otherwise the optimizer's witnesses are used.  Residuals always
    come from the optimal registration.
    """
    cfg = config or CongruenceConfig()
    x1 = np.asarray(seq1, dtype=float)
    x2 = np.asarray(seq2, dtype=float)
    xs = np.asarray(xstar, dtype=float)
    for seq in (x1, x2):
        if len(seq) < cfg.probe_window:
            raise ValueError("approach sequences are too short for the probe window")
        d = np.linalg.norm(seq - xs, axis=1)
        if d[-1] > 1e-3 * (1.0 + np.linalg.norm(xs)) or np.any(np.diff(d) > 1e-12):
            raise ValueError("sequences must converge monotonically to xstar")

    c0 = cone_fn(np.asarray(x0, dtype=float))
    sampled = c0.is_sampled
    if tol is None:
        tol = cfg.tol_sampled if sampled else cfg.tol_polyhedral

    def track(seq):
        omegas, residuals = [], []
        for x in seq:
            cx = cone_fn(x)
            res = congruence_distance(c0, cx, cfg, tol)
            residuals.append(res.distance)
            if witness_rule is not None:
                omegas.append(np.asarray(witness_rule(x), dtype=float))
            else:
                omegas.append(res.witness.omega)
        return omegas, residuals

    om1, res1 = track(x1)
    om2, res2 = track(x2)
    cauchy1 = _cauchy_gap(om1, cfg.probe_window)
    cauchy2 = _cauchy_gap(om2, cfg.probe_window)
    converged1 = cauchy1 <= cfg.probe_cauchy_tol
    converged2 = cauchy2 <= cfg.probe_cauchy_tol
    L1, L2 = om1[-1], om2[-1]
    rel = L1.T @ L2
    relative_gap = float(np.linalg.norm(rel - np.eye(3)))
    limits_differ = relative_gap > cfg.probe_differ_tol
    residual_tail = max(res1[-1], res2[-1])
    hypothesis_violated = residual_tail > tol
    self_map = None
    if limits_differ and not hypothesis_violated:
        self_map = hausdorff_distance(c0.rays @ rel.T, c0.rays)
    return ContinuityProbeResult(
        omegas1=tuple(om1),
        omegas2=tuple(om2),
        residuals1=tuple(res1),
        residuals2=tuple(res2),
        limit1=L1,
        limit2=L2,
        converged1=converged1,
        converged2=converged2,
        cauchy1=cauchy1,
        cauchy2=cauchy2,
        limits_differ=limits_differ,
        relative_gap=relative_gap,
        self_map_residual=self_map,
        hypothesis_violated=hypothesis_violated,
    )
