"""Vector-field topology on triangulated spheres, and the obstruction to a
continuous global choice of frames.

Two computable facts are exercised here.  First, the index sum of any
tangent field on a closed genus-0 mesh equals 2, so every such field
vanishes somewhere (no continuous nonvanishing tangent field exists).
Second, the minimal-rotation frame rule taking a base direction to a
varying direction u is continuous everywhere except the antipode of the
base, where different approach meridians produce different limit frames;
no choice of rule removes the singular point, only moves it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import EPS_GEO, EPS_ORTHO
from .errors import IndeterminateIndexError, FrameSingularityError
from .geom import RigidMotion, minimal_rotation, orthonormal_basis, rotation_matrix, unit

__all__ = [
    "TriMesh",
    "TangentField",
    "FrameField",
    "TwoSequenceLimits",
    "PoincareHopfReport",
    "icosphere",
    "rotational_field",
    "projected_constant_field",
    "polynomial_field",
    "vertex_index",
    "poincare_hopf_sum",
    "poincare_hopf_report",
    "meridian_frame",
    "meridian_frame_field",
    "two_sequence_limits",
]

log = logging.getLogger(__name__)

#: Tangency tolerance for per-vertex field vectors.
TANGENT_TOL = 1e-10

#: Size of the deterministic tie-breaking perturbation (radians).
TIE_PERTURBATION = 1e-12


@dataclass(frozen=True, eq=False)
class TriMesh:
    """A closed, consistently oriented triangulation of the unit sphere.

    Validated at construction: unit vertices, every edge shared by exactly
    two triangles with opposite orientations, Euler characteristic 2, and
    outward winding (positive enclosed volume).
    """

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        verts = np.ascontiguousarray(self.vertices, dtype=float)
        tris = np.ascontiguousarray(self.triangles, dtype=int)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise ValueError("vertices must be an (n, 3) array")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise ValueError("triangles must be an (m, 3) index array")
        if np.max(np.abs(np.linalg.norm(verts, axis=1) - 1.0)) > EPS_ORTHO:
            raise ValueError("every vertex must lie on the unit sphere")
        directed: set[tuple[int, int]] = set()
        for a, b, c in tris:
            for e in ((a, b), (b, c), (c, a)):
                if e in directed:
                    raise ValueError("inconsistent orientation: repeated directed edge")
                directed.add((int(e[0]), int(e[1])))
        for a, b in directed:
            if (b, a) not in directed:
                raise ValueError("surface is not closed: boundary edge found")
        V = len(verts)
        E = len(directed) // 2
        F = len(tris)
        if V - E + F != 2:
            raise ValueError(f"Euler characteristic is {V - E + F}, expected 2")
        vol = float(np.einsum("ij,ij->", np.cross(verts[tris[:, 0]], verts[tris[:, 1]]), verts[tris[:, 2]]))
        if vol <= 0:
            raise ValueError("triangles must wind outward (positive volume)")
        verts.flags.writeable = False
        tris.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

    def edge_triangles(self) -> dict[tuple[int, int], list[int]]:
        """Undirected edge -> incident triangle indices."""
        inc: dict[tuple[int, int], list[int]] = {}
        for t, (a, b, c) in enumerate(self.triangles):
            for i, j in ((a, b), (b, c), (c, a)):
                key = (int(min(i, j)), int(max(i, j)))
                inc.setdefault(key, []).append(t)
        return inc

    def vertex_link(self, v: int) -> list[int]:
        """Neighbours of ``v`` in cyclic order consistent with the mesh
        orientation."""
        succ: dict[int, int] = {}
        for a, b, c in self.triangles:
            tri = (int(a), int(b), int(c))
            if v in tri:
                k = tri.index(v)
                succ[tri[(k + 1) % 3]] = tri[(k + 2) % 3]
        if not succ:
            raise ValueError(f"vertex {v} belongs to no triangle")
        start = next(iter(succ))
        cycle = [start]
        while True:
            nxt = succ[cycle[-1]]
            if nxt == start:
                break
            cycle.append(nxt)
        if len(cycle) != len(succ):
            raise ValueError(f"link of vertex {v} is not a single cycle")
        return cycle

    def write_off(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("OFF\n")
            fh.write(f"{len(self.vertices)} {len(self.triangles)} 0\n")
            for p in self.vertices:
                fh.write(f"{float(p[0])!r} {float(p[1])!r} {float(p[2])!r}\n")
            for t in self.triangles:
                fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


_ICO_PHI = (1.0 + np.sqrt(5.0)) / 2.0

_ICO_VERTS = np.array(
    [
        [-1, _ICO_PHI, 0], [1, _ICO_PHI, 0], [-1, -_ICO_PHI, 0], [1, -_ICO_PHI, 0],
        [0, -1, _ICO_PHI], [0, 1, _ICO_PHI], [0, -1, -_ICO_PHI], [0, 1, -_ICO_PHI],
        [_ICO_PHI, 0, -1], [_ICO_PHI, 0, 1], [-_ICO_PHI, 0, -1], [-_ICO_PHI, 0, 1],
    ],
    dtype=float,
)

_ICO_FACES = np.array(
    [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ],
    dtype=int,
)


def icosphere(frequency: int, rotate: np.ndarray | None = None) -> TriMesh:
    """Geodesic sphere: each icosahedron face split into ``frequency**2``
    triangles on a barycentric lattice, vertices renormalized.

    ``rotate`` applies an orthogonal matrix to all vertices, e.g. to move
    mesh vertices away from the zeros of a field under study.
    """
    if frequency < 1:
        raise ValueError("frequency must be at least 1")
    f = int(frequency)
    verts: list[np.ndarray] = []
    index: dict[tuple, int] = {}
    tris: list[list[int]] = []

    def vertex_id(corners: tuple[int, int, int], bary: tuple[int, int, int]) -> int:
        item = tuple(sorted((c, w) for c, w in zip(corners, bary) if w > 0))
        if item not in index:
            p = sum(w * _ICO_VERTS[c] for c, w in zip(corners, bary)) / f
            index[item] = len(verts)
            verts.append(p / np.linalg.norm(p))
        return index[item]

    for face in _ICO_FACES:
        corners = (int(face[0]), int(face[1]), int(face[2]))
        for i in range(f):
            for j in range(f - i):
                k = f - i - j
                v00 = vertex_id(corners, (k, i, j))
                v10 = vertex_id(corners, (k - 1, i + 1, j))
                v01 = vertex_id(corners, (k - 1, i, j + 1))
                tris.append([v00, v10, v01])
                if k > 1:
                    v11 = vertex_id(corners, (k - 2, i + 1, j + 1))
                    tris.append([v10, v11, v01])
    vertices = np.array(verts)
    if rotate is not None:
        vertices = vertices @ np.asarray(rotate, dtype=float).T
    return TriMesh(vertices=vertices, triangles=np.array(tris, dtype=int))


@dataclass(frozen=True, eq=False)
class TangentField:
    """A per-vertex tangent vector field on a sphere mesh."""

    mesh: TriMesh
    vectors: np.ndarray

    def __post_init__(self):
        vecs = np.ascontiguousarray(self.vectors, dtype=float)
        if vecs.shape != self.mesh.vertices.shape:
            raise ValueError("need one vector per mesh vertex")
        tangency = np.abs(np.einsum("ij,ij->i", vecs, self.mesh.vertices))
        if float(tangency.max()) > TANGENT_TOL:
            raise ValueError("vectors must be tangent to the sphere at their vertices")
        vecs.flags.writeable = False
        object.__setattr__(self, "vectors", vecs)


def rotational_field(mesh: TriMesh, axis=(0.0, 0.0, 1.0)) -> TangentField:
    """u -> axis x u; vanishes at the two points where u is parallel to
    the axis."""
    ax = unit(axis)
    return TangentField(mesh=mesh, vectors=np.cross(ax, mesh.vertices))


def projected_constant_field(mesh: TriMesh, direction=(0.0, 0.0, 1.0)) -> TangentField:
    """Tangential part of a constant vector; a sink/source pair at the two
    points aligned with the direction."""
    d = unit(direction)
    u = mesh.vertices
    return TangentField(mesh=mesh, vectors=d - (u @ d)[:, None] * u)


def polynomial_field(mesh: TriMesh, seed: int = 0) -> TangentField:
    """Tangential projection of a random low-degree vector polynomial."""
    rng = np.random.default_rng(seed)
    c0 = rng.standard_normal(3)
    c1 = rng.standard_normal((3, 3))
    c2 = rng.standard_normal((3, 3, 3))
    u = mesh.vertices
    raw = c0 + u @ c1.T + np.einsum("kij,ni,nj->nk", c2, u, u)
    vecs = raw - np.einsum("ni,ni->n", raw, u)[:, None] * u
    return TangentField(mesh=mesh, vectors=vecs)


def _wrap(angle: np.ndarray) -> np.ndarray:
    return (angle + np.pi) % (2.0 * np.pi) - np.pi


def _perturbed(field: TangentField) -> TangentField:
    """Rotate every vector by a tiny fixed angle about its vertex normal;
    deterministic tie-breaking for angle increments of exactly pi."""
    u = field.mesh.vertices
    v = field.vectors
    tilted = v + TIE_PERTURBATION * np.cross(u, v)
    tilted = tilted - np.einsum("ni,ni->n", tilted, u)[:, None] * u
    return TangentField(mesh=field.mesh, vectors=tilted)


def vertex_index(field: TangentField, v: int) -> int:
    """Winding number of the field around vertex ``v``: neighbour vectors
    are parallel-transported into the tangent plane at ``v`` (minimal
    rotation along each edge) and the signed angle turns around the link
    are summed.

    Counts the zero at a vertex where the field vanishes; requires the
    field to be nonzero on the whole link.
    """
    mesh = field.mesh
    link = mesh.vertex_link(v)
    base = mesh.vertices[v]
    e1, e2 = orthonormal_basis(base)
    angles = []
    for w in link:
        vec = field.vectors[w]
        if np.linalg.norm(vec) <= EPS_GEO:
            raise IndeterminateIndexError(
                f"field vanishes at link vertex {w}; refine the mesh or perturb the field"
            )
        transported = minimal_rotation(mesh.vertices[w], base) @ vec
        transported = transported - float(transported @ base) * base
        if np.linalg.norm(transported) <= EPS_GEO:
            raise IndeterminateIndexError(
                f"transported field at link vertex {w} is normal to the sphere"
            )
        angles.append(np.arctan2(float(transported @ e2), float(transported @ e1)))
    angles = np.array(angles)
    inc = _wrap(np.roll(angles, -1) - angles)
    if np.any(np.abs(np.abs(inc) - np.pi) < TIE_PERTURBATION):
        log.info("vertex %d: breaking an exact half-turn tie by perturbation", v)
        return vertex_index(_perturbed(field), v)
    total = float(inc.sum()) / (2.0 * np.pi)
    k = int(np.round(total))
    if abs(total - k) > 1e-6:
        raise IndeterminateIndexError(f"non-integer winding {total} at vertex {v}")
    return k


def _face_windings(field: TangentField) -> np.ndarray:
    """Integer winding of the field around each oriented face, computed in
    the face plane.  Along a straight segment a linearly interpolated
    nonvanishing field turns by less than pi, so the wrapped corner
    differences are exact and the windings partition the field's zeros
    among the faces."""
    mesh = field.mesh
    verts = mesh.vertices
    tris = mesh.triangles
    vecs = field.vectors
    norms = np.linalg.norm(vecs, axis=1)
    if float(norms.min()) <= EPS_GEO:
        raise IndeterminateIndexError(
            "field vanishes at a mesh vertex; zeros must be isolated away "
            "from vertices for the index sum"
        )
    A, B, C = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    n = np.cross(B - A, C - A)
    n = n / np.linalg.norm(n, axis=1)[:, None]
    e1 = B - A
    e1 = e1 / np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(n, e1)
    psis = []
    for corner in range(3):
        w = vecs[tris[:, corner]]
        w_in = w - np.einsum("ij,ij->i", w, n)[:, None] * n
        wn = np.linalg.norm(w_in, axis=1)
        if float(wn.min()) <= EPS_GEO:
            raise IndeterminateIndexError(
                "field is normal to a face plane at a corner; refine the mesh"
            )
        psis.append(np.arctan2(np.einsum("ij,ij->i", w_in, e2), np.einsum("ij,ij->i", w_in, e1)))
    p0, p1, p2 = psis
    inc = _wrap(p1 - p0) + _wrap(p2 - p1) + _wrap(p0 - p2)
    ties = (
        (np.abs(np.abs(_wrap(p1 - p0)) - np.pi) < TIE_PERTURBATION)
        | (np.abs(np.abs(_wrap(p2 - p1)) - np.pi) < TIE_PERTURBATION)
        | (np.abs(np.abs(_wrap(p0 - p2)) - np.pi) < TIE_PERTURBATION)
    )
    if np.any(ties):
        log.info("breaking %d exact half-turn ties by perturbation", int(ties.sum()))
        return _face_windings(_perturbed(field))
    winding = inc / (2.0 * np.pi)
    k = np.round(winding).astype(int)
    if float(np.max(np.abs(winding - k))) > 1e-9:
        raise IndeterminateIndexError("non-integer face winding")
    return k


@dataclass(frozen=True, eq=False)
class PoincareHopfReport:
    """Index census of a tangent field: total (always 2 on valid spheres),
    nonzero indices by face, and the same indices attributed to the face
    corner where the field is smallest (the natural zero carrier)."""

    total: int
    face_indices: dict
    vertex_indices: dict


def poincare_hopf_report(field: TangentField) -> PoincareHopfReport:
    k = _face_windings(field)
    nz = np.nonzero(k)[0]
    face_indices = {int(f): int(k[f]) for f in nz}
    norms = np.linalg.norm(field.vectors, axis=1)
    vertex_indices: dict[int, int] = {}
    for f in nz:
        corners = field.mesh.triangles[f]
        carrier = int(corners[np.argmin(norms[corners])])
        vertex_indices[carrier] = vertex_indices.get(carrier, 0) + int(k[f])
    return PoincareHopfReport(
        total=int(k.sum()), face_indices=face_indices, vertex_indices=vertex_indices
    )


def poincare_hopf_sum(field: TangentField) -> int:
    """Sum of the field's zero indices over the whole mesh; equals the
    sphere's Euler characteristic, 2, for every valid field."""
    return int(_face_windings(field).sum())


def meridian_frame(u, base) -> RigidMotion:
    """The minimal rotation taking ``base`` to ``u`` (no translation).

    Continuous on the sphere minus the antipode of ``base``; at the
    antipode the left and right meridian limits disagree and the rule has
    no continuous extension, so evaluation there raises."""
    b = unit(base)
    d = unit(u)
    if float(np.linalg.norm(d + b)) <= EPS_GEO:
        raise FrameSingularityError(
            "minimal-rotation rule is singular at the antipode of the base"
        )
    c = float(np.dot(b, d))
    if c > 1.0 - 1e-15:
        return RigidMotion.identity()
    axis = unit(np.cross(b, d))
    return RigidMotion(omega=rotation_matrix(axis, float(np.arccos(np.clip(c, -1.0, 1.0)))), a=np.zeros(3))


@dataclass(frozen=True, eq=False)
class FrameField:
    """A rule assigning to each unit vector u an orthogonal frame taking
    ``base`` to u, together with the directions where the rule is singular."""

    base: np.ndarray
    rule: Callable[[np.ndarray], RigidMotion]
    singular_set: tuple


def meridian_frame_field(base) -> FrameField:
    b = unit(base)
    return FrameField(base=b, rule=lambda u: meridian_frame(u, b), singular_set=(-b,))


@dataclass(frozen=True, eq=False)
class TwoSequenceLimits:
    """Limits of the minimal-rotation frames along two meridians into the
    singular antipode.  Each limit is a half-turn about the horizontal
    axis perpendicular to its meridian; distinct meridians (mod pi) give
    distinct limits."""

    limit1: RigidMotion
    limit2: RigidMotion
    cauchy1: float
    cauchy2: float
    relative_gap: float


def two_sequence_limits(base, phi1: float, phi2: float, steps: int = 32) -> TwoSequenceLimits:
    """Evaluate the minimal-rotation rule along two great-circle meridians
    at longitudes ``phi1`` and ``phi2`` approaching the antipode of
    ``base``; returns the two numerical limit frames.

    Each sequence is checked to be Cauchy (Frobenius, over the last three
    terms).  The relative gap ``|limit1^-1 limit2 - I|_F`` quantifies how
    far the two limits disagree.
    """
    if steps < 8:
        raise ValueError("need at least 8 steps to resolve the limits")
    b = unit(base)
    e1, e2 = orthonormal_basis(b)
    # polar offsets from the antipode: geometric decay into the regular
    # neighbourhood of the singular point, stopping above the guard radius
    deltas = np.geomspace(np.pi / 3.0, 2e-9, steps)

    def track(phi: float):
        m = np.cos(phi) * e1 + np.sin(phi) * e2
        omegas = []
        for d in deltas:
            u = -np.cos(d) * b + np.sin(d) * m
            omegas.append(meridian_frame(u, b).omega)
        gap = 0.0
        for i in range(steps - 3, steps):
            for j in range(i + 1, steps):
                gap = max(gap, float(np.linalg.norm(omegas[i] - omegas[j])))
        return omegas[-1], gap

    L1, cauchy1 = track(float(phi1))
    L2, cauchy2 = track(float(phi2))
    rel = float(np.linalg.norm(L1.T @ L2 - np.eye(3)))
    return TwoSequenceLimits(
        limit1=RigidMotion(omega=L1, a=np.zeros(3)),
        limit2=RigidMotion(omega=L2, a=np.zeros(3)),
        cauchy1=cauchy1,
        cauchy2=cauchy2,
        relative_gap=rel,
    )
