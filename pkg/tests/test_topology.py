import numpy as np
import pytest

from conekit.errors import FrameSingularityError, IndeterminateIndexError
from conekit.geom import minimal_rotation, rotation_matrix, unit
from conekit.topology import (
    TangentField,
    TriMesh,
    icosphere,
    meridian_frame,
    meridian_frame_field,
    poincare_hopf_report,
    poincare_hopf_sum,
    polynomial_field,
    projected_constant_field,
    rotational_field,
    two_sequence_limits,
    vertex_index,
)
from oracles import dense_winding

E3 = np.array([0.0, 0.0, 1.0])

# keeps mesh vertices away from the test fields' zeros at +-e3
GENERIC_TILT = rotation_matrix(unit([0.3, 0.5, 0.81]), 0.4321)


def pole_mesh(frequency: int) -> TriMesh:
    """Icosphere rotated so one vertex sits exactly at the north pole."""
    base = icosphere(frequency)
    R = minimal_rotation(base.vertices[0], E3)
    return icosphere(frequency, rotate=R)


class TestTriMesh:
    def test_icosphere_counts_and_euler(self):
        for f in (1, 2, 3, 8):
            mesh = icosphere(f)
            V, Fc = len(mesh.vertices), len(mesh.triangles)
            E = 3 * Fc // 2
            assert Fc == 20 * f * f
            assert V - E + Fc == 2
            assert np.max(np.abs(np.linalg.norm(mesh.vertices, axis=1) - 1)) <= 1e-12

    def test_edge_incidence_is_two_sided(self):
        mesh = icosphere(4)
        inc = mesh.edge_triangles()
        assert all(len(ts) == 2 for ts in inc.values())

    def test_open_surface_rejected(self):
        verts = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1]], float)
        with pytest.raises(ValueError):
            TriMesh(vertices=verts, triangles=np.array([[0, 1, 2]]))

    def test_off_round_trip(self, tmp_path):
        mesh = icosphere(3)
        path = tmp_path / "sphere.off"
        mesh.write_off(path)
        from conekit.geom import read_off

        verts, faces = read_off(path)
        again = TriMesh(vertices=verts, triangles=np.array(faces, dtype=int))
        assert len(again.vertices) == len(mesh.vertices)
        assert len(again.triangles) == len(mesh.triangles)


class TestTangentField:
    def test_fields_are_tangent(self):
        mesh = icosphere(8, rotate=GENERIC_TILT)
        for field in (
            rotational_field(mesh),
            projected_constant_field(mesh),
            polynomial_field(mesh, seed=3),
        ):
            dots = np.abs(np.einsum("ij,ij->i", field.vectors, mesh.vertices))
            assert dots.max() <= 1e-10

    def test_non_tangent_rejected(self):
        mesh = icosphere(2)
        with pytest.raises(ValueError):
            TangentField(mesh=mesh, vectors=np.ones_like(mesh.vertices))


class TestVertexIndex:
    def test_rotational_source_at_pole(self):
        mesh = pole_mesh(8)
        pole = int(np.argmax(mesh.vertices @ E3))
        assert vertex_index(rotational_field(mesh), pole) == 1

    def test_projected_constant_sink_at_pole(self):
        mesh = pole_mesh(8)
        pole = int(np.argmax(mesh.vertices @ E3))
        assert vertex_index(projected_constant_field(mesh), pole) == 1

    def test_saddle_field_index_minus_one(self):
        mesh = pole_mesh(8)
        pole = int(np.argmax(mesh.vertices @ E3))
        u = mesh.vertices
        # saddle in the pole tangent plane: (x, -y, 0), projected tangent
        raw = np.column_stack([u[:, 0], -u[:, 1], np.zeros(len(u))])
        vecs = raw - np.einsum("ij,ij->i", raw, u)[:, None] * u
        assert vertex_index(TangentField(mesh=mesh, vectors=vecs), pole) == -1

    def test_zero_on_link_raises(self):
        mesh = pole_mesh(8)
        pole = int(np.argmax(mesh.vertices @ E3))
        neighbor = mesh.vertex_link(pole)[0]
        vecs = np.array(rotational_field(mesh).vectors)
        vecs[neighbor] = 0.0
        field = TangentField(mesh=mesh, vectors=vecs)
        with pytest.raises(IndeterminateIndexError):
            vertex_index(field, pole)

    def test_far_vertex_has_zero_winding(self):
        mesh = pole_mesh(8)
        equator = int(np.argmin(np.abs(mesh.vertices @ E3)))
        assert vertex_index(rotational_field(mesh), equator) == 0


class TestPoincareHopf:
    @pytest.mark.parametrize("freq", [8, 16, 32])
    @pytest.mark.parametrize("make", [rotational_field, projected_constant_field,
                                      lambda m: polynomial_field(m, seed=7)])
    def test_index_sum_is_two(self, freq, make):
        mesh = icosphere(freq, rotate=GENERIC_TILT)
        assert poincare_hopf_sum(make(mesh)) == 2

    def test_indices_sit_at_nearest_vertices(self):
        mesh = icosphere(16, rotate=GENERIC_TILT)
        rep = poincare_hopf_report(rotational_field(mesh))
        assert rep.total == 2
        carriers = np.array([mesh.vertices[v] for v in rep.vertex_indices])
        aligned = np.abs(carriers @ E3)
        assert np.all(aligned > 0.99)
        assert sorted(rep.vertex_indices.values()) == [1, 1]

    def test_face_windings_match_dense_oracle(self):
        mesh = icosphere(8, rotate=GENERIC_TILT)
        field = polynomial_field(mesh, seed=11)
        rep = poincare_hopf_report(field)
        verts, tris, vecs = mesh.vertices, mesh.triangles, field.vectors
        for f, k in rep.face_indices.items():
            a, b, c = tris[f]
            A, B, C = verts[a], verts[b], verts[c]
            n = np.cross(B - A, C - A)
            n = n / np.linalg.norm(n)
            e1 = (B - A) / np.linalg.norm(B - A)
            e2 = np.cross(n, e1)
            flat = []
            for v in (a, b, c):
                w = vecs[v] - (vecs[v] @ n) * n
                flat.append([w @ e1, w @ e2])
            assert dense_winding(*flat) == k

    def test_zero_norm_vertex_rejected(self):
        mesh = icosphere(4)  # un-tilted: the rotational field vanishes at vertices
        with pytest.raises(IndeterminateIndexError):
            poincare_hopf_sum(rotational_field(mesh))


class TestMeridianFrame:
    def test_maps_base_to_u(self, rng):
        base = unit([0.0, 0.3, 1.0])
        for _ in range(25):
            u = unit(rng.standard_normal(3))
            if np.linalg.norm(u + base) <= 1e-6:
                continue
            phi = meridian_frame(u, base)
            assert np.linalg.norm(phi.omega @ base - u) <= 1e-12
            assert np.allclose(phi.a, 0)

    def test_identity_at_base(self):
        base = unit([1.0, 2.0, 2.0])
        assert np.allclose(meridian_frame(base, base).omega, np.eye(3))

    def test_quarter_turn_example(self):
        phi = meridian_frame([1, 0, 0], E3)
        expect = rotation_matrix(np.array([0.0, 1.0, 0.0]), np.pi / 2)
        assert np.max(np.abs(phi.omega - expect)) <= 1e-12

    def test_singular_at_antipode(self):
        with pytest.raises(FrameSingularityError):
            meridian_frame(-E3, E3)
        field = meridian_frame_field(E3)
        assert np.allclose(field.singular_set[0], -E3)
        with pytest.raises(FrameSingularityError):
            field.rule(-E3)


class TestTwoSequenceLimits:
    def test_perpendicular_meridians(self):
        res = two_sequence_limits(E3, 0.0, np.pi / 2, steps=32)
        assert res.cauchy1 <= 1e-8 and res.cauchy2 <= 1e-8
        assert res.relative_gap > 0.1
        # each limit is a half-turn about a horizontal axis
        for lim in (res.limit1, res.limit2):
            assert abs(np.trace(lim.omega) + 1.0) <= 1e-9       # angle pi
            assert np.linalg.norm(lim.omega @ E3 + E3) <= 1e-9  # flips the base
        # the relative rotation is a turn by 2*(phi2-phi1) about the base
        expect = 2 * np.sqrt(2) * abs(np.sin(np.pi / 2))
        assert abs(res.relative_gap - expect) <= 1e-9

    def test_equal_meridians_agree(self):
        res = two_sequence_limits(E3, 0.4, 0.4, steps=16)
        assert res.relative_gap <= 1e-12

    def test_opposite_meridians_share_a_limit(self):
        # phi and phi + pi parametrize the same great circle; both limits
        # are the half-turn about the same horizontal line
        res = two_sequence_limits(E3, 0.3, 0.3 + np.pi, steps=32)
        assert res.relative_gap <= 1e-12

    def test_gap_grows_with_meridian_separation(self):
        for dphi in (0.1, 0.5, 1.0):
            res = two_sequence_limits(E3, 0.0, dphi, steps=16)
            assert abs(res.relative_gap - 2 * np.sqrt(2) * abs(np.sin(dphi))) <= 1e-9
            if dphi >= 0.1:
                assert res.relative_gap > 0.1

    def test_too_few_steps_rejected(self):
        with pytest.raises(ValueError):
            two_sequence_limits(E3, 0.0, 1.0, steps=4)
