import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from presstopo.mesh import build_mesh, face_sets, passive_block


def brute_force_node_index(gy, gz, gx, ndy, ndz):
    """Independent enumeration of the numbering map (y fastest, z, x)."""
    index = 0
    for x in range(gx + 1):
        for z in range(ndz if x < gx else gz + 1):
            for y in range(ndy if (x < gx or z < gz) else gy):
                index += 1
    return index


class TestBuildMesh:
    def test_single_cube(self):
        mesh = build_mesh(1, 1, 1)
        assert mesh.nel == 1
        assert mesh.nno == 8
        assert sorted(mesh.elem_pressure_dofs[0]) == list(range(8))

    def test_two_cubes_share_a_face(self):
        mesh = build_mesh(2, 1, 1)
        assert mesh.nel == 2
        assert mesh.nno == 12
        shared = np.intersect1d(mesh.elem_pressure_dofs[0], mesh.elem_pressure_dofs[1])
        assert len(shared) == 4
        # the shared nodes lie on the x midplane
        gx, _, _ = mesh.node_coords(shared)
        assert np.all(gx == 1)

    def test_numbering_formula_2x2x2(self):
        mesh = build_mesh(2, 2, 2)
        assert mesh.node_index(1, 0, 1) == 10
        assert mesh.node_index(1, 0, 1) == brute_force_node_index(1, 0, 1, 3, 3)

    @pytest.mark.parametrize("bad", [0, -1, 2.5])
    def test_rejects_bad_counts(self, bad):
        with pytest.raises(ValueError):
            build_mesh(bad, 1, 1)

    def test_dof_table_invariants(self):
        mesh = build_mesh(3, 2, 4)
        pd = mesh.elem_pressure_dofs
        assert pd.dtype == np.int32
        assert pd.shape == (mesh.nel, 8)
        for row in pd:
            assert len(set(row.tolist())) == 8
            assert row.min() >= 0 and row.max() < mesh.nno
        ud = mesh.elem_disp_dofs
        expected = np.stack([3 * pd + c for c in range(3)], axis=2).reshape(mesh.nel, 24)
        np.testing.assert_array_equal(ud, expected)

    def test_determinism(self):
        a = build_mesh(3, 3, 2)
        b = build_mesh(3, 3, 2)
        np.testing.assert_array_equal(a.elem_pressure_dofs, b.elem_pressure_dofs)
        np.testing.assert_array_equal(a.elem_disp_dofs, b.elem_disp_dofs)

    def test_axis_adjacent_elements_share_four_nodes(self):
        mesh = build_mesh(3, 3, 3)
        for (e1, e2) in [
            (mesh.element_index(0, 0, 0), mesh.element_index(1, 0, 0)),
            (mesh.element_index(0, 0, 0), mesh.element_index(0, 1, 0)),
            (mesh.element_index(0, 0, 0), mesh.element_index(0, 0, 1)),
            (mesh.element_index(1, 2, 1), mesh.element_index(2, 2, 1)),
        ]:
            shared = np.intersect1d(
                mesh.elem_pressure_dofs[e1], mesh.elem_pressure_dofs[e2]
            )
            assert len(shared) == 4

    @settings(max_examples=25, deadline=None)
    @given(
        nel=st.tuples(*[st.integers(1, 4)] * 3),
        frac=st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)),
    )
    def test_numbering_injective_and_matches_enumeration(self, nel, frac):
        mesh = build_mesh(*nel)
        gy, gz, gx = np.meshgrid(
            np.arange(mesh.ndy), np.arange(mesh.ndz), np.arange(mesh.ndx),
            indexing="ij",
        )
        idx = mesh.node_index(gy.ravel(), gz.ravel(), gx.ravel())
        assert len(np.unique(idx)) == mesh.nno

    def test_local_ordering_bottom_then_top(self):
        mesh = build_mesh(2, 2, 2)
        for row in mesh.elem_pressure_dofs:
            _, _, gz = mesh.node_coords(row)
            assert np.all(gz[:4] == gz[0])       # bottom face
            assert np.all(gz[4:] == gz[0] + 1)   # top face

    def test_int32_overflow_guard(self):
        with pytest.raises(ValueError, match="int32"):
            build_mesh(1200, 1000, 1000)


class TestFaceSets:
    def test_single_cube_faces(self):
        faces = face_sets(build_mesh(1, 1, 1))
        for name in ("bottom", "top", "left", "right", "front", "back"):
            assert len(getattr(faces, name)) == 4

    def test_2x2x2_top_plane(self):
        mesh = build_mesh(2, 2, 2)
        faces = face_sets(mesh)
        _, _, gz = mesh.node_coords(faces.top)
        assert len(faces.top) == 9
        assert np.all(gz == 2)

    def test_counts(self):
        mesh = build_mesh(48, 24, 24)
        faces = face_sets(mesh)
        assert len(faces.top) == 49 * 25 == 1225
        assert len(faces.bottom) == mesh.ndx * mesh.ndy
        assert len(faces.left) == len(faces.right) == mesh.ndy * mesh.ndz
        assert len(faces.front) == len(faces.back) == mesh.ndx * mesh.ndz

    def test_union_is_boundary_and_corners_in_three_sets(self):
        mesh = build_mesh(3, 2, 4)
        faces = face_sets(mesh)
        gx, gy, gz = mesh.node_coords()
        on_boundary = (
            (gx == 0) | (gx == mesh.nelx)
            | (gy == 0) | (gy == mesh.nely)
            | (gz == 0) | (gz == mesh.nelz)
        )
        np.testing.assert_array_equal(faces.all_boundary(), np.flatnonzero(on_boundary))
        counts = np.zeros(mesh.nno, dtype=int)
        for name in ("bottom", "top", "left", "right", "front", "back"):
            counts[getattr(faces, name)] += 1
        corners = np.flatnonzero(
            np.isin(gx, [0, mesh.nelx])
            & np.isin(gy, [0, mesh.nely])
            & np.isin(gz, [0, mesh.nelz])
        )
        assert np.all(counts[corners] == 3)


class TestPassiveBlock:
    def test_full_box(self):
        mesh = build_mesh(3, 3, 3)
        np.testing.assert_array_equal(
            passive_block(mesh, (0, 0, 0), (1, 1, 1)), np.arange(27)
        )

    def test_hull_fraction_on_36(self):
        mesh = build_mesh(36, 36, 36)
        block = passive_block(mesh, (8 / 18,) * 3, (10 / 18,) * 3)
        assert len(block) == 125
        # brute-force scan: the 1-based index range 16..20 per axis
        expected = []
        for ex in range(15, 20):
            for ez in range(15, 20):
                for ey in range(15, 20):
                    expected.append(mesh.element_index(ey, ez, ex))
        np.testing.assert_array_equal(block, np.sort(expected))

    def test_degenerate_box_is_corner_element(self):
        mesh = build_mesh(4, 4, 4)
        np.testing.assert_array_equal(passive_block(mesh, (0, 0, 0), (0, 0, 0)), [0])

    def test_inverted_box_rejected(self):
        mesh = build_mesh(4, 4, 4)
        with pytest.raises(ValueError):
            passive_block(mesh, (0.5, 0, 0), (0.4, 1, 1))
