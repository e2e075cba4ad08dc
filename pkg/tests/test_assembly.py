import numpy as np
import pytest

from presstopo import element
from presstopo.assembly import (
    Assembler,
    SymmetricSparse,
    assemble_flow,
    assemble_stiffness,
    assemble_transformation,
)
from presstopo.mesh import build_mesh


def dense_flow(mesh, k_per_elem, d_per_elem):
    """Brute-force dense assembly oracle."""
    kp = element.quadrature_matrix("Kp")
    kdp = element.quadrature_matrix("KDp")
    a = np.zeros((mesh.nno, mesh.nno))
    for e in range(mesh.nel):
        dofs = mesh.elem_pressure_dofs[e]
        a[np.ix_(dofs, dofs)] += k_per_elem[e] * kp + d_per_elem[e] * kdp
    return a


def dense_stiffness(mesh, e_per_elem, nu):
    ke = element.quadrature_matrix("Ke", nu=nu)
    k = np.zeros((3 * mesh.nno, 3 * mesh.nno))
    for e in range(mesh.nel):
        dofs = mesh.elem_disp_dofs[e]
        k[np.ix_(dofs, dofs)] += e_per_elem[e] * ke
    return k


def dense_transformation(mesh):
    te = element.quadrature_matrix("Te")
    t = np.zeros((3 * mesh.nno, mesh.nno))
    for e in range(mesh.nel):
        t[np.ix_(mesh.elem_disp_dofs[e], mesh.elem_pressure_dofs[e])] += te
    return t


class TestSymmetricSparse:
    def test_rejects_upper_triplets(self):
        with pytest.raises(ValueError):
            SymmetricSparse(3, rows=[0], cols=[1], vals=[1.0])

    def test_full_form_is_symmetric(self):
        m = SymmetricSparse(3, rows=[0, 1, 2, 2], cols=[0, 0, 1, 2], vals=[2.0, 1.0, 3.0, 4.0])
        full = m.toarray()
        assert np.array_equal(full, full.T)
        assert full[0, 1] == full[1, 0] == 1.0

    def test_lower_storage_only(self):
        m = SymmetricSparse(3, rows=[1, 2], cols=[0, 1], vals=[5.0, 6.0])
        low = m.lower.tocoo()
        assert np.all(low.row >= low.col)


class TestFlowAssembly:
    def test_single_element_pure_darcy(self):
        mesh = build_mesh(1, 1, 1)
        a = assemble_flow(mesh, np.ones(1), np.zeros(1))
        order = mesh.elem_pressure_dofs[0]
        np.testing.assert_array_equal(
            a.toarray()[np.ix_(order, order)], element.darcy_matrix()
        )

    def test_single_element_with_drainage(self):
        mesh = build_mesh(1, 1, 1)
        eps, ds = 1e-7, 1.32e-7
        a = assemble_flow(mesh, np.full(1, eps), np.full(1, ds))
        order = mesh.elem_pressure_dofs[0]
        expected = eps * element.darcy_matrix() + ds * element.drainage_matrix()
        assert np.abs(a.toarray()[np.ix_(order, order)] - expected).max() < 1e-18

    def test_two_elements_match_dense_oracle(self):
        mesh = build_mesh(2, 1, 1)
        a = assemble_flow(mesh, np.ones(2), np.zeros(2))
        assert np.abs(a.toarray() - dense_flow(mesh, np.ones(2), np.zeros(2))).max() < 1e-12

    @pytest.mark.parametrize("dims", [(2, 2, 2), (4, 3, 2), (4, 4, 4)])
    def test_random_coefficients_match_dense_oracle(self, dims):
        mesh = build_mesh(*dims)
        rng = np.random.default_rng(7)
        k = rng.uniform(0.1, 1.0, mesh.nel)
        d = rng.uniform(0.0, 1e-3, mesh.nel)
        a = assemble_flow(mesh, k, d)
        assert np.abs(a.toarray() - dense_flow(mesh, k, d)).max() < 1e-12

    def test_linearity_in_coefficients(self):
        mesh = build_mesh(2, 2, 2)
        rng = np.random.default_rng(1)
        k = rng.uniform(0.1, 1.0, mesh.nel)
        a1 = assemble_flow(mesh, k, np.zeros(mesh.nel)).toarray()
        a3 = assemble_flow(mesh, 3.0 * k, np.zeros(mesh.nel)).toarray()
        assert np.abs(a3 - 3.0 * a1).max() < 1e-13 * np.abs(a1).max()

    def test_rejects_wrong_length_and_sign(self):
        mesh = build_mesh(2, 1, 1)
        with pytest.raises(ValueError):
            assemble_flow(mesh, np.ones(3), np.zeros(3))
        with pytest.raises(ValueError):
            assemble_flow(mesh, np.zeros(2), np.zeros(2))


class TestStiffnessAssembly:
    def test_single_element_identity_modulus(self):
        mesh = build_mesh(1, 1, 1)
        k = assemble_stiffness(mesh, np.ones(1), 0.3)
        order = mesh.elem_disp_dofs[0]
        np.testing.assert_array_equal(
            k.toarray()[np.ix_(order, order)], element.stiffness_matrix(0.3)
        )

    def test_single_element_scales_linearly(self):
        mesh = build_mesh(1, 1, 1)
        k2 = assemble_stiffness(mesh, np.full(1, 2.0), 0.3)
        order = mesh.elem_disp_dofs[0]
        assert np.abs(
            k2.toarray()[np.ix_(order, order)] - 2.0 * element.stiffness_matrix(0.3)
        ).max() < 1e-15

    @pytest.mark.parametrize("dims", [(2, 1, 1), (2, 2, 2), (3, 2, 2)])
    def test_matches_dense_oracle(self, dims):
        mesh = build_mesh(*dims)
        rng = np.random.default_rng(5)
        e = rng.uniform(0.2, 1.0, mesh.nel)
        k = assemble_stiffness(mesh, e, 0.3)
        assert np.abs(k.toarray() - dense_stiffness(mesh, e, 0.3)).max() < 1e-12

    def test_deterministic(self):
        mesh = build_mesh(3, 2, 2)
        asm = Assembler(mesh)
        e = np.linspace(0.1, 1.0, mesh.nel)
        a = asm.stiffness(e, 0.3).lower
        b = asm.stiffness(e, 0.3).lower
        assert np.array_equal(a.data, b.data)
        assert np.array_equal(a.indices, b.indices)


class TestTransformationAssembly:
    def test_single_element_is_te(self):
        mesh = build_mesh(1, 1, 1)
        t = assemble_transformation(mesh).toarray()
        block = t[np.ix_(mesh.elem_disp_dofs[0], mesh.elem_pressure_dofs[0])]
        np.testing.assert_array_equal(block, element.transformation_matrix())

    def test_constant_pressure_gives_zero_force(self):
        mesh = build_mesh(3, 2, 2)
        t = assemble_transformation(mesh)
        assert np.abs(t @ np.ones(mesh.nno)).max() < 1e-12

    def test_matches_dense_oracle(self):
        mesh = build_mesh(2, 2, 2)
        t = assemble_transformation(mesh).toarray()
        assert np.abs(t - dense_transformation(mesh)).max() < 1e-12
