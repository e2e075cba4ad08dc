"""Global matrix assembly over the structured mesh.

The flow and stiffness matrices are symmetric, so only their lower triangles
are scattered: each element contributes its column-major lower-triangular
entry vector, and global (row, col) pairs are sorted descending so every
triplet lands in the lower triangle.  The index arrays depend only on the
mesh and are computed once and cached on the assembler.

The pressure-to-force transformation matrix is rectangular and independent of
the design, so it is assembled once per mesh.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from . import element
from .mesh import GridMesh


class SymmetricSparse:
    """Symmetric sparse matrix stored as lower-triangular triplets."""

    def __init__(self, n: int, rows, cols, vals):
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        if np.any(rows < cols):
            raise ValueError("SymmetricSparse expects lower-triangular triplets")
        self.n = int(n)
        self._lower = sp.coo_matrix(
            (vals, (rows, cols)), shape=(self.n, self.n)
        ).tocsc()
        self._full = None

    @property
    def lower(self) -> sp.csc_matrix:
        """Lower triangle with summed duplicates."""
        return self._lower

    def full(self) -> sp.csc_matrix:
        """Full symmetric matrix L + L^T - diag(L)."""
        if self._full is None:
            L = self._lower
            D = sp.diags(L.diagonal())
            self._full = (L + L.T - D).tocsc()
        return self._full

    def toarray(self) -> np.ndarray:
        return self.full().toarray()

    def norm_inf(self) -> float:
        return float(abs(self.full()).sum(axis=1).max()) if self.n else 0.0


def _lower_tri_scatter_indices(dof_table: np.ndarray):
    """Global (row, col) arrays for the lower-triangular element entries.

    ``dof_table`` is (nel, ndof); for each element the local (r, c) pairs with
    r >= c are mapped to global indices and sorted so row >= col.
    """
    ndof = dof_table.shape[1]
    loc_r, loc_c = [], []
    for c in range(ndof):
        loc_r.extend(range(c, ndof))
        loc_c.extend([c] * (ndof - c))
    gi = dof_table[:, loc_r].ravel()
    gj = dof_table[:, loc_c].ravel()
    rows = np.maximum(gi, gj)
    cols = np.minimum(gi, gj)
    return rows, cols


class Assembler:
    """Caches mesh-dependent scatter indices and assembles global matrices."""

    def __init__(self, mesh: GridMesh):
        self.mesh = mesh
        self._flow_idx = _lower_tri_scatter_indices(mesh.elem_pressure_dofs)
        self._stiff_idx = _lower_tri_scatter_indices(mesh.elem_disp_dofs)

    def flow(self, k_per_elem: np.ndarray, d_per_elem: np.ndarray) -> SymmetricSparse:
        """Assemble A = sum_e (K_e * Kp + D_e * KDp) from per-element coefficients."""
        mesh = self.mesh
        k_per_elem = np.asarray(k_per_elem, dtype=float)
        d_per_elem = np.asarray(d_per_elem, dtype=float)
        if k_per_elem.shape != (mesh.nel,) or d_per_elem.shape != (mesh.nel,):
            raise ValueError(
                f"coefficient arrays must have length nel={mesh.nel}, got "
                f"{k_per_elem.shape} and {d_per_elem.shape}"
            )
        if np.any(k_per_elem <= 0) or np.any(d_per_elem < 0):
            raise ValueError("flow coefficients must be > 0 and drainage >= 0")
        vals = (
            np.outer(k_per_elem, element.darcy_lower())
            + np.outer(d_per_elem, element.drainage_lower())
        ).ravel()
        return SymmetricSparse(mesh.nno, *self._flow_idx, vals)

    def stiffness(self, e_per_elem: np.ndarray, nu: float) -> SymmetricSparse:
        """Assemble K = sum_e E_e * Ke(nu)."""
        mesh = self.mesh
        e_per_elem = np.asarray(e_per_elem, dtype=float)
        if e_per_elem.shape != (mesh.nel,):
            raise ValueError(
                f"modulus array must have length nel={mesh.nel}, got {e_per_elem.shape}"
            )
        if np.any(e_per_elem <= 0):
            raise ValueError("Young's moduli must be positive")
        vals = np.outer(e_per_elem, element.stiffness_lower(nu)).ravel()
        return SymmetricSparse(3 * mesh.nno, *self._stiff_idx, vals)

    def transformation(self) -> sp.csc_matrix:
        """Assemble the design-independent (3*nno, nno) transformation matrix T."""
        mesh = self.mesh
        te = element.transformation_matrix()
        # entry (r, c) of Te scatters to (udofs[e, r], pdofs[e, c]); the value
        # vector is column-major, so r runs fastest
        rows = np.tile(mesh.elem_disp_dofs, (1, 8)).ravel()
        cols = np.repeat(mesh.elem_pressure_dofs, 24, axis=1).ravel()
        vals = np.tile(te.ravel(order="F"), mesh.nel)
        return sp.coo_matrix(
            (vals, (rows, cols)), shape=(3 * mesh.nno, mesh.nno)
        ).tocsc()


def assemble_flow(mesh: GridMesh, k_per_elem, d_per_elem) -> SymmetricSparse:
    """One-shot flow assembly (builds scatter indices each call)."""
    return Assembler(mesh).flow(k_per_elem, d_per_elem)


def assemble_stiffness(mesh: GridMesh, e_per_elem, nu: float) -> SymmetricSparse:
    """One-shot stiffness assembly."""
    return Assembler(mesh).stiffness(e_per_elem, nu)


def assemble_transformation(mesh: GridMesh) -> sp.csc_matrix:
    """One-shot transformation assembly."""
    return Assembler(mesh).transformation()
