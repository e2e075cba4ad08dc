"""Linear hat-kernel density filter with two interchangeable backends.

The forward filter maps design densities to physical densities,

    x_phys = conv(x, h) / Hs,        Hs = conv(ones, h),

with zero padding, where the stencil weight between elements i and j is
``max(0, rmin - dist(i, j))`` in element-center distance.  The backward
filter is the exact adjoint, ``conv(s / Hs, h)``, used to pull sensitivities
back from physical to design space.

``ConvolutionFilter`` evaluates the stencil by 3D correlation and is the
production backend; ``MatrixFilter`` materializes the sparse weight matrix
and exists for testing and small meshes.  Both produce identical results.
"""

from __future__ import annotations

import numpy as np
import scipy.ndimage
import scipy.sparse as sp

from .mesh import GridMesh


def _check_rmin(rmin: float) -> float:
    if not rmin > 0:
        raise ValueError(f"filter radius must be positive, got {rmin}")
    return float(rmin)


class ConvolutionFilter:
    """Density filter backed by zero-padded 3D correlation."""

    def __init__(self, mesh: GridMesh, rmin: float):
        self.rmin = _check_rmin(rmin)
        self._shape = (mesh.nelx, mesh.nelz, mesh.nely)  # flat order: y, z, x
        k = int(np.ceil(self.rmin)) - 1
        offsets = np.arange(-k, k + 1)
        dx, dz, dy = np.meshgrid(offsets, offsets, offsets, indexing="ij")
        self.kernel = np.maximum(0.0, self.rmin - np.sqrt(dx**2 + dy**2 + dz**2))
        self.norm = self._correlate(np.ones(mesh.nel))

    def _correlate(self, flat: np.ndarray) -> np.ndarray:
        grid = np.asarray(flat, dtype=float).reshape(self._shape)
        out = scipy.ndimage.correlate(grid, self.kernel, mode="constant", cval=0.0)
        return out.ravel()

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Physical densities conv(x, h) / Hs."""
        return self._correlate(x) / self.norm

    def backward(self, s: np.ndarray) -> np.ndarray:
        """Adjoint map conv(s / Hs, h)."""
        return self._correlate(np.asarray(s, dtype=float) / self.norm)


class MatrixFilter:
    """Density filter backed by an explicit sparse weight matrix."""

    def __init__(self, mesh: GridMesh, rmin: float):
        self.rmin = _check_rmin(rmin)
        self.weights = filter_matrix(mesh, self.rmin)
        self.norm = np.asarray(self.weights.sum(axis=1)).ravel()

    def forward(self, x: np.ndarray) -> np.ndarray:
        return (self.weights @ np.asarray(x, dtype=float)) / self.norm

    def backward(self, s: np.ndarray) -> np.ndarray:
        return self.weights @ (np.asarray(s, dtype=float) / self.norm)


def filter_matrix(mesh: GridMesh, rmin: float) -> sp.csr_matrix:
    """Explicit (nel, nel) hat-kernel weight matrix.

    Entry (i, j) is ``max(0, rmin - |center_i - center_j|)``; the matrix is
    symmetric by construction.
    """
    rmin = _check_rmin(rmin)
    k = int(np.ceil(rmin)) - 1
    nelx, nely, nelz = mesh.nelx, mesh.nely, mesh.nelz
    rows, cols, vals = [], [], []
    for ex in range(nelx):
        for ez in range(nelz):
            for ey in range(nely):
                e1 = mesh.element_index(ey, ez, ex)
                for ex2 in range(max(ex - k, 0), min(ex + k, nelx - 1) + 1):
                    for ez2 in range(max(ez - k, 0), min(ez + k, nelz - 1) + 1):
                        for ey2 in range(max(ey - k, 0), min(ey + k, nely - 1) + 1):
                            d = np.sqrt(
                                (ex - ex2) ** 2 + (ey - ey2) ** 2 + (ez - ez2) ** 2
                            )
                            w = rmin - d
                            if w > 0:
                                rows.append(e1)
                                cols.append(mesh.element_index(ey2, ez2, ex2))
                                vals.append(w)
    return sp.csr_matrix(
        (np.array(vals), (np.array(rows), np.array(cols))), shape=(mesh.nel, mesh.nel)
    )
