"""Structured hexahedral grid: node/DOF numbering, incidence tables, face sets.

The grid lives on the unit-cube lattice with element edge length 1.  Nodes are
numbered with the y grid index running fastest, then z, then x:

    node(gy, gz, gx) = gy + gz * ndy + gx * ndy * ndz      (0-based)

Elements follow the same fastest-to-slowest order.  The eight local nodes of
an element are listed counterclockwise on the bottom face (z = const) and then
counterclockwise on the top face, which is the ordering the closed-form
element matrices in :mod:`presstopo.element` are written for.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# local corner offsets (dx, dy, dz): nodes 0-3 on the bottom face, 4-7 on top
_LOCAL_CORNERS = (
    (0, 0, 0),
    (1, 0, 0),
    (1, 1, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 0, 1),
    (1, 1, 1),
    (0, 1, 1),
)


@dataclass(frozen=True)
class GridMesh:
    """Immutable structured hexahedral mesh.

    Attributes
    ----------
    nelx, nely, nelz : int
        Element counts per axis.
    ndx, ndy, ndz : int
        Node counts per axis (element count + 1).
    nel, nno : int
        Total number of elements and nodes.
    elem_pressure_dofs : (nel, 8) int32 array
        Global node index of each local element node (1 pressure DOF/node).
    elem_disp_dofs : (nel, 24) int32 array
        Global displacement DOF indices, x/y/z interleaved per local node.
    """

    nelx: int
    nely: int
    nelz: int
    ndx: int
    ndy: int
    ndz: int
    nel: int
    nno: int
    elem_pressure_dofs: np.ndarray
    elem_disp_dofs: np.ndarray

    @property
    def ndof(self) -> int:
        """Number of displacement DOFs (3 per node)."""
        return 3 * self.nno

    def node_index(self, gy, gz, gx):
        """Closed-form node numbering (y fastest, then z, then x)."""
        return gy + gz * self.ndy + gx * self.ndy * self.ndz

    def element_index(self, ey, ez, ex):
        """Closed-form element numbering (y fastest, then z, then x)."""
        return ey + ez * self.nely + ex * self.nely * self.nelz

    def node_coords(self, nodes=None):
        """Grid coordinates (gx, gy, gz) of ``nodes`` (default: all nodes)."""
        if nodes is None:
            nodes = np.arange(self.nno)
        nodes = np.asarray(nodes)
        gy = nodes % self.ndy
        gz = (nodes // self.ndy) % self.ndz
        gx = nodes // (self.ndy * self.ndz)
        return gx, gy, gz


@dataclass(frozen=True)
class FaceSets:
    """Boundary node sets named by geometric plane.

    ``bottom``/``top`` are the z = 0 / z = max planes, ``left``/``right`` the
    x = 0 / x = max planes, and ``front``/``back`` the y = 0 / y = max planes.
    Each entry is a sorted int array of node indices.
    """

    bottom: np.ndarray
    top: np.ndarray
    left: np.ndarray
    right: np.ndarray
    front: np.ndarray
    back: np.ndarray

    def all_boundary(self) -> np.ndarray:
        """Union of the six face sets."""
        return np.unique(
            np.concatenate(
                [self.bottom, self.top, self.left, self.right, self.front, self.back]
            )
        )


def build_mesh(nelx: int, nely: int, nelz: int) -> GridMesh:
    """Build the structured mesh together with its element DOF tables.

    Raises
    ------
    ValueError
        If any element count is < 1, or the displacement DOF count would
        overflow the 32-bit index range used for the incidence tables.
    """
    for name, val in (("nelx", nelx), ("nely", nely), ("nelz", nelz)):
        if int(val) != val or val < 1:
            raise ValueError(f"{name} must be a positive integer, got {val!r}")
    nelx, nely, nelz = int(nelx), int(nely), int(nelz)

    ndx, ndy, ndz = nelx + 1, nely + 1, nelz + 1
    nel = nelx * nely * nelz
    nno = ndx * ndy * ndz
    if 3 * nno > np.iinfo(np.int32).max:
        raise ValueError(f"mesh too large for int32 DOF indexing: 3*nno = {3 * nno}")

    eidx = np.arange(nel, dtype=np.int64)
    ey = eidx % nely
    ez = (eidx // nely) % nelz
    ex = eidx // (nely * nelz)

    pdofs = np.empty((nel, 8), dtype=np.int32)
    for k, (dx, dy, dz) in enumerate(_LOCAL_CORNERS):
        pdofs[:, k] = (ey + dy) + (ez + dz) * ndy + (ex + dx) * ndy * ndz

    udofs = np.empty((nel, 24), dtype=np.int32)
    udofs[:, 0::3] = 3 * pdofs
    udofs[:, 1::3] = 3 * pdofs + 1
    udofs[:, 2::3] = 3 * pdofs + 2

    return GridMesh(
        nelx=nelx, nely=nely, nelz=nelz,
        ndx=ndx, ndy=ndy, ndz=ndz,
        nel=nel, nno=nno,
        elem_pressure_dofs=pdofs, elem_disp_dofs=udofs,
    )


def face_sets(mesh: GridMesh) -> FaceSets:
    """Node sets of the six boundary planes, determined from grid coordinates."""
    gx, gy, gz = mesh.node_coords()
    nodes = np.arange(mesh.nno)
    return FaceSets(
        bottom=nodes[gz == 0],
        top=nodes[gz == mesh.nelz],
        left=nodes[gx == 0],
        right=nodes[gx == mesh.nelx],
        front=nodes[gy == 0],
        back=nodes[gy == mesh.nely],
    )


def _axis_range(lo_frac: float, hi_frac: float, n: int) -> np.ndarray:
    # inclusive index range lo*n : hi*n (1-based), clamped into the grid
    lo = min(max(int(round(lo_frac * n)), 1), n)
    hi = min(max(int(round(hi_frac * n)), 1), n)
    return np.arange(lo - 1, hi)  # 0-based


def passive_block(mesh: GridMesh, lo_frac, hi_frac) -> np.ndarray:
    """Element indices inside a fractional axis-aligned box.

    ``lo_frac`` and ``hi_frac`` are per-axis fractions (x, y, z) in [0, 1];
    the box edges are mapped onto inclusive element index ranges.  A
    degenerate box snaps to the element containing it.

    Returns a sorted int array (possibly empty).
    """
    lo = np.broadcast_to(np.asarray(lo_frac, dtype=float), (3,))
    hi = np.broadcast_to(np.asarray(hi_frac, dtype=float), (3,))
    if np.any(lo > hi):
        raise ValueError(f"lo_frac {lo.tolist()} exceeds hi_frac {hi.tolist()}")
    if np.any(lo < 0) or np.any(hi > 1):
        raise ValueError("box fractions must lie in [0, 1]")

    ex = _axis_range(lo[0], hi[0], mesh.nelx)
    ey = _axis_range(lo[1], hi[1], mesh.nely)
    ez = _axis_range(lo[2], hi[2], mesh.nelz)
    if ex.size == 0 or ey.size == 0 or ez.size == 0:
        return np.empty(0, dtype=np.int64)
    eyg, ezg, exg = np.meshgrid(ey, ez, ex, indexing="ij")
    idx = mesh.element_index(eyg.ravel(), ezg.ravel(), exg.ravel())
    return np.sort(idx)
