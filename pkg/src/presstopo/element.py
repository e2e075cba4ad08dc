"""Closed-form matrices for the unit-cube trilinear hexahedral element.

Four matrices are provided:

* ``darcy_matrix``          -- 8x8 flow matrix for unit flow coefficient,
* ``drainage_matrix``       -- 8x8 drainage (mass) matrix for unit coefficient,
* ``transformation_matrix`` -- 24x8 pressure-to-nodal-force map,
* ``stiffness_matrix(nu)``  -- 24x24 elastic stiffness for unit Young modulus.

All entries are exact rationals (integer numerators over 12, 216, 72, and the
stiffness prefactor).  ``quadrature_matrix`` integrates the defining integrals
with Gauss quadrature and serves as an independent oracle for every fixture.

Sign convention: ``transformation_matrix()`` returns T with
T[3k+c, j] = integral of N_k * dN_j/dx_c, so a pressure field p produces the
consistent nodal load F = -T_e @ p_e.  A uniform pressure yields zero force.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .mesh import _LOCAL_CORNERS

# Reference coordinates of the 8 local nodes in [-1, 1]^3 (bottom face first).
_REF = 2.0 * np.array(_LOCAL_CORNERS, dtype=float) - 1.0

# 8x8 Darcy flow matrix, numerators over 12.
_KP_NUM = np.array([
    [ 4,  0, -1,  0,  0, -1, -1, -1],
    [ 0,  4,  0, -1, -1,  0, -1, -1],
    [-1,  0,  4,  0, -1, -1,  0, -1],
    [ 0, -1,  0,  4, -1, -1, -1,  0],
    [ 0, -1, -1, -1,  4,  0, -1,  0],
    [-1,  0, -1, -1,  0,  4,  0, -1],
    [-1, -1,  0, -1, -1,  0,  4,  0],
    [-1, -1, -1,  0,  0, -1,  0,  4],
])

# 8x8 drainage (consistent mass) matrix, numerators over 216.
_KDP_NUM = np.array([
    [8, 4, 2, 4, 4, 2, 1, 2],
    [4, 8, 4, 2, 2, 4, 2, 1],
    [2, 4, 8, 4, 1, 2, 4, 2],
    [4, 2, 4, 8, 2, 1, 2, 4],
    [4, 2, 1, 2, 8, 4, 2, 4],
    [2, 4, 2, 1, 4, 8, 4, 2],
    [1, 2, 4, 2, 2, 4, 8, 4],
    [2, 1, 2, 4, 4, 2, 4, 8],
])

# 24x8 transformation matrix, numerators over 72.  Row order: x, y, z
# components of local nodes 1..8; column order: local pressure nodes 1..8.
_TE_NUM = np.array([
    [-4,  4,  2, -2, -2,  2,  1, -1],
    [-4, -2,  2,  4, -2, -1,  1,  2],
    [-4, -2, -1, -2,  4,  2,  1,  2],
    [-4,  4,  2, -2, -2,  2,  1, -1],
    [-2, -4,  4,  2, -1, -2,  2,  1],
    [-2, -4, -2, -1,  2,  4,  2,  1],
    [-2,  2,  4, -4, -1,  1,  2, -2],
    [-2, -4,  4,  2, -1, -2,  2,  1],
    [-1, -2, -4, -2,  1,  2,  4,  2],
    [-2,  2,  4, -4, -1,  1,  2, -2],
    [-4, -2,  2,  4, -2, -1,  1,  2],
    [-2, -1, -2, -4,  2,  1,  2,  4],
    [-2,  2,  1, -1, -4,  4,  2, -2],
    [-2, -1,  1,  2, -4, -2,  2,  4],
    [-4, -2, -1, -2,  4,  2,  1,  2],
    [-2,  2,  1, -1, -4,  4,  2, -2],
    [-1, -2,  2,  1, -2, -4,  4,  2],
    [-2, -4, -2, -1,  2,  4,  2,  1],
    [-1,  1,  2, -2, -2,  2,  4, -4],
    [-1, -2,  2,  1, -2, -4,  4,  2],
    [-1, -2, -4, -2,  1,  2,  4,  2],
    [-1,  1,  2, -2, -2,  2,  4, -4],
    [-2, -1,  1,  2, -4, -2,  2,  4],
    [-2, -1, -2, -4,  2,  1,  2,  4],
])

# Elastic stiffness in two-coefficient form: Ke = (A + nu*B) / ((1+nu)(2nu-1)*144).
# The 300 lower-triangular entries are stored column by column (columns 1..24,
# rows c..24 within column c); every diagonal entry of A is -32 and of B is 48.
_KE_CONST_LOWER = np.array([
    -32, -6, -6, 8, 6, 6, 10, 6, 3, -4, -6, -3, -4, -3, -6, 10, 3, 6, 8, 3, 3, 4, -3, -3,
    -32, -6, -6, -4, -3, 6, 10, 3, 6, 8, 6, -3, -4, -6, -3, 4, -3, 3, 8, 3, 3, 10, 6,
    -32, -6, -3, -4, -3, -3, 4, -3, -6, -4, 6, 6, 8, 6, 3, 10, 3, 3, 8, 3, 6, 10,
    -32, 6, 6, -4, 6, 3, 10, -6, -3, 10, -3, -6, -4, 3, 6, 4, 3, 3, 8, -3, -3,
    -32, -6, -6, 8, 6, -6, 10, 3, 3, 4, -3, 3, -4, -6, -3, 10, 6, -3, 8, 3,
    -32, 3, -6, -4, 3, -3, 4, -6, 3, 10, -6, 6, 8, -3, 6, 10, -3, 3, 8,
    -32, -6, 6, 8, 6, -6, 8, 3, -3, 4, -3, 3, -4, -3, 6, 10, 3, -6,
    -32, 6, -6, -4, 3, 3, 8, -3, 3, 10, -6, -3, -4, 6, -3, 4, 3,
    -32, 6, 3, -4, -3, -3, 8, -3, -6, 10, -6, -6, 8, -6, -3, 10,
    -32, 6, -6, 4, 3, -3, 8, -3, 3, 10, -3, 6, -4, 3, -6,
    -32, 6, -3, 10, -6, -3, 8, -3, 3, 4, 3, 3, -4, 6,
    -32, 3, -6, 10, 3, -3, 8, 6, -3, 10, 6, -6, 8,
    -32, -6, 6, 8, 6, -6, 10, 6, -3, -4, -6, 3,
    -32, 6, -6, -4, 3, 6, 10, -3, 6, 8, -6,
    -32, 6, 3, -4, 3, 3, 4, 3, 6, -4,
    -32, 6, -6, -4, 6, -3, 10, -6, 3,
    -32, 6, -6, 8, -6, -6, 10, -3,
    -32, -3, 6, -4, -3, 3, 4,
    -32, -6, -6, 8, 6, 6,
    -32, -6, -6, -4, -3,
    -32, -6, -3, -4,
    -32, 6, 6,
    -32, -6,
    -32,
], dtype=float)

_KE_NU_LOWER = np.array([
    48, 0, 0, 0, -24, -24, -12, 0, -12, 0, 24, 0, 0, 0, 24, -12, -12, 0, -12, 0, 0, -12, 12, 12,
    48, 0, 24, 0, 0, 0, -12, -12, -24, 0, -24, 0, 0, 24, 12, -12, 12, 0, -12, 0, -12, -12, 0,
    48, 24, 0, 0, 12, 12, -12, 0, 24, 0, -24, -24, 0, 0, -12, -12, 0, 0, -12, -12, 0, -12,
    48, 0, 0, 0, -24, 0, -12, 0, 12, -12, 12, 0, 0, 0, -24, -12, -12, -12, -12, 0, 0,
    48, 0, 24, 0, -24, 0, -12, -12, -12, -12, 12, 0, 0, 24, 12, -12, 0, 0, -12, 0,
    48, 0, 24, 0, -12, 12, -12, 0, -12, -12, 24, -24, 0, 12, 0, -12, 0, 0, -12,
    48, 0, 0, 0, -24, 24, -12, 0, 0, -12, 12, -12, 0, 0, -24, -12, -12, 0,
    48, 0, 24, 0, 0, 0, -12, 0, -12, -12, 0, 0, 0, -24, 12, -12, -12,
    48, -24, 0, 0, 0, 0, -12, 12, 0, -12, 24, 24, 0, 0, 12, -12,
    48, 0, 0, -12, -12, 12, -12, 0, 0, -12, 12, 0, 0, 0, 24,
    48, 0, 12, -12, 0, 0, -12, 0, -12, -12, -12, 0, 0, -24,
    48, -12, 0, -12, 0, 0, -12, 0, 12, -12, -24, 24, 0,
    48, 0, 0, 0, -24, 24, -12, 0, 12, 0, 24, 0,
    48, 0, 24, 0, 0, 0, -12, 12, -24, 0, 24,
    48, -24, 0, 0, -12, -12, -12, 0, -24, 0,
    48, 0, 0, 0, -24, 0, -12, 0, -12,
    48, 0, 24, 0, 24, 0, -12, 12,
    48, 0, -24, 0, 12, -12, -12,
    48, 0, 0, 0, -24, -24,
    48, 0, 24, 0, 0,
    48, 24, 0, 0,
    48, 0, 0,
    48, 0,
    48,
], dtype=float)


def _expand_lower(vec: np.ndarray, n: int) -> np.ndarray:
    """Expand a column-major lower-triangular vector to a full symmetric matrix."""
    m = np.zeros((n, n))
    rows, cols = [], []
    for c in range(n):
        rows.extend(range(c, n))
        cols.extend([c] * (n - c))
    m[rows, cols] = vec
    return m + m.T - np.diag(np.diag(m))


def darcy_matrix() -> np.ndarray:
    """Unit-coefficient Darcy flow matrix (entries n/12)."""
    return _KP_NUM / 12.0


def drainage_matrix() -> np.ndarray:
    """Unit-coefficient drainage matrix (entries n/216; entry sum 1)."""
    return _KDP_NUM / 216.0


def transformation_matrix() -> np.ndarray:
    """Pressure-to-force transformation matrix (entries n/72)."""
    return _TE_NUM / 72.0


def darcy_lower() -> np.ndarray:
    """Column-major lower-triangular vector of ``darcy_matrix`` (36 entries)."""
    kp = darcy_matrix()
    return np.concatenate([kp[c:, c] for c in range(8)])


def drainage_lower() -> np.ndarray:
    """Column-major lower-triangular vector of ``drainage_matrix``."""
    kdp = drainage_matrix()
    return np.concatenate([kdp[c:, c] for c in range(8)])


@lru_cache(maxsize=8)
def stiffness_matrix(nu: float) -> np.ndarray:
    """Elastic stiffness for unit Young's modulus and Poisson ratio ``nu``.

    The matrix is the two-coefficient closed form
    ``(A + nu*B) / ((1+nu)(2nu-1)*144)`` with integer tables A and B.
    Cached per ``nu``; treat the result as read-only.
    """
    if not 0.0 <= nu < 0.5:
        raise ValueError(f"Poisson ratio must satisfy 0 <= nu < 0.5, got {nu}")
    pref = 1.0 / ((1.0 + nu) * (2.0 * nu - 1.0) * 144.0)
    vec = (_KE_CONST_LOWER + nu * _KE_NU_LOWER) * pref
    ke = _expand_lower(vec, 24)
    ke.setflags(write=False)
    return ke


@lru_cache(maxsize=8)
def stiffness_lower(nu: float) -> np.ndarray:
    """Column-major lower-triangular vector of ``stiffness_matrix`` (300 entries)."""
    ke = stiffness_matrix(nu)
    vec = np.concatenate([ke[c:, c] for c in range(24)])
    vec.setflags(write=False)
    return vec


def _shape_functions(xi, eta, zeta):
    N = 0.125 * (1 + _REF[:, 0] * xi) * (1 + _REF[:, 1] * eta) * (1 + _REF[:, 2] * zeta)
    dN = np.empty((8, 3))
    dN[:, 0] = 0.125 * _REF[:, 0] * (1 + _REF[:, 1] * eta) * (1 + _REF[:, 2] * zeta)
    dN[:, 1] = 0.125 * (1 + _REF[:, 0] * xi) * _REF[:, 1] * (1 + _REF[:, 2] * zeta)
    dN[:, 2] = 0.125 * (1 + _REF[:, 0] * xi) * (1 + _REF[:, 1] * eta) * _REF[:, 2]
    return N, dN


def _elasticity_tensor(nu: float) -> np.ndarray:
    # isotropic Hooke matrix in Voigt order (xx, yy, zz, xy, yz, zx), E = 1
    lam = nu / ((1 + nu) * (1 - 2 * nu))
    mu = 1.0 / (2 * (1 + nu))
    C = np.zeros((6, 6))
    C[:3, :3] = lam
    C[0, 0] = C[1, 1] = C[2, 2] = lam + 2 * mu
    C[3, 3] = C[4, 4] = C[5, 5] = mu
    return C


def quadrature_matrix(kind: str, nu: float | None = None, points: int = 2) -> np.ndarray:
    """Gauss-quadrature evaluation of an element matrix on the unit cube.

    Independent oracle for the closed forms: integrates the defining integral
    with a ``points**3`` Gauss rule using the trilinear shape functions.  The
    default 2x2x2 rule is exact for every kind; lower rules under-integrate.

    Parameters
    ----------
    kind : {"Ke", "Kp", "KDp", "Te"}
    nu : float, optional
        Poisson ratio; required for ``kind="Ke"``.
    """
    if kind not in ("Ke", "Kp", "KDp", "Te"):
        raise ValueError(f"unknown element matrix kind {kind!r}")
    if kind == "Ke":
        if nu is None:
            raise ValueError("Ke requires a Poisson ratio")
        C = _elasticity_tensor(nu)
        out = np.zeros((24, 24))
    elif kind == "Te":
        out = np.zeros((24, 8))
    else:
        out = np.zeros((8, 8))

    corners = np.array(_LOCAL_CORNERS, dtype=float)
    gp, gw = np.polynomial.legendre.leggauss(points)
    for i, xi in enumerate(gp):
        for j, eta in enumerate(gp):
            for k, zeta in enumerate(gp):
                w = gw[i] * gw[j] * gw[k]
                N, dN = _shape_functions(xi, eta, zeta)
                J = dN.T @ corners
                detJ = np.linalg.det(J)
                B = dN @ np.linalg.inv(J)  # physical shape gradients, (8, 3)
                if kind == "Kp":
                    out += w * detJ * (B @ B.T)
                elif kind == "KDp":
                    out += w * detJ * np.outer(N, N)
                elif kind == "Te":
                    Nu = np.zeros((24, 3))
                    for a in range(8):
                        Nu[3 * a: 3 * a + 3, :] = N[a] * np.eye(3)
                    out += w * detJ * (Nu @ B.T)
                else:
                    Bm = np.zeros((6, 24))
                    for a in range(8):
                        bx, by, bz = B[a]
                        Bm[0, 3 * a] = bx
                        Bm[1, 3 * a + 1] = by
                        Bm[2, 3 * a + 2] = bz
                        Bm[3, 3 * a] = by
                        Bm[3, 3 * a + 1] = bx
                        Bm[4, 3 * a + 1] = bz
                        Bm[4, 3 * a + 2] = by
                        Bm[5, 3 * a] = bz
                        Bm[5, 3 * a + 2] = bx
                    out += w * detJ * (Bm.T @ C @ Bm)
    return out
