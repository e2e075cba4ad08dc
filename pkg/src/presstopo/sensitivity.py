"""Compliance, volume constraint, and adjoint design sensitivities.

The compliance gradient with respect to the physical density of element i is

    dC/dx_i = -dE/dx_i * u_i^T Ke u_i
              + lst * lam1_i^T (dK/dx_i * Kp + dD/dx_i * KDp) p_i

where the second line is the load-sensitivity contribution from the
design-dependent pressure field: the flow coefficient drops by (kv - ks) and
the drainage rises by ds as the projection H switches, so

    dK/dx = -(kv - ks) * dH,      dD/dx = ds * dH.

The adjoint of the displacement equation is eliminated analytically
(lambda2 = -2u); only the pressure adjoint lambda1 needs a linear solve,
which reuses the factorization of the current pressure system.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from . import element
from .linsolve import PressureSolution
from .material import ElasticModel, FlowModel, heaviside_derivative, simp_derivative
from .mesh import GridMesh


def compliance(u: np.ndarray, f: np.ndarray) -> float:
    """Structural compliance u^T f."""
    return float(np.dot(u, f))


def adjoint_pressure(
    u: np.ndarray, t: sp.spmatrix, pressure: PressureSolution
) -> np.ndarray:
    """Pressure adjoint: solves A_ff lam1_f = 2 (T^T u)_f; zero on fixed DOFs.

    ``pressure`` must carry the factorization of the current flow system.
    """
    n = t.shape[1]
    lam1 = np.zeros(n)
    if len(pressure.free) == 0:
        return lam1
    if pressure.factor is None:
        raise ValueError("pressure solution carries no factorization")
    rhs = 2.0 * (t.T @ u)[pressure.free]
    lam1[pressure.free] = pressure.factor.solve(rhs)
    return lam1


def objective_gradient(
    xphys: np.ndarray,
    u: np.ndarray,
    p: np.ndarray,
    lam1: np.ndarray,
    mesh: GridMesh,
    flow: FlowModel,
    elastic: ElasticModel,
    lst: int,
) -> np.ndarray:
    """Compliance gradient per element with respect to physical densities.

    ``lst`` toggles the load-sensitivity term (1 = include, 0 = frozen load).
    """
    ke = element.stiffness_matrix(elastic.nu)
    u_e = u[mesh.elem_disp_dofs]
    strain_term = np.einsum("ij,ij->i", u_e @ ke, u_e)
    grad = -simp_derivative(xphys, elastic) * strain_term

    if lst:
        dh = heaviside_derivative(xphys, flow.beta, flow.eta)
        lam_e = lam1[mesh.elem_pressure_dofs]
        p_e = p[mesh.elem_pressure_dofs]
        darcy = np.einsum("ij,ij->i", lam_e @ element.darcy_matrix(), p_e)
        drain = np.einsum("ij,ij->i", lam_e @ element.drainage_matrix(), p_e)
        grad = grad + dh * (-flow.kvs * darcy + flow.ds * drain)
    return grad


def volume_constraint(xphys: np.ndarray, volfrac: float):
    """Volume constraint value sum(x)/(nel*volfrac) - 1 and its gradient."""
    if not 0 < volfrac <= 1:
        raise ValueError(f"volume fraction must be in (0, 1], got {volfrac}")
    nel = len(xphys)
    value = float(np.sum(xphys) / (nel * volfrac) - 1.0)
    grad = np.full(nel, 1.0 / (nel * volfrac))
    return value, grad
