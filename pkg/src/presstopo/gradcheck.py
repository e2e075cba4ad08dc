"""Finite-difference verification of the adjoint compliance gradient.

Used by the ``check-gradient`` CLI command: on a small mesh with a randomized
design, the analytic gradient (with and without the load-sensitivity term) is
compared against central finite differences of the compliance, where the
perturbed compliance is recomputed through the full state solve (or with the
load frozen at the base design for the lst = 0 variant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import Assembler
from .linsolve import DEFAULT_BACKEND, solve_elasticity, solve_pressure
from .material import (
    ElasticModel,
    FlowModel,
    drainage_coefficient,
    flow_coefficient,
    simp_modulus,
)
from .mesh import build_mesh
from .problems import preset
from .sensitivity import adjoint_pressure, compliance, objective_gradient


@dataclass(frozen=True)
class GradientCheckResult:
    max_rel_error_lst1: float
    max_rel_error_lst0: float
    step: float
    nel: int

    def passed(self, tol: float = 1e-4) -> bool:
        return self.max_rel_error_lst1 < tol and self.max_rel_error_lst0 < tol


def _solve_state(xphys, assembler, t_global, problem, flow, elastic, backend,
                 frozen_load=None):
    """Compliance of a design; optionally with a pre-computed load vector."""
    if frozen_load is None:
        a = assembler.flow(
            flow_coefficient(xphys, flow), drainage_coefficient(xphys, flow)
        )
        psol = solve_pressure(a, problem.pressure_bc, backend=backend)
        f = -(t_global @ psol.p)
    else:
        psol = None
        f = frozen_load
    k = assembler.stiffness(simp_modulus(xphys, elastic), elastic.nu)
    u = solve_elasticity(k, f, problem.displacement_bc, backend=backend)
    return compliance(u, f), u, f, psol


def gradient_check(
    nelx: int = 3,
    nely: int = 2,
    nelz: int = 2,
    preset_name: str = "lid",
    etaf: float = 0.2,
    betaf: float = 10.0,
    penal: float = 3.0,
    seed: int = 0,
    step: float = 1e-6,
    backend: str = DEFAULT_BACKEND,
) -> GradientCheckResult:
    """Compare adjoint and finite-difference gradients on a small mesh."""
    mesh = build_mesh(nelx, nely, nelz)
    problem = preset(preset_name, mesh)
    flow = FlowModel(eta=etaf, beta=betaf)
    elastic = ElasticModel(penal=penal)
    assembler = Assembler(mesh)
    t_global = assembler.transformation()

    rng = np.random.default_rng(seed)
    xphys = rng.uniform(0.2, 0.8, mesh.nel)

    _, u, f, psol = _solve_state(
        xphys, assembler, t_global, problem, flow, elastic, backend
    )
    lam1 = adjoint_pressure(u, t_global, psol)
    grad_full = objective_gradient(xphys, u, psol.p, lam1, mesh, flow, elastic, 1)
    grad_frozen = objective_gradient(xphys, u, psol.p, lam1, mesh, flow, elastic, 0)

    def fd(frozen: bool):
        out = np.empty(mesh.nel)
        base_f = f if frozen else None
        for i in range(mesh.nel):
            xp = xphys.copy()
            xp[i] += step
            c_plus, *_ = _solve_state(
                xp, assembler, t_global, problem, flow, elastic, backend,
                frozen_load=base_f,
            )
            xp[i] -= 2 * step
            c_minus, *_ = _solve_state(
                xp, assembler, t_global, problem, flow, elastic, backend,
                frozen_load=base_f,
            )
            out[i] = (c_plus - c_minus) / (2 * step)
        return out

    fd_full = fd(frozen=False)
    fd_frozen = fd(frozen=True)
    rel1 = np.abs(grad_full - fd_full) / np.maximum(np.abs(fd_full), 1e-12)
    rel0 = np.abs(grad_frozen - fd_frozen) / np.maximum(np.abs(fd_frozen), 1e-12)
    return GradientCheckResult(
        max_rel_error_lst1=float(rel1.max()),
        max_rel_error_lst0=float(rel0.max()),
        step=step,
        nel=mesh.nel,
    )
