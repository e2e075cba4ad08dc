"""Optimization driver: state solves, sensitivities, filtering, MMA updates.

Each iteration performs, in order: flow coefficients and pressure solve,
consistent nodal loads and displacement solve, compliance/volume values and
adjoint gradients, normalization and backward filtering, a move-limited MMA
update, forward filtering to the physical field with passive overrides, and
history bookkeeping.  The loop stops at ``maxit`` iterations or when the
design change drops to ``change_tol``.

The objective scale ``normf = normalization_target / C_1`` is frozen at the
first iteration and multiplies the compliance and its gradient everywhere
downstream, including the MMA inputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .assembly import Assembler
from .filters import ConvolutionFilter
from .linsolve import (
    DEFAULT_BACKEND,
    NotPositiveDefiniteError,
    SingularFlowSystemError,
    solve_elasticity,
    solve_pressure,
)
from .material import (
    ElasticModel,
    FlowModel,
    drainage_coefficient,
    flow_coefficient,
    simp_modulus,
)
from .mesh import build_mesh
from .mma import MmaOptimizer
from .problems import PRESET_NAMES, ProblemPreset, initial_design, preset
from .sensitivity import (
    adjoint_pressure,
    compliance,
    objective_gradient,
    volume_constraint,
)

PROGRESS_FORMAT = " It.:{it:4d} Obj.:{obj:8.4f} Vol.:{vol:6.4f} ch.:{ch:6.4f}"


@dataclass(frozen=True)
class RunConfig:
    """Full parameterization of one optimization run."""

    nelx: int
    nely: int
    nelz: int
    volfrac: float
    penal: float = 3.0
    rmin: float = np.sqrt(3)
    etaf: float = 0.2
    betaf: float = 10.0
    lst: int = 1
    maxit: int = 100
    preset: str = "lid"
    pin: float = 1.0
    move_limit: float = 0.1
    change_tol: float = 1e-4
    normalization_target: float = 1000.0
    # material and flow overrides
    e1: float = 1.0
    emin_rel: float = 1e-5
    nu: float = 0.3
    kv: float = 1.0
    epsf: float = 1e-7
    r: float = 0.1
    dels: float = 2.0
    backend: str = DEFAULT_BACKEND
    # output paths; the driver streams the history, exports are up to callers
    history_path: str | None = None
    vtk_path: str | None = None
    checkpoint_path: str | None = None

    def __post_init__(self):
        checks = [
            ("nelx", self.nelx >= 1),
            ("nely", self.nely >= 1),
            ("nelz", self.nelz >= 1),
            ("volfrac", 0 < self.volfrac <= 1),
            ("penal", self.penal >= 1),
            ("rmin", self.rmin > 0),
            ("lst", self.lst in (0, 1)),
            ("maxit", self.maxit >= 1),
            ("preset", self.preset in PRESET_NAMES),
            ("move_limit", 0 < self.move_limit <= 1),
            ("change_tol", self.change_tol >= 0),
            ("pin", np.isfinite(self.pin)),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid {name}: {getattr(self, name)!r}")

    def flow_model(self) -> FlowModel:
        return FlowModel(
            kv=self.kv, epsf=self.epsf, eta=self.etaf, beta=self.betaf,
            r=self.r, dels=self.dels,
        )

    def elastic_model(self) -> ElasticModel:
        return ElasticModel(
            e1=self.e1, emin=self.emin_rel * self.e1, nu=self.nu, penal=self.penal
        )

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


@dataclass
class RunHistory:
    """Per-iteration bookkeeping columns."""

    iteration: list[int] = field(default_factory=list)
    compliance: list[float] = field(default_factory=list)
    compliance_normalized: list[float] = field(default_factory=list)
    volfrac: list[float] = field(default_factory=list)
    change: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)

    def append(self, it, obj, obj_n, vol, change, seconds):
        self.iteration.append(int(it))
        self.compliance.append(float(obj))
        self.compliance_normalized.append(float(obj_n))
        self.volfrac.append(float(vol))
        self.change.append(float(change))
        self.seconds.append(float(seconds))

    def __len__(self) -> int:
        return len(self.iteration)

    def rows(self):
        return zip(
            self.iteration, self.compliance, self.compliance_normalized,
            self.volfrac, self.change, self.seconds,
        )


@dataclass
class RunResult:
    """Final state of an optimization run."""

    config: RunConfig
    design: np.ndarray        # raw design vector (passive entries clamped)
    xphys: np.ndarray         # filtered physical density field
    pressure: np.ndarray
    displacement: np.ndarray
    history: RunHistory
    problem: ProblemPreset
    normf: float


def run(config: RunConfig, log=None) -> RunResult:
    """Execute the optimization loop described by ``config``.

    ``log`` is an optional callable receiving one progress line per iteration.
    """
    mesh = build_mesh(config.nelx, config.nely, config.nelz)
    problem = preset(config.preset, mesh, pin=config.pin)
    flow = config.flow_model()
    elastic = config.elastic_model()
    assembler = Assembler(mesh)
    filt = ConvolutionFilter(mesh, config.rmin)
    t_global = assembler.transformation()

    act = problem.active_elements(mesh.nel)
    x_full = initial_design(problem, mesh.nel, config.volfrac)
    xphys = x_full.copy()
    x_mma = x_full[act]
    optimizer = MmaOptimizer(len(act))

    dvol0 = np.full(mesh.nel, 1.0 / (mesh.nel * config.volfrac))
    dvol = filt.backward(dvol0)  # volume gradient is filtered once, up front

    history = RunHistory()
    writer = _HistoryWriter(config.history_path)
    normf = 1.0
    loop, change = 0, 1.0
    u = np.zeros(mesh.ndof)
    p = np.zeros(mesh.nno)

    try:
        while loop < config.maxit and change > config.change_tol:
            loop += 1
            t0 = time.perf_counter()

            kc = flow_coefficient(xphys, flow)
            dc = drainage_coefficient(xphys, flow)
            a_flow = assembler.flow(kc, dc)
            try:
                psol = solve_pressure(a_flow, problem.pressure_bc, backend=config.backend)
            except SingularFlowSystemError as exc:
                raise SingularFlowSystemError(f"iteration {loop}: {exc}") from exc
            p = psol.p

            f = -(t_global @ p)
            moduli = simp_modulus(xphys, elastic)
            k_stiff = assembler.stiffness(moduli, elastic.nu)
            try:
                u = solve_elasticity(k_stiff, f, problem.displacement_bc,
                                     backend=config.backend)
            except NotPositiveDefiniteError as exc:
                raise NotPositiveDefiniteError(f"iteration {loop}: {exc}") from exc

            obj = compliance(u, f)
            lam1 = adjoint_pressure(u, t_global, psol)
            grad = objective_gradient(
                xphys, u, p, lam1, mesh, flow, elastic, config.lst
            )
            vol, _ = volume_constraint(xphys, config.volfrac)

            if loop == 1:
                if obj <= 0:
                    raise RuntimeError(f"first-iteration compliance {obj} is not positive")
                normf = config.normalization_target / obj

            sens = filt.backward(grad * normf)

            xval = x_mma
            xmin = np.maximum(0.0, xval - config.move_limit)
            xmax = np.minimum(1.0, xval + config.move_limit)
            x_new = optimizer.update(
                xval, obj * normf, sens[act], vol, dvol[act], xmin, xmax
            )
            change = float(np.abs(x_new - xval).max())
            x_mma = x_new

            x_full[act] = x_new
            xphys = filt.forward(x_full)
            xphys[problem.passive_solid] = 1.0
            xphys[problem.passive_void] = 0.0

            seconds = time.perf_counter() - t0
            history.append(loop, obj, obj * normf, float(xphys.mean()), change, seconds)
            writer.append(history)
            if log is not None:
                log(PROGRESS_FORMAT.format(
                    it=loop, obj=obj * normf, vol=float(xphys.mean()), ch=change
                ))

    finally:
        writer.close()
    return RunResult(
        config=config, design=x_full, xphys=xphys, pressure=p,
        displacement=u, history=history, problem=problem, normf=normf,
    )


class _HistoryWriter:
    """Streams history rows to disk so crashed runs keep partial data."""

    HEADER = "iter,compliance,compliance_normalized,volfrac,change,seconds"

    def __init__(self, path):
        self._fh = None
        if path is not None:
            self._fh = open(path, "w", encoding="utf-8")
            self._fh.write(self.HEADER + "\n")
            self._fh.flush()

    def append(self, history: RunHistory):
        if self._fh is None:
            return
        it = len(history) - 1
        self._fh.write(
            f"{history.iteration[it]},{history.compliance[it]!r},"
            f"{history.compliance_normalized[it]!r},{history.volfrac[it]!r},"
            f"{history.change[it]!r},{history.seconds[it]!r}\n"
        )
        self._fh.flush()

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None
