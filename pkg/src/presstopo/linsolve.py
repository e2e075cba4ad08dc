"""Direct sparse solves for the pressure and elasticity systems.

Both systems are solved by symmetric direct factorization with Dirichlet
conditions handled by partition-and-eliminate: the free-free block is
factorized and the prescribed values enter through the right-hand side.
CHOLMOD (via cvxopt) is used when available and falls back to SuperLU;
factorizations are rebuilt every call because the coefficients change with
the design.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import SymmetricSparse

try:
    import cvxopt
    import cvxopt.cholmod

    _HAS_CHOLMOD = True
except ImportError:  # pragma: no cover - exercised only without cvxopt
    _HAS_CHOLMOD = False

DEFAULT_BACKEND = "cholmod" if _HAS_CHOLMOD else "splu"


class SingularFlowSystemError(RuntimeError):
    """The restrained flow matrix is singular (no drainage and no pressure BC)."""


class NotPositiveDefiniteError(RuntimeError):
    """Cholesky factorization failed; reports the offending column when known."""


class SpdFactor:
    """Factorization of a sparse symmetric positive definite matrix.

    Parameters
    ----------
    a_full : scipy sparse matrix
        Full symmetric matrix (the lower triangle is what gets factorized
        with the cholmod backend).
    backend : {"cholmod", "splu"}
    name : str
        Used in error messages.
    """

    def __init__(self, a_full, backend: str = DEFAULT_BACKEND, name: str = "system"):
        a_full = a_full.tocsc()
        self.n = a_full.shape[0]
        self.backend = backend
        self.name = name
        if backend == "cholmod":
            if not _HAS_CHOLMOD:
                raise RuntimeError("cholmod backend requested but cvxopt is missing")
            # always-supernodal: CHOLMOD's auto heuristic mispredicts badly on
            # lightly restrained elasticity systems (interior-only supports)
            cvxopt.cholmod.options["supernodal"] = 2
            low = sp.tril(a_full).tocoo()
            a_cv = cvxopt.spmatrix(
                low.data,
                low.row.astype(np.int64),
                low.col.astype(np.int64),
                size=low.shape,
            )
            self._factor = cvxopt.cholmod.symbolic(a_cv)
            try:
                cvxopt.cholmod.numeric(a_cv, self._factor)
            except ArithmeticError as exc:
                col = exc.args[0] if exc.args else "unknown"
                raise NotPositiveDefiniteError(
                    f"{name}: factorization failed at column {col} of {self.n}"
                ) from exc
        elif backend == "splu":
            try:
                self._factor = spla.splu(
                    a_full.tocsc(),
                    permc_spec="MMD_AT_PLUS_A",
                    options={"SymmetricMode": True},
                )
            except RuntimeError as exc:
                raise NotPositiveDefiniteError(f"{name}: {exc}") from exc
        else:
            raise ValueError(f"unknown solver backend {backend!r}")

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0)
        if self.backend == "cholmod":
            rhs = cvxopt.matrix(np.asarray(b, dtype=float))
            cvxopt.cholmod.solve(self._factor, rhs)
            return np.asarray(rhs).ravel()
        return self._factor.solve(np.asarray(b, dtype=float))


@dataclass(frozen=True)
class PressureBC:
    """Prescribed pressure values on a set of nodes."""

    fixed_dofs: np.ndarray
    fixed_values: np.ndarray

    def __post_init__(self):
        fixed = np.asarray(self.fixed_dofs, dtype=np.int64)
        vals = np.asarray(self.fixed_values, dtype=float)
        if fixed.shape != vals.shape:
            raise ValueError("fixed_dofs and fixed_values must have matching shapes")
        if len(np.unique(fixed)) != len(fixed):
            raise ValueError("fixed pressure DOFs must be distinct")
        if not np.all(np.isfinite(vals)):
            raise ValueError("fixed pressure values must be finite")
        object.__setattr__(self, "fixed_dofs", fixed)
        object.__setattr__(self, "fixed_values", vals)

    def free_dofs(self, n: int) -> np.ndarray:
        return np.setdiff1d(np.arange(n), self.fixed_dofs)


@dataclass(frozen=True)
class DisplacementBC:
    """Homogeneous supports: the listed displacement DOFs are fixed at zero."""

    fixed_dofs: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "fixed_dofs", np.unique(np.asarray(self.fixed_dofs, dtype=np.int64))
        )

    def free_dofs(self, n: int) -> np.ndarray:
        return np.setdiff1d(np.arange(n), self.fixed_dofs)


@dataclass
class PressureSolution:
    """Pressure field plus the pieces the adjoint solve reuses."""

    p: np.ndarray
    free: np.ndarray
    fixed: np.ndarray
    factor: SpdFactor | None
    a_full: sp.csc_matrix = field(repr=False)

    def free_residual_inf(self) -> float:
        """Infinity norm of (A p) restricted to the free DOFs."""
        if len(self.free) == 0:
            return 0.0
        return float(np.abs((self.a_full @ self.p)[self.free]).max())

    def prescribed_block_residual(self) -> np.ndarray:
        """Back-substitution check A_fp^T p_f + A_pp p_p (reaction fluxes)."""
        if len(self.fixed) == 0:
            return np.zeros(0)
        return np.asarray((self.a_full @ self.p)[self.fixed])


def solve_pressure(
    a: SymmetricSparse, bc: PressureBC, backend: str = DEFAULT_BACKEND
) -> PressureSolution:
    """Solve A p = 0 subject to prescribed pressures.

    The free block solves ``A_ff p_f = -A_fp p_p``.  Raises
    :class:`SingularFlowSystemError` when the free block cannot be factorized.
    """
    n = a.n
    fixed = bc.fixed_dofs
    free = bc.free_dofs(n)
    a_full = a.full()

    p = np.zeros(n)
    p[fixed] = bc.fixed_values
    if len(free) == 0:
        return PressureSolution(p=p, free=free, fixed=fixed, factor=None, a_full=a_full)
    if len(fixed) == 0:
        # without prescribed DOFs the constant vector must not be in the
        # nullspace, i.e. some drainage has to be present
        ones = np.ones(n)
        if np.abs(a_full @ ones).max() <= 1e-12 * max(a.norm_inf(), 1.0):
            raise SingularFlowSystemError(
                "singular flow system: no prescribed pressures and no drainage "
                "(constant nullspace)"
            )

    aff = a_full[free][:, free]
    try:
        factor = SpdFactor(aff, backend=backend, name="flow system")
    except NotPositiveDefiniteError as exc:
        raise SingularFlowSystemError(f"singular flow system: {exc}") from exc

    if len(fixed):
        rhs = -(a_full[free][:, fixed] @ bc.fixed_values)
    else:
        rhs = np.zeros(len(free))
    p[free] = factor.solve(rhs)
    return PressureSolution(p=p, free=free, fixed=fixed, factor=factor, a_full=a_full)


def solve_elasticity(
    k: SymmetricSparse,
    f: np.ndarray,
    bc: DisplacementBC,
    backend: str = DEFAULT_BACKEND,
) -> np.ndarray:
    """Solve K u = f with homogeneous supports; u is zero on fixed DOFs."""
    n = k.n
    f = np.asarray(f, dtype=float)
    if f.shape != (n,):
        raise ValueError(f"force vector must have length {n}, got {f.shape}")
    free = bc.free_dofs(n)
    u = np.zeros(n)
    if len(free) == 0:
        return u
    kff = k.full()[free][:, free]
    factor = SpdFactor(kff, backend=backend, name="stiffness system")
    u[free] = factor.solve(f[free])
    return u
