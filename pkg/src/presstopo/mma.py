"""Method of Moving Asymptotes update for box-constrained minimization.

One inequality constraint (the volume constraint) is supported, which keeps
the convex subproblem solvable by safeguarded bisection on its single dual
variable: for a fixed multiplier the separable primal minimizer is available
in closed form, and the dual derivative is monotone.

The subproblem of one iteration is

    min  sum_i [ p0_i/(upp_i - x_i) + q0_i/(x_i - low_i) ] + a0*z + c*y
    s.t. sum_i [ p1_i/(upp_i - x_i) + q1_i/(x_i - low_i) ] - a*z - y <= b
         alfa <= x <= beta,   y >= 0,   z >= 0

with the standard approximation coefficients

    p_i = (upp_i - x_i)^2 * (1.001*max(df_i, 0) + 0.001*max(-df_i, 0) + raa0/range)

and symmetric q_i.  The elastic variable y (cost c = 1000) guarantees the
subproblem is always feasible.
"""

from __future__ import annotations

import numpy as np


class MmaOptimizer:
    """Stateful MMA updater for n variables in a fixed global box.

    Parameters
    ----------
    n : int
        Number of design variables.
    xmin_global, xmax_global : float
        Global variable box used by the asymptote rules.
    a0, a, c, d : float
        Subproblem constants for the single constraint (defaults 1, 0, 1000, 0).
    """

    ASYINIT = 0.5
    ASYINCR = 1.2
    ASYDECR = 0.7
    ALBEFA = 0.1
    RAA0 = 1e-5

    def __init__(
        self,
        n: int,
        xmin_global: float = 0.0,
        xmax_global: float = 1.0,
        a0: float = 1.0,
        a: float = 0.0,
        c: float = 1000.0,
        d: float = 0.0,
    ):
        if d != 0.0 or a != 0.0:
            raise NotImplementedError("the dual subsolver assumes a = 0 and d = 0")
        self.n = int(n)
        self.a0, self.a, self.c, self.d = a0, a, c, d
        self.range = xmax_global - xmin_global
        if self.range <= 0:
            raise ValueError("xmax_global must exceed xmin_global")
        self.iteration = 0
        self.low = None
        self.upp = None
        self.xold1 = None
        self.xold2 = None
        # diagnostics of the last subproblem solve
        self.last_lam = 0.0
        self.last_y = 0.0
        self.last_bounds = None

    def _update_asymptotes(self, x):
        rg = self.range
        if self.iteration <= 2:
            self.low = x - self.ASYINIT * rg
            self.upp = x + self.ASYINIT * rg
        else:
            zzz = (x - self.xold1) * (self.xold1 - self.xold2)
            factor = np.ones(self.n)
            factor[zzz > 0] = self.ASYINCR
            factor[zzz < 0] = self.ASYDECR
            self.low = x - factor * (self.xold1 - self.low)
            self.upp = x + factor * (self.upp - self.xold1)
            np.clip(self.low, x - 10.0 * rg, x - 0.01 * rg, out=self.low)
            np.clip(self.upp, x + 0.01 * rg, x + 10.0 * rg, out=self.upp)

    def update(self, x, f0, df0, fval, dfdx, xmin, xmax):
        """One MMA iteration; returns the new design vector.

        ``xmin``/``xmax`` are the (already move-limited) bound constraints for
        this step; ``fval``/``dfdx`` describe the single inequality constraint
        f(x) <= 0.
        """
        x = np.asarray(x, dtype=float)
        df0 = np.asarray(df0, dtype=float)
        dfdx = np.asarray(dfdx, dtype=float)
        xmin = np.asarray(xmin, dtype=float)
        xmax = np.asarray(xmax, dtype=float)
        for name, arr in (("x", x), ("df0", df0), ("dfdx", dfdx),
                          ("xmin", xmin), ("xmax", xmax)):
            if arr.shape != (self.n,):
                raise ValueError(f"{name} must have shape ({self.n},), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite values in {name}")
        if not (np.isfinite(f0) and np.isfinite(fval)):
            raise ValueError("non-finite objective or constraint value")

        self.iteration += 1
        self._update_asymptotes(x)

        low, upp = self.low, self.upp
        alfa = np.maximum(xmin, low + self.ALBEFA * (x - low))
        beta = np.minimum(xmax, upp - self.ALBEFA * (upp - x))

        ux2 = (upp - x) ** 2
        xl2 = (x - low) ** 2
        reg = self.RAA0 / max(self.range, 1e-5)
        p0 = (1.001 * np.maximum(df0, 0) + 0.001 * np.maximum(-df0, 0) + reg) * ux2
        q0 = (0.001 * np.maximum(df0, 0) + 1.001 * np.maximum(-df0, 0) + reg) * xl2
        p1 = (1.001 * np.maximum(dfdx, 0) + 0.001 * np.maximum(-dfdx, 0) + reg) * ux2
        q1 = (0.001 * np.maximum(dfdx, 0) + 1.001 * np.maximum(-dfdx, 0) + reg) * xl2
        b = float(p1 @ (1.0 / (upp - x)) + q1 @ (1.0 / (x - low)) - fval)

        x_new, lam, y = _solve_dual(p0, q0, p1, q1, b, low, upp, alfa, beta, self.c)
        self.last_lam, self.last_y = lam, y
        self.last_bounds = (alfa, beta)
        self.last_subproblem = {
            "p0": p0, "q0": q0, "p1": p1, "q1": q1, "b": b,
            "low": low.copy(), "upp": upp.copy(), "alfa": alfa, "beta": beta,
            "c": self.c,
        }

        self.xold2 = self.xold1 if self.xold1 is not None else x
        self.xold1 = x
        return x_new


def _primal_x(lam, p0, q0, p1, q1, low, upp, alfa, beta):
    p = p0 + lam * p1
    q = q0 + lam * q1
    sp_ = np.sqrt(p)
    sq = np.sqrt(q)
    x = (low * sp_ + upp * sq) / (sp_ + sq)
    return np.clip(x, alfa, beta)


def _constraint_value(x, p1, q1, b, low, upp):
    return float(p1 @ (1.0 / (upp - x)) + q1 @ (1.0 / (x - low)) - b)


def _solve_dual(p0, q0, p1, q1, b, low, upp, alfa, beta, c):
    """Maximize the dual over lam in [0, c] by safeguarded bisection."""

    def h(lam):
        return _constraint_value(
            _primal_x(lam, p0, q0, p1, q1, low, upp, alfa, beta), p1, q1, b, low, upp
        )

    scale = max(1.0, abs(b))
    if h(0.0) <= 0.0:
        lam = 0.0
    elif h(c) >= 0.0:
        lam = c
    else:
        lo, hi = 0.0, c
        for _ in range(200):
            lam = 0.5 * (lo + hi)
            val = h(lam)
            if abs(val) <= 1e-14 * scale:
                break
            if val > 0:
                lo = lam
            else:
                hi = lam
            if hi - lo <= 1e-16 * max(1.0, hi):
                break
        lam = 0.5 * (lo + hi)
    x = _primal_x(lam, p0, q0, p1, q1, low, upp, alfa, beta)
    y = max(0.0, h(lam)) if lam >= c else 0.0
    return x, lam, y


def subproblem_kkt_residual(x, lam, y, p0, q0, p1, q1, b, low, upp, alfa, beta, c):
    """KKT residual of the separable subproblem at (x, lam, y), z = 0.

    Combines per-variable stationarity (with sign conditions at active
    bounds), primal feasibility, dual feasibility and complementary
    slackness into a single max norm.
    """
    p = p0 + lam * p1
    q = q0 + lam * q1
    dphi = p / (upp - x) ** 2 - q / (x - low) ** 2
    scale = np.maximum(1.0, p / (upp - x) ** 2 + q / (x - low) ** 2)
    width = np.maximum(beta - alfa, 1e-300)
    at_lo = (x - alfa) <= 1e-12 * width
    at_hi = (beta - x) <= 1e-12 * width
    stat = np.abs(dphi) / scale
    stat[at_lo] = np.maximum(0.0, -dphi[at_lo]) / scale[at_lo]
    stat[at_hi] = np.maximum(0.0, dphi[at_hi]) / scale[at_hi]
    stat[at_lo & at_hi] = 0.0

    g = _constraint_value(x, p1, q1, b, low, upp)
    feas = max(0.0, g - y)
    comp = abs(lam * (g - y))
    dual_feas = max(0.0, lam - c) + max(0.0, -lam)
    y_stat = abs(min(c - lam, y))  # y > 0 requires lam = c
    return max(float(stat.max()), feas, comp, dual_feas, y_stat)
