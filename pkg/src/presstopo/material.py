"""Material interpolation: projection, flow/drainage coefficients, SIMP.

All functions accept scalars or numpy arrays of densities in [0, 1] and are
smooth, which the adjoint gradient checks rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FlowModel:
    """Parameters of the Darcy-with-drainage pressure model.

    ``eta``/``beta`` are the shared step position and slope used by both the
    flow and drainage projections.  The drainage magnitude ``ds`` is derived
    from the pressure-drop ratio ``r`` and penetration depth ``dels`` so that
    pressure decays to ``r * p_in`` within ``dels`` element lengths of solid:
    ``ds = (ln(r) / dels)**2 * ks``.
    """

    kv: float = 1.0
    epsf: float = 1e-7
    eta: float = 0.2
    beta: float = 10.0
    r: float = 0.1
    dels: float = 2.0

    def __post_init__(self):
        if not 0 < self.epsf <= 1:
            raise ValueError(f"flow contrast epsf must be in (0, 1], got {self.epsf}")
        if not 0 < self.eta < 1:
            raise ValueError(f"step position eta must be in (0, 1), got {self.eta}")
        if self.beta <= 0:
            raise ValueError(f"step slope beta must be positive, got {self.beta}")
        if not 0 < self.r < 1:
            raise ValueError(f"pressure-drop ratio r must be in (0, 1), got {self.r}")
        if self.dels <= 0:
            raise ValueError(f"penetration depth dels must be positive, got {self.dels}")
        if self.kv <= 0:
            raise ValueError(f"void flow coefficient kv must be positive, got {self.kv}")

    @property
    def ks(self) -> float:
        """Solid-phase flow coefficient."""
        return self.epsf * self.kv

    @property
    def ds(self) -> float:
        """Drainage magnitude."""
        return (np.log(self.r) / self.dels) ** 2 * self.ks

    @property
    def kvs(self) -> float:
        """Flow coefficient drop kv - ks (the slope factor of dK/dH)."""
        return self.kv - self.ks


@dataclass(frozen=True)
class ElasticModel:
    """SIMP elasticity parameters."""

    e1: float = 1.0
    emin: float = field(default=1e-5)
    nu: float = 0.3
    penal: float = 3.0

    def __post_init__(self):
        if not 0 < self.emin < self.e1:
            raise ValueError(f"need 0 < emin < e1, got emin={self.emin}, e1={self.e1}")
        if self.penal < 1:
            raise ValueError(f"SIMP exponent must be >= 1, got {self.penal}")
        if not 0 <= self.nu < 0.5:
            raise ValueError(f"Poisson ratio must be in [0, 0.5), got {self.nu}")


def heaviside(x, beta: float, eta: float):
    """Smooth Heaviside step with position ``eta`` and slope ``beta``.

    H(0) = 0 and H(1) = 1 exactly; strictly increasing for beta > 0.
    """
    x = np.asarray(x, dtype=float)
    denom = np.tanh(beta * eta) + np.tanh(beta * (1.0 - eta))
    return (np.tanh(beta * eta) + np.tanh(beta * (x - eta))) / denom


def heaviside_derivative(x, beta: float, eta: float):
    """Derivative of :func:`heaviside` with respect to the density."""
    x = np.asarray(x, dtype=float)
    denom = np.tanh(beta * eta) + np.tanh(beta * (1.0 - eta))
    return beta * (1.0 - np.tanh(beta * (x - eta)) ** 2) / denom


def flow_coefficient(x, model: FlowModel):
    """Flow coefficient K(x): kv in void, ks = epsf*kv in solid."""
    return model.kv * (1.0 - (1.0 - model.epsf) * heaviside(x, model.beta, model.eta))


def drainage_coefficient(x, model: FlowModel):
    """Drainage coefficient D(x): 0 in void, ds in solid."""
    return model.ds * heaviside(x, model.beta, model.eta)


def simp_modulus(x, model: ElasticModel):
    """Young's modulus emin + x**p * (e1 - emin)."""
    x = np.asarray(x, dtype=float)
    return model.emin + x ** model.penal * (model.e1 - model.emin)


def simp_derivative(x, model: ElasticModel):
    """dE/dx = p * x**(p-1) * (e1 - emin)."""
    x = np.asarray(x, dtype=float)
    return model.penal * x ** (model.penal - 1.0) * (model.e1 - model.emin)
