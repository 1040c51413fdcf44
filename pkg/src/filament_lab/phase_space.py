"""The two parametrizations (z0, Gamma, j) and (q, p, j) and the map between them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import ModelConstants
from .errors import DegenerateDirectionError, NotInOmegaError
from .invariants import F_DEGENERATE, constraint_phi0, vector_f
from .spin_field import SpinField

TOL_PHI0 = 1e-8
_TINY = 1e-300


@dataclass(frozen=True, eq=False)
class ClassicalPoint:
    z0: np.ndarray
    gamma: float
    field: SpinField

    def __post_init__(self):
        object.__setattr__(self, "z0", np.asarray(self.z0, dtype=float).reshape(3))
        object.__setattr__(self, "gamma", float(self.gamma))


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """q is stored as m0 * z0 + tau * t0 * p (mass x length)."""

    q: np.ndarray
    p: np.ndarray
    field: SpinField

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).reshape(3))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(3))


def is_admissible(point: PhasePoint, tol: float = TOL_PHI0, f=None) -> bool:
    f = vector_f(point.field) if f is None else f
    scale = float(point.p @ point.p) * float(f @ f) + _TINY
    return abs(constraint_phi0(point.p, point.field, f=f)) <= tol * scale


def to_omega(point: ClassicalPoint, tau: float, constants: ModelConstants) -> PhasePoint:
    f = vector_f(point.field)
    if point.gamma != 0 and np.linalg.norm(f) <= F_DEGENERATE:
        raise DegenerateDirectionError("f vanishes for a filament with nonzero circulation")
    p = constants.sigma * constants.R0**2 * point.gamma * f
    q = constants.m0 * point.z0 + tau * constants.t0 * p
    return PhasePoint(q, p, point.field)


def from_omega(point: PhasePoint, tau: float, constants: ModelConstants, tol: float = TOL_PHI0) -> ClassicalPoint:
    """Inverse of :func:`to_omega`.

    Gamma takes the sign of sigma * (p . f), so negative circulations survive
    the round trip.
    """
    f = vector_f(point.field)
    f_norm = float(np.linalg.norm(f))
    p_norm = float(np.linalg.norm(point.p))
    if p_norm == 0:
        gamma = 0.0
    else:
        if f_norm <= F_DEGENERATE:
            raise DegenerateDirectionError("f vanishes but p does not: no filament maps here")
        if not is_admissible(point, tol, f=f):
            raise NotInOmegaError(
                f"Phi0 = {constraint_phi0(point.p, point.field, f=f):.3e} violates p || f; "
                "the point represents no filament"
            )
        gamma = float(np.sign(constants.sigma * (point.p @ f))) * p_norm / (constants.R0**2 * f_norm)
    z0 = (point.q - tau * constants.t0 * point.p) / constants.m0
    return ClassicalPoint(z0, gamma, point.field)
