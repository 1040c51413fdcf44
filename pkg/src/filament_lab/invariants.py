"""f-vector, momenta, energies, the collinearity constraint and the mass tensor."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import kernels
from ._spectral import spectral_derivative
from .constants import ModelConstants
from .errors import DegenerateDirectionError, InapplicableOracleError
from .reconstruction import (
    FilamentCurve,
    closure_residual,
    kernel_value,
    reconstruct_curve,
    step_kernel_integral,
)
from .spin_field import SpinField, residual_unit_norm, residual_zero_mean, spin_energy

F_DEGENERATE = 1e-12
CLOSURE_TOL = 1e-8


def vector_f(field: SpinField, method: str = "fast", kernel=kernel_value, backend=None) -> np.ndarray:
    """f = 1/2 iint [xi - eta] j(xi) x j(eta) d xi d eta.

    The inner eta-integral is the same step-kernel integral that builds the
    curve, so f = 1/2 h sum_i j_i x Z_i with Z the kernel integral at node i.
    ``method`` picks the O(N log N) or the O(N^2) evaluation of Z.
    """
    inner = step_kernel_integral(field.samples, kernel=kernel, method=method, backend=backend)[:-1]
    return 0.5 * field.h * kernels.cross_sum(field.samples, inner, backend=backend)


def momentum(field: SpinField, constants: ModelConstants, kernel=kernel_value, method: str = "fast") -> np.ndarray:
    return constants.sigma * constants.R0**2 * constants.gamma * vector_f(field, method=method, kernel=kernel)


def _require_closed(curve: FilamentCurve, tol):
    tol = CLOSURE_TOL * curve.R0 if tol is None else tol
    res = closure_residual(curve)
    if res > tol:
        raise InapplicableOracleError(f"curve is not closed (jump {res:.3e} > {tol:.3e})")


def impulse_direct(curve: FilamentCurve, constants: ModelConstants, tol=None) -> np.ndarray:
    """Hydrodynamic impulse 1/2 Gamma oint z x dz of the line vortex."""
    _require_closed(curve, tol)
    z = np.asarray(curve.nodes)
    dz = spectral_derivative(z, 1)
    return 0.5 * constants.gamma * (2 * np.pi / curve.N) * kernels.cross_sum(z, dz)


def angular_momentum(curve: FilamentCurve, constants: ModelConstants, tol=None) -> np.ndarray:
    """(Gamma/3) oint z x (z x dz), the line-vortex form of 1/3 int r x (r x w) dV."""
    _require_closed(curve, tol)
    z = np.asarray(curve.nodes)
    dz = spectral_derivative(z, 1)
    inner = kernels.cross_rows(z, dz)
    return constants.gamma / 3.0 * (2 * np.pi / curve.N) * kernels.cross_sum(z, inner)


def hamiltonian_H0(p, field: SpinField, constants: ModelConstants) -> float:
    p = np.asarray(p, dtype=float)
    return float(p @ p / (2 * constants.m0) + constants.E0 * spin_energy(field))


def _direction(f):
    norm = float(np.linalg.norm(f))
    if norm <= F_DEGENERATE:
        raise DegenerateDirectionError(f"|f| = {norm:.3e}: direction n_f undefined")
    return f / norm


def energy_restricted(p, field: SpinField, constants: ModelConstants, f=None) -> float:
    """(p . n_f)^2 / 2 m0 + E0 * spin energy."""
    n_f = _direction(vector_f(field) if f is None else np.asarray(f, dtype=float))
    proj = float(np.asarray(p, dtype=float) @ n_f)
    return proj * proj / (2 * constants.m0) + constants.E0 * spin_energy(field)


def effective_mass_inverse(field: SpinField, constants: ModelConstants, f=None) -> np.ndarray:
    n_f = _direction(vector_f(field) if f is None else np.asarray(f, dtype=float))
    return np.outer(n_f, n_f) / constants.m0


def constraint_phi0(p, field: SpinField, f=None) -> float:
    """(p.f)^2 - p^2 f^2; never positive."""
    p = np.asarray(p, dtype=float)
    f = vector_f(field) if f is None else np.asarray(f, dtype=float)
    pf = float(p @ f)
    return pf * pf - float(p @ p) * float(f @ f)


@dataclass
class InvariantReport:
    phi: np.ndarray
    unit_norm_res: float
    f: np.ndarray
    p: np.ndarray
    s: np.ndarray
    spin_energy: float
    H0: float
    E_restricted: float
    inv_mass: np.ndarray
    phi0: float
    degenerate_direction: bool = False
    extra: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        def num(x):
            x = float(x)
            return x if math.isfinite(x) else None

        out = {
            "phi": [num(v) for v in self.phi],
            "unit_norm_res": num(self.unit_norm_res),
            "f": [num(v) for v in self.f],
            "p": [num(v) for v in self.p],
            "s": [num(v) for v in self.s],
            "spin_energy": num(self.spin_energy),
            "H0": num(self.H0),
            "E_restricted": num(self.E_restricted),
            "inv_mass": [num(v) for v in np.asarray(self.inv_mass).ravel()],
            "phi0": num(self.phi0),
            "degenerate_direction": self.degenerate_direction,
        }
        out.update(self.extra)
        return out


def invariant_report(field: SpinField, constants: ModelConstants, p=None, basepoint=(0.0, 0.0, 0.0)) -> InvariantReport:
    """Evaluate every invariant at one state.

    ``p`` defaults to the momentum of the field (which lies on Omega by
    construction). Quantities undefined at the state (n_f when f = 0, s for a
    non-closed curve) are reported as NaN rather than raised.
    """
    f = vector_f(field)
    p = constants.sigma * constants.R0**2 * constants.gamma * f if p is None else np.asarray(p, dtype=float)
    curve = reconstruct_curve(field, basepoint, constants)
    try:
        s = angular_momentum(curve, constants)
    except InapplicableOracleError:
        s = np.full(3, np.nan)
    e_spin = spin_energy(field)
    degenerate = float(np.linalg.norm(f)) <= F_DEGENERATE
    if degenerate:
        e_res = float("nan")
        inv_mass = np.full((3, 3), np.nan)
    else:
        e_res = energy_restricted(p, field, constants, f=f)
        inv_mass = effective_mass_inverse(field, constants, f=f)
    return InvariantReport(
        phi=residual_zero_mean(field),
        unit_norm_res=residual_unit_norm(field),
        f=f,
        p=p,
        s=s,
        spin_energy=e_spin,
        H0=float(p @ p / (2 * constants.m0) + constants.E0 * e_spin),
        E_restricted=e_res,
        inv_mass=inv_mass,
        phi0=constraint_phi0(p, field, f=f),
        degenerate_direction=degenerate,
    )
