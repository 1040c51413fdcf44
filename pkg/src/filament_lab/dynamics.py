"""Time integration of d_tau j = j x d_xi^2 j and the local-induction cross-check."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import kernels
from ._spectral import spectral_derivative
from .constants import ModelConstants
from .errors import ConvergenceError, EvolutionAborted, InvalidInputError, NumericalError, StepFailure
from .invariants import InvariantReport, invariant_report
from .reconstruction import step_kernel_integral
from .spin_field import SpinField

log = logging.getLogger(__name__)

INTEGRATORS = ("midpoint", "rk4")
MIN_NORM = 1e-8


def _rhs(j: np.ndarray) -> np.ndarray:
    return kernels.cross_rows(j, spectral_derivative(j, 2))


def rhs_spin(field: SpinField) -> np.ndarray:
    """Samples of j x j'' (spectral second derivative)."""
    return _rhs(field.samples)


def default_dtau(N: int, factor: float = 0.2) -> float:
    """Dispersive CFL step ``factor * h**2``."""
    return factor * (2 * np.pi / N) ** 2


def _check_norms(arr, what):
    norms = np.linalg.norm(arr, axis=1)
    if not np.all(np.isfinite(norms)) or np.min(norms) < MIN_NORM:
        raise StepFailure(f"{what}: sample norm collapsed to {np.nanmin(norms):.3e}")
    return norms


def _rk4_array(j, dtau):
    k1 = _rhs(j)
    k2 = _rhs(j + 0.5 * dtau * k1)
    k3 = _rhs(j + 0.5 * dtau * k2)
    k4 = _rhs(j + dtau * k3)
    out = j + dtau / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    norms = _check_norms(out, "rk4 step")
    return out / norms[:, None]


def _midpoint_array(j, dtau, tol, max_iter):
    new = j + dtau * _rhs(j)
    prev_delta = None
    contraction = float("nan")
    for _ in range(max_iter):
        trial = j + dtau * _rhs(0.5 * (j + new))
        delta = float(np.max(np.abs(trial - new)))
        if prev_delta:
            contraction = delta / prev_delta
        new = trial
        if not np.isfinite(delta) or delta > 1e3:
            break
        if delta <= tol:
            return new
        prev_delta = delta
    raise ConvergenceError(
        f"implicit midpoint did not converge in {max_iter} iterations "
        f"(last increment {delta:.3e}, contraction {contraction:.3g}); reduce dtau",
        contraction=contraction,
    )


def step_rk4_projected(field: SpinField, dtau: float) -> SpinField:
    """Classical RK4 step followed by pointwise renormalization."""
    if not dtau > 0:
        raise InvalidInputError("dtau must be positive")
    return SpinField(_rk4_array(field.samples, dtau))


def step_implicit_midpoint(field: SpinField, dtau: float, tol: float = 1e-14, max_iter: int = 100) -> SpinField:
    """Implicit midpoint step solved by fixed-point iteration.

    No renormalization: the scheme keeps every |j_i| exactly in exact
    arithmetic because the update is orthogonal to the midpoint sample.
    """
    if not dtau > 0:
        raise InvalidInputError("dtau must be positive")
    return SpinField(_midpoint_array(field.samples, dtau, tol, max_iter))


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    reports: list
    dtau: float
    integrator: str
    p: np.ndarray = dc_field(default_factory=lambda: np.zeros(3))

    def drift(self) -> dict:
        """Maximum deviation of each monitored quantity from its initial value."""
        if not self.reports:
            return {}
        r0: InvariantReport = self.reports[0]
        e = np.array([r.spin_energy for r in self.reports])
        f = np.array([r.f for r in self.reports])
        phi = np.array([np.linalg.norm(r.phi) for r in self.reports])
        unit = np.array([r.unit_norm_res for r in self.reports])
        h0 = np.array([r.H0 for r in self.reports])
        f0 = max(np.linalg.norm(r0.f), 1e-300)
        return {
            "spin_energy_rel": float(np.max(np.abs(e - e[0])) / max(abs(e[0]), 1e-300)),
            "H0_rel": float(np.max(np.abs(h0 - h0[0])) / max(abs(h0[0]), 1e-300)),
            "f_rel": float(np.max(np.linalg.norm(f - f[0], axis=1)) / f0),
            "phi_max": float(np.max(phi)),
            "unit_norm_max": float(np.max(unit)),
        }


def evolve(
    field: SpinField,
    dtau: float,
    n_steps: int,
    integrator: str = "midpoint",
    monitor_every: int | None = None,
    constants: ModelConstants | None = None,
    p=None,
    tol: float = 1e-14,
    max_iter: int = 100,
    on_snapshot=None,
    capture_steps=(),
    on_capture=None,
) -> Trajectory:
    """Integrate the l_k = 0 flow; p is carried unchanged.

    A report is recorded at step 0 and every ``monitor_every`` steps (plus the
    last step); ``on_snapshot(tau, state)`` sees each recorded state.
    ``on_capture(tau, state)`` is called at the extra ``capture_steps`` without
    touching the report cadence. On a step failure :class:`EvolutionAborted`
    is raised with the partial trajectory attached.
    """
    if integrator not in INTEGRATORS:
        raise InvalidInputError(f"unknown integrator {integrator!r}; expected one of {INTEGRATORS}")
    if not dtau > 0:
        raise InvalidInputError("dtau must be positive")
    if n_steps < 0:
        raise InvalidInputError("n_steps must be non-negative")
    constants = ModelConstants() if constants is None else constants
    monitor_every = max(1, n_steps // 100) if monitor_every is None else max(1, int(monitor_every))
    p = np.zeros(3) if p is None else np.asarray(p, dtype=float)

    traj = Trajectory(times=np.zeros(0), states=[], reports=[], dtau=dtau, integrator=integrator, p=p)
    times = []

    def record(step, arr):
        state = SpinField(arr)
        times.append(step * dtau)
        traj.states.append(state)
        traj.reports.append(invariant_report(state, constants, p=p))
        if on_snapshot is not None:
            on_snapshot(step * dtau, state)

    capture_steps = set(int(s) for s in capture_steps)
    arr = np.array(field.samples)
    record(0, arr)
    if on_capture is not None and 0 in capture_steps:
        on_capture(0.0, SpinField(arr))
    for step in range(1, n_steps + 1):
        try:
            if integrator == "midpoint":
                arr = _midpoint_array(arr, dtau, tol, max_iter)
            else:
                arr = _rk4_array(arr, dtau)
        except NumericalError as exc:
            traj.times = np.array(times)
            raise EvolutionAborted(f"step {step} failed: {exc}", trajectory=traj, cause=exc) from exc
        if step % monitor_every == 0 or step == n_steps:
            record(step, arr)
        if on_capture is not None and step in capture_steps:
            on_capture(step * dtau, SpinField(arr))
    traj.times = np.array(times)
    return traj


def lie_residual(field: SpinField, constants: ModelConstants):
    """Compare d_tau z implied by the spin flow with the LIA velocity.

    Returns ``(uniform_part, nonuniform_norm)`` of ``A - B`` where
    ``A = R0 int [xi - eta] (j x j'')(eta) d eta`` and ``B = R0 j x j'``.
    """
    j = field.samples
    a = constants.R0 * step_kernel_integral(_rhs(j))[:-1]
    b = constants.R0 * kernels.cross_rows(j, spectral_derivative(j, 1))
    diff = a - b
    uniform = diff.mean(axis=0)
    return uniform, float(np.max(np.linalg.norm(diff - uniform, axis=1)))


def lia_curve_rhs(nodes: np.ndarray, R0: float) -> np.ndarray:
    """(1/R0) z' x z'' for a closed curve sampled at the periodic nodes."""
    return kernels.cross_rows(spectral_derivative(nodes, 1), spectral_derivative(nodes, 2)) / R0


def integrate_lia_curve(nodes: np.ndarray, R0: float, dtau: float, n_steps: int, record_every: int = 0):
    """Integrate the local induction equation for the curve itself with RK4.

    Returns a list of ``(tau, nodes)`` snapshots (initial, every
    ``record_every`` steps, and final).
    """
    z = np.array(nodes, dtype=float)
    out = [(0.0, z.copy())]
    for step in range(1, n_steps + 1):
        k1 = lia_curve_rhs(z, R0)
        k2 = lia_curve_rhs(z + 0.5 * dtau * k1, R0)
        k3 = lia_curve_rhs(z + 0.5 * dtau * k2, R0)
        k4 = lia_curve_rhs(z + dtau * k3, R0)
        z = z + dtau / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (record_every and step % record_every == 0) or step == n_steps:
            out.append((step * dtau, z.copy()))
    return out
