"""Discrete Lie-Poisson bracket for functionals of the sampled spin field.

    {j_a(xi), j_b(eta)} = beta eps_abc j_c(xi) delta(xi - eta)

is discretized with delta(xi_i - xi_l) -> delta_il / h and
delta F / delta j(xi_i) -> (1/h) dF/dj_i, giving

    {F, G} = (beta / h) sum_i j_i . (dF/dj_i x dG/dj_i).

With this pairing the zero-mean functionals close into
{Phi_a, Phi_b} = beta eps_abc Phi_c at every N, not just asymptotically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from . import kernels
from ._spectral import spectral_derivative
from .constants import ModelConstants
from .errors import InapplicableOracleError, InvalidInputError
from .invariants import constraint_phi0, vector_f
from .spin_field import SpinField, residual_zero_mean, spin_energy

FD_STEP = 1e-6
LEVI_CIVITA = np.zeros((3, 3, 3))
for _a, _b, _c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_a, _b, _c] = 1.0
    LEVI_CIVITA[_b, _a, _c] = -1.0


@dataclass(frozen=True)
class DiscreteFunctional:
    """A scalar function of the field with an optional exact gradient.

    ``gradient`` returns dF/dj_i as an (N, 3) array (not the density; divide
    by h for delta F / delta j).
    """

    name: str
    evaluate: Callable[[SpinField], float]
    gradient: Optional[Callable[[SpinField], np.ndarray]] = None

    @property
    def has_analytic_gradient(self) -> bool:
        return self.gradient is not None

    def __call__(self, field: SpinField) -> float:
        return self.evaluate(field)

    def __mul__(self, other: "DiscreteFunctional") -> "DiscreteFunctional":
        grad = None
        if self.has_analytic_gradient and other.has_analytic_gradient:
            def grad(fld, a=self, b=other):
                return a.evaluate(fld) * b.gradient(fld) + b.evaluate(fld) * a.gradient(fld)
        return DiscreteFunctional(
            f"({self.name})*({other.name})", lambda fld, a=self, b=other: a.evaluate(fld) * b.evaluate(fld), grad
        )


def functional_gradient_fd(F: DiscreteFunctional, field: SpinField, step: float = FD_STEP) -> np.ndarray:
    """Central differences of F in every sample component; no constraint enforcement."""
    if not step > 0:
        raise InvalidInputError("step must be positive")
    base = np.array(field.samples)
    out = np.empty_like(base)
    for i in range(base.shape[0]):
        for a in range(3):
            orig = base[i, a]
            base[i, a] = orig + step
            plus = F.evaluate(SpinField(base))
            base[i, a] = orig - step
            minus = F.evaluate(SpinField(base))
            base[i, a] = orig
            out[i, a] = (plus - minus) / (2 * step)
    return out


def gradient_of(F: DiscreteFunctional, field: SpinField, step: float = FD_STEP) -> np.ndarray:
    if F.has_analytic_gradient:
        return np.asarray(F.gradient(field), dtype=float)
    return functional_gradient_fd(F, field, step)


def _beta(constants, beta):
    return constants.beta if beta is None else float(beta)


def poisson_bracket(F, G, field: SpinField, constants: ModelConstants, beta=None, step: float = FD_STEP) -> float:
    gf = gradient_of(F, field, step)
    gg = gradient_of(G, field, step)
    return float(_beta(constants, beta) / field.h * np.sum(field.samples * kernels.cross_rows(gf, gg)))


def bracket_velocity(F, field: SpinField, constants: ModelConstants, beta=None, step: float = FD_STEP) -> np.ndarray:
    """All coordinate brackets at once: ``out[i, b] = {F, j_b(xi_i)}``."""
    gf = gradient_of(F, field, step)
    return _beta(constants, beta) / field.h * kernels.cross_rows(field.samples, gf)


# -- functional catalogue ---------------------------------------------------

def phi_functional(a: int) -> DiscreteFunctional:
    """Phi_a = int j_a, with a in {0, 1, 2} for the three Cartesian components."""
    unit = np.eye(3)[a]
    return DiscreteFunctional(
        f"Phi{a + 1}",
        lambda fld: float(residual_zero_mean(fld)[a]),
        lambda fld: np.tile(fld.h * unit, (fld.N, 1)),
    )


def spin_energy_functional(scale: float = 1.0, name: str = "spin_energy") -> DiscreteFunctional:
    # (1/2pi) h sum |D j|^2 has gradient -(h/pi) D^2 j since D is skew
    return DiscreteFunctional(
        name,
        lambda fld: scale * spin_energy(fld),
        lambda fld: -scale * fld.h / np.pi * spectral_derivative(fld.samples, 2),
    )


def hamiltonian_spin_functional(constants: ModelConstants) -> DiscreteFunctional:
    """E0 times the spin energy: the j-dependent part of H0."""
    return spin_energy_functional(constants.E0, "H0_spin")


def coordinate_functional(a: int, i: int) -> DiscreteFunctional:
    def grad(fld):
        g = np.zeros((fld.N, 3))
        g[i, a] = 1.0
        return g

    return DiscreteFunctional(f"j{a + 1}[{i}]", lambda fld: float(fld.samples[i, a]), grad)


def unit_norm_functional(i: int) -> DiscreteFunctional:
    def grad(fld):
        g = np.zeros((fld.N, 3))
        g[i] = 2 * fld.samples[i]
        return g

    return DiscreteFunctional(f"|j[{i}]|^2", lambda fld: float(fld.samples[i] @ fld.samples[i]), grad)


def constant_functional(value: float) -> DiscreteFunctional:
    return DiscreteFunctional("const", lambda fld: float(value), lambda fld: np.zeros((fld.N, 3)))


def f_component_functional(k: int) -> DiscreteFunctional:
    return DiscreteFunctional(f"f{k + 1}", lambda fld: float(vector_f(fld)[k]))


def f_jacobian_fd(field: SpinField, step: float = FD_STEP) -> np.ndarray:
    """(N, 3, 3) array ``J[i, b, k] = d f_k / d j_{b,i}`` by central differences."""
    base = np.array(field.samples)
    out = np.empty((base.shape[0], 3, 3))
    for i in range(base.shape[0]):
        for b in range(3):
            orig = base[i, b]
            base[i, b] = orig + step
            plus = vector_f(SpinField(base))
            base[i, b] = orig - step
            minus = vector_f(SpinField(base))
            base[i, b] = orig
            out[i, b] = (plus - minus) / (2 * step)
    return out


def phi0_functional(p, gradient: str = "chain", step: float = FD_STEP) -> DiscreteFunctional:
    """Phi0 = (p.f)^2 - p^2 f^2 at fixed p.

    ``gradient="chain"`` contracts the finite-difference Jacobian of f with
    2[(p.f) p - p^2 f]; ``"fd"`` differences Phi0 itself.
    """
    p = np.asarray(p, dtype=float)

    def evaluate(fld):
        return constraint_phi0(p, fld)

    if gradient == "fd":
        return DiscreteFunctional("Phi0", evaluate)
    if gradient != "chain":
        raise InvalidInputError(f"unknown gradient mode {gradient!r}")

    def grad(fld):
        f = vector_f(fld)
        weight = 2.0 * ((p @ f) * p - (p @ p) * f)
        return f_jacobian_fd(fld, step) @ weight

    return DiscreteFunctional("Phi0", evaluate, grad)


def bracket_functional(F, G, constants: ModelConstants, beta=None) -> DiscreteFunctional:
    """{F, G} viewed as a functional itself (for nested brackets)."""
    return DiscreteFunctional(
        f"{{{F.name},{G.name}}}", lambda fld: poisson_bracket(F, G, fld, constants, beta)
    )


# -- verification reports ---------------------------------------------------

@dataclass
class Check:
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)

    def to_json(self) -> dict:
        return {"value": self.value, "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class AlgebraReport:
    identity_residuals: dict = dc_field(default_factory=dict)
    beta_used: float = float("nan")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.identity_residuals.values())

    def to_json(self) -> dict:
        return {
            "identity_residuals": {k: v.to_json() for k, v in self.identity_residuals.items()},
            "beta_used": self.beta_used,
            "passed": self.passed,
        }


def check_first_class(
    field: SpinField,
    p,
    constants: ModelConstants,
    beta=None,
    tol: float = 1e-8,
    identity_tol: float = 1e-13,
    step: float = FD_STEP,
) -> AlgebraReport:
    """Evaluate the constraint-algebra identities at one (field, p).

    Entries: ``su2`` = max |{Phi_a, Phi_b} - beta eps_abc Phi_c|;
    ``Phi_a,Phi0`` = max_a |{Phi_a, Phi0}|; ``H,Phi_k`` for k = 0..3.
    Tolerances are relative to the natural scale of each bracket.
    """
    b = _beta(constants, beta)
    p = np.asarray(p, dtype=float)
    phis = [phi_functional(a) for a in range(3)]
    phi_vals = residual_zero_mean(field)
    su2 = 0.0
    for a in range(3):
        for c in range(3):
            expected = b * float(LEVI_CIVITA[a, c] @ phi_vals)
            su2 = max(su2, abs(poisson_bracket(phis[a], phis[c], field, constants, b) - expected))

    f = vector_f(field)
    pf_scale = max(1.0, float(p @ p) * float(f @ f))
    phi0 = phi0_functional(p, step=step)
    g_phi0 = phi0.gradient(field)
    frozen_phi0 = DiscreteFunctional("Phi0", phi0.evaluate, lambda fld: g_phi0)
    h_spin = hamiltonian_spin_functional(constants)
    e_scale = constants.E0 * max(1.0, spin_energy(field))

    report = AlgebraReport(beta_used=b)
    report.identity_residuals["su2"] = Check(su2, identity_tol * abs(b) * max(1.0, np.abs(phi_vals).max()))
    cross = max(abs(poisson_bracket(phis[a], frozen_phi0, field, constants, b)) for a in range(3))
    report.identity_residuals["Phi_a,Phi0"] = Check(cross, tol * abs(b) * pf_scale)
    report.identity_residuals["H,Phi0"] = Check(
        abs(poisson_bracket(h_spin, frozen_phi0, field, constants, b)), tol * abs(b) * e_scale * pf_scale
    )
    for a in range(3):
        report.identity_residuals[f"H,Phi{a + 1}"] = Check(
            abs(poisson_bracket(h_spin, phis[a], field, constants, b)), tol * abs(b) * e_scale
        )
    return report


@dataclass
class FlowReport:
    kappa: float
    fit_residual: float
    beta_used: float
    tolerance: float = 1e-6

    @property
    def passed(self) -> bool:
        return bool(self.fit_residual <= self.tolerance)

    def to_json(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else None

        return {
            "kappa": num(self.kappa),
            "fit_residual": num(self.fit_residual),
            "beta_used": self.beta_used,
            "passed": self.passed,
        }


def check_hamiltonian_flow(
    field: SpinField,
    constants: ModelConstants,
    beta=None,
    require_on_surface: bool = True,
    gradient: str = "analytic",
) -> FlowReport:
    """Fit t0 {H0, j} = kappa * (j x j'') and report kappa and the relative residual.

    ``gradient="fd"`` replaces the exact gradient of the spin energy with
    finite differences (slow; an independent oracle).
    """
    from .dynamics import rhs_spin

    if require_on_surface and not field.on_constraint_surface():
        raise InapplicableOracleError("field is not on the constraint surface")
    w = rhs_spin(field)
    w_norm = float(np.linalg.norm(w))
    if w_norm < 1e-12 * field.N:
        raise InapplicableOracleError("stationary field: flow direction undefined")
    h_spin = hamiltonian_spin_functional(constants)
    if gradient == "fd":
        h_spin = DiscreteFunctional(h_spin.name, h_spin.evaluate)
    b = _beta(constants, beta)
    v = constants.t0 * bracket_velocity(h_spin, field, constants, b)
    kappa = float(np.sum(v * w) / np.sum(w * w))
    residual = float(np.linalg.norm(v - kappa * w) / max(np.linalg.norm(v), 1e-300))
    return FlowReport(kappa=kappa, fit_residual=residual, beta_used=b)
