"""Sampled 2*pi-periodic unit-vector field j(xi) and its elementary operations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._spectral import fd4_derivative, spectral_derivative
from .errors import DegenerateInputError, InvalidInputError, ProjectionError

TOL_UNIT = 1e-12
TOL_MEAN = 1e-10
SCENARIOS = ("circle", "great_circle_m", "kelvin_perturbed", "tilted_constant")


@dataclass(frozen=True, eq=False)
class SpinField:
    """N samples ``j(xi_i)``, ``xi_i = 2*pi*i/N``; the endpoint 2*pi is excluded."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise InvalidInputError(f"samples must have shape (N, 3), got {arr.shape}")
        n = arr.shape[0]
        if n < 8 or n % 2:
            raise InvalidInputError(f"N must be even and >= 8 (got N={n})")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("samples contain non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def N(self) -> int:
        return self.samples.shape[0]

    @property
    def h(self) -> float:
        return 2 * np.pi / self.N

    @property
    def xi(self) -> np.ndarray:
        return self.h * np.arange(self.N)

    def on_constraint_surface(self, tol_unit=TOL_UNIT, tol_mean=TOL_MEAN) -> bool:
        return (
            residual_unit_norm(self) <= tol_unit
            and np.max(np.abs(residual_zero_mean(self))) <= tol_mean
        )

    def rotated(self, rotation: np.ndarray) -> "SpinField":
        return SpinField(self.samples @ np.asarray(rotation).T)

    def __len__(self):
        return self.N


def _grid(N):
    return 2 * np.pi * np.arange(N) / N


def make_scenario_field(kind: str, N: int, m: int = 1, eps: float = 0.0) -> SpinField:
    """Build one of the named test configurations.

    ``circle`` is the planar ring (cos, sin, 0); ``great_circle_m`` winds m
    times; ``kelvin_perturbed`` adds ``eps*sin(m xi)`` out of plane and projects
    back onto the constraint surface; ``tilted_constant`` is the constant
    (0, 0, 1), which deliberately violates the zero-mean constraint.
    """
    if kind not in SCENARIOS:
        raise InvalidInputError(f"unknown scenario kind {kind!r}; expected one of {SCENARIOS}")
    if int(m) != m or m < 1:
        raise InvalidInputError(f"mode m must be a positive integer (got {m!r})")
    if eps < 0:
        raise InvalidInputError(f"amplitude eps must be non-negative (got {eps!r})")
    m = int(m)
    xi = _grid(N)
    zeros = np.zeros_like(xi)
    if kind == "circle":
        return SpinField(np.column_stack([np.cos(xi), np.sin(xi), zeros]))
    if kind == "great_circle_m":
        return SpinField(np.column_stack([np.cos(m * xi), np.sin(m * xi), zeros]))
    if kind == "tilted_constant":
        return SpinField(np.column_stack([zeros, zeros, np.ones_like(xi)]))
    raw = SpinField(np.column_stack([np.cos(xi), np.sin(xi), eps * np.sin(m * xi)]))
    return project_to_constraints(raw)


def derivative(field: SpinField, order: int = 1, method: str = "spectral") -> np.ndarray:
    if order not in (1, 2):
        raise InvalidInputError(f"derivative order must be 1 or 2 (got {order})")
    if method == "spectral":
        return spectral_derivative(field.samples, order)
    if method == "fd4":
        return fd4_derivative(field.samples, order)
    raise InvalidInputError(f"unknown derivative method {method!r}")


def residual_unit_norm(field: SpinField) -> float:
    return float(np.max(np.abs(np.einsum("ij,ij->i", field.samples, field.samples) - 1.0)))


def residual_zero_mean(field: SpinField) -> np.ndarray:
    """Phi_k = int j_k d xi by the periodic rectangle rule."""
    return field.h * field.samples.sum(axis=0)


def project_to_constraints(field: SpinField, tol: float = TOL_UNIT, max_iter: int = 50) -> SpinField:
    """Alternate mean subtraction and pointwise normalization.

    Stops once both ``residual_unit_norm`` and ``max|Phi_k|`` are below
    ``tol``. Raises :class:`ProjectionError` on non-convergence and
    :class:`DegenerateInputError` if a sample collapses to zero length.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    current = field
    for _ in range(max_iter + 1):
        unit = residual_unit_norm(current)
        mean = float(np.max(np.abs(residual_zero_mean(current))))
        if unit <= tol and mean <= tol:
            return current
        arr = current.samples - current.samples.mean(axis=0)
        norms = np.linalg.norm(arr, axis=1)
        if np.min(norms) < 1e-12:
            raise DegenerateInputError(
                "zero-length sample met during normalization", unit_norm_residual=unit, mean_residual=mean
            )
        current = SpinField(arr / norms[:, None])
    raise ProjectionError(
        f"projection did not converge in {max_iter} iterations "
        f"(unit-norm residual {unit:.3e}, mean residual {mean:.3e})",
        unit_norm_residual=unit,
        mean_residual=mean,
    )


def spin_energy(field: SpinField) -> float:
    """Dimensionless internal energy (1/2pi) int |j'|^2; multiply by E0 for energy units."""
    d1 = spectral_derivative(field.samples, 1)
    return float(field.h * np.sum(d1 * d1) / (2 * np.pi))


def random_admissible_field(N: int, rng: np.random.Generator, modes: int = 4, amplitude: float = 0.3) -> SpinField:
    """Smooth random field on the constraint surface: the ring plus a few random low modes."""
    xi = _grid(N)
    k = np.arange(1, modes + 1)
    decay = 1.0 / k**2
    base = np.column_stack([np.cos(xi), np.sin(xi), np.zeros_like(xi)])
    for _ in range(20):
        a = rng.normal(size=(3, modes)) * decay
        b = rng.normal(size=(3, modes)) * decay
        pert = amplitude * (a @ np.cos(np.outer(k, xi)) + b @ np.sin(np.outer(k, xi))).T
        try:
            return project_to_constraints(SpinField(base + pert), tol=TOL_UNIT, max_iter=400)
        except ProjectionError:
            continue  # slow alternating-projection draw; take another
    raise ProjectionError("could not draw an admissible random field")


def random_field(N: int, rng: np.random.Generator, modes: int = 4) -> SpinField:
    """Smooth random field with no constraint enforced (unit norm only)."""
    xi = _grid(N)
    k = np.arange(0, modes + 1)
    a = rng.normal(size=(3, modes + 1)) / (1 + k) ** 2
    b = rng.normal(size=(3, modes + 1)) / (1 + k) ** 2
    raw = (a @ np.cos(np.outer(k, xi)) + b @ np.sin(np.outer(k, xi))).T
    raw += 0.1 * rng.normal(size=3)
    norms = np.linalg.norm(raw, axis=1)
    return SpinField(raw / norms[:, None])
