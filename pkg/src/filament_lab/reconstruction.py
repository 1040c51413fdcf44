"""Closed curve z(xi) built from the spin field through the step-kernel integral.

    z(xi) = z0 + R0 * int_0^{2pi} [xi - eta] j(eta) d eta,   [x] = floor(x / 2pi)

The integral is evaluated exactly for the trigonometric interpolant of the
samples (product integration), which keeps ``dz/dxi = R0 j`` to spectral
accuracy. A plain rectangle rule against the discontinuous kernel is only
first-order accurate and is not offered.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from ._spectral import node_antiderivative, spectral_derivative
from .constants import ModelConstants
from .errors import DegenerateGeometryError, InvalidInputError
from .spin_field import SpinField

TWO_PI = 2 * np.pi


def kernel_value(x):
    """``[x]``: the integer part of x/2pi, read as floor (not truncation)."""
    out = np.floor(np.asarray(x, dtype=float) / TWO_PI)
    return int(out) if out.ndim == 0 else out.astype(int)


def truncated_kernel_value(x):
    """Truncation-toward-zero reading of ``[x]``; kept to show that it breaks closure."""
    out = np.trunc(np.asarray(x, dtype=float) / TWO_PI)
    return int(out) if out.ndim == 0 else out.astype(int)


@dataclass(frozen=True, eq=False)
class FilamentCurve:
    """N+1 samples of z at xi_0..xi_N; the last one sits at xi = 2pi."""

    points: np.ndarray
    basepoint: np.ndarray
    R0: float

    @property
    def N(self) -> int:
        return self.points.shape[0] - 1

    @property
    def nodes(self) -> np.ndarray:
        """The N periodic samples (closing point dropped)."""
        return self.points[:-1]

    @property
    def xi(self) -> np.ndarray:
        return TWO_PI * np.arange(self.N + 1) / self.N

    def translated(self, shift) -> "FilamentCurve":
        shift = np.asarray(shift, dtype=float)
        return FilamentCurve(self.points + shift, self.basepoint + shift, self.R0)


def _branch_values(n, kernel):
    """Kernel value on eta < xi_i and on eta > xi_i, for rows i = 0..N.

    The kernel is constant on (-2pi, 0) and on (0, 2pi), so one evaluation at
    the middle of each branch is exact.
    """
    xi = TWO_PI * np.arange(n + 1) / n
    k_lo = np.asarray(kernel(0.5 * xi), dtype=float)
    k_hi = np.asarray(kernel(0.5 * (xi - TWO_PI)), dtype=float)
    return k_lo, k_hi


@lru_cache(maxsize=16)
def cardinal_sine_table(n: int) -> np.ndarray:
    """``S(x_m) = (2/N) sum_{k=1}^{N/2-1} sin(k x_m)/k`` at the nodes, by direct summation."""
    m = np.arange(n)
    k = np.arange(1, n // 2)
    out = np.empty(n)
    h = TWO_PI / n
    for start in range(0, n, 512):
        rows = m[start : start + 512]
        out[start : start + 512] = np.sin(np.outer(rows, k) * h) @ (1.0 / k)
    out *= 2.0 / n
    out.setflags(write=False)
    return out


def step_kernel_integral(samples: np.ndarray, kernel=kernel_value, method: str = "fast", backend=None) -> np.ndarray:
    """``int_0^{2pi} [xi_i - eta] J(eta) d eta`` for i = 0..N (N+1 rows).

    ``fast`` uses the FFT antiderivative, O(N log N). ``reference`` sums the
    dense product-integration weights row by row, O(N^2).
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    k_lo, k_hi = _branch_values(n, kernel)
    if method == "fast":
        total = (TWO_PI / n) * samples.sum(axis=0)
        lower = np.vstack([node_antiderivative(samples), total])
        return k_lo[:, None] * lower + k_hi[:, None] * (total - lower)
    if method == "reference":
        return kernels.step_kernel_matvec(cardinal_sine_table(n), samples, k_lo, k_hi, TWO_PI / n, backend=backend)
    raise InvalidInputError(f"unknown method {method!r}")


def reconstruct_curve(
    field: SpinField,
    basepoint,
    constants: ModelConstants,
    kernel=kernel_value,
    method: str = "fast",
) -> FilamentCurve:
    basepoint = np.asarray(basepoint, dtype=float).reshape(3)
    integral = step_kernel_integral(field.samples, kernel=kernel, method=method)
    points = basepoint + constants.R0 * integral
    points.setflags(write=False)
    return FilamentCurve(points, basepoint, constants.R0)


def reconstruct_from_phase(point, tau: float, constants: ModelConstants, kernel=kernel_value) -> FilamentCurve:
    """Curve for an Omega-point ``(q, p, field)`` at time tau: basepoint ``(q - tau t0 p)/m0``."""
    base = (np.asarray(point.q, dtype=float) - tau * constants.t0 * np.asarray(point.p, dtype=float)) / constants.m0
    return reconstruct_curve(point.field, base, constants, kernel=kernel)


def closure_residual(curve: FilamentCurve) -> float:
    """Jump |z(2pi) - z(0)|; equals R0 |Phi| for the floor kernel."""
    return float(np.linalg.norm(curve.points[-1] - curve.points[0]))


def tangent_residual(curve: FilamentCurve, field: SpinField, constants: ModelConstants) -> float:
    """max_i |z'(xi_i) - R0 j_i| with the spectral derivative of the curve nodes."""
    dz = spectral_derivative(np.asarray(curve.nodes), 1)
    return float(np.max(np.linalg.norm(dz - constants.R0 * field.samples, axis=1)))


def curvature_from_nodes(nodes: np.ndarray, R0: float = 1.0) -> np.ndarray:
    d1 = spectral_derivative(nodes, 1)
    d2 = spectral_derivative(nodes, 2)
    speed = np.linalg.norm(d1, axis=1)
    if np.min(speed) < 1e-12 * R0:
        raise DegenerateGeometryError("tangent vanishes on the curve; curvature undefined")
    return np.linalg.norm(kernels.cross_rows(d1, d2), axis=1) / speed**3


def curvature_profile(curve: FilamentCurve) -> np.ndarray:
    """Frenet curvature |z' x z''| / |z'|^3 at the N nodes."""
    return curvature_from_nodes(np.asarray(curve.nodes), curve.R0)
