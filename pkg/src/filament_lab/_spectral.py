"""FFT helpers for 2*pi-periodic samples stored as (N, 3) arrays."""
from __future__ import annotations

import os
from functools import lru_cache

import numpy as np
import scipy.fft as sfft


def worker_count() -> int:
    """Worker cap from ``FILAMENT_LAB_THREADS`` (default: all cores)."""
    raw = os.environ.get("FILAMENT_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


@lru_cache(maxsize=64)
def _ik(n: int, order: int) -> np.ndarray:
    k = np.arange(n // 2 + 1, dtype=float)
    k[-1] = 0.0  # Nyquist mode has no well-defined derivative
    return ((1j * k) ** order)[:, None]


@lru_cache(maxsize=64)
def _inv_ik(n: int) -> np.ndarray:
    k = np.arange(n // 2 + 1, dtype=float)
    out = np.zeros(n // 2 + 1, dtype=complex)
    out[1:-1] = 1.0 / (1j * k[1:-1])
    return out[:, None]


def spectral_derivative(samples: np.ndarray, order: int = 1) -> np.ndarray:
    n = samples.shape[0]
    coeffs = sfft.rfft(samples, axis=0, workers=worker_count())
    return sfft.irfft(coeffs * _ik(n, order), n=n, axis=0, workers=worker_count())


def fd4_derivative(samples: np.ndarray, order: int = 1) -> np.ndarray:
    h = 2 * np.pi / samples.shape[0]
    p1, m1 = np.roll(samples, -1, axis=0), np.roll(samples, 1, axis=0)
    p2, m2 = np.roll(samples, -2, axis=0), np.roll(samples, 2, axis=0)
    if order == 1:
        return (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h)
    return (-p2 + 16 * p1 - 30 * samples + 16 * m1 - m2) / (12 * h * h)


def node_antiderivative(samples: np.ndarray) -> np.ndarray:
    """Exact integral from 0 to each node of the trigonometric interpolant.

    Returns an (N, 3) array ``A`` with ``A[i] = int_0^{xi_i} J(eta) d eta``.
    The Nyquist cosine integrates to zero at every node, so dropping it is
    exact here.
    """
    n = samples.shape[0]
    coeffs = sfft.rfft(samples, axis=0, workers=worker_count())
    mean = coeffs[0].real / n
    periodic = sfft.irfft(coeffs * _inv_ik(n), n=n, axis=0, workers=worker_count())
    periodic -= periodic[0]
    xi = 2 * np.pi * np.arange(n) / n
    return periodic + xi[:, None] * mean[None, :]
