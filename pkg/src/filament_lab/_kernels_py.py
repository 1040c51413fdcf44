"""Pure numpy versions of the compiled kernels (fallback backend)."""
import numpy as np

_BLOCK = 256


def step_kernel_matvec(s_table, samples, k_lo, k_hi, h):
    """Dense product-integration sum for the step kernel.

    Row ``i`` of the implied weight matrix is
    ``k_lo[i] * C[i] + k_hi[i] * (h - C[i])`` with
    ``C[i, l] = h*i/N + s[(i - l) % N] + s[l]`` the integral over ``[0, xi_i]``
    of the l-th periodic cardinal function.
    """
    n = samples.shape[0]
    rows = k_lo.shape[0]
    out = np.empty((rows, 3))
    cols = np.arange(n)
    for start in range(0, rows, _BLOCK):
        idx = np.arange(start, min(rows, start + _BLOCK))
        c = (h * idx / n)[:, None] + s_table[(idx[:, None] - cols[None, :]) % n] + s_table[None, :]
        w = k_lo[idx, None] * c + k_hi[idx, None] * (h - c)
        out[idx] = w @ samples
    return out


def cross_rows(a, b):
    out = np.empty_like(a)
    out[:, 0] = a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1]
    out[:, 1] = a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2]
    out[:, 2] = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    return out


def cross_sum(a, b):
    return cross_rows(a, b).sum(axis=0)
