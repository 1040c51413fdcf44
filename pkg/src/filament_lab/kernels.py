"""Backend selection for the hot loops.

The compiled module ``_kernels_c`` is used when importable; otherwise the
numpy fallback. Set ``FILAMENT_LAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("FILAMENT_LAB_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_c as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def step_kernel_matvec(s_table, samples, k_lo, k_hi, h, backend=None):
    impl = _pick(backend)
    return impl.step_kernel_matvec(_c(s_table), _c(samples), _c(k_lo), _c(k_hi), float(h))


def cross_rows(a, b, backend=None):
    return _pick(backend).cross_rows(_c(a), _c(b))


def cross_sum(a, b, backend=None):
    return _pick(backend).cross_sum(_c(a), _c(b))


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _kernels_py
    if backend == "cython":
        from . import _kernels_c

        return _kernels_c
    raise ValueError(f"unknown backend {backend!r}")
