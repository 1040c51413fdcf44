# cython: language_level=3
"""Compiled hot loops. Signatures mirror ``_kernels_py`` exactly."""
import numpy as np

cimport cython


def step_kernel_matvec(const double[::1] s_table, const double[:, ::1] samples,
                       const double[::1] k_lo, const double[::1] k_hi, double h):
    cdef Py_ssize_t n = samples.shape[0]
    cdef Py_ssize_t rows = k_lo.shape[0]
    cdef Py_ssize_t i, l
    cdef double c, w, ramp, acc0, acc1, acc2
    out = np.empty((rows, 3), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(rows):
        ramp = h * i / n
        acc0 = 0.0
        acc1 = 0.0
        acc2 = 0.0
        for l in range(n):
            c = ramp + s_table[(i - l + n) % n] + s_table[l]
            w = k_lo[i] * c + k_hi[i] * (h - c)
            acc0 += w * samples[l, 0]
            acc1 += w * samples[l, 1]
            acc2 += w * samples[l, 2]
        o[i, 0] = acc0
        o[i, 1] = acc1
        o[i, 2] = acc2
    return out


def cross_rows(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    out = np.empty((n, 3), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(n):
        o[i, 0] = a[i, 1] * b[i, 2] - a[i, 2] * b[i, 1]
        o[i, 1] = a[i, 2] * b[i, 0] - a[i, 0] * b[i, 2]
        o[i, 2] = a[i, 0] * b[i, 1] - a[i, 1] * b[i, 0]
    return out


def cross_sum(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0
    for i in range(n):
        s0 += a[i, 1] * b[i, 2] - a[i, 2] * b[i, 1]
        s1 += a[i, 2] * b[i, 0] - a[i, 0] * b[i, 2]
        s2 += a[i, 0] * b[i, 1] - a[i, 1] * b[i, 0]
    return np.array([s0, s1, s2])
