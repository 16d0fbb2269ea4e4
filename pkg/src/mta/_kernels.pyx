# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled solver kernels; semantics match mta._kernels_py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

NAME = "native"

cdef double VANISHING_DENOM = 1e-300


def gaussian_weights(const double[:, ::1] views, const double[::1] mode,
                     const double[::1] inv_h_sq):
    cdef Py_ssize_t n = views.shape[0]
    cdef Py_ssize_t d = views.shape[1]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t p, j
    cdef double acc, diff
    with nogil:
        for p in range(n):
            acc = 0.0
            for j in range(d):
                diff = views[p, j] - mode[j]
                acc += diff * diff
            o[p] = exp(-acc * inv_h_sq[p])
    return out


def y_step(const double[::1] kern, const double[:, ::1] w,
           const double[::1] y_prev, double lam, double lam_y):
    cdef Py_ssize_t n = kern.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t p, q
    cdef double acc, emax, total
    cdef double inv_lam_y = 1.0 / lam_y
    with nogil:
        emax = -1.0 / 0.0
        for p in range(n):
            acc = 0.0
            for q in range(n):
                acc += w[p, q] * y_prev[q]
            acc = (kern[p] + lam * acc) * inv_lam_y
            o[p] = acc
            if acc > emax:
                emax = acc
        total = 0.0
        for p in range(n):
            o[p] = exp(o[p] - emax)
            total += o[p]
    if not total == total or total <= 0.0:  # NaN-safe degenerate guard
        out[:] = 1.0 / n
        return out, False
    with nogil:
        for p in range(n):
            o[p] /= total
    return out, True


def m_step(const double[:, ::1] views, const double[::1] y,
           const double[::1] mode, const double[::1] inv_h_sq):
    cdef Py_ssize_t n = views.shape[0]
    cdef Py_ssize_t d = views.shape[1]
    out = np.zeros(d, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t p, j
    cdef double acc, diff, k, wgt
    cdef double u = 0.0
    cdef double denom = 0.0
    with nogil:
        for p in range(n):
            acc = 0.0
            for j in range(d):
                diff = views[p, j] - mode[j]
                acc += diff * diff
            k = exp(-acc * inv_h_sq[p])
            u += y[p] * k
            wgt = y[p] * k * inv_h_sq[p]
            denom += wgt
            for j in range(d):
                o[j] += wgt * views[p, j]
    if denom < VANISHING_DENOM:
        return np.asarray(mode).copy(), u, denom
    with nogil:
        for j in range(d):
            o[j] /= denom
    return out, u, denom
