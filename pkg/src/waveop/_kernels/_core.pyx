# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 stepping kernel for the bilinear matrix ODE

    d(rho)/dt = a @ rho + rho @ b + sum_m coeffs[m] * kl[m] @ rho @ kr[m]

The matrices here are small (N <= ~16), so per-call BLAS overhead dominates
a NumPy implementation; plain C loops win by a wide margin.  Must stay
drop-in compatible with ``_ref.rk4_bilinear``.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()


cdef void _matmul(double complex[:, ::1] out,
                  double complex[:, ::1] x,
                  double complex[:, ::1] y,
                  Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + x[i, k] * y[k, j]
            out[i, j] = acc


cdef void _rhs(double complex[:, ::1] out,
               double complex[:, ::1] r,
               double complex[:, ::1] a,
               double complex[:, ::1] b,
               double complex[::1] coeffs,
               double complex[:, :, ::1] kl,
               double complex[:, :, ::1] kr,
               double complex[:, ::1] t1,
               double complex[:, ::1] t2,
               Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, k, m
    cdef Py_ssize_t nc = coeffs.shape[0]
    cdef double complex acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + a[i, k] * r[k, j] + r[i, k] * b[k, j]
            out[i, j] = acc
    for m in range(nc):
        _matmul(t1, kl[m], r, n)
        _matmul(t2, t1, kr[m], n)
        for i in range(n):
            for j in range(n):
                out[i, j] = out[i, j] + coeffs[m] * t2[i, j]


def rk4_bilinear(a, b, coeffs, kl, kr, rho, double dt, Py_ssize_t n_steps):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t nc = coeffs.shape[0]
    kl = np.ascontiguousarray(kl, dtype=np.complex128).reshape(nc, n, n)
    kr = np.ascontiguousarray(kr, dtype=np.complex128).reshape(nc, n, n)
    out = np.array(rho, dtype=np.complex128, order="C")

    cdef double complex[:, ::1] av = a
    cdef double complex[:, ::1] bv = b
    cdef double complex[::1] cv = coeffs
    cdef double complex[:, :, ::1] klv = kl
    cdef double complex[:, :, ::1] krv = kr
    cdef double complex[:, ::1] rv = out

    work = np.zeros((7, n, n), dtype=np.complex128)
    cdef double complex[:, ::1] k1 = work[0]
    cdef double complex[:, ::1] k2 = work[1]
    cdef double complex[:, ::1] k3 = work[2]
    cdef double complex[:, ::1] k4 = work[3]
    cdef double complex[:, ::1] stage = work[4]
    cdef double complex[:, ::1] t1 = work[5]
    cdef double complex[:, ::1] t2 = work[6]

    cdef Py_ssize_t step, i, j
    cdef double h = dt
    with nogil:
        for step in range(n_steps):
            _rhs(k1, rv, av, bv, cv, klv, krv, t1, t2, n)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = rv[i, j] + 0.5 * h * k1[i, j]
            _rhs(k2, stage, av, bv, cv, klv, krv, t1, t2, n)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = rv[i, j] + 0.5 * h * k2[i, j]
            _rhs(k3, stage, av, bv, cv, klv, krv, t1, t2, n)
            for i in range(n):
                for j in range(n):
                    stage[i, j] = rv[i, j] + h * k3[i, j]
            _rhs(k4, stage, av, bv, cv, klv, krv, t1, t2, n)
            for i in range(n):
                for j in range(n):
                    rv[i, j] = rv[i, j] + (h / 6.0) * (
                        k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
    return out
