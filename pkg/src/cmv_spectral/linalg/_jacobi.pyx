# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi kernel; same contract as ``_jacobi_py.jacobi_sweeps``."""

import numpy as np
from libc.math cimport sqrt


cdef double _off(double complex[:, ::1] A, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    cdef double complex v
    for i in range(n):
        for j in range(n):
            if i != j:
                v = A[i, j]
                acc += v.real * v.real + v.imag * v.imag
    return sqrt(acc)


cdef inline double _abs(double complex v) noexcept nogil:
    return sqrt(v.real * v.real + v.imag * v.imag)


cdef int _run(double complex[:, ::1] A, double complex[:, ::1] Vv, bint want,
              double target, double skip, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t p, q, k
    cdef double absb, app, aqq, tau, t, c, s
    cdef double complex b, e, se, sec, xp, xq
    cdef int sweep
    for sweep in range(max_sweeps):
        if _off(A, n) <= target:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                absb = _abs(b)
                if absb <= skip:
                    continue
                e = b / absb
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * absb)
                if tau >= 0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                se = s * e
                sec = s * e.conjugate()
                # A' = G* A G is Hermitian: update rows p, q contiguously, then mirror.
                for k in range(n):
                    xp = A[p, k]
                    xq = A[q, k]
                    A[p, k] = c * xp - se * xq
                    A[q, k] = sec * xp + c * xq
                for k in range(n):
                    A[k, p] = A[p, k].conjugate()
                    A[k, q] = A[q, k].conjugate()
                A[p, p] = app - t * absb
                A[q, q] = aqq + t * absb
                A[p, q] = 0.0
                A[q, p] = 0.0
                if want:
                    # Vv holds eigenvectors as rows (transposed storage).
                    for k in range(n):
                        xp = Vv[p, k]
                        xq = Vv[q, k]
                        Vv[p, k] = c * xp - sec * xq
                        Vv[q, k] = se * xp + c * xq
    if _off(A, n) <= target:
        return max_sweeps
    return -1


def jacobi_sweeps(double complex[:, ::1] A, V, double tol, int max_sweeps):
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t p, q
    cdef double fro = 0.0, target, skip
    cdef double complex[:, ::1] Vv
    cdef bint want = V is not None
    cdef int res
    if want:
        Vv = V
    else:
        Vv = np.zeros((1, 1), dtype=np.complex128)
    for p in range(n):
        for q in range(n):
            fro += A[p, q].real * A[p, q].real + A[p, q].imag * A[p, q].imag
    fro = sqrt(fro)
    if n < 2 or fro == 0.0:
        return 0
    target = tol * fro
    skip = 1e-3 * target / n
    with nogil:
        res = _run(A, Vv, want, target, skip, max_sweeps)
    return res
