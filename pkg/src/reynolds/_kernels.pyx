# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same semantics as ``_kernels_py``."""

import numpy as np
from libc.math cimport fabs, INFINITY, isfinite

from ._kernels_py import KernelError


def pgs_sweep_2d(const double[:, :] k1, const double[:, :] k2,
                 const double[:, :] k3, const double[:, :] k4,
                 const double[:, :] K, const double[:, :] D,
                 double[:, :] p, double omega, bint per_node_clamp=True):
    cdef Py_ssize_t nx = p.shape[0], ny = p.shape[1], i, j
    cdef double change = 0.0, old, cand, new
    cdef double[:, :] old_p
    if per_node_clamp:
        for i in range(1, nx - 1):
            for j in range(1, ny - 1):
                old = p[i, j]
                cand = (k1[i, j] * p[i + 1, j] + k2[i, j] * p[i - 1, j]
                        + k3[i, j] * p[i, j + 1] + k4[i, j] * p[i, j - 1]
                        - D[i, j]) / K[i, j]
                new = (1.0 - omega) * old + omega * cand
                if new < 0.0:
                    new = 0.0
                p[i, j] = new
                if fabs(new - old) > change:
                    change = fabs(new - old)
        return change
    old_p = np.array(p, copy=True)
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            cand = (k1[i, j] * p[i + 1, j] + k2[i, j] * p[i - 1, j]
                    + k3[i, j] * p[i, j + 1] + k4[i, j] * p[i, j - 1]
                    - D[i, j]) / K[i, j]
            p[i, j] = (1.0 - omega) * p[i, j] + omega * cand
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            if p[i, j] < 0.0:
                p[i, j] = 0.0
            if fabs(p[i, j] - old_p[i, j]) > change:
                change = fabs(p[i, j] - old_p[i, j])
    return change


cdef double _sweep_1d(const double[:] A, const double[:] B, const double[:] C,
                      double[:] p, double omega) noexcept nogil:
    cdef Py_ssize_t n = p.shape[0], i
    cdef double change = 0.0, old, new
    for i in range(1, n - 1):
        old = p[i]
        new = (1.0 - omega) * old + omega * (
            (A[i] * p[i - 1] + B[i] * p[i + 1] - C[i]) / (A[i] + B[i]))
        if new < 0.0:
            new = 0.0
        p[i] = new
        if fabs(new - old) > change:
            change = fabs(new - old)
    return change


def pgs_sweep_1d(const double[:] A, const double[:] B, const double[:] C,
                 double[:] p, double omega):
    return _sweep_1d(A, B, C, p, omega)


def pgs_solve_1d(const double[:] A, const double[:] B, const double[:] C,
                 double[:] p, double omega, double tol, long max_iter):
    cdef long it = 0
    cdef double change = INFINITY
    with nogil:
        while it < max_iter:
            change = _sweep_1d(A, B, C, p, omega)
            it += 1
            if change < tol:
                break
    return it, change


def compute_basis(const double[:] A, const double[:] B, const double[:] C,
                  double[:] m, double[:] n, double[:] c):
    cdef Py_ssize_t size = m.shape[0], i
    cdef double s, big = 0.0
    m[1] = 1.0; n[1] = 0.0; c[1] = 0.0
    if size > 2:
        m[2] = 0.0; n[2] = 1.0; c[2] = 0.0
    for i in range(2, size - 1):
        s = A[i] + B[i]
        m[i + 1] = (s * m[i] - A[i] * m[i - 1]) / B[i]
        n[i + 1] = (s * n[i] - A[i] * n[i - 1]) / B[i]
        c[i + 1] = (s * c[i] - A[i] * c[i - 1] + C[i]) / B[i]
    s = A[1] + B[1]
    m[0] = (s * m[1] - B[1] * m[2]) / A[1]
    n[0] = (s * n[1] - B[1] * n[2]) / A[1]
    c[0] = (s * c[1] - B[1] * c[2] + C[1]) / A[1]
    for i in range(size):
        if not fabs(m[i]) <= big:
            big = fabs(m[i])
        if not fabs(n[i]) <= big:
            big = fabs(n[i])
        if not fabs(c[i]) <= big:
            big = fabs(c[i])
    return big


cdef int _basis_eval(const double[:] n, const double[:] c,
                     Py_ssize_t a, Py_ssize_t b, Py_ssize_t q, double *res) noexcept nogil:
    cdef double du = n[b] - n[a]
    if du == 0.0 or not isfinite(du):
        return -1
    res[0] = (c[q] - c[a]) - (c[b] - c[a]) / du * (n[q] - n[a])
    return 0


def basis_eval(const double[:] n, const double[:] c, Py_ssize_t a, Py_ssize_t b, Py_ssize_t q):
    cdef double res
    if _basis_eval(n, c, a, b, q, &res) != 0:
        raise KernelError(f"degenerate anchors ({a}, {b})")
    return res


cdef void _thomas(const double[:] A, const double[:] B, const double[:] C,
                  Py_ssize_t s, Py_ssize_t e, double[:] out, double[:] work) noexcept nogil:
    cdef Py_ssize_t i
    cdef double denom = -(A[s] + B[s])
    work[s] = B[s] / denom
    out[s] = C[s] / denom
    for i in range(s + 1, e + 1):
        denom = -(A[i] + B[i]) - A[i] * work[i - 1]
        work[i] = B[i] / denom
        out[i] = (C[i] - A[i] * out[i - 1]) / denom
    i = e - 1
    while i >= s:
        out[i] -= work[i] * out[i + 1]
        i -= 1


def thomas_segment(const double[:] A, const double[:] B, const double[:] C,
                   Py_ssize_t s, Py_ssize_t e, double[:] out, double[:] work):
    _thomas(A, B, C, s, e, out, work)


def direct_eval(const double[:] A, const double[:] B, const double[:] C,
                Py_ssize_t a, Py_ssize_t b, Py_ssize_t q, double[:] out, double[:] work):
    _thomas(A, B, C, a + 1, b - 1, out, work)
    return out[q]


cdef inline int _ev(const double[:] A, const double[:] B, const double[:] C,
                    const double[:] n, const double[:] c, bint use_basis,
                    double[:] out, double[:] work,
                    Py_ssize_t a, Py_ssize_t b, Py_ssize_t q, double *res) noexcept nogil:
    if use_basis:
        return _basis_eval(n, c, a, b, q, res)
    _thomas(A, B, C, a + 1, b - 1, out, work)
    res[0] = out[q]
    return 0


def expand_segments(const double[:] A, const double[:] B, const double[:] C,
                    const double[:] n, const double[:] c,
                    long[:] starts, long[:] ends, Py_ssize_t nseg, bint use_basis,
                    double[:] out, double[:] work):
    cdef Py_ssize_t size = A.shape[0], last = size - 2
    cdef long guard = 4 * size, moves = 0, tests = 0
    cdef Py_ssize_t k, w, s, e, j, shift, t
    cdef bint moved
    cdef double val
    cdef int status = 0
    with nogil:
        while True:
            moved = False
            k = 0
            w = 0
            while k < nseg:
                s = starts[k]
                e = ends[k]
                k += 1
                while e < last:
                    j = e + 1
                    tests += 1
                    if k < nseg and starts[k] == j + 1:
                        status = _ev(A, B, C, n, c, use_basis, out, work, s - 1, ends[k] + 1, j, &val)
                        if status != 0:
                            break
                        if val > 0.0:
                            e = ends[k]
                            k += 1
                            moves += 1
                            moved = True
                            continue
                        break
                    status = _ev(A, B, C, n, c, use_basis, out, work, s - 1, j + 1, j, &val)
                    if status != 0:
                        break
                    if val > 0.0:
                        e = j
                        moves += 1
                        moved = True
                        continue
                    break
                if status != 0:
                    break
                starts[w] = s
                ends[w] = e
                w += 1
            if status != 0:
                break
            nseg = w
            k = nseg - 1
            w = nseg - 1
            while k >= 0:
                s = starts[k]
                e = ends[k]
                k -= 1
                while s > 1:
                    j = s - 1
                    tests += 1
                    if k >= 0 and ends[k] == j - 1:
                        status = _ev(A, B, C, n, c, use_basis, out, work, starts[k] - 1, e + 1, j, &val)
                        if status != 0:
                            break
                        if val > 0.0:
                            s = starts[k]
                            k -= 1
                            moves += 1
                            moved = True
                            continue
                        break
                    status = _ev(A, B, C, n, c, use_basis, out, work, j - 1, e + 1, j, &val)
                    if status != 0:
                        break
                    if val > 0.0:
                        s = j
                        moves += 1
                        moved = True
                        continue
                    break
                if status != 0:
                    break
                starts[w] = s
                ends[w] = e
                w -= 1
            if status != 0:
                break
            shift = w + 1
            for t in range(shift, nseg):
                starts[t - shift] = starts[t]
                ends[t - shift] = ends[t]
            nseg -= shift
            if moves > guard:
                status = -2
                break
            if not moved:
                break
    if status == -1:
        raise KernelError("degenerate anchors during segment expansion")
    if status == -2:
        raise KernelError("segment expansion exceeded move budget")
    return nseg, moves, tests
