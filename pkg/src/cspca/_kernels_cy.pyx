# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled loop kernels; same interface as ``cspca._kernels_py``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def row_norms(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    return _row_norms(a)


cdef _row_norms(double[:, ::1] a):
    cdef Py_ssize_t m = a.shape[0], k = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double s
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(m):
        s = 0.0
        for j in range(k):
            s += a[i, j] * a[i, j]
        o[i] = sqrt(s)
    return out


def nearest_centers(points, centers):
    points = np.ascontiguousarray(points, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    return _nearest_centers(points, centers)


cdef _nearest_centers(double[:, ::1] pts, double[:, ::1] ctr):
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1], c = ctr.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double s, best, diff
    cdef Py_ssize_t arg
    labels = np.empty(n, dtype=np.int64)
    dist2 = np.empty(n, dtype=np.float64)
    cdef long long[::1] lab = labels
    cdef double[::1] d2 = dist2
    for i in range(n):
        best = 0.0
        arg = 0
        for j in range(c):
            s = 0.0
            for k in range(d):
                diff = pts[i, k] - ctr[j, k]
                s += diff * diff
            if j == 0 or s < best:
                best = s
                arg = j
        lab[i] = arg
        d2[i] = best
    return labels, dist2


def sum_by_label(points, labels, n_groups):
    points = np.ascontiguousarray(points, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    return _sum_by_label(points, labels, n_groups)


cdef _sum_by_label(double[:, ::1] pts, long long[::1] lab, Py_ssize_t c):
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef Py_ssize_t i, k
    cdef long long g
    sums = np.zeros((c, d), dtype=np.float64)
    counts = np.zeros(c, dtype=np.int64)
    cdef double[:, ::1] s = sums
    cdef long long[::1] cnt = counts
    for i in range(n):
        g = lab[i]
        for k in range(d):
            s[g, k] += pts[i, k]
        cnt[g] += 1
    return sums, counts


def contingency_table(a, b, na, nb):
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    return _contingency(a, b, na, nb)


cdef _contingency(long long[::1] a, long long[::1] b, Py_ssize_t na, Py_ssize_t nb):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    table = np.zeros((na, nb), dtype=np.int64)
    cdef long long[:, ::1] t = table
    for i in range(n):
        t[a[i], b[i]] += 1
    return table
