# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled mixture-evaluation kernels.

Same contracts as the numpy backend. Distances go through BLAS dgemm; the
exp/softmax/reduction passes are fused so no (L, N) weight matrix is ever
materialized beyond the Gram buffer.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

cdef double _LOG2PI = 1.8378770664093453


cdef void _gram(double[:, ::1] pts, double[:, ::1] ctr, double[:, ::1] out) noexcept nogil:
    # out (L, N) row-major <- pts @ ctr.T, via column-major views
    cdef int L = pts.shape[0]
    cdef int N = ctr.shape[0]
    cdef int d = pts.shape[1]
    cdef double one = 1.0, zero = 0.0
    dgemm("T", "N", &N, &L, &d, &one, &ctr[0, 0], &d, &pts[0, 0], &d, &zero, &out[0, 0], &N)


cdef void _row_norms(double[:, ::1] a, double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(a.shape[0]):
        acc = 0.0
        for k in range(a.shape[1]):
            acc += a[i, k] * a[i, k]
        out[i] = acc


def mixture_logpdf(double[:, ::1] pts, double[:, ::1] ctr, double s_hat):
    cdef Py_ssize_t L = pts.shape[0], N = ctr.shape[0], d = pts.shape[1]
    cdef cnp.ndarray g_arr = np.empty((L, N), dtype=np.float64)
    cdef cnp.ndarray pn_arr = np.empty(L, dtype=np.float64)
    cdef cnp.ndarray cn_arr = np.empty(N, dtype=np.float64)
    cdef cnp.ndarray out_arr = np.empty(L, dtype=np.float64)
    cdef double[:, ::1] g = g_arr
    cdef double[::1] pn = pn_arr, cn = cn_arr, out = out_arr
    cdef double inv2 = 0.5 / (s_hat * s_hat)
    cdef double const = -log(<double>N) - 0.5 * d * (_LOG2PI + 2.0 * log(s_hat))
    cdef Py_ssize_t l, j
    cdef double sq, z, m, acc
    with nogil:
        _gram(pts, ctr, g)
        _row_norms(pts, pn)
        _row_norms(ctr, cn)
        for l in range(L):
            m = -1e308
            for j in range(N):
                sq = pn[l] + cn[j] - 2.0 * g[l, j]
                if sq < 0.0:
                    sq = 0.0
                z = -sq * inv2
                g[l, j] = z
                if z > m:
                    m = z
            acc = 0.0
            for j in range(N):
                acc += exp(g[l, j] - m)
            out[l] = m + log(acc) + const
    return out_arr


def mixture_score(double[:, ::1] pts, double[:, ::1] ctr, double s_hat):
    cdef Py_ssize_t L = pts.shape[0], N = ctr.shape[0], d = pts.shape[1]
    cdef cnp.ndarray g_arr = np.empty((L, N), dtype=np.float64)
    cdef cnp.ndarray pn_arr = np.empty(L, dtype=np.float64)
    cdef cnp.ndarray cn_arr = np.empty(N, dtype=np.float64)
    cdef cnp.ndarray out_arr = np.empty((L, d), dtype=np.float64)
    cdef double[:, ::1] g = g_arr
    cdef double[:, ::1] out = out_arr
    cdef double[::1] pn = pn_arr, cn = cn_arr
    cdef double inv2 = 0.5 / (s_hat * s_hat)
    cdef double inv_s2 = 1.0 / (s_hat * s_hat)
    cdef Py_ssize_t l, j, k
    cdef double sq, z, m, den, w
    with nogil:
        _gram(pts, ctr, g)
        _row_norms(pts, pn)
        _row_norms(ctr, cn)
        for l in range(L):
            m = -1e308
            for j in range(N):
                sq = pn[l] + cn[j] - 2.0 * g[l, j]
                if sq < 0.0:
                    sq = 0.0
                z = -sq * inv2
                g[l, j] = z
                if z > m:
                    m = z
            den = 0.0
            for k in range(d):
                out[l, k] = 0.0
            for j in range(N):
                w = exp(g[l, j] - m)
                den += w
                for k in range(d):
                    out[l, k] += w * ctr[j, k]
            for k in range(d):
                out[l, k] = (out[l, k] / den - pts[l, k]) * inv_s2
    return out_arr


def pair_joint_logmean(float[:, ::1] ej, float[:, ::1] ek):
    cdef Py_ssize_t L = ej.shape[0], N = ej.shape[1]
    cdef cnp.ndarray out_arr = np.empty(L, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t l, m
    cdef double acc
    with nogil:
        for l in range(L):
            acc = 0.0
            for m in range(N):
                acc += <double>ej[l, m] * <double>ek[l, m]
            out[l] = log(acc / <double>N)
    return out_arr
