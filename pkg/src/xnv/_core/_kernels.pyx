# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for Gaussian Gram matrices and cosine features.

Pairwise squared distances are accumulated coordinate by coordinate, so
``gaussian_gram(X, X)`` has an exact unit diagonal and is exactly symmetric.
The loops only build the exponent / phase arrays; the transcendental is
applied in place by numpy, whose vectorized ``exp`` and ``cos`` outpace
scalar libm calls.
"""
import numpy as np


def gaussian_gram(const double[:, ::1] X, const double[:, ::1] Y, double sigma):
    cdef Py_ssize_t n = X.shape[0], m = Y.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] K = out
    with nogil:
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(d):
                    diff = X[i, k] - Y[j, k]
                    acc = acc + diff * diff
                K[i, j] = -sigma * acc
    np.exp(out, out=out)
    return out


def gaussian_gram_sym(const double[:, ::1] X, double sigma):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, diff, v
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] K = out
    with nogil:
        for i in range(n):
            K[i, i] = 0.0
            for j in range(i + 1, n):
                acc = 0.0
                for k in range(d):
                    diff = X[i, k] - X[j, k]
                    acc = acc + diff * diff
                v = -sigma * acc
                K[i, j] = v
                K[j, i] = v
    np.exp(out, out=out)
    return out


def cosine_features(const double[:, ::1] X, const double[:, ::1] W,
                    const double[::1] b, double scale):
    cdef Py_ssize_t n = X.shape[0], m = W.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double x
    # frequency-major layout keeps the innermost loop contiguous
    cdef const double[:, ::1] WT = np.ascontiguousarray(np.asarray(W).T)
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] Z = out
    with nogil:
        for i in range(n):
            for j in range(m):
                Z[i, j] = b[j]
            for k in range(d):
                x = X[i, k]
                for j in range(m):
                    Z[i, j] = Z[i, j] + WT[k, j] * x
    np.cos(out, out=out)
    out *= scale
    return out
