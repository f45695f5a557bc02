# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the sparse softmax-regression inner loop."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def scores_one(double[:, ::1] weights, double[::1] bias,
               cnp.int64_t[::1] idx, double[::1] val):
    cdef Py_ssize_t n_classes = weights.shape[0]
    cdef Py_ssize_t nnz = idx.shape[0]
    cdef Py_ssize_t c, j
    out = np.empty(n_classes, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef double acc
    for c in range(n_classes):
        acc = bias[c]
        for j in range(nnz):
            acc += weights[c, idx[j]] * val[j]
        out_v[c] = acc
    return out


def sgd_epoch(double[:, ::1] weights, double[::1] bias,
              cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
              double[::1] values, cnp.int64_t[::1] labels,
              cnp.int64_t[::1] order, double lr, double l2):
    cdef Py_ssize_t n_classes = weights.shape[0]
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t r, i, c, j
    cdef cnp.int64_t lo, hi, col
    cdef double acc, mx, total, p, err
    probs = np.empty(n_classes, dtype=np.float64)
    cdef double[::1] pv = probs
    for r in range(n):
        i = order[r]
        lo = indptr[i]
        hi = indptr[i + 1]
        mx = -1e308
        for c in range(n_classes):
            acc = bias[c]
            for j in range(lo, hi):
                acc += weights[c, indices[j]] * values[j]
            pv[c] = acc
            if acc > mx:
                mx = acc
        total = 0.0
        for c in range(n_classes):
            p = exp(pv[c] - mx)
            pv[c] = p
            total += p
        for c in range(n_classes):
            err = pv[c] / total
            if c == labels[i]:
                err -= 1.0
            for j in range(lo, hi):
                col = indices[j]
                weights[c, col] -= lr * (err * values[j] + l2 * weights[c, col])
            bias[c] -= lr * err
