# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror fairad._fallback exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def greedy_select(const int[::1] indptr, const int[::1] indices,
                  const double[::1] data, const cnp.int64_t[::1] order,
                  const double[::1] rowsum, double alpha):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t t, p, i, j
    cdef double mx, w
    cdef cnp.uint8_t[::1] chosen = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] out = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t count = 0
    with nogil:
        for t in range(order.shape[0]):
            i = order[t]
            if count > 0:
                mx = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    j = indices[p]
                    if chosen[j]:
                        w = data[p]
                        if w > mx:
                            mx = w
                if mx > alpha * rowsum[i]:
                    continue
            chosen[i] = 1
            out[count] = i
            count += 1
    return np.asarray(out[:count]).copy()


def edge_max_absdiff(const cnp.int64_t[::1] rows, const cnp.int64_t[::1] cols, const double[:, ::1] X):
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t R = X.shape[1]
    cdef Py_ssize_t e, r, a, b
    cdef double mx, d
    cdef double[::1] out = np.empty(m, dtype=np.float64)
    with nogil:
        for e in range(m):
            a = rows[e]
            b = cols[e]
            mx = 0.0
            for r in range(R):
                d = fabs(X[a, r] - X[b, r])
                if d > mx:
                    mx = d
            out[e] = mx
    return np.asarray(out)


def galerkin_dense(const int[::1] w_indptr, const int[::1] w_indices, const double[::1] w_data,
                   const int[::1] p_indptr, const int[::1] p_indices, const double[::1] p_data,
                   Py_ssize_t nc):
    cdef Py_ssize_t n = w_indptr.shape[0] - 1
    cdef Py_ssize_t i, p, q, j, a, t, ntouch
    cdef double w, pa
    cdef bint dense
    cdef double[:, ::1] Q = np.zeros((nc, nc), dtype=np.float64)
    cdef double[::1] acc = np.zeros(nc, dtype=np.float64)
    cdef cnp.uint8_t[::1] seen = np.zeros(nc, dtype=np.uint8)
    cdef cnp.int64_t[::1] touched = np.empty(nc, dtype=np.int64)
    with nogil:
        for i in range(n):
            # acc = (W P)[i, :] on its nonzero pattern
            ntouch = 0
            for p in range(w_indptr[i], w_indptr[i + 1]):
                j = w_indices[p]
                w = w_data[p]
                for q in range(p_indptr[j], p_indptr[j + 1]):
                    a = p_indices[q]
                    if not seen[a]:
                        seen[a] = 1
                        touched[ntouch] = a
                        ntouch += 1
                    acc[a] += w * p_data[q]
            # Q[a, :] += P[i, a] * acc; contiguous sweep once acc is mostly full
            dense = 4 * ntouch > nc
            for q in range(p_indptr[i], p_indptr[i + 1]):
                a = p_indices[q]
                pa = p_data[q]
                if dense:
                    for t in range(nc):
                        Q[a, t] += pa * acc[t]
                else:
                    for t in range(ntouch):
                        Q[a, touched[t]] += pa * acc[touched[t]]
            for t in range(ntouch):
                acc[touched[t]] = 0.0
                seen[touched[t]] = 0
    return np.asarray(Q)


cdef inline void _panel(const int[::1] indptr, const int[::1] indices, const double[::1] data,
                        const double[:, ::1] X, double[:, ::1] Y, Py_ssize_t i, Py_ssize_t c0,
                        Py_ssize_t width) noexcept nogil:
    cdef double acc[8]
    cdef Py_ssize_t p, j, c
    cdef double w
    for c in range(8):
        acc[c] = 0.0
    if width == 8:
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            w = data[p]
            for c in range(8):
                acc[c] += w * X[j, c0 + c]
    elif width == 4:
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            w = data[p]
            for c in range(4):
                acc[c] += w * X[j, c0 + c]
    else:
        for p in range(indptr[i], indptr[i + 1]):
            acc[0] += data[p] * X[indices[p], c0]
    for c in range(width):
        Y[i, c0 + c] = acc[c]


def csr_matmat(const int[::1] indptr, const int[::1] indices, const double[::1] data,
               const double[:, ::1] X):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t k = X.shape[1]
    cdef Py_ssize_t i, c0
    cdef double[:, ::1] Y = np.empty((n, k), dtype=np.float64)
    with nogil:
        # column panels of 8, then 4, then 1 keep the row sums in registers
        for i in range(n):
            c0 = 0
            while c0 + 8 <= k:
                _panel(indptr, indices, data, X, Y, i, c0, 8)
                c0 += 8
            while c0 + 4 <= k:
                _panel(indptr, indices, data, X, Y, i, c0, 4)
                c0 += 4
            while c0 < k:
                _panel(indptr, indices, data, X, Y, i, c0, 1)
                c0 += 1
    return np.asarray(Y)
