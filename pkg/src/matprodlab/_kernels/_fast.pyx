# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled product/decomposition kernel; mirrors reference.product_terms."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def product_terms(double[:, :, :, ::1] xs, double scale, Py_ssize_t depth):
    cdef Py_ssize_t T = xs.shape[0]
    cdef Py_ssize_t n = xs.shape[1]
    cdef Py_ssize_t d = xs.shape[2]
    if depth < 0 or depth > n:
        raise ValueError("depth must lie in [0, n]")

    zn_arr = np.zeros((T, d, d), dtype=np.float64)
    terms_arr = np.zeros((T, depth, d, d), dtype=np.float64)
    xm_arr = np.zeros((d, d), dtype=np.float64)
    work_arr = np.zeros((d, d), dtype=np.float64)

    cdef double[:, :, ::1] zn = zn_arr
    cdef double[:, :, :, ::1] terms = terms_arr
    cdef double[:, ::1] xm = xm_arr
    cdef double[:, ::1] work = work_arr

    cdef Py_ssize_t t, m, k, i, j, q, top
    cdef double xiq

    with nogil:
        for t in range(T):
            for i in range(d):
                zn[t, i, i] = 1.0
            for m in range(n):
                for i in range(d):
                    for j in range(d):
                        xm[i, j] = xs[t, m, i, j] * scale
                top = m + 1 if m + 1 < depth else depth
                # k descending: reads of terms[t, k-2] must see the previous step;
                # writing terms[t, k-1] while reading terms[t, k-2] never aliases
                for k in range(top, 1, -1):
                    for i in range(d):
                        for q in range(d):
                            xiq = xm[i, q]
                            for j in range(d):
                                terms[t, k - 1, i, j] += xiq * terms[t, k - 2, q, j]
                if depth >= 1:
                    for i in range(d):
                        for j in range(d):
                            terms[t, 0, i, j] += xm[i, j]
                # zn update reads and writes the same matrix: stage in a buffer
                for i in range(d):
                    for j in range(d):
                        work[i, j] = 0.0
                for i in range(d):
                    for q in range(d):
                        xiq = xm[i, q]
                        for j in range(d):
                            work[i, j] += xiq * zn[t, q, j]
                for i in range(d):
                    for j in range(d):
                        zn[t, i, j] += work[i, j]
    return zn_arr, terms_arr
