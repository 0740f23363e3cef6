# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Walsh-Hadamard transform and threshold dynamics."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def fwht(cnp.complex128_t[::1] a, int n):
    """In-place unnormalized fast Walsh-Hadamard transform of length 2^n."""
    cdef Py_ssize_t T = a.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double complex x, y
    while h < T:
        for i in range(0, T, 2 * h):
            for j in range(i, i + h):
                x = a[j]
                y = a[j + h]
                a[j] = x + y
                a[j + h] = x - y
        h *= 2
    return np.asarray(a)


def threshold_rounds(cnp.int8_t[:, ::1] spins,
                     cnp.int32_t[::1] indptr,
                     cnp.int32_t[::1] indices,
                     cnp.int32_t[::1] dist,
                     cnp.int32_t[::1] taus):
    """Synchronous threshold dynamics; see the numpy twin for semantics."""
    cdef Py_ssize_t B = spins.shape[0]
    cdef Py_ssize_t n = spins.shape[1]
    cdef int steps = taus.shape[0]
    cdef Py_ssize_t b
    cdef int i, u, w, same, tau, window, cut = 0
    cdef cnp.int8_t su
    flip_arr = np.empty(n, dtype=np.int8)
    cdef cnp.int8_t[::1] flip = flip_arr
    for b in range(B):
        for i in range(1, steps + 1):
            window = steps - i
            tau = taus[i - 1]
            for u in range(n):
                flip[u] = 0
                if dist[u] <= window:
                    su = spins[b, u]
                    same = 0
                    for w in range(indptr[u], indptr[u + 1]):
                        if spins[b, indices[w]] == su:
                            same += 1
                    if same >= tau:
                        flip[u] = 1
            for u in range(n):
                if flip[u]:
                    spins[b, u] = -spins[b, u]
        if spins[b, 0] != spins[b, 1]:
            cut += 1
    return cut
