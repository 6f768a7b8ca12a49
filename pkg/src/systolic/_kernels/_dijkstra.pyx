# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled shortest-path kernel: Dijkstra on a rectangular index box.

Mirrors ``fallback.dijkstra_box``; see that module for the contract.
"""

from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double INF = float("inf")


cdef inline void _heap_push(double* hd, long* hv, Py_ssize_t* hn,
                            double d, long v) noexcept nogil:
    cdef Py_ssize_t i = hn[0]
    cdef Py_ssize_t p
    hn[0] += 1
    while i > 0:
        p = (i - 1) >> 1
        if hd[p] <= d:
            break
        hd[i] = hd[p]
        hv[i] = hv[p]
        i = p
    hd[i] = d
    hv[i] = v


cdef inline void _heap_pop(double* hd, long* hv, Py_ssize_t* hn,
                           double* d_out, long* v_out) noexcept nogil:
    d_out[0] = hd[0]
    v_out[0] = hv[0]
    hn[0] -= 1
    cdef Py_ssize_t n = hn[0]
    if n == 0:
        return
    cdef double d = hd[n]
    cdef long v = hv[n]
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t c
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and hd[c + 1] < hd[c]:
            c += 1
        if hd[c] >= d:
            break
        hd[i] = hd[c]
        hv[i] = hv[c]
        i = c
    hd[i] = d
    hv[i] = v


def dijkstra_box(double[:, ::1] fbox, long[:, ::1] offsets, double[::1] steps,
                 Py_ssize_t src, Py_ssize_t dst, double cutoff=INF):
    """Shortest weighted path from flat node src to dst on the box grid.

    Returns (dist, parent); see the fallback module for parameter details.
    """
    cdef Py_ssize_t ni = fbox.shape[0]
    cdef Py_ssize_t nj = fbox.shape[1]
    cdef Py_ssize_t n = ni * nj
    cdef Py_ssize_t nk = offsets.shape[0]

    dist_arr = np.full(n, INF)
    parent_arr = np.full(n, -1, dtype=np.int32)
    cdef double[::1] dist = dist_arr
    cdef int[::1] parent = parent_arr

    # Each node is pushed at most once per settled in-neighbor.
    cdef Py_ssize_t cap = n * nk + 1
    cdef double* hd = <double*> malloc(cap * sizeof(double))
    cdef long* hv = <long*> malloc(cap * sizeof(long))
    if hd == NULL or hv == NULL:
        free(hd)
        free(hv)
        raise MemoryError("could not allocate Dijkstra heap")

    cdef Py_ssize_t hn = 0
    cdef double d, nd, fa, out = INF
    cdef long a, b
    cdef Py_ssize_t ai, aj, bi, bj, k
    cdef const double* fflat = &fbox[0, 0]

    with nogil:
        dist[src] = 0.0
        _heap_push(hd, hv, &hn, 0.0, <long> src)
        while hn > 0:
            _heap_pop(hd, hv, &hn, &d, &a)
            if d > dist[a]:
                continue
            if a == <long> dst:
                out = d
                break
            if d > cutoff:
                break
            ai = a / nj
            aj = a - ai * nj
            fa = fflat[a]
            for k in range(nk):
                bi = ai + offsets[k, 0]
                bj = aj + offsets[k, 1]
                if bi < 0 or bi >= ni or bj < 0 or bj >= nj:
                    continue
                b = bi * nj + bj
                nd = d + steps[k] * 0.5 * (fa + fflat[b])
                if nd < dist[b]:
                    dist[b] = nd
                    parent[b] = <int> a
                    _heap_push(hd, hv, &hn, nd, b)

    free(hd)
    free(hv)
    return out, parent_arr
