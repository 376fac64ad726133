# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: breadth-first search and proximal coordinate descent."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

ctypedef cnp.int32_t i32
ctypedef cnp.float64_t f64


def bfs_from(const i32[:] indptr, const i32[:] indices, Py_ssize_t source):
    """Hop distances from ``source``; -1 marks unreachable vertices."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef i32[:] dist = dist_arr
    cdef i32[:] queue = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef i32 u, v
    dist[source] = 0
    queue[tail] = <i32>source
    tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue[tail] = v
                    tail += 1
    return dist_arr


def all_pairs_bfs(const i32[:] indptr, const i32[:] indices):
    """Dense ``(n, n)`` int32 matrix of hop distances."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out_arr = np.full((n, n), -1, dtype=np.int32)
    cdef i32[:, :] out = out_arr
    cdef i32[:] queue = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t s, head, tail, k
    cdef i32 u, v
    with nogil:
        for s in range(n):
            out[s, s] = 0
            queue[0] = <i32>s
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    if out[s, v] < 0:
                        out[s, v] = out[s, u] + 1
                        queue[tail] = v
                        tail += 1
    return out_arr


def multi_source_bfs(const i32[:] indptr, const i32[:] indices,
                     const i32[:] sources, int cutoff):
    """Distance to the nearest source, explored up to ``cutoff`` hops (-1 beyond)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef i32[:] dist = dist_arr
    cdef i32[:] queue = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t head = 0, tail = 0, k, s
    cdef i32 u, v
    for s in range(sources.shape[0]):
        u = sources[s]
        if dist[u] < 0:
            dist[u] = 0
            queue[tail] = u
            tail += 1
    with nogil:
        while head < tail:
            u = queue[head]
            head += 1
            if dist[u] >= cutoff:
                continue
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue[tail] = v
                    tail += 1
    return dist_arr


def lasso_cd(const f64[:, :] gram, const f64[:] q, f64[:] u, double mu,
             double tol, Py_ssize_t max_sweeps):
    """Cyclic coordinate descent for ``0.5 u'Gu - q'u + mu |u|_1``, in place.

    Returns ``(sweeps, last_max_change)``.
    """
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t sweep = 0, k, j
    cdef double s, z, new, delta, change = 0.0
    # gu tracks G u across coordinate moves; G must be symmetric
    cdef f64[:] gu = np.asarray(gram) @ np.asarray(u)
    with nogil:
        while sweep < max_sweeps:
            sweep += 1
            change = 0.0
            for k in range(n):
                z = q[k] - (gu[k] - gram[k, k] * u[k])
                if z > mu:
                    new = (z - mu) / gram[k, k]
                elif z < -mu:
                    new = (z + mu) / gram[k, k]
                else:
                    new = 0.0
                delta = new - u[k]
                if delta != 0.0:
                    u[k] = new
                    for j in range(n):
                        gu[j] += gram[k, j] * delta
                    s = fabs(delta)
                    if s > change:
                        change = s
            if change <= tol:
                break
    return sweep, change
