"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and results; used when the extension is not built or when
``DACNET_PURE_PYTHON`` is set.
"""

from collections import deque

import numpy as np


def bfs_from(indptr, indices, source):
    n = len(indptr) - 1
    dist = [-1] * n
    dist[source] = 0
    ptr = indptr.tolist()
    idx = indices.tolist()
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for k in range(ptr[u], ptr[u + 1]):
            v = idx[k]
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return np.asarray(dist, dtype=np.int32)


def all_pairs_bfs(indptr, indices):
    n = len(indptr) - 1
    out = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        out[s] = bfs_from(indptr, indices, s)
    return out


def multi_source_bfs(indptr, indices, sources, cutoff):
    n = len(indptr) - 1
    dist = [-1] * n
    ptr = indptr.tolist()
    idx = indices.tolist()
    queue = deque()
    for s in np.asarray(sources).tolist():
        if dist[s] < 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        if dist[u] >= cutoff:
            continue
        du = dist[u] + 1
        for k in range(ptr[u], ptr[u + 1]):
            v = idx[k]
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return np.asarray(dist, dtype=np.int32)


def lasso_cd(gram, q, u, mu, tol, max_sweeps):
    n = u.shape[0]
    gu = gram @ u
    diag = np.diagonal(gram)
    sweep = 0
    change = 0.0
    while sweep < max_sweeps:
        sweep += 1
        change = 0.0
        for k in range(n):
            z = q[k] - (gu[k] - diag[k] * u[k])
            if z > mu:
                new = (z - mu) / diag[k]
            elif z < -mu:
                new = (z + mu) / diag[k]
            else:
                new = 0.0
            delta = new - u[k]
            if delta != 0.0:
                u[k] = new
                gu += gram[k] * delta
                if abs(delta) > change:
                    change = abs(delta)
        if change <= tol:
            break
    return sweep, change
