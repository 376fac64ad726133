"""Undirected graphs, geodesic distances, metric balls and growth constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import kernels
from .rng import GRAPH_STREAM, make_rng

#: All-pairs distances are stored only up to this order.
DENSE_DISTANCE_LIMIT = 4096


class GraphError(ValueError):
    pass


class Graph:
    """Immutable connected undirected graph on vertices ``0..n-1``.

    Stored as CSR arrays (``indptr``, ``indices``) with sorted neighbor lists.
    """

    def __init__(self, n: int, edges, *, check_connected: bool = True):
        n = int(n)
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise GraphError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise GraphError("self-loop in edge list")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = lo * n + hi
        if np.unique(key).size != key.size:
            raise GraphError("duplicate edge in edge list")
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        adj = sp.csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n))
        adj.sort_indices()
        self.n = n
        self.indptr = adj.indptr.astype(np.int32)
        self.indices = adj.indices.astype(np.int32)
        self._edges = np.stack([lo, hi], axis=1)[np.argsort(key, kind="stable")]
        if check_connected and n > 1:
            ncomp, _ = connected_components(adj, directed=False)
            if ncomp != 1:
                raise GraphError(f"graph is disconnected ({ncomp} components)")

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.n_edges})"

    @property
    def n_edges(self) -> int:
        return int(self._edges.shape[0])

    @property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges ``(u, v)`` with ``u < v``, sorted."""
        return self._edges.copy()

    def neighbors(self, i: int) -> np.ndarray:
        self._check_vertex(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    # -- geodesic metric -------------------------------------------------

    @cached_property
    def _dense_distances(self) -> np.ndarray | None:
        if self.n > DENSE_DISTANCE_LIMIT:
            return None
        d = kernels.all_pairs_bfs(self.indptr, self.indices)
        d.setflags(write=False)
        return d

    @property
    def distances(self) -> np.ndarray:
        """Dense all-pairs hop distances (read-only int32 array)."""
        d = self._dense_distances
        if d is None:
            raise GraphError(f"all-pairs distances not materialized for n > {DENSE_DISTANCE_LIMIT}")
        return d

    def distances_from(self, i: int) -> np.ndarray:
        self._check_vertex(i)
        d = self._dense_distances
        if d is not None:
            return d[i]
        return kernels.bfs_from(self.indptr, self.indices, int(i))

    def distance(self, i: int, j: int) -> int:
        self._check_vertex(j)
        return int(self.distances_from(i)[j])

    def ball(self, i: int, radius: int) -> np.ndarray:
        """Sorted vertices within ``radius`` hops of ``i``."""
        if radius < 0:
            raise ValueError("radius must be non-negative")
        return np.flatnonzero(self.distances_from(i) <= radius)

    def set_distances(self, vertices, cutoff: int) -> np.ndarray:
        """Distance from every vertex to the set ``vertices``; -1 beyond ``cutoff``."""
        src = np.asarray(vertices, dtype=np.int32)
        return kernels.multi_source_bfs(self.indptr, self.indices, src, int(cutoff))

    def fatten(self, vertices, radius: int) -> np.ndarray:
        """Sorted vertex set ``{i : rho(i, vertices) <= radius}``."""
        return np.flatnonzero(self.set_distances(vertices, radius) >= 0)

    @cached_property
    def eccentricities(self) -> np.ndarray:
        if self._dense_distances is not None:
            return self._dense_distances.max(axis=1)
        return np.array([self.distances_from(i).max() for i in range(self.n)])

    @property
    def diameter(self) -> int:
        return int(self.eccentricities.max())

    def geodesic_width(self, matrix) -> int:
        """Largest hop distance carrying a nonzero entry of ``matrix``."""
        coo = sp.coo_matrix(matrix)
        mask = coo.data != 0
        if not mask.any():
            return 0
        r, c = coo.row[mask], coo.col[mask]
        if self._dense_distances is not None:
            return int(self._dense_distances[r, c].max())
        return max(self.distance(int(a), int(b)) for a, b in zip(r, c))

    def _check_vertex(self, i):
        if not 0 <= int(i) < self.n:
            raise IndexError(f"vertex {i} out of range for graph of order {self.n}")


# -- constructors ---------------------------------------------------------

def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(rows: int, cols: int) -> Graph:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


@dataclass(frozen=True)
class GeometricGraph:
    graph: Graph
    coords: np.ndarray
    redraws: int
    seed: int = 0
    radius: float = field(default=0.0)


def _geometric_edges(points: np.ndarray, radius_sq: float) -> np.ndarray:
    tree = cKDTree(points)
    pairs = tree.query_pairs(math.sqrt(radius_sq) * (1 + 1e-9), output_type="ndarray")
    if pairs.size == 0:
        return pairs.reshape(0, 2)
    diff = points[pairs[:, 0]] - points[pairs[:, 1]]
    keep = diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1] <= radius_sq
    return pairs[keep]


def random_geometric_graph(n: int, seed: int, *, strategy: str = "relocate",
                           max_attempts: int = 1000) -> GeometricGraph:
    """Random geometric graph on ``n`` uniform points of the unit square.

    Vertices ``i, j`` are adjacent iff ``|p_i - p_j|^2 <= 2/n``. Coordinates
    are consecutive ``(x, y)`` pairs from ``make_rng(seed, GRAPH_STREAM)``.

    Disconnected draws are repaired by redrawing points, never by adding
    edges. ``strategy="redraw"`` restarts the whole draw with ``seed + 1``;
    ``strategy="relocate"`` redraws, from the same stream, only the points
    outside the largest component. At the edge radius used here the chance
    of a fully connected draw falls rapidly with ``n`` (about 3% at 256,
    essentially nil from 512 on), so ``"redraw"`` is only practical for
    small graphs. ``redraws`` counts the repair rounds.
    """
    if n < 2:
        raise GraphError("random geometric graph needs n >= 2")
    if strategy not in ("relocate", "redraw"):
        raise ValueError(f"unknown strategy {strategy!r}")
    radius_sq = 2.0 / n
    cur_seed = int(seed)
    rng = make_rng(cur_seed, GRAPH_STREAM)
    points = rng.random((n, 2))
    for attempt in range(max_attempts + 1):
        pairs = _geometric_edges(points, radius_sq)
        adj = sp.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
        ncomp, labels = connected_components(adj, directed=False)
        if ncomp == 1:
            g = Graph(n, pairs, check_connected=False)
            points.setflags(write=False)
            return GeometricGraph(g, points, attempt, int(seed), math.sqrt(radius_sq))
        if strategy == "redraw":
            cur_seed += 1
            rng = make_rng(cur_seed, GRAPH_STREAM)
            points = rng.random((n, 2))
        else:
            giant = np.argmax(np.bincount(labels))
            stray = np.flatnonzero(labels != giant)
            points[stray] = rng.random((stray.size, 2))
    raise GraphError(f"no connected geometric graph with n={n} after {max_attempts} "
                     f"{strategy} rounds starting from seed {seed}")


# -- spectral operators and growth constants --------------------------------

def normalized_laplacian(g: Graph) -> sp.csr_matrix:
    """``I - D^{-1/2} A D^{-1/2}`` as a CSR matrix."""
    deg = g.degrees.astype(float)
    if g.n > 1 and np.any(deg == 0):
        raise GraphError("normalized Laplacian undefined with an isolated vertex")
    if g.n == 1:
        return sp.csr_matrix(np.zeros((1, 1)))
    inv_sqrt = 1.0 / np.sqrt(deg)
    a = g.adjacency
    scaled = sp.diags(inv_sqrt) @ a @ sp.diags(inv_sqrt)
    lap = (sp.identity(g.n, format="csr") - scaled).tocsr()
    lap.sort_indices()
    return lap


@dataclass(frozen=True)
class GrowthConstants:
    """Polynomial growth pair: ``|B(i, R)| <= density * (R + 1) ** dimension``."""

    dimension: float
    density: float

    @property
    def integer_dimension(self) -> int:
        """Dimension rounded up, the conservative choice for factorials."""
        return int(math.ceil(self.dimension - 1e-12))


def ball_size_table(g: Graph) -> np.ndarray:
    """``table[i, R] = |B(i, R)|`` for ``R = 0..diameter``."""
    diam = g.diameter
    table = np.empty((g.n, diam + 1), dtype=np.int64)
    for i in range(g.n):
        counts = np.bincount(g.distances_from(i), minlength=diam + 1)
        table[i] = np.cumsum(counts)
    return table


def estimate_growth(g: Graph, d_fixed: float) -> GrowthConstants:
    """Smallest density compatible with dimension ``d_fixed`` over every ball."""
    if d_fixed <= 0:
        raise ValueError("d_fixed must be positive")
    table = ball_size_table(g)
    radii = np.arange(table.shape[1], dtype=float)
    density = float((table / (radii + 1.0) ** d_fixed).max())
    return GrowthConstants(float(d_fixed), density)
