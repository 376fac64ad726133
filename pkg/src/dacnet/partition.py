"""Fusion-center placement, governing sets and the fusion-center topology."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph


def maximal_disjoint_set(g: Graph, r0: int, seed_vertex: int = 0) -> np.ndarray:
    """Greedy maximal ``r0``-disjoint set of centers.

    Start from ``seed_vertex``; then repeatedly take the smallest vertex not
    yet covered, accept it when its ``r0``-ball misses the union ``U`` of the
    accepted balls, and otherwise just discard it.
    """
    if r0 < 1:
        raise ValueError("R0 must be at least 1")
    g._check_vertex(seed_vertex)
    in_u = np.zeros(g.n, dtype=bool)
    in_w = np.ones(g.n, dtype=bool)
    ball = g.ball(seed_vertex, r0)
    centers = [int(seed_vertex)]
    in_u[ball] = True
    in_w[ball] = False
    j = 0
    while True:
        while j < g.n and not in_w[j]:
            j += 1
        if j == g.n:
            break
        ball = g.ball(j, r0)
        if in_u[ball].any():
            in_w[j] = False
        else:
            centers.append(j)
            in_u[ball] = True
            in_w[ball] = False
    return np.array(centers, dtype=np.int64)


def voronoi_governing_sets(g: Graph, centers) -> np.ndarray:
    """``owner[i]`` = the nearest center to ``i``, ties to the smallest index."""
    lam = np.sort(np.asarray(centers, dtype=np.int64))
    if lam.size == 0:
        raise ValueError("need at least one center")
    best = np.full(g.n, np.iinfo(np.int64).max)
    owner = np.empty(g.n, dtype=np.int64)
    for c in lam:
        d = g.distances_from(int(c))
        closer = d < best
        best[closer] = d[closer]
        owner[closer] = c
    return owner


@dataclass(frozen=True, eq=False)
class Partition:
    """Centers with their governing, extended and fattened vertex sets.

    All vertex sets are sorted int64 arrays. ``fattened[(c, l)]`` is defined
    for ``l`` in ``{m, 2m}``.
    """

    graph: Graph
    centers: np.ndarray
    owner: np.ndarray
    governing: dict
    extended: dict
    fattened: dict
    out_neighbors: dict
    in_neighbors: dict
    r0: int
    radius: int
    m: int

    def terms(self, c: int) -> np.ndarray:
        """Objective terms a center needs, ``D_{c,R,m}``."""
        return self.fattened[(c, self.m)]

    def halo(self, c: int) -> np.ndarray:
        """``D_{c,R,2m}``: every vertex whose value the local problem reads."""
        return self.fattened[(c, 2 * self.m)]

    def boundary(self, c: int) -> np.ndarray:
        """``D_{c,R,2m} \\ D_{c,R}``."""
        return np.setdiff1d(self.halo(c), self.extended[c], assume_unique=True)

    def dump(self) -> str:
        def fmt(a):
            return " ".join(str(int(v)) for v in a)
        lines = []
        for c in self.centers:
            c = int(c)
            lines.append(f"{c}: {fmt(self.governing[c])} | {fmt(self.extended[c])} | "
                         f"{fmt(self.out_neighbors[c])} | {fmt(self.in_neighbors[c])}")
        return "\n".join(lines) + "\n"


def build_partition(g: Graph, r0: int, radius: int, m: int, *, centers=None,
                    seed_vertex: int = 0) -> Partition:
    if radius < 1 or m < 1:
        raise ValueError("R and m must be at least 1")
    if centers is None:
        centers = maximal_disjoint_set(g, r0, seed_vertex)
    lam = np.sort(np.asarray(centers, dtype=np.int64))
    owner = voronoi_governing_sets(g, lam)
    governing = {int(c): np.flatnonzero(owner == c) for c in lam}
    extended = {}
    fattened = {}
    for c in lam:
        c = int(c)
        dist = g.set_distances(governing[c], radius + 2 * m)
        extended[c] = np.flatnonzero((dist >= 0) & (dist <= radius))
        # union-of-balls extension: rho(i, D_{c,R}) <= l  iff  rho(i, D_c) <= R + l
        for ell in (m, 2 * m):
            fattened[(c, ell)] = np.flatnonzero((dist >= 0) & (dist <= radius + ell))
    in_neighbors = {int(c): np.unique(owner[fattened[(int(c), 2 * m)]]) for c in lam}
    out_sets = {int(c): [] for c in lam}
    for c in lam:
        for src in in_neighbors[int(c)]:
            out_sets[int(src)].append(int(c))
    out_neighbors = {c: np.array(sorted(v), dtype=np.int64) for c, v in out_sets.items()}
    return Partition(g, lam, owner, governing, extended, fattened, out_neighbors,
                     in_neighbors, int(r0), int(radius), int(m))


def check_partition(part: Partition) -> list[str]:
    """Return a list of violated partition invariants (empty when sound)."""
    g = part.graph
    problems = []
    seen = np.zeros(g.n, dtype=np.int64)
    for c in part.centers:
        seen[part.governing[int(c)]] += 1
    if np.any(seen != 1):
        problems.append("governing sets do not partition V")
    for c in part.centers:
        c = int(c)
        dc, ext = part.governing[c], part.extended[c]
        if not np.isin(dc, ext).all():
            problems.append(f"D_{c} not contained in its extension")
        outside = np.setdiff1d(np.arange(g.n), ext)
        if outside.size and dc.size:
            dist = g.set_distances(dc, part.radius + 1)
            if np.any((dist[outside] >= 0) & (dist[outside] <= part.radius)):
                problems.append(f"rho(D_{c}, V \\ D_{c},R) <= R")
        for ell in (part.m, 2 * part.m):
            dist = g.set_distances(ext, ell)
            if not np.array_equal(np.flatnonzero(dist >= 0), part.fattened[(c, ell)]):
                problems.append(f"D_{c},R,{ell} is not the {ell}-fattening")
        for c2 in part.centers:
            c2 = int(c2)
            a = np.intersect1d(dc, part.fattened[(c2, 2 * part.m)]).size > 0
            if a != (c2 in part.out_neighbors[c]):
                problems.append(f"out-neighbor set of {c} wrong at {c2}")
            if (c2 in part.out_neighbors[c]) != (c in part.in_neighbors[c2]):
                problems.append(f"in/out duality broken for ({c}, {c2})")
    return problems


def check_disjoint_maximal(g: Graph, centers, r0: int) -> list[str]:
    problems = []
    lam = [int(c) for c in centers]
    covered = np.zeros(g.n, dtype=np.int64)
    for c in lam:
        covered[g.ball(c, r0)] += 1
    if np.any(covered > 1):
        problems.append("center balls overlap")
    hit = covered > 0
    for i in range(g.n):
        if not hit[g.ball(i, r0)].any():
            problems.append(f"vertex {i}: ball misses every center ball")
            break
    return problems


def check_sandwich(part: Partition) -> list[str]:
    """Size estimates for Voronoi cells over a maximal disjoint set."""
    g, r0, radius = part.graph, part.r0, part.radius
    problems = []
    for c in part.centers:
        c = int(c)
        d = g.distances_from(c)
        dc, ext = part.governing[c], part.extended[c]
        if not (np.isin(np.flatnonzero(d <= r0), dc).all() and np.all(d[dc] <= 2 * r0)):
            problems.append(f"B(c,R0) <= D_c <= B(c,2R0) fails at {c}")
        if not (np.isin(np.flatnonzero(d <= r0 + radius), ext).all()
                and np.all(d[ext] <= 2 * r0 + radius)):
            problems.append(f"B(c,R0+R) <= D_c,R <= B(c,2R0+R) fails at {c}")
    return problems
