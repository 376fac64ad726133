"""Text formats: edge lists with optional coordinate sidecars."""

from __future__ import annotations

import numpy as np

from .graph import Graph, GraphError


def write_edge_list(g: Graph, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{g.n} {g.n_edges}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        lines = [ln for ln in fh.read().split("\n")]
    if not lines or not lines[0].strip():
        raise GraphError(f"{path}:1: missing 'N M' header")
    try:
        n, m = (int(t) for t in lines[0].split())
    except ValueError:
        raise GraphError(f"{path}:1: header must be 'N M'") from None
    edges = []
    for k, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"{path}:{k}: expected 'u v'")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"{path}:{k}: vertex out of range")
        if u == v:
            raise GraphError(f"{path}:{k}: self-loop")
        if u > v:
            raise GraphError(f"{path}:{k}: edges must be written with u < v")
        edges.append((u, v))
    if len(edges) != m:
        raise GraphError(f"{path}: header announces {m} edges, found {len(edges)}")
    if len(set(edges)) != len(edges):
        raise GraphError(f"{path}: duplicate edge")
    return Graph(n, edges)


def write_coords(coords, path):
    with open(path, "w", newline="\n") as fh:
        for x, y in np.asarray(coords):
            fh.write(f"{float(x)!r} {float(y)!r}\n")


def read_coords(path, n: int | None = None) -> np.ndarray:
    pts = np.loadtxt(path, ndmin=2)
    if pts.shape[1] != 2 or (n is not None and pts.shape[0] != n):
        raise GraphError(f"{path}: expected {n if n is not None else 'N'} lines 'x y'")
    return pts
