"""Sum-of-local-terms objectives: least squares and LASSO on a graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import Graph, normalized_laplacian
from .rng import POWER_STREAM, RHS_STREAM, make_rng


class CertificationError(ValueError):
    pass


@dataclass(frozen=True)
class ObjectiveMeta:
    """Locality radius ``m`` and Hessian bounds ``c I <= Phi <= L I``."""

    m: int
    c: float
    L: float
    smooth: bool = True
    certified: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("neighboring radius m must be >= 1")
        if not 0 < self.c < self.L:
            raise CertificationError(f"need 0 < c < L, got c={self.c}, L={self.L}")


def soft_threshold(v, t):
    """``sign(v) * max(|v| - t, 0)``, elementwise."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be non-negative")
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


class LeastSquaresObjective:
    """``F(x) = 0.5 * ||H x - b||^2`` split as ``f_i = 0.5 * (H[i] x - b_i)^2``."""

    smooth = True

    def __init__(self, graph: Graph, H, b, meta: ObjectiveMeta, sigma: float | None = None):
        self.graph = graph
        self.H = sp.csr_matrix(H)
        self.H.sort_indices()
        self.HT = self.H.T.tocsr()
        self.b = np.asarray(b, dtype=float)
        if self.H.shape != (graph.n, graph.n) or self.b.shape != (graph.n,):
            raise ValueError("H must be n x n and b of length n")
        self.meta = meta
        self.sigma = sigma

    @property
    def n(self):
        return self.graph.n

    @property
    def m(self):
        return self.meta.m

    def residual(self, x):
        return self.H @ x - self.b

    def local_terms(self, x) -> np.ndarray:
        return 0.5 * self.residual(x) ** 2

    def local_term(self, i: int, x) -> float:
        lo, hi = self.H.indptr[i], self.H.indptr[i + 1]
        cols = self.H.indices[lo:hi]
        r = self.H.data[lo:hi] @ np.asarray(x)[cols] - self.b[i]
        return 0.5 * float(r * r)

    def value(self, x) -> float:
        r = self.residual(x)
        return 0.5 * float(r @ r)

    def gradient(self, x) -> np.ndarray:
        return self.HT @ self.residual(x)

    def hessian(self) -> sp.csr_matrix:
        return (self.HT @ self.H).tocsr()


class LassoObjective:
    """Least squares plus ``mu * ||x||_1``; ``f_i`` carries ``mu * |x_i|``.

    ``gradient`` is the gradient of the smooth part only; the nonsmooth part
    is handled through ``prox``.
    """

    smooth = False

    def __init__(self, base: LeastSquaresObjective, mu: float):
        if mu < 0:
            raise ValueError("mu must be non-negative")
        self.base = base
        self.mu = float(mu)
        self.graph = base.graph
        self.H, self.HT, self.b = base.H, base.HT, base.b
        self.meta = ObjectiveMeta(base.meta.m, base.meta.c, base.meta.L, smooth=False,
                                  certified=base.meta.certified)

    @property
    def n(self):
        return self.base.n

    @property
    def m(self):
        return self.base.m

    def local_terms(self, x):
        return self.base.local_terms(x) + self.mu * np.abs(x)

    def local_term(self, i, x):
        return self.base.local_term(i, x) + self.mu * abs(float(x[i]))

    def value(self, x):
        return self.base.value(x) + self.mu * float(np.abs(x).sum())

    def gradient(self, x):
        return self.base.gradient(x)

    def prox(self, v, step):
        return soft_threshold(v, step * self.mu)


def power_iteration(matvec, n: int, iters: int = 100, seed: int = 0) -> float:
    """Largest eigenvalue of a symmetric PSD operator, fixed-seed start."""
    v = make_rng(seed, POWER_STREAM).standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = matvec(v)
        lam = float(v @ w)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
    return lam


def certify_constants(obj: LeastSquaresObjective, *, check: bool = True) -> tuple[float, float, bool]:
    """Hessian bounds ``(c, L, certified)`` for ``H^T H``.

    For ``H = I + sigma * Lsym`` the spectrum of ``Lsym`` lies in ``[0, 2]``,
    so ``H^T H`` has spectrum in ``[1, (1 + 2 sigma)^2]``; a power-iteration
    estimate of the top eigenvalue must not exceed that bound by more than
    1%. Any other ``H`` gets power-iteration estimates and
    ``certified=False``.
    """
    hess = obj.hessian()
    if obj.sigma is not None:
        sigma = float(obj.sigma)
        c, L = 1.0, (1.0 + 2.0 * sigma) ** 2
        if not c < L:
            raise CertificationError(f"degenerate bounds c={c}, L={L}; need c < L")
        if check:
            top = power_iteration(hess.dot, obj.n)
            if top > 1.01 * L:
                raise CertificationError(f"power iteration {top} exceeds analytic L={L}")
        return c, L, True
    top = power_iteration(hess.dot, obj.n, iters=500)
    shift = 1.01 * top
    bottom = shift - power_iteration(lambda v: shift * v - hess @ v, obj.n, iters=500)
    if not 0 < bottom < top:
        raise CertificationError(f"cannot certify: estimates c={bottom}, L={top}")
    return bottom, top, False


def laplacian_least_squares(g: Graph, sigma: float = 5.0, rhs_seed: int = 0,
                            b=None) -> LeastSquaresObjective:
    """``H = I + sigma * Lsym`` with ``b`` standard normal from the RHS stream."""
    lap = normalized_laplacian(g)
    H = (sp.identity(g.n, format="csr") + sigma * lap).tocsr()
    if b is None:
        b = make_rng(rhs_seed, RHS_STREAM).standard_normal(g.n)
    L = (1.0 + 2.0 * sigma) ** 2
    if not 1.0 < L:
        raise CertificationError(f"sigma={sigma} gives c = L = 1; need c < L")
    meta = ObjectiveMeta(m=1, c=1.0, L=L)
    return LeastSquaresObjective(g, H, b, meta, sigma=sigma)


def make_objective(kind: str, g: Graph, sigma: float = 5.0, mu: float = 10.0,
                   rhs_seed: int = 0):
    base = laplacian_least_squares(g, sigma, rhs_seed)
    if kind == "ls":
        return base
    if kind == "lasso":
        return LassoObjective(base, mu)
    raise ValueError(f"unknown objective kind {kind!r}")
