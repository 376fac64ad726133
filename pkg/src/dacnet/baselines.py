"""Consensus baselines over the fusion-center network: DGD, Diffusion,
EXTRA, PG-EXTRA and NIDS with a Metropolis mixing matrix.

Every center keeps a full-length copy of ``x`` (one row of the stacked
matrix ``X``) and evaluates the gradient of its own block
``F_c(x) = 0.5 * ||H[D_c] x - b[D_c]||^2``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .objective import LassoObjective, power_iteration, soft_threshold
from .partition import Partition
from .trace import ConvergenceTrace

DIVERGENCE_LIMIT = 1e12


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    W: np.ndarray
    centers: np.ndarray
    adjacency: np.ndarray  # boolean, no self-loops


def center_graph(part: Partition, hops: int | None = None) -> np.ndarray:
    """Centers ``c, c'`` are linked when ``rho(c, c') <= hops``.

    ``hops`` defaults to ``2 * (R + R0)``.
    """
    if hops is None:
        hops = 2 * (part.radius + part.r0)
    lam = part.centers
    g = part.graph
    dist = np.array([g.distances_from(int(c))[lam] for c in lam])
    adj = dist <= hops
    np.fill_diagonal(adj, False)
    return adj


def metropolis_weights(adjacency, centers=None) -> MixingMatrix:
    """``w = 1 / (max(deg, deg') + 0.1)`` on edges, diagonal as the row residual."""
    adj = np.asarray(adjacency, dtype=bool)
    k = adj.shape[0]
    if adj.shape != (k, k) or np.any(adj != adj.T) or np.any(np.diag(adj)):
        raise ValueError("adjacency must be symmetric without self-loops")
    deg = adj.sum(axis=1)
    W = np.zeros((k, k))
    rows, cols = np.nonzero(adj)
    W[rows, cols] = 1.0 / (np.maximum(deg[rows], deg[cols]) + 0.1)
    for i in range(k):
        W[i, i] = 1.0 - W[i][adj[i]].sum()
    if centers is None:
        centers = np.arange(k)
    return MixingMatrix(W, np.asarray(centers), adj)


class StackedProblem:
    """Block gradients of the stacked copies.

    ``grad(X)[c] = H[D_c]^T (H[D_c] X[c] - b[D_c])``, evaluated for all rows
    at once through a row mask.
    """

    def __init__(self, obj, part: Partition, mixing: MixingMatrix | None = None):
        self.obj = obj
        self.part = part
        self.lasso = isinstance(obj, LassoObjective)
        self.mu = obj.mu if self.lasso else 0.0
        self.centers = part.centers
        k, n = len(part.centers), obj.n
        self.mask = np.zeros((k, n))
        for r, c in enumerate(part.centers):
            self.mask[r, part.governing[int(c)]] = 1.0
        self.mixing = mixing or metropolis_weights(center_graph(part), part.centers)
        self.block_norms_sq = np.array([self._block_norm_sq(int(c)) for c in part.centers])

    @property
    def W(self):
        return self.mixing.W

    @property
    def lmax(self) -> float:
        """``max_c ||H[D_c]||^2`` by 100 fixed-seed power iterations."""
        return float(self.block_norms_sq.max())

    def _block_norm_sq(self, c: int) -> float:
        Hd = self.obj.H[self.part.governing[c]]
        HdT = Hd.T.tocsr()
        return power_iteration(lambda v: HdT @ (Hd @ v), self.obj.n, iters=100)

    def grad(self, X) -> np.ndarray:
        H = self.obj.H
        resid = self.mask * ((H @ X.T).T - self.obj.b)
        return (self.obj.HT @ resid.T).T

    def prox(self, Z, step):
        """Row-wise prox of ``step * (mu / #centers) * ||.||_1``."""
        return soft_threshold(Z, step * self.mu / len(self.centers))


def _run(problem: StackedProblem, name, init, update, *, x_ref, max_iter, stop_tol, target_err):
    """Shared loop: ``init() -> state``, ``update(state) -> state``; ``state[0]`` is ``X``."""
    obj = problem.obj
    trace = ConvergenceTrace(method=name)
    state = init()
    xbar = state[0].mean(axis=0)
    trace.record(0, 0.0, xbar, x_ref, obj.value(xbar))
    elapsed = 0.0
    for n in range(1, max_iter + 1):
        t0 = time.perf_counter()
        state = update(state)
        elapsed += time.perf_counter() - t0
        new_bar = state[0].mean(axis=0)
        trace.record(n, elapsed, new_bar, x_ref, obj.value(new_bar))
        e2 = trace.rows[-1][2]
        spread = np.max(np.abs(state[0]))
        if not np.isfinite(spread) or spread > DIVERGENCE_LIMIT or (e2 == e2 and e2 > DIVERGENCE_LIMIT):
            raise DivergenceError(f"{name} diverged at iteration {n}")
        step = np.linalg.norm(new_bar - xbar)
        base = np.linalg.norm(xbar)
        xbar = new_bar
        if base > 0 and step / base <= stop_tol:
            break
        if target_err is not None and e2 <= target_err:
            break
    return state[0], trace


def _x0(problem, x0):
    k, n = len(problem.centers), problem.obj.n
    if x0 is None:
        return np.zeros((k, n))
    x0 = np.asarray(x0, dtype=float)
    return np.tile(x0, (k, 1)) if x0.ndim == 1 else x0.copy()


def _smooth_only(problem, name):
    if problem.lasso:
        raise ValueError(f"{name} needs a smooth objective")


def default_steps(problem: StackedProblem) -> dict:
    a_ls = 0.99 / problem.lmax
    a_nids = 1.99 / problem.lmax
    return {"dgd": a_ls, "diffusion": 2 * a_ls, "extra": a_ls,
            "nids": a_nids, "nids_beta": 2 / a_nids, "pg-extra": a_nids / 2}


def dgd_solve(problem: StackedProblem, alpha=None, x0=None, *, x_ref=None, max_iter=10_000,
              stop_tol=0.0, target_err=None):
    """``X <- W X - alpha grad(X)``."""
    _smooth_only(problem, "DGD")
    alpha = default_steps(problem)["dgd"] if alpha is None else alpha
    W = problem.W
    return _run(problem, "dgd", lambda: (_x0(problem, x0),),
                lambda s: (W @ s[0] - alpha * problem.grad(s[0]),),
                x_ref=x_ref, max_iter=max_iter, stop_tol=stop_tol, target_err=target_err)


def diffusion_solve(problem: StackedProblem, beta=None, x0=None, *, x_ref=None, max_iter=10_000,
                    stop_tol=0.0, target_err=None):
    """``X <- W (X - beta grad(X))``."""
    _smooth_only(problem, "Diffusion")
    beta = default_steps(problem)["diffusion"] if beta is None else beta
    W = problem.W
    return _run(problem, "diffusion", lambda: (_x0(problem, x0),),
                lambda s: (W @ (s[0] - beta * problem.grad(s[0])),),
                x_ref=x_ref, max_iter=max_iter, stop_tol=stop_tol, target_err=target_err)


def extra_solve(problem: StackedProblem, gamma=None, x0=None, *, x_ref=None, max_iter=10_000,
                stop_tol=0.0, target_err=None):
    """Two-term EXTRA recursion, bootstrapped by ``X1 = W X0 - gamma grad(X0)``."""
    _smooth_only(problem, "EXTRA")
    gamma = default_steps(problem)["extra"] if gamma is None else gamma
    W = problem.W
    k = W.shape[0]
    I_W = np.eye(k) + W
    W_half = I_W / 2

    def init():
        X0 = _x0(problem, x0)
        G0 = problem.grad(X0)
        return (X0, None, G0, None)

    def update(s):
        X, X_prev, G, G_prev = s
        if X_prev is None:
            X_new = W @ X - gamma * G
        else:
            X_new = I_W @ X - W_half @ X_prev - gamma * (G - G_prev)
        return (X_new, X, problem.grad(X_new), G)

    return _run(problem, "extra", init, update,
                x_ref=x_ref, max_iter=max_iter, stop_tol=stop_tol, target_err=target_err)


def pg_extra_solve(problem: StackedProblem, gamma=None, x0=None, *, x_ref=None, max_iter=10_000,
                   stop_tol=0.0, target_err=None):
    """PG-EXTRA with ``Z0 = W X0 - gamma grad(X0)`` and prox step ``gamma``."""
    gamma = default_steps(problem)["pg-extra"] if gamma is None else gamma
    W = problem.W
    W_half = (np.eye(W.shape[0]) + W) / 2

    def init():
        X0 = _x0(problem, x0)
        G0 = problem.grad(X0)
        return (X0, W @ X0 - gamma * G0, G0)

    def update(s):
        X, Z, G = s
        X_new = problem.prox(Z, gamma)
        G_new = problem.grad(X_new)
        Z_new = Z - X_new + W_half @ (2 * X_new - X) + gamma * (G - G_new)
        return (X_new, Z_new, G_new)

    return _run(problem, "pg-extra", init, update,
                x_ref=x_ref, max_iter=max_iter, stop_tol=stop_tol, target_err=target_err)


def nids_solve(problem: StackedProblem, alpha=None, beta=None, x0=None, *, x_ref=None,
               max_iter=10_000, stop_tol=0.0, target_err=None):
    """NIDS with mixing ``I - (alpha * beta / 2)(I - W)`` and ``Z0 = X0 - alpha grad(X0)``."""
    steps = default_steps(problem)
    alpha = steps["nids"] if alpha is None else alpha
    beta = 2 / alpha if beta is None else beta
    W = problem.W
    k = W.shape[0]
    W_tilde = np.eye(k) - (alpha * beta / 2) * (np.eye(k) - W)

    def init():
        X0 = _x0(problem, x0)
        G0 = problem.grad(X0)
        return (X0, X0 - alpha * G0, G0)

    def update(s):
        X, Z, G = s
        X_new = problem.prox(Z, alpha)
        G_new = problem.grad(X_new)
        Z_new = Z - X_new + W_tilde @ (2 * X_new - X + alpha * (G - G_new))
        return (X_new, Z_new, G_new)

    return _run(problem, "nids", init, update,
                x_ref=x_ref, max_iter=max_iter, stop_tol=stop_tol, target_err=target_err)


SOLVERS = {
    "dgd": dgd_solve,
    "diffusion": diffusion_solve,
    "extra": extra_solve,
    "pg-extra": pg_extra_solve,
    "nids": nids_solve,
}
