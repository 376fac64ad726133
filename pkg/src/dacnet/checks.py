"""Numerical checks of the decay estimates and convergence bounds.

Each function returns the list (or count) of violations so that both the
test-suite and ``dacnet verify`` can report them.
"""

from __future__ import annotations

import math

import numpy as np

from .dac import DacConfig, DacSolver, InnerConfig, delta_r, inexact_bound, smallest_radius
from .graph import Graph, GrowthConstants, estimate_growth, path_graph
from .objective import certify_constants, laplacian_least_squares
from .oracle import solve_least_squares
from .partition import build_partition


def random_banded_spd(n: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetric matrix with ``A[i, j] = 0`` for ``|i - j| > width`` and ``A > 0``.

    Entries within the band are uniform on ``[-1, 1]``; the diagonal is then
    shifted so the smallest eigenvalue is a random value in ``[0.05, 2]``.
    """
    S = rng.uniform(-1.0, 1.0, size=(n, n))
    S = (S + S.T) / 2
    i, j = np.indices((n, n))
    S[np.abs(i - j) > width] = 0.0
    lo = np.linalg.eigvalsh(S)[0]
    return S + (rng.uniform(0.05, 2.0) - lo) * np.eye(n)


def inverse_decay_violations(A: np.ndarray, dist: np.ndarray, width: int,
                             rtol: float = 1e-12) -> int:
    """Entries of ``A^{-1}`` above ``(1/c)(1 - c/L)^{rho/width}``.

    ``rtol`` only absorbs rounding in the dense inverse.
    """
    ev = np.linalg.eigvalsh(A)
    c, L = ev[0], ev[-1]
    G = np.linalg.inv(A)
    bound = (1.0 / c) * (1.0 - c / L) ** (dist / width)
    return int(np.count_nonzero(np.abs(G) > bound * (1 + rtol) + 1e-300))


def decay_sum_violations(g: Graph, consts: GrowthConstants, betas, radii) -> list:
    """Vertices where the exponential tail sum exceeds its polynomial-growth bound."""
    d = consts.integer_dimension
    bad = []
    for i in range(g.n):
        rho = g.distances_from(i).astype(float)
        for beta in betas:
            terms = np.exp(-beta * rho)
            for R in radii:
                lhs = terms[rho >= R].sum()
                rhs = consts.density * math.factorial(d) * beta ** (-d) * (R + 1) ** d \
                    * math.exp(-beta * (R - 1))
                if lhs > rhs:
                    bad.append((i, beta, R, lhs, rhs))
    return bad


def growth_violations(g: Graph, consts: GrowthConstants) -> int:
    from .graph import ball_size_table
    table = ball_size_table(g)
    radii = np.arange(table.shape[1], dtype=float)
    cap = consts.density * (radii + 1.0) ** consts.dimension
    return int(np.count_nonzero(table > cap * (1 + 1e-12)))


class PathInstance:
    """Least squares on a path where ``delta_R < 1`` is attainable.

    ``sigma = 0.05`` gives ``c / L = 1 / 1.21 > 0.75``; growth constants use
    ``d = 1``.
    """

    def __init__(self, n: int = 200, sigma: float = 0.05, rhs_seed: int = 7, r0: int = 1):
        self.graph = path_graph(n)
        self.consts = estimate_growth(self.graph, 1.0)
        self.obj = laplacian_least_squares(self.graph, sigma, rhs_seed)
        self.c, self.L, _ = certify_constants(self.obj)
        self.radius = smallest_radius(self.consts, self.c, self.L, self.obj.m)
        self.delta = delta_r(self.consts, self.c, self.L, self.obj.m, self.radius)
        self.part = build_partition(self.graph, r0, self.radius, self.obj.m)
        self.x_hat = solve_least_squares(self.obj)

    def iterates(self, steps: int = 20, eps=None, x0=None):
        """``x^0..x^steps`` of exact (``eps=None``) or inexact DAC."""
        inner = InnerConfig(method="cg") if eps is not None else InnerConfig()
        solver = DacSolver(self.obj, self.part, DacConfig(radius=self.radius, inner=inner))
        state = solver.initial_state(x0)
        xs = [state.x]
        for n in range(steps):
            state = solver.step(state, None if eps is None else eps[n])
            xs.append(state.x)
        return xs


def exact_rate_violations(inst: PathInstance, steps: int = 20, atol: float = 1e-12) -> list:
    xs = inst.iterates(steps)
    bad = []
    for p in (2, np.inf):
        e0 = np.linalg.norm(xs[0] - inst.x_hat, p)
        for n, x in enumerate(xs):
            e = np.linalg.norm(x - inst.x_hat, p)
            if e > inst.delta ** n * e0 + atol:
                bad.append((p, n, e, inst.delta ** n * e0))
    return bad


def inexact_rate_violations(inst: PathInstance, eps, steps: int = 20) -> list:
    xs = inst.iterates(steps, eps=eps)
    errs = np.array([np.max(np.abs(x - inst.x_hat)) for x in xs])
    bound = inexact_bound(inst.delta, inst.c, inst.L, errs[0], eps[:steps])
    return [(n, errs[n], bound[n]) for n in range(1, steps + 1) if errs[n] > bound[n]]
