"""Centralized reference solvers used to score the distributed methods."""

import numpy as np
import scipy.sparse.linalg as spla

from .objective import LassoObjective, LeastSquaresObjective, power_iteration


def solve_least_squares(obj: LeastSquaresObjective, tol: float = 1e-14) -> np.ndarray:
    """Conjugate gradients on the normal equations ``H^T H x = H^T b``."""
    hess = obj.hessian()
    rhs = obj.HT @ obj.b
    x, info = spla.cg(hess, rhs, rtol=tol, atol=0.0, maxiter=100 * obj.n)
    if info != 0:
        raise RuntimeError(f"CG oracle did not converge (info={info})")
    return x


def solve_lasso(obj: LassoObjective, tol: float = 1e-12, max_iter: int = 1_000_000) -> np.ndarray:
    """Proximal gradient (ISTA) with step ``1/L``; stops on ``||dx||_inf <= tol``."""
    lip = 1.01 * power_iteration(obj.base.hessian().dot, obj.n, iters=300)
    step = 1.0 / lip
    x = np.zeros(obj.n)
    for _ in range(max_iter):
        x_new = obj.prox(x - step * obj.gradient(x), step)
        if np.max(np.abs(x_new - x)) <= tol:
            return x_new
        x = x_new
    raise RuntimeError("proximal-gradient oracle hit its iteration cap")


def solve(obj) -> np.ndarray:
    if isinstance(obj, LassoObjective):
        return solve_lasso(obj)
    return solve_least_squares(obj)
