"""The divide-and-conquer iteration: local solves on extended neighborhoods
combined over the governing sets.

Each center ``c`` owns a :class:`LocalProblem` built from its
:class:`LocalSlice`: the objective rows ``i`` in ``D_{c,R,m}`` restricted to
the columns of ``D_{c,R,2m}``, which is everything the local minimization
needs. The same classes back the reference loop here and the fusion nodes
of :mod:`dacnet.simnet`.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import kernels
from .graph import GrowthConstants
from .objective import LassoObjective
from .partition import Partition
from .trace import ConvergenceTrace

#: Local blocks up to this size are solved by Cholesky, larger ones by CG.
CHOLESKY_LIMIT = 512


class LocalSolveError(RuntimeError):
    def __init__(self, msg, residual=math.nan):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class InnerConfig:
    method: str = "auto"  # auto | cholesky | cg | cd
    tol: float = 1e-12
    max_iter: int = 100_000


@dataclass(frozen=True)
class DacConfig:
    r0: int = 1
    radius: int = 3
    max_iter: int = 100
    stop_tol: float = 1e-14
    inner: InnerConfig = field(default_factory=InnerConfig)
    eps_schedule: object = None  # sequence or callable n -> eps_n; None means exact
    workers: int = 1
    target_err: float | None = None
    debug: bool = False

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("R must be >= 1")
        if not self.stop_tol > 0:
            raise ValueError("stop_tol must be positive")

    def eps(self, n: int) -> float:
        s = self.eps_schedule
        e = float(s(n) if callable(s) else s[n])
        if e < 0:
            raise ValueError("accuracy schedule must be non-negative")
        return e


@dataclass(frozen=True, eq=False)
class LocalSlice:
    """Everything center ``center`` stores about the objective.

    ``rows`` holds ``H[i, j]`` for ``i`` in ``terms`` and ``j`` in ``halo``
    (dense, ``|terms| x |halo|``); ``rhs`` is ``b`` on ``terms``.
    """

    center: int
    governing: np.ndarray
    extended: np.ndarray
    terms: np.ndarray
    halo: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    mu: float = 0.0

    @property
    def boundary(self) -> np.ndarray:
        return np.setdiff1d(self.halo, self.extended, assume_unique=True)


def local_slice(obj, part: Partition, c: int) -> LocalSlice:
    c = int(c)
    terms, halo = part.terms(c), part.halo(c)
    rows = obj.H[terms][:, halo].toarray()
    mu = obj.mu if isinstance(obj, LassoObjective) else 0.0
    return LocalSlice(c, part.governing[c], part.extended[c], terms, halo, rows,
                      obj.b[terms].copy(), mu)


class LocalProblem:
    """``min_u sum_{i in terms} f_i(chi* u + I_boundary y)`` for one center."""

    def __init__(self, sl: LocalSlice, inner: InnerConfig = InnerConfig()):
        self.slice = sl
        self.inner = inner
        ext_pos = np.searchsorted(sl.halo, sl.extended)
        bnd = sl.boundary
        bnd_pos = np.searchsorted(sl.halo, bnd)
        self.A = np.ascontiguousarray(sl.rows[:, ext_pos])
        self.C = np.ascontiguousarray(sl.rows[:, bnd_pos])
        self.bT = sl.rhs
        self.gram = self.A.T @ self.A
        self.core_pos = np.searchsorted(sl.extended, sl.governing)
        self.mu = sl.mu
        method = inner.method
        if method == "auto":
            if self.mu > 0:
                method = "cd"
            else:
                method = "cholesky" if len(sl.extended) <= CHOLESKY_LIMIT else "cg"
        self.method = method
        self._factor = None
        if method == "cholesky":
            try:
                self._factor = sla.cho_factor(self.gram, lower=True)
            except np.linalg.LinAlgError as exc:  # cannot happen when c > 0
                raise AssertionError(f"local normal matrix of center {sl.center} "
                                     "is not positive definite") from exc

    @property
    def size(self) -> int:
        return len(self.slice.extended)

    def linear_term(self, y_boundary) -> np.ndarray:
        return self.A.T @ (self.bT - self.C @ y_boundary)

    def certificate(self, u, q) -> float:
        """Sup-norm of the restricted gradient (min-norm subgradient for LASSO)."""
        g = self.gram @ u - q
        if self.mu == 0:
            return float(np.max(np.abs(g))) if g.size else 0.0
        sub = np.where(u > 0, g + self.mu, np.where(u < 0, g - self.mu,
                       np.sign(g) * np.maximum(np.abs(g) - self.mu, 0.0)))
        return float(np.max(np.abs(sub))) if sub.size else 0.0

    def solve(self, y_boundary, warm=None, eps: float | None = None):
        """Return ``(w, certificate)``; ``eps`` switches to inexact mode."""
        q = self.linear_term(y_boundary)
        n = self.size
        start = np.zeros(n) if warm is None else np.array(warm, dtype=float)
        if self.method == "cd":
            return self._solve_cd(q, start, eps)
        if eps is None and self.method == "cholesky":
            w = sla.cho_solve(self._factor, q)
            return w, math.nan
        tol = self.inner.tol if eps is None else max(eps, self.inner.tol)
        return self._solve_cg(q, start, tol, sup_norm=eps is not None)

    def _solve_cg(self, q, u, tol, sup_norm):
        G = self.gram
        r = q - G @ u
        qn = np.linalg.norm(q)

        def done(res):
            if sup_norm:
                return float(np.max(np.abs(res))) <= tol
            return np.linalg.norm(res) <= tol * max(qn, 1e-300)

        if r.size == 0 or done(r):
            return u, float(np.max(np.abs(r))) if r.size else 0.0
        p = r.copy()
        rr = r @ r
        for _ in range(self.inner.max_iter):
            Gp = G @ p
            alpha = rr / (p @ Gp)
            u = u + alpha * p
            r = r - alpha * Gp
            if done(r):
                # recompute the certificate from scratch, not the recursion
                res = q - G @ u
                if done(res):
                    return u, float(np.max(np.abs(res)))
                r = res
            rr_new = r @ r
            p = r + (rr_new / rr) * p
            rr = rr_new
        res = q - G @ u
        raise LocalSolveError(f"inner CG of center {self.slice.center} did not reach "
                              f"{tol:.1e}", float(np.max(np.abs(res))))

    def _solve_cd(self, q, u, eps):
        inner = self.inner
        if eps is None:
            sweeps, change = kernels.lasso_cd(self.gram, q, u, self.mu, inner.tol, inner.max_iter)
            if change > inner.tol:
                raise LocalSolveError(f"coordinate descent of center {self.slice.center} "
                                      "did not converge", change)
            return u, math.nan
        target = max(eps, inner.tol)
        for _ in range(inner.max_iter):
            cert = self.certificate(u, q)
            if cert <= target:
                return u, cert
            kernels.lasso_cd(self.gram, q, u, self.mu, 0.0, 1)
        raise LocalSolveError(f"coordinate descent of center {self.slice.center} did "
                              f"not certify {target:.1e}", self.certificate(u, q))


@dataclass
class SolverState:
    x: np.ndarray
    locals: dict
    iter: int = 0
    certificate: float = math.nan


def build_local_problems(obj, part: Partition, inner: InnerConfig = InnerConfig()) -> dict:
    if obj.m != part.m:
        raise ValueError(f"partition built with m={part.m}, objective has m={obj.m}")
    return {int(c): LocalProblem(local_slice(obj, part, c), inner) for c in part.centers}


def local_subproblem(obj, part: Partition, c: int, x, inner: InnerConfig = InnerConfig(),
                     warm=None) -> np.ndarray:
    """Minimizer ``w_c`` over ``D_{c,R}`` given the outside values ``x``."""
    prob = LocalProblem(local_slice(obj, part, c), inner)
    w, _ = prob.solve(np.asarray(x)[prob.slice.boundary], warm)
    return w


class DacSolver:
    """Reference single-process DAC loop over cached local problems."""

    def __init__(self, obj, part: Partition, cfg: DacConfig = DacConfig()):
        self.obj = obj
        self.part = part
        self.cfg = cfg
        self.problems = build_local_problems(obj, part, cfg.inner)
        self.order = [int(c) for c in part.centers]
        self._pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None

    def initial_state(self, x0=None) -> SolverState:
        x = np.zeros(self.obj.n) if x0 is None else np.array(x0, dtype=float)
        warm = {c: x[p.slice.extended].copy() for c, p in self.problems.items()}
        return SolverState(x, warm, 0)

    def _solve_one(self, c, x, warm, eps):
        prob = self.problems[c]
        y = x[prob.slice.boundary]
        return prob.solve(y, warm[c], eps)

    def step(self, state: SolverState, eps: float | None = None) -> SolverState:
        x = state.x
        if self.cfg.debug:
            x = np.full_like(state.x, np.nan)
            for p in self.problems.values():
                b = p.slice.boundary
                x[b] = state.x[b]
        if self._pool is None:
            results = [self._solve_one(c, x, state.locals, eps) for c in self.order]
        else:
            results = list(self._pool.map(lambda c: self._solve_one(c, x, state.locals, eps),
                                          self.order))
        x_new = np.empty_like(state.x)
        writes = np.zeros(x_new.size, dtype=np.int64) if self.cfg.debug else None
        locals_ = {}
        cert = 0.0
        for c, (w, crt) in zip(self.order, results):
            prob = self.problems[c]
            x_new[prob.slice.governing] = w[prob.core_pos]
            locals_[c] = w
            if writes is not None:
                writes[prob.slice.governing] += 1
            if not math.isnan(crt):
                cert = max(cert, crt)
        if writes is not None:
            assert np.all(writes == 1), "a component was not written exactly once"
        return SolverState(x_new, locals_, state.iter + 1, cert if eps is not None else math.nan)

    def solve(self, x0=None, x_ref=None, inexact: bool = False):
        """Run to the stopping rule; returns ``(x, trace)``.

        In inexact mode ``trace.certificates[n]`` is the largest certifying
        restricted-gradient norm over centers at step ``n``.
        """
        cfg = self.cfg
        if inexact and cfg.eps_schedule is None:
            raise ValueError("inexact DAC needs an eps_schedule")
        state = self.initial_state(x0)
        trace = ConvergenceTrace(method="dac-inexact" if inexact else "dac")
        trace.certificates = []
        trace.record(0, 0.0, state.x, x_ref, self.obj.value(state.x))
        elapsed = 0.0
        for n in range(cfg.max_iter):
            eps = cfg.eps(n) if inexact else None
            t0 = time.perf_counter()
            new = self.step(state, eps)
            elapsed += time.perf_counter() - t0
            trace.certificates.append(new.certificate)
            trace.record(new.iter, elapsed, new.x, x_ref, self.obj.value(new.x))
            step = np.linalg.norm(new.x - state.x)
            base = np.linalg.norm(state.x)
            state = new
            if (base > 0 and step / base <= cfg.stop_tol) or (base == 0 and step == 0):
                break
            if cfg.target_err is not None and trace.rows[-1][2] <= cfg.target_err:
                break
        self.state = state
        return state.x, trace

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()


def dac_step(obj, part: Partition, state: SolverState, cfg: DacConfig = DacConfig()) -> SolverState:
    return DacSolver(obj, part, cfg).step(state)


def dac_solve(obj, part: Partition, cfg: DacConfig = DacConfig(), x0=None, x_ref=None):
    solver = DacSolver(obj, part, cfg)
    try:
        return solver.solve(x0, x_ref)
    finally:
        solver.close()


def inexact_dac_solve(obj, part: Partition, cfg: DacConfig, x0=None, x_ref=None):
    solver = DacSolver(obj, part, cfg)
    try:
        return solver.solve(x0, x_ref, inexact=True)
    finally:
        solver.close()


def delta_r(consts: GrowthConstants, c: float, L: float, m: int, radius: int) -> float:
    """Contraction factor certifying exponential convergence when ``< 1``."""
    if not 0 < c < L:
        raise ValueError(f"need 0 < c < L, got c={c}, L={L}")
    d = consts.integer_dimension
    q = 1.0 - c / L
    pre = (consts.density * math.factorial(d) * L * L * (2 * m) ** d
           / (c * (L - c) * abs(math.log(q)) ** d))
    return pre * (radius + 2) ** d * q ** (radius / (2 * m))


def smallest_radius(consts: GrowthConstants, c: float, L: float, m: int,
                    r_max: int = 10_000) -> int | None:
    """Smallest ``R >= 1`` with ``delta_r < 1``, or ``None`` up to ``r_max``."""
    for radius in range(1, r_max + 1):
        if delta_r(consts, c, L, m, radius) < 1:
            return radius
    return None


def inexact_bound(delta: float, c: float, L: float, err0: float, eps) -> np.ndarray:
    """Right-hand side of the inexact error estimate for ``n = 0..len(eps)``."""
    out = [err0]
    acc = 0.0
    for n in range(1, len(eps) + 1):
        acc = delta * (acc + eps[n - 1])
        out.append(delta ** n * err0 + (L - c) / L ** 2 * acc)
    return np.array(out)
