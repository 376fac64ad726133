"""Compare the compiled kernels against the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--n 256 1024]

Prints median seconds per call for each backend and the speed-up.
"""

import argparse
import statistics
import time

import numpy as np

from dacnet import kernels
from dacnet.dac import DacSolver, LocalProblem, local_slice
from dacnet.graph import random_geometric_graph
from dacnet.objective import LassoObjective, laplacian_least_squares
from dacnet.partition import build_partition


def median_time(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def cases(n):
    g = random_geometric_graph(n, 1).graph
    part = build_partition(g, 1, 3, 1)
    lasso = LassoObjective(laplacian_least_squares(g, 5.0, rhs_seed=1), 10.0)
    c = int(part.centers[len(part.centers) // 2])
    prob = LocalProblem(local_slice(lasso, part, c))
    q = prob.linear_term(np.zeros(len(prob.slice.boundary)))

    def bfs(impl):
        return lambda: impl.all_pairs_bfs(g.indptr, g.indices)

    def cd(impl):
        return lambda: impl.lasso_cd(prob.gram, q, np.zeros(len(q)), lasso.mu, 1e-12, 100_000)

    def dac_step(impl):
        def run():
            saved = kernels.lasso_cd
            kernels.lasso_cd = impl.lasso_cd
            try:
                solver = DacSolver(lasso, part)
                solver.step(solver.initial_state())
            finally:
                kernels.lasso_cd = saved
        return run

    yield f"all-pairs BFS (N={n})", bfs
    yield f"LASSO coordinate descent (|D_R|={len(q)})", cd
    yield f"one LASSO DAC step (N={n})", dac_step


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, nargs="+", default=[256, 1024])
    args = ap.parse_args()
    if kernels.compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e .` first")
    print(f"{'kernel':45s} {'cython s':>11s} {'python s':>11s} {'speed-up':>9s}")
    for n in args.n:
        for name, make in cases(n):
            tc = median_time(make(kernels.compiled), args.repeat)
            tp = median_time(make(kernels.pure), args.repeat)
            print(f"{name:45s} {tc:11.5f} {tp:11.5f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
