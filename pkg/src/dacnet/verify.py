"""Property suite behind ``dacnet verify``."""

from __future__ import annotations

import time

import numpy as np

from . import checks
from .dac import DacConfig, DacSolver
from .graph import estimate_growth, path_graph, random_geometric_graph
from .objective import laplacian_least_squares
from .oracle import solve_least_squares
from .partition import (build_partition, check_disjoint_maximal, check_partition,
                        check_sandwich)
from .rng import TEST_STREAM, make_rng
from .simnet import setup_network


def _corrupt(part):
    """Move one vertex into a second governing set (test hook)."""
    c0, c1 = int(part.centers[0]), int(part.centers[-1])
    v = int(part.governing[c1][0])
    part.governing[c0] = np.union1d(part.governing[c0], [v])
    return part


def run_suite(seed: int = 1, quick: bool = False, corrupt_partition: bool = False):
    """Return a list of ``(name, passed, detail, seconds)``."""
    n = 128 if quick else 256
    gg = random_geometric_graph(n, seed)
    g = gg.graph
    part = build_partition(g, 1, 3, 1)
    if corrupt_partition:
        part = _corrupt(part)
    obj = laplacian_least_squares(g, 5.0, rhs_seed=seed)
    results = []

    def record(name, fn):
        t0 = time.perf_counter()
        try:
            problems = fn()
            ok, detail = not problems, f"{len(problems)} violation(s)" if problems else "ok"
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail, time.perf_counter() - t0))

    record("partition invariants", lambda: check_partition(part))
    record("maximal R0-disjoint centers",
           lambda: [p for r0 in (1, 2, 3)
                    for p in check_disjoint_maximal(g, build_partition(g, r0, 3, 1).centers, r0)])
    record("governing-set size sandwich",
           lambda: [p for r0 in (1, 2) for p in check_sandwich(build_partition(g, r0, 3, 1))])

    consts = estimate_growth(g, 2.0)
    record("polynomial growth bound", lambda: [1] * checks.growth_violations(g, consts))

    def inverse_decay():
        rng = make_rng(seed, TEST_STREAM)
        bad = []
        for k in range(10 if quick else 30):
            size = int(rng.integers(20, 120 if quick else 200))
            width = int(rng.integers(1, 4))
            A = checks.random_banded_spd(size, width, rng)
            dist = path_graph(size).distances
            if checks.inverse_decay_violations(A, dist, width):
                bad.append(k)
        return bad
    record("inverse off-diagonal decay", inverse_decay)
    record("exponential tail sums",
           lambda: checks.decay_sum_violations(g, consts, (0.1, 0.5, 1.0), range(1, 7)))

    inst = checks.PathInstance(n=100 if quick else 200)
    record("exact DAC contraction bound", lambda: checks.exact_rate_violations(inst))
    eps = [1e-4 * 2.0 ** -k for k in range(20)]
    record("inexact DAC error bound", lambda: checks.inexact_rate_violations(inst, eps))

    def fixed_point():
        x_hat = solve_least_squares(obj)
        solver = DacSolver(obj, part, DacConfig())
        state = solver.step(solver.initial_state(x_hat))
        err = np.max(np.abs(state.x - x_hat))
        return [] if err <= 1e-12 * max(1.0, np.max(np.abs(x_hat))) else [err]
    record("solution is a DAC fixed point", fixed_point)

    def simnet_equivalence():
        rounds = 5 if quick else 10
        solver = DacSolver(obj, part, DacConfig())
        state = solver.initial_state()
        ref = []
        for _ in range(rounds):
            state = solver.step(state)
            ref.append(state.x)
        bad = []
        for workers in (1, 2):
            _, hist = setup_network(obj, part, workers=workers).run(rounds - 1, history=True)
            bad += [(workers, k) for k, (a, b) in enumerate(zip(ref, hist))
                    if not np.array_equal(a, b)]
        return bad
    record("message-passing run matches reference loop", simnet_equivalence)
    return results


def format_report(results) -> str:
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}: {detail} ({sec:.2f}s)"
             for name, ok, detail, sec in results]
    passed = sum(ok for _, ok, _, _ in results)
    lines.append(f"{passed}/{len(results)} properties passed")
    return "\n".join(lines)
