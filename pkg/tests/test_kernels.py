import numpy as np
import pytest

from dacnet import kernels
from dacnet.graph import grid_graph, random_geometric_graph

from conftest import floyd_warshall

needs_ext = pytest.mark.skipif(kernels.compiled is None, reason="extension not built")


def test_backend_reports_itself():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", [kernels.pure, pytest.param(kernels.compiled, marks=needs_ext)],
                         ids=["python", "cython"])
def test_bfs_matches_floyd_warshall(impl):
    g = random_geometric_graph(64, 11).graph
    fw = floyd_warshall(g.n, g.edges)
    assert np.array_equal(impl.all_pairs_bfs(g.indptr, g.indices), fw.astype(np.int32))
    assert np.array_equal(impl.bfs_from(g.indptr, g.indices, 5), fw[5].astype(np.int32))


@pytest.mark.parametrize("impl", [kernels.pure, pytest.param(kernels.compiled, marks=needs_ext)],
                         ids=["python", "cython"])
def test_multi_source_bfs_cutoff(impl):
    g = grid_graph(5, 5)
    src = np.array([0, 24], dtype=np.int32)
    d = impl.multi_source_bfs(g.indptr, g.indices, src, 2)
    full = np.minimum(g.distances[0], g.distances[24])
    expect = np.where(full <= 2, full, -1)
    assert np.array_equal(d, expect)


@needs_ext
def test_lasso_cd_backends_agree():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((40, 30))
    G = A.T @ A + np.eye(30)
    q = rng.standard_normal(30) * 5
    u1, u2 = np.zeros(30), np.zeros(30)
    s1, c1 = kernels.compiled.lasso_cd(G, q, u1, 2.0, 1e-13, 10_000)
    s2, c2 = kernels.pure.lasso_cd(G, q, u2, 2.0, 1e-13, 10_000)
    assert c1 <= 1e-13 and c2 <= 1e-13
    np.testing.assert_allclose(u1, u2, atol=1e-11)


@pytest.mark.parametrize("impl", [kernels.pure, pytest.param(kernels.compiled, marks=needs_ext)],
                         ids=["python", "cython"])
def test_lasso_cd_satisfies_kkt(impl):
    rng = np.random.default_rng(1)
    A = rng.standard_normal((25, 20))
    G = A.T @ A + 0.5 * np.eye(20)
    q = rng.standard_normal(20) * 3
    mu = 1.5
    u = np.zeros(20)
    impl.lasso_cd(G, q, u, mu, 1e-14, 100_000)
    g = G @ u - q
    nz = u != 0
    np.testing.assert_allclose(g[nz], -mu * np.sign(u[nz]), atol=1e-9)
    assert np.all(np.abs(g[~nz]) <= mu + 1e-9)


def test_env_forces_fallback():
    import os
    import subprocess
    import sys
    env = dict(os.environ, DACNET_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import dacnet.kernels as k; print(k.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("impl", [kernels.pure, pytest.param(kernels.compiled, marks=needs_ext)],
                         ids=["python", "cython"])
def test_dac_step_identical_across_backends(impl, ls256, part256, monkeypatch):
    from dacnet.dac import DacSolver
    obj, _ = ls256
    from dacnet.objective import LassoObjective
    lasso = LassoObjective(obj, 10.0)
    ref = DacSolver(lasso, part256).step(DacSolver(lasso, part256).initial_state()).x
    monkeypatch.setattr(kernels, "lasso_cd", impl.lasso_cd)
    got = DacSolver(lasso, part256).step(DacSolver(lasso, part256).initial_state()).x
    np.testing.assert_allclose(got, ref, atol=1e-11)


@needs_ext
def test_benchmark_script_runs():
    import subprocess
    import sys
    from pathlib import Path
    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    out = subprocess.run([sys.executable, str(script), "--repeat", "1", "--n", "64"],
                         capture_output=True, text=True, check=True)
    assert "all-pairs BFS" in out.stdout and "speed-up" in out.stdout
