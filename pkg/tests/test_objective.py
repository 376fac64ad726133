import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from dacnet.checks import inverse_decay_violations, random_banded_spd
from dacnet.graph import path_graph
from dacnet.objective import (CertificationError, LassoObjective, LeastSquaresObjective,
                              ObjectiveMeta, certify_constants, laplacian_least_squares,
                              make_objective, soft_threshold)
from dacnet.oracle import solve_lasso, solve_least_squares


def identity_objective(n=5, b=None):
    g = path_graph(n)
    b = np.zeros(n) if b is None else b
    return LeastSquaresObjective(g, sp.identity(n), b, ObjectiveMeta(1, 1.0, 2.0))


def test_local_term_identity():
    obj = identity_objective()
    x = np.zeros(5)
    x[2] = 1.0
    assert obj.local_term(2, x) == 0.5
    assert all(obj.local_term(j, x) == 0 for j in (0, 1, 3, 4))
    lasso = LassoObjective(obj, 10.0)
    assert lasso.local_term(2, x) == 10.5


def test_local_terms_sum_to_value():
    obj = laplacian_least_squares(path_graph(16), 5.0, rhs_seed=3)
    H = obj.H.toarray()
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.standard_normal(16)
        ref = 0.5 * np.sum((H @ x - obj.b) ** 2)
        total = sum(obj.local_term(i, x) for i in range(16))
        assert abs(total - ref) <= 1e-12 * ref
        assert abs(obj.value(x) - ref) <= 1e-12 * ref
    lasso = LassoObjective(obj, 2.0)
    x = rng.standard_normal(16)
    assert sum(lasso.local_term(i, x) for i in range(16)) == pytest.approx(lasso.value(x), rel=1e-12)


def test_local_term_reads_only_ball(rgg64):
    g = rgg64.graph
    obj = laplacian_least_squares(g, 5.0)
    rng = np.random.default_rng(1)
    x = rng.standard_normal(g.n)
    for i in range(0, g.n, 7):
        far = np.flatnonzero(g.distances[i] > obj.m)
        y = x.copy()
        y[far] = rng.standard_normal(far.size) * 1e3
        assert obj.local_term(i, y) == obj.local_term(i, x)
    assert g.geodesic_width(obj.H) <= obj.m


def test_gradient_identity_and_optimum(ls256):
    obj = identity_objective()
    x = np.arange(5.0)
    assert np.array_equal(obj.gradient(x), x)
    obj, x_hat = ls256
    assert np.max(np.abs(obj.gradient(x_hat))) <= 1e-10


def test_gradient_finite_differences(rgg64):
    obj = laplacian_least_squares(rgg64.graph, 5.0, rhs_seed=2)
    rng = np.random.default_rng(2)
    h = 1e-5
    for _ in range(3):
        x = rng.standard_normal(obj.n)
        g = obj.gradient(x)
        fd = np.empty(obj.n)
        for j in range(obj.n):
            e = np.zeros(obj.n)
            e[j] = h
            fd[j] = (obj.value(x + e) - obj.value(x - e)) / (2 * h)
        assert np.max(np.abs(fd - g)) / np.max(np.abs(g)) <= 1e-6


def test_certify_constants():
    g = path_graph(30)
    assert certify_constants(laplacian_least_squares(g, 5.0))[:2] == (1.0, 121.0)
    c, L, ok = certify_constants(laplacian_least_squares(g, 0.1))
    assert (c, ok) == (1.0, True) and L == pytest.approx(1.44, rel=1e-15)
    with pytest.raises(CertificationError):
        laplacian_least_squares(g, 0.0)


def test_certify_uncertified_falls_back():
    g = path_graph(10)
    H = sp.diags(np.linspace(1.0, 3.0, 10))
    obj = LeastSquaresObjective(g, H, np.ones(10), ObjectiveMeta(1, 0.5, 10.0))
    c, L, ok = certify_constants(obj)
    assert not ok
    assert c == pytest.approx(1.0, rel=1e-3) and L == pytest.approx(9.0, rel=1e-3)


def test_meta_validation():
    with pytest.raises(CertificationError):
        ObjectiveMeta(1, 2.0, 2.0)
    with pytest.raises(ValueError):
        ObjectiveMeta(0, 1.0, 2.0)
    with pytest.raises(ValueError):
        LassoObjective(identity_objective(), -1.0)


def test_hessian_bounds_random_directions(rgg64):
    obj = laplacian_least_squares(rgg64.graph, 5.0)
    c, L, _ = certify_constants(obj)
    hess = obj.hessian()
    rng = np.random.default_rng(3)
    for _ in range(100):
        d = rng.standard_normal(obj.n)
        q = d @ (hess @ d)
        nd = d @ d
        assert c * nd * (1 - 1e-12) <= q <= L * nd * (1 + 1e-12)


def test_soft_threshold_examples():
    assert soft_threshold(3.0, 1.0) == 2.0
    assert soft_threshold(-0.5, 1.0) == 0.0
    with pytest.raises(ValueError):
        soft_threshold(1.0, -1.0)


@pytest.mark.parametrize("v,t", [(2.3, 0.7), (-1.1, 0.4), (0.2, 0.5), (-3.0, 0.0)])
def test_soft_threshold_grid_search(v, t):
    grid = np.linspace(-4, 4, 10_000)
    vals = 0.5 * (grid - v) ** 2 + t * np.abs(grid)
    best = grid[np.argmin(vals)]
    assert abs(soft_threshold(v, t) - best) <= grid[1] - grid[0]


@given(st.floats(-1e6, 1e6), st.floats(0, 1e6))
def test_soft_threshold_properties(v, t):
    s = soft_threshold(v, t)
    assert abs(s) <= abs(v)
    assert s == 0 or np.sign(s) == np.sign(v)
    assert abs(s) == max(abs(v) - t, 0.0)


def test_make_objective_kinds(rgg64):
    g = rgg64.graph
    assert isinstance(make_objective("ls", g), LeastSquaresObjective)
    lasso = make_objective("lasso", g, mu=3.0)
    assert isinstance(lasso, LassoObjective) and lasso.mu == 3.0
    assert not lasso.meta.smooth
    with pytest.raises(ValueError):
        make_objective("huber", g)


def test_rhs_is_seeded(rgg64):
    a = laplacian_least_squares(rgg64.graph, 5.0, rhs_seed=4).b
    b = laplacian_least_squares(rgg64.graph, 5.0, rhs_seed=4).b
    c = laplacian_least_squares(rgg64.graph, 5.0, rhs_seed=5).b
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_oracles(rgg64):
    obj = laplacian_least_squares(rgg64.graph, 5.0, rhs_seed=1)
    x = solve_least_squares(obj)
    direct = np.linalg.solve(obj.H.toarray(), obj.b)
    np.testing.assert_allclose(x, direct, atol=1e-12)
    lasso = LassoObjective(obj, 1.0)
    xl = solve_lasso(lasso)
    g = lasso.gradient(xl)
    nz = xl != 0
    np.testing.assert_allclose(g[nz], -np.sign(xl[nz]), atol=1e-9)
    assert np.all(np.abs(g[~nz]) <= 1 + 1e-9)


def test_lasso_large_mu_zero_solution(rgg64):
    obj = laplacian_least_squares(rgg64.graph, 5.0, rhs_seed=1)
    mu = np.max(np.abs(obj.HT @ obj.b)) * 1.01
    assert np.all(solve_lasso(LassoObjective(obj, mu)) == 0)


@pytest.mark.parametrize("width", [1, 2, 3])
def test_inverse_decay_small(width):
    rng = np.random.default_rng(width)
    g = path_graph(40)
    A = random_banded_spd(40, width, rng)
    assert g.geodesic_width(A) <= width
    assert inverse_decay_violations(A, g.distances.astype(float), width) == 0
