import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from polyfloat.l1opt import lp_solve
from oracles import bfs_enumeration


def test_single_variable():
    res = lp_solve([1.0], [[1.0]], [1.0])
    assert res.status == "optimal"
    assert res.fun == pytest.approx(1.0)
    assert res.y == pytest.approx([1.0])


def test_random_5x8_matches_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.standard_normal((5, 8))
        b = A @ np.abs(rng.standard_normal(8))
        c = np.abs(rng.standard_normal(8)) + 0.1
        res = lp_solve(c, A, b)
        assert res.status == "optimal"
        assert res.fun == pytest.approx(bfs_enumeration(c, A, b), abs=1e-8)


def test_beale_cycling_example_terminates():
    # Beale's example cycles under Dantzig pricing with naive tie-breaking
    c = np.array([-0.75, 150, -0.02, 6, 0, 0, 0])
    A = np.array([[0.25, -60, -0.04, 9, 1, 0, 0],
                  [0.5, -90, -0.02, 3, 0, 1, 0],
                  [0, 0, 1, 0, 0, 0, 1]])
    b = np.array([0, 0, 1.0])
    for pricing in ("dantzig", "bland"):
        res = lp_solve(c, A, b, pricing=pricing)
        assert res.status == "optimal"
        assert res.fun == pytest.approx(-0.05)


def test_degenerate_tie_value_unique():
    # two optimal vertices; value is unique
    c = np.array([1.0, 1.0, 0.0])
    A = np.array([[1.0, 1.0, -1.0]])
    b = np.array([1.0])
    res = lp_solve(c, A, b)
    assert res.status == "optimal" and res.fun == pytest.approx(1.0)


def test_infeasible_and_unbounded():
    assert lp_solve([1.0, 1.0], [[1.0, 1.0]], [-1.0]).status == "infeasible"
    assert lp_solve([-1.0, 0.0], [[1.0, -1.0]], [0.0]).status == "unbounded"


def test_bounds_free_and_boxed():
    # min x0 - x1 with x0 free, -1 <= x1 <= 2, x0 + x1 = 1
    res = lp_solve([1.0, -1.0], [[1.0, 1.0]], [1.0], bounds=[(None, None), (-1, 2)])
    assert res.status == "optimal"
    assert res.x == pytest.approx([-1.0, 2.0])
    ref = linprog([1.0, -1.0], A_eq=[[1.0, 1.0]], b_eq=[1.0], bounds=[(None, None), (-1, 2)])
    assert res.fun == pytest.approx(ref.fun)


def test_redundant_rows_and_duals():
    A = np.array([[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 0.0, 3.0]])
    b = np.array([2.0, 4.0, 3.0])
    c = np.array([1.0, 1.0, 1.0])
    res = lp_solve(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b)
    assert res.status == "optimal"
    assert res.fun == pytest.approx(ref.fun, abs=1e-9)
    assert res.fun - res.y @ b == pytest.approx(0.0, abs=1e-8)
    assert np.all(c - A.T @ res.y >= -1e-9)


def test_nonfinite_data_rejected():
    with pytest.raises(ValueError):
        lp_solve([1.0], [[np.inf]], [1.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 5), st.integers(0, 2**31 - 1))
def test_strong_duality_and_slackness(m, extra, seed):
    rng = np.random.default_rng(seed)
    k = m + extra
    A = rng.standard_normal((m, k))
    b = A @ np.abs(rng.standard_normal(k)) if k else np.zeros(m)
    c = np.abs(rng.standard_normal(k)) + 0.01
    res = lp_solve(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b, method="highs")
    if ref.status == 2:
        assert res.status == "infeasible"
        return
    assert res.status == "optimal"
    assert res.fun == pytest.approx(ref.fun, abs=1e-8 * (1 + abs(ref.fun)))
    assert abs(res.fun - res.y @ b) <= 1e-8 * (1 + abs(res.fun))
    assert res.slackness <= 1e-9 * (1 + abs(res.fun))
    assert np.abs(A @ res.x - b).max() <= 1e-8 * (1 + np.abs(b).max())
    assert math.isfinite(res.fun)


def test_degenerate_basis_pursuit_stays_feasible():
    # noiseless sparse data makes almost every basic variable zero at the optimum;
    # this instance once drifted infeasible and hit the iteration cap
    from polyfloat.recovery import sparse_signal
    from polyfloat.samplers import DistributionSpec, sample_matrix
    from polyfloat.seeding import derive_seed

    N, n = 256, 64
    spec = DistributionSpec.student_t(2 * math.log(N), N)
    A = sample_matrix(spec, n, derive_seed(8, 55, "recovery/matrix"))
    x = sparse_signal(N, 4, derive_seed(8, 55, "recovery/signal").generator())
    M = np.hstack([A, -A])
    res = lp_solve(np.ones(2 * N), M, A @ x, max_iter=3000)
    ref = linprog(np.ones(2 * N), A_eq=M, b_eq=A @ x, method="highs")
    assert res.status == "optimal"
    assert res.fun == pytest.approx(ref.fun, rel=1e-9)
    assert np.linalg.norm(M @ res.x - A @ x) <= 1e-8 * np.linalg.norm(A @ x)


def test_heavy_tailed_columns_stay_feasible():
    # Cauchy entries give pivot columns spanning ~1e7; degenerate rows with small
    # entries must still bound the step
    from polyfloat.samplers import DistributionSpec, sample_matrix
    from polyfloat.seeding import derive_seed

    n, N = 16, 1024
    A = sample_matrix(DistributionSpec.stable(1.0, n), N, derive_seed(4, 1, "scaling/64.0")).T
    M = np.hstack([A, -A])
    for i in range(4):
        w = np.zeros(n)
        w[i] = 0.6
        res = lp_solve(np.ones(2 * N), M, w)
        ref = linprog(np.ones(2 * N), A_eq=M, b_eq=w, method="highs")
        assert res.status == "optimal"
        assert res.fun == pytest.approx(ref.fun, rel=1e-9)
        assert np.linalg.norm(M @ res.x - w) <= 1e-8 * np.linalg.norm(w)
