import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import nnls as scipy_nnls

from psgdlab.errors import InvalidInput, NonConvergence
from psgdlab.nnls import cone_distance, cone_projection, least_distance, nnls


@pytest.mark.parametrize("m,k", [(3, 2), (5, 5), (4, 8), (10, 3), (2, 12)])
def test_matches_scipy(m, k):
    rng = np.random.default_rng(m * 100 + k)
    for _ in range(50):
        A = rng.standard_normal((m, k))
        b = rng.standard_normal(m)
        x, r = nnls(A, b)
        xs, rs = scipy_nnls(A, b)
        assert np.all(x >= 0)
        assert r == pytest.approx(rs, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kkt_conditions(seed):
    rng = np.random.default_rng(seed)
    m, k = rng.integers(1, 7, 2)
    A = rng.standard_normal((m, k))
    b = rng.standard_normal(m)
    x, _ = nnls(A, b)
    w = A.T @ (b - A @ x)
    assert np.all(x >= 0)
    assert np.all(w <= 1e-9)
    assert np.all(np.abs(w[x > 0]) <= 1e-9)


def test_no_columns():
    x, r = nnls(np.zeros((3, 0)), np.array([3.0, 4.0, 0.0]))
    assert x.size == 0 and r == 5.0


def test_rejects_bad_input():
    with pytest.raises(InvalidInput):
        nnls(np.ones((2, 2)), np.ones(3))
    with pytest.raises(InvalidInput):
        nnls(np.array([[np.nan]]), np.ones(1))


def test_iteration_cap():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((6, 6))
    with pytest.raises(NonConvergence):
        nnls(A, A @ np.ones(6), max_iter=1)


def test_cone_distance_orthant():
    G = np.eye(2)
    assert cone_distance(G, np.array([-1.0, 2.0])) == pytest.approx(1.0)
    assert cone_distance(np.zeros((0, 2)), np.array([3.0, 4.0])) == 5.0
    p = cone_projection(G, np.array([-1.0, 2.0]))
    assert np.allclose(p, [0.0, 2.0])


def test_least_distance_halfspace():
    # min ||w|| s.t. w0 >= 1  ->  w = e0
    w = least_distance(np.array([[1.0, 0.0]]), np.array([1.0]))
    assert np.allclose(w, [1.0, 0.0])


def test_least_distance_infeasible():
    G = np.array([[1.0], [-1.0]])
    h = np.array([1.0, 1.0])
    assert least_distance(G, h) is None
