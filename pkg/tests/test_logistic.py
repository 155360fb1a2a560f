import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcc import logistic
from lcc.errors import DimensionMismatch, SingularHessian
from lcc.linalg import sym_eigenvalues


def random_problem(seed, n=60, q=3):
    rng = np.random.default_rng(seed)
    Z = np.column_stack([np.ones(n), rng.uniform(-2, 2, (n, q - 1))])
    theta = rng.normal(0, 1, q)
    y = (rng.random(n) < logistic.sigmoid(Z @ theta)).astype(float)
    return Z, y, rng.normal(0, 0.5, q)


def fd_gradient(f, t, h=1e-6):
    g = np.empty_like(t)
    for j in range(len(t)):
        e = np.zeros_like(t)
        e[j] = h
        g[j] = (f(t + e) - f(t - e)) / (2 * h)
    return g


def test_loglik_at_zero():
    Z = np.ones((7, 2))
    y = np.array([1, 0, 1, 1, 0, 0, 1.0])
    assert logistic.log_likelihood(Z, y, np.zeros(2)) == pytest.approx(7 * np.log(0.5), abs=1e-12)


def test_loglik_single_row():
    assert logistic.log_likelihood([[1.0]], [1.0], [2.0]) == pytest.approx(-0.126928, abs=1e-6)


def test_score_symmetric_residuals():
    np.testing.assert_allclose(logistic.score([[1.0], [1.0]], [1.0, 0.0], [0.0]), [0.0], atol=1e-15)


def test_neg_hessian_example():
    np.testing.assert_allclose(logistic.neg_hessian([[1.0], [1.0]], [0.0]), [[0.5]], atol=1e-15)


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        logistic.log_likelihood(np.ones((3, 2)), np.ones(2), np.zeros(2))
    with pytest.raises(DimensionMismatch):
        logistic.score(np.ones((3, 2)), np.ones(3), np.zeros(3))
    with pytest.raises(DimensionMismatch):
        logistic.fit(np.ones((3, 2)), np.ones(4))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_score_and_hessian_match_finite_differences(seed):
    Z, y, t = random_problem(seed)
    g = fd_gradient(lambda v: logistic.log_likelihood(Z, y, v), t)
    np.testing.assert_allclose(logistic.score(Z, y, t), g, atol=1e-6 * (1 + np.abs(g).max()))
    H = np.array([-fd_gradient(lambda v: logistic.score(Z, y, v)[i], t) for i in range(len(t))])
    np.testing.assert_allclose(logistic.neg_hessian(Z, t), H, atol=1e-5)


def test_loglik_agrees_with_integrated_score():
    Z, y, t = random_problem(3)
    # trapezoid integration of score . t along s -> s t
    s = np.linspace(0, 1, 2001)
    vals = np.array([logistic.score(Z, y, si * t) @ t for si in s])
    integral = np.sum((vals[1:] + vals[:-1]) / 2 * np.diff(s))
    delta = logistic.log_likelihood(Z, y, t) - logistic.log_likelihood(Z, y, np.zeros_like(t))
    assert integral == pytest.approx(delta, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_hessian_psd(seed):
    Z, _, t = random_problem(seed)
    assert sym_eigenvalues(logistic.neg_hessian(Z, t)).eigenvalues[0] >= -1e-10


def test_balanced_intercept_fit():
    f = logistic.fit(np.ones((4, 1)), np.array([1, 0, 1, 0.0]))
    assert f.converged
    np.testing.assert_allclose(f.coefficients, [0.0], atol=1e-12)
    np.testing.assert_allclose(f.fitted, 0.5)
    assert f.log_likelihood == pytest.approx(4 * np.log(0.5), abs=1e-4)
    assert f.log_likelihood == pytest.approx(-2.7726, abs=1e-4)


def test_one_class_data_is_not_silently_fitted():
    try:
        f = logistic.fit(np.ones((5, 1)), np.ones(5))
    except SingularHessian:
        return
    assert not f.converged


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(40, 300))
def test_moment_identities_at_converged_fit(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-3, 3, (n, 2))
    Z = np.column_stack([np.ones(n), x])
    # deliberately misspecified response: the identities still hold
    y = (rng.random(n) < 0.2 + 0.6 * (np.sin(x[:, 0]) > 0)).astype(float)
    try:
        f = logistic.fit(Z, y)
    except SingularHessian:
        return
    if not f.converged:
        return
    assert np.abs(logistic.score(Z, y, f.coefficients)).max() <= 1e-6
    assert abs(f.fitted.mean() - y.mean()) <= 1e-6
    assert np.abs(Z.T @ (y - f.fitted)).max() <= 1e-6


def test_fit_is_a_maximum():
    Z, y, _ = random_problem(11, n=200)
    f = logistic.fit(Z, y)
    rng = np.random.default_rng(0)
    for _ in range(50):
        t = f.coefficients + rng.normal(0, 0.3, len(f.coefficients))
        assert logistic.log_likelihood(Z, y, t) <= f.log_likelihood + 1e-12


def test_ridge_shrinks_slopes_only():
    Z, y, _ = random_problem(5, n=150)
    free = logistic.fit(Z, y, 0.0)
    ridge = logistic.fit(Z, y, 10.0)
    assert np.linalg.norm(ridge.coefficients[1:]) < np.linalg.norm(free.coefficients[1:])
    # intercept unpenalized keeps the mean-matching identity
    assert abs(ridge.fitted.mean() - y.mean()) <= 1e-6


def test_fit_invariants():
    Z, y, _ = random_problem(8)
    f = logistic.fit(Z, y, 0.001)
    assert np.all((f.fitted > 0) & (f.fitted < 1))
    assert f.log_likelihood <= 0
    assert f.coefficients.shape == (Z.shape[1],)
    assert f.penalty == 0.001


def test_large_sample_recovers_parameters():
    rng = np.random.default_rng(20240101)
    n = 50000
    x = rng.uniform(-4, 4, n)
    Z = np.column_stack([np.ones(n), x])
    y = (rng.random(n) < logistic.sigmoid(1 + 2 * x)).astype(float)
    f = logistic.fit(Z, y)
    assert f.converged
    np.testing.assert_allclose(f.coefficients, [1, 2], atol=0.05)


def test_min_eigen_ratio_intercept_only():
    for n in (2, 10, 101):
        f = logistic.LogisticFit(np.zeros(1), np.full(n, 0.5), 0.0, 0.0, True)
        assert logistic.min_eigen_ratio(f, np.ones((n, 1))) == pytest.approx(0.25, abs=1e-14)


def test_min_eigen_ratio_balanced_fit():
    Z = np.ones((6, 1))
    f = logistic.fit(Z, np.array([1, 0, 1, 0, 1, 0.0]))
    assert logistic.min_eigen_ratio(f, Z) == pytest.approx(0.25, abs=1e-12)


def test_min_eigen_ratio_duplicated_column():
    rng = np.random.default_rng(0)
    x = rng.normal(size=50)
    Z = np.column_stack([np.ones(50), x, x])
    f = logistic.LogisticFit(np.array([0.1, 0.3, 0.2]), np.empty(0), 0.0, 0.0, True)
    assert logistic.min_eigen_ratio(f, Z) <= 1e-10


def test_min_eigen_ratio_positive_and_stable():
    rng = np.random.default_rng(1)
    vals = []
    for n in (1000, 2000, 4000):
        x = rng.uniform(-4, 4, n)
        Z = np.column_stack([np.ones(n), x])
        y = (rng.random(n) < logistic.sigmoid(x)).astype(float)
        vals.append(logistic.min_eigen_ratio(logistic.fit(Z, y), Z))
    assert min(vals) > 0
    assert max(vals) / min(vals) < 1.5
