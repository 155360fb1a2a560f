"""Ridge-penalized logistic regression fitted by Newton's method."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DimensionMismatch
from .linalg import newton_maximize, sym_eigenvalues

PROB_CLIP = 1e-12
SCORE_TOL = 1e-8
MAX_ITER = 100


def sigmoid(eta):
    return expit(eta)


def clip_prob(mu):
    return np.clip(mu, PROB_CLIP, 1.0 - PROB_CLIP)


def _check(Z, y=None, theta=None):
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise DimensionMismatch(f"design matrix must be 2-D, got shape {Z.shape}")
    if y is not None:
        y = np.asarray(y, dtype=float)
        if y.shape != (Z.shape[0],):
            raise DimensionMismatch(f"response has shape {y.shape}, design has {Z.shape[0]} rows")
    if theta is not None:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (Z.shape[1],):
            raise DimensionMismatch(f"coefficients have shape {theta.shape}, design has {Z.shape[1]} columns")
    return Z, y, theta


def log_likelihood(Z, y, theta):
    """Bernoulli log-likelihood with fitted probabilities clipped to [1e-12, 1-1e-12]."""
    Z, y, theta = _check(Z, y, theta)
    mu = clip_prob(sigmoid(Z @ theta))
    return float(np.sum(y * np.log(mu) + (1.0 - y) * np.log1p(-mu)))


def score(Z, y, theta):
    Z, y, theta = _check(Z, y, theta)
    return Z.T @ (y - sigmoid(Z @ theta))


def neg_hessian(Z, theta):
    Z, _, theta = _check(Z, theta=theta)
    mu = sigmoid(Z @ theta)
    H = Z.T @ (Z * (mu * (1.0 - mu))[:, None])
    return 0.5 * (H + H.T)


@dataclass(frozen=True)
class LogisticFit:
    """A fitted model M(y, z).

    ``log_likelihood`` is the unpenalized value at ``coefficients``.
    """

    coefficients: np.ndarray
    fitted: np.ndarray
    log_likelihood: float
    penalty: float
    converged: bool
    iterations: int = 0

    def linear_predictor(self, Z):
        return np.asarray(Z, dtype=float) @ self.coefficients

    def predict_proba(self, Z):
        return clip_prob(sigmoid(self.linear_predictor(Z)))


def fit(Z, y, lam=0.0, *, start=None, penalized=None, tol=SCORE_TOL, max_iter=MAX_ITER):
    """Maximize ``l(theta) - lam/2 * ||theta[penalized]||^2``.

    By default every coefficient except the intercept (column 0) is
    penalized.  ``penalized`` overrides this with a boolean mask.  Raises
    :class:`~lcc.errors.SingularHessian` when the Newton system cannot be
    factored; non-convergence is reported through ``converged``.
    """
    Z, y, _ = _check(Z, y)
    n, q = Z.shape
    if n < 1:
        raise DimensionMismatch("need at least one row")
    if lam < 0:
        raise ValueError("penalty must be nonnegative")
    if penalized is None:
        penalized = np.ones(q, dtype=bool)
        penalized[0] = False
    ridge = lam * np.asarray(penalized, dtype=float)
    if ridge.shape != (q,):
        raise DimensionMismatch("penalty mask length differs from column count")
    theta0 = np.zeros(q) if start is None else np.asarray(start, dtype=float)

    def value(t):
        return log_likelihood(Z, y, t) - 0.5 * np.sum(ridge * t * t)

    def gradient(t):
        return Z.T @ (y - sigmoid(Z @ t)) - ridge * t

    def hessian(t):
        return neg_hessian(Z, t) + np.diag(ridge)

    res = newton_maximize(value, gradient, hessian, theta0, tol=tol, max_iter=max_iter)
    theta = res.argmax
    return LogisticFit(
        coefficients=theta,
        fitted=clip_prob(sigmoid(Z @ theta)),
        log_likelihood=log_likelihood(Z, y, theta),
        penalty=float(lam),
        converged=res.converged,
        iterations=res.iterations,
    )


def min_eigen_ratio(fit_, Z):
    """Smallest eigenvalue of the per-row negative Hessian at the fitted coefficients."""
    Z = np.asarray(Z, dtype=float)
    H = neg_hessian(Z, fit_.coefficients) / Z.shape[0]
    return float(sym_eigenvalues(H).eigenvalues[0])
