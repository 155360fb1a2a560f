"""Small dense linear algebra and a damped Newton maximizer.

Everything here works on numpy arrays of modest size (a few hundred rows at
most); nothing is blocked or sparse.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, NonFinite, NonSymmetric, NotPositiveDefinite, SingularHessian

SYMMETRY_TOL = 1e-10
PIVOT_TOL = 1e-12
STEP_TOL = 1e-6


def _check_symmetric(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix has non-finite entries")
    scale = 1.0 + np.max(np.abs(A), initial=0.0)
    if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise NonSymmetric("matrix is not symmetric")
    return A


def cholesky(A):
    """Lower-triangular ``L`` with ``L @ L.T == A``.

    Raises :class:`NotPositiveDefinite` as soon as a pivot drops to 1e-12 or
    below.
    """
    A = _check_symmetric(A)
    n = A.shape[0]
    L = np.zeros_like(A)
    for j in range(n):
        row = L[j, :j]
        d = A[j, j] - row @ row
        if not d > PIVOT_TOL:
            raise NotPositiveDefinite(f"pivot {j} is {d:.3g}")
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ row) / L[j, j]
    return L


def _forward(L, b):
    x = np.empty_like(b)
    for i in range(len(b)):
        x[i] = (b[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def _backward(L, b):
    # solves L.T x = b
    n = len(b)
    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


def cholesky_solve(A, b):
    """Solve ``A x = b`` for symmetric positive-definite ``A``."""
    b = np.asarray(b, dtype=float)
    A = np.asarray(A, dtype=float)
    if b.ndim != 1 or A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"A is {A.shape}, b is {b.shape}")
    L = cholesky(A)
    return _backward(L, _forward(L, b))


@dataclass(frozen=True)
class SymEigenResult:
    eigenvalues: np.ndarray  # ascending


def sym_eigenvalues(A, tol=1e-15, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    A = _check_symmetric(A).copy()
    n = A.shape[0]
    if n == 0:
        return SymEigenResult(np.empty(0))
    total = np.sqrt(np.sum(A * A))
    eps = np.finfo(float).eps
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(A, 1) ** 2) * 2.0)
        if off <= tol * max(total, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= eps * 1e-3 * (abs(A[p, p]) + abs(A[q, q])) or apq == 0.0:
                    A[p, q] = A[q, p] = 0.0
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
    return SymEigenResult(np.sort(np.diag(A)))


@dataclass(frozen=True)
class NewtonResult:
    argmax: np.ndarray
    value: float
    converged: bool
    iterations: int


def newton_maximize(
    value: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    neg_hessian: Callable[[np.ndarray], np.ndarray],
    start,
    tol: float = 1e-8,
    max_iter: int = 100,
    max_halvings: int = 30,
) -> NewtonResult:
    """Maximize a concave objective by Newton steps with step halving.

    Converged means the gradient max-norm is at most ``tol`` and the next
    Newton step is negligible.  ``iterations`` counts accepted Newton steps.
    The run stops unconverged when ``max_iter`` is reached or when
    ``max_halvings`` halvings fail to produce an ascent.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    theta = np.array(start, dtype=float)
    f = value(theta)
    if not np.isfinite(f):
        raise NonFinite("objective is not finite at the start point")

    iterations = 0
    converged = False
    while True:
        g = gradient(theta)
        small = np.max(np.abs(g), initial=0.0) <= tol
        if not small and iterations >= max_iter:
            break
        try:
            step = cholesky_solve(neg_hessian(theta), g)
        except NotPositiveDefinite as exc:
            raise SingularHessian(str(exc)) from exc
        # a small gradient with a large Newton step means the objective is
        # flattening out at infinity (e.g. separable logistic data)
        if small and np.max(np.abs(step), initial=0.0) <= STEP_TOL * (1.0 + np.max(np.abs(theta), initial=0.0)):
            converged = True
            break
        if iterations >= max_iter:
            break

        # slack absorbs rounding at the optimum
        slack = 1e-12 * (1.0 + abs(f))
        t = 1.0
        for _ in range(max_halvings + 1):
            cand = theta + t * step
            fc = value(cand)
            if np.isfinite(fc) and fc >= f - slack:
                break
            t *= 0.5
        else:
            break
        theta, f = cand, fc
        iterations += 1

    return NewtonResult(theta, float(f), converged, iterations)
