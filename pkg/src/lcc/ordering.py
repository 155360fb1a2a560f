"""Forward selection of the chain ordering.

At every step each remaining label is regressed on the features plus the
labels chosen so far; the label whose logistic model looks best specified
(smallest carrier deviance) is appended to the chain.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, LCCError
from .logistic import fit
from .speclink import CarrierFamily, spec_deviance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ordering:
    permutation: tuple
    step_scores: tuple
    flagged: tuple = ()  # steps whose winning score came from a failed or degenerate fit

    @property
    def step_deviances(self):
        return self.step_scores


def _is_constant(col):
    return bool(np.all(col == col[0]))


def _forward(X, Y, score_fn):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y)
    if Y.ndim != 2 or X.ndim != 2 or Y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"X is {X.shape}, Y is {Y.shape}")
    K = Y.shape[1]
    constant = [k for k in range(K) if _is_constant(Y[:, k])]
    remaining = [k for k in range(K) if k not in constant]

    perm, scores, flagged = [], [], []
    Z = X
    while remaining:
        vals, bad = [], []
        for k in remaining:
            try:
                v, degraded = score_fn(Z, Y[:, k].astype(float))
            except LCCError as exc:
                log.debug("label %d: base fit failed (%s); scored as 0", k, exc)
                v, degraded = 0.0, True
            vals.append(v)
            bad.append(degraded)
        i = int(np.argmin(vals))  # first minimum = lowest label index
        k = remaining.pop(i)
        perm.append(k)
        scores.append(float(vals[i]))
        if bad[i]:
            flagged.append(len(perm) - 1)
        Z = np.hstack([Z, Y[:, k:k + 1].astype(float)])
    for k in constant:
        perm.append(k)
        scores.append(0.0)
        flagged.append(len(perm) - 1)
    return Ordering(tuple(perm), tuple(scores), tuple(flagged))


def find_ordering(X, Y, family=CarrierFamily.PREGIBON, lam=0.0):
    """Greedy ordering by minimal specification deviance.

    Labels that are constant in ``Y`` are placed last (in index order) with
    deviance 0.  A candidate whose fit fails is scored 0 and flagged.
    """
    family = CarrierFamily.parse(family)

    def score(Z, y):
        res = spec_deviance(Z, y, lam, family)
        return res.deviance, res.degraded

    return _forward(X, Y, score)


def loglik_ordering(X, Y, lam=0.0):
    """Same forward loop, ranking candidates by minus the fitted log-likelihood."""

    def score(Z, y):
        f = fit(Z, y, lam)
        return -f.log_likelihood, not f.converged

    return _forward(X, Y, score)
