"""Link-specification deviance from carrier variables.

A base logistic fit gives fitted probabilities and linear predictors; a
carrier family turns those into one or two extra regressors, and the gain in
log-likelihood from refitting with them measures how badly the logit link is
specified for that response.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidProbability, LCCError, UnknownFamily
from .logistic import LogisticFit, clip_prob, fit

log = logging.getLogger(__name__)


class CarrierFamily(enum.Enum):
    PREGIBON = "pregibon"
    STUKEL = "stukel"
    PRENTICE = "prentice"
    GUERRERO_JOHNSON = "guerrero-johnson"
    MORGAN = "morgan"
    ARANDA = "aranda"

    @property
    def carrier_count(self):
        return 2 if self in (CarrierFamily.PREGIBON, CarrierFamily.STUKEL, CarrierFamily.PRENTICE) else 1

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-").replace(" ", "-")
        aliases = {"preigbon": "pregibon", "guerrerojohnson": "guerrero-johnson", "guerrero": "guerrero-johnson"}
        key = aliases.get(key, key)
        for fam in cls:
            if fam.value == key:
                return fam
        raise UnknownFamily(f"unknown carrier family {name!r}")


def carriers(family, mu, eta):
    """Carrier columns (n x 1 or n x 2) for the given family."""
    family = CarrierFamily.parse(family)
    mu = np.asarray(mu, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if mu.shape != eta.shape:
        raise InvalidProbability("fitted probabilities and linear predictors differ in length")
    mu = clip_prob(mu)
    if not np.all((mu > 0) & (mu < 1)):
        raise InvalidProbability("fitted probabilities must lie in (0, 1)")

    if family is CarrierFamily.PREGIBON:
        l0 = np.log(mu) ** 2
        l1 = np.log1p(-mu) ** 2
        cols = [0.5 * (l0 - l1), -0.5 * (l0 + l1)]
    elif family is CarrierFamily.STUKEL:
        sq = 0.5 * eta * eta
        cols = [np.where(eta >= 0, sq, 0.0), np.where(eta < 0, -sq, 0.0)]
    elif family is CarrierFamily.PRENTICE:
        cols = [-np.log(mu) / (1.0 - mu), -np.log1p(-mu) / mu]
    elif family is CarrierFamily.GUERRERO_JOHNSON:
        cols = [0.5 * eta * eta]
    elif family is CarrierFamily.MORGAN:
        cols = [eta ** 3]
    else:
        cols = [1.0 + np.log1p(-mu) / mu]
    return np.column_stack(cols)


@dataclass(frozen=True)
class SpecResult:
    deviance: float
    base_fit: LogisticFit
    extended_fit: LogisticFit | None
    raw_deviance: float = 0.0
    degraded: bool = False


def spec_deviance(Z, y, lam=0.0, family=CarrierFamily.PREGIBON, base_fit=None):
    """Twice the log-likelihood gain from adding the family's carriers to M(y, Z).

    Carrier coefficients are never penalized.  All-zero carrier columns (for
    instance Stukel's negative branch when every linear predictor is
    nonnegative) are dropped, since they cannot change the likelihood.  If the
    extended fit fails, the deviance is 0 and ``degraded`` is set.
    """
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    if base_fit is None:
        base_fit = fit(Z, y, lam)
    eta = base_fit.linear_predictor(Z)
    W = carriers(family, base_fit.fitted, eta)
    W = W[:, np.any(W != 0.0, axis=0)]
    if W.shape[1] == 0:
        return SpecResult(0.0, base_fit, None, 0.0, degraded=True)

    Ze = np.hstack([Z, W])
    mask = np.zeros(Ze.shape[1], dtype=bool)
    mask[1:Z.shape[1]] = True
    start = np.concatenate([base_fit.coefficients, np.zeros(W.shape[1])])
    try:
        ext = fit(Ze, y, lam, start=start, penalized=mask)
    except LCCError as exc:
        log.debug("extended fit failed: %s", exc)
        return SpecResult(0.0, base_fit, None, 0.0, degraded=True)

    raw = 2.0 * (ext.log_likelihood - base_fit.log_likelihood)
    return SpecResult(max(0.0, raw), base_fit, ext, raw, degraded=not ext.converged)
