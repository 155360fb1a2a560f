"""Logistic classifier chains and the binary-relevance baseline.

All public functions take and return labels in the ORIGINAL label index
space; the chain ordering is applied internally.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import log_expit

from . import logistic
from .errors import ChainFitError, DimensionMismatch, LCCError, ParseError
from .logistic import LogisticFit, min_eigen_ratio

DEFAULT_LAMBDA = 0.001
FORMAT_VERSION = 1


def _check_ordering(ordering, K):
    ordering = tuple(int(k) for k in ordering)
    if sorted(ordering) != list(range(K)):
        raise DimensionMismatch(f"{ordering} is not a permutation of 0..{K - 1}")
    return ordering


@dataclass(frozen=True, eq=False)
class ChainModel:
    """Fitted chain: link ``k`` regresses label ``ordering[k]`` on ``(x, y[ordering[:k]])``."""

    ordering: tuple
    coefficients: tuple  # one array per link, length p + k
    p: int
    lam: float = DEFAULT_LAMBDA
    fits: tuple = ()

    def __post_init__(self):
        coefs = tuple(np.asarray(c, dtype=float) for c in self.coefficients)
        object.__setattr__(self, "ordering", _check_ordering(self.ordering, len(coefs)))
        for k, c in enumerate(coefs):
            if c.shape != (self.p + k,):
                raise DimensionMismatch(f"link {k} has {c.shape[0]} coefficients, expected {self.p + k}")
        object.__setattr__(self, "coefficients", coefs)

    @property
    def K(self):
        return len(self.coefficients)

    @property
    def parameter_count(self):
        return sum(len(c) for c in self.coefficients)

    def feature_logits(self, x):
        """Feature part of every link's linear predictor at ``x`` (chain order)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.p,):
            raise DimensionMismatch(f"x has shape {x.shape}, expected ({self.p},)")
        return np.array([c[:self.p] @ x for c in self.coefficients])

    def label_weights(self, k):
        """Coefficients of link ``k`` on the labels earlier in the chain."""
        return self.coefficients[k][self.p:]


@dataclass(frozen=True, eq=False)
class BRModel:
    coefficients: tuple
    p: int
    lam: float = DEFAULT_LAMBDA
    fits: tuple = ()

    def __post_init__(self):
        coefs = tuple(np.asarray(c, dtype=float) for c in self.coefficients)
        for c in coefs:
            if c.shape != (self.p,):
                raise DimensionMismatch("every BR link uses the features only")
        object.__setattr__(self, "coefficients", coefs)

    @property
    def K(self):
        return len(self.coefficients)

    def marginals(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.p,):
            raise DimensionMismatch(f"x has shape {x.shape}, expected ({self.p},)")
        return logistic.sigmoid(np.array([c @ x for c in self.coefficients]))


def chain_design(X, Y, ordering, k):
    """Design matrix of link ``k``: features followed by the previous labels in chain order."""
    prev = list(ordering[:k])
    return np.hstack([X, Y[:, prev].astype(float)]) if prev else np.asarray(X, dtype=float)


def _fit_link(Z, y, lam, k, label):
    try:
        return logistic.fit(Z, y, lam)
    except LCCError as exc:
        raise ChainFitError(k, label, exc) from exc


def train_chain(X, Y, ordering=None, lam=DEFAULT_LAMBDA):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y)
    if Y.ndim != 2 or X.ndim != 2 or Y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"X is {X.shape}, Y is {Y.shape}")
    K = Y.shape[1]
    ordering = _check_ordering(range(K) if ordering is None else ordering, K)
    fits = []
    for k, label in enumerate(ordering):
        fits.append(_fit_link(chain_design(X, Y, ordering, k), Y[:, label], lam, k, label))
    return ChainModel(ordering, tuple(f.coefficients for f in fits), X.shape[1], lam, tuple(fits))


def train_br(X, Y, lam=DEFAULT_LAMBDA):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y)
    if Y.ndim != 2 or Y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"X is {X.shape}, Y is {Y.shape}")
    fits = tuple(_fit_link(X, Y[:, k], lam, k, k) for k in range(Y.shape[1]))
    return BRModel(tuple(f.coefficients for f in fits), X.shape[1], lam, fits)


def _check_labelling(y, K):
    y = np.asarray(y)
    if y.shape != (K,) or not np.all((y == 0) | (y == 1)):
        raise DimensionMismatch(f"labelling must be a 0/1 vector of length {K}")
    return y.astype(int)


def log_joint_probability(model, x, y):
    """log P(y | x) under the fitted chain (or BR product of marginals)."""
    if isinstance(model, BRModel):
        y = _check_labelling(y, model.K)
        x = np.asarray(x, dtype=float)
        if x.shape != (model.p,):
            raise DimensionMismatch(f"x has shape {x.shape}, expected ({model.p},)")
        eta = np.array([c @ x for c in model.coefficients])
        return float(np.sum(log_expit(np.where(y == 1, eta, -eta))))
    y = _check_labelling(y, model.K)
    base = model.feature_logits(x)
    chain_y = y[list(model.ordering)]
    total = 0.0
    for k in range(model.K):
        eta = base[k] + model.label_weights(k) @ chain_y[:k]
        total += log_expit(eta if chain_y[k] == 1 else -eta)
    return float(total)


def joint_probability(model, x, y):
    return float(np.exp(log_joint_probability(model, x, y)))


def conditional_probability(model, x, k, prefix):
    """P(y_{ordering[k]} = 1 | x, previous labels) for 0-based chain position ``k``.

    ``prefix`` holds the values of labels ``ordering[0..k-1]`` in chain order.
    """
    prefix = np.asarray(prefix, dtype=float)
    if not 0 <= k < model.K or prefix.shape != (k,):
        raise DimensionMismatch(f"position {k} needs a prefix of length {k}")
    eta = model.feature_logits(x)[k] + model.label_weights(k) @ prefix
    return float(logistic.sigmoid(eta))


def all_labellings(K):
    return np.array(list(itertools.product((0, 1), repeat=K)), dtype=np.int8)


def chain_regularity_diagnostic(model, X, Y):
    """Minimum over links of the smallest eigenvalue of H_k / n."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y)
    values = []
    for k, coef in enumerate(model.coefficients):
        Z = chain_design(X, Y, model.ordering, k)
        stub = LogisticFit(coef, np.empty(0), 0.0, model.lam, True)
        values.append(min_eigen_ratio(stub, Z))
    return min(values)


# ---------------------------------------------------------------- serialization

def _fmt(v):
    return format(float(v), ".17g")


def dumps_model(model):
    """Plain-text form: header lines then one coefficient row per link."""
    kind = "br" if isinstance(model, BRModel) else "chain"
    order = range(model.K) if kind == "br" else model.ordering
    lines = [
        f"lcc-model {FORMAT_VERSION}",
        f"kind {kind}",
        f"p {model.p}",
        f"K {model.K}",
        "ordering " + " ".join(str(k) for k in order),
        f"lambda {_fmt(model.lam)}",
    ]
    lines += [" ".join(_fmt(v) for v in c) for c in model.coefficients]
    return "\n".join(lines) + "\n"


def loads_model(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        magic, version = lines[0].split()
        if magic != "lcc-model" or int(version) != FORMAT_VERSION:
            raise ParseError(f"unsupported model header {lines[0]!r}", 1)
        header = {}
        for i in range(1, 6):
            key, _, rest = lines[i].partition(" ")
            header[key] = rest.strip()
        kind = header["kind"]
        p, K = int(header["p"]), int(header["K"])
        ordering = tuple(int(t) for t in header["ordering"].split())
        lam = float(header["lambda"])
        rows = [np.array([float(t) for t in ln.split()]) for ln in lines[6:]]
    except (ValueError, KeyError, IndexError) as exc:
        raise ParseError(f"malformed model file: {exc}") from None
    if len(rows) != K:
        raise ParseError(f"expected {K} coefficient rows, found {len(rows)}")
    if kind == "br":
        return BRModel(tuple(rows), p, lam)
    if kind != "chain":
        raise ParseError(f"unknown model kind {kind!r}")
    return ChainModel(ordering, tuple(rows), p, lam)


def save_model(model, path):
    Path(path).write_text(dumps_model(model))


def load_model(path):
    return loads_model(Path(path).read_text())
