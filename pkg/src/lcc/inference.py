"""Joint-mode search over the label tree of a fitted chain.

Each level of the tree is one chain link.  A partial labelling carries the
accumulated linear predictors of all links below it, so extending it by one
bit costs one vector addition; exhaustive, greedy and beam search all share
that arithmetic and therefore agree to the last bit on the scores they see.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_expit

from .chain import BRModel
from .errors import TooManyLabels

MAX_EXHAUSTIVE_LABELS = 25
_BLOCK_DEPTH = 18
ENGINES = ("exhaustive", "greedy", "beam")


@dataclass(frozen=True)
class Labelling:
    bits: tuple  # original label order
    probability: float


def _tree(model, x):
    """Root accumulator (feature logits) and the per-level label increments."""
    base = model.feature_logits(x)
    K = model.K
    inc = np.zeros((K, K))
    for j in range(1, K):
        inc[:j, j] = model.label_weights(j)
    return base, inc


def _expand(acc, logp, bits, inc, k):
    """All children of the level-``k`` frontier, 0-child block first."""
    eta = acc[:, k]
    acc = np.concatenate([acc, acc + inc[k]])
    logp = np.concatenate([logp + log_expit(-eta), logp + log_expit(eta)])
    m = bits.shape[0]
    col = np.concatenate([np.zeros(m, np.int8), np.ones(m, np.int8)])[:, None]
    bits = np.hstack([np.concatenate([bits, bits]), col])
    return acc, logp, bits


def _to_original(model, chain_bits):
    out = np.empty(model.K, dtype=np.int8)
    out[list(model.ordering)] = chain_bits
    return out


def _best(model, logp, bits):
    """Max-probability row; ties go to the lexicographically smallest original labelling."""
    top = logp.max()
    cands = [tuple(_to_original(model, bits[i])) for i in np.flatnonzero(logp == top)]
    return min(cands), float(top)


def _br_mode(model, x):
    m = model.marginals(x)
    bits = (m >= 0.5).astype(int)
    prob = np.prod(np.where(bits == 1, m, 1.0 - m))
    return Labelling(tuple(int(b) for b in bits), float(prob))


def exhaustive_mode(model, x, max_labels=MAX_EXHAUSTIVE_LABELS):
    """Exact argmax of the estimated joint over all 2^K labellings."""
    if isinstance(model, BRModel):
        return _br_mode(model, x)
    K = model.K
    if K > max_labels:
        raise TooManyLabels(f"{K} labels exceeds the exhaustive-search cap of {max_labels}")
    base, inc = _tree(model, x)
    acc, logp, bits = base[None, :], np.zeros(1), np.zeros((1, 0), np.int8)
    split = max(0, K - _BLOCK_DEPTH)
    for k in range(split):
        acc, logp, bits = _expand(acc, logp, bits, inc, k)

    best, best_lp = None, -np.inf
    for r in range(len(logp)):
        a, lp, b = acc[r:r + 1], logp[r:r + 1], bits[r:r + 1]
        for k in range(split, K):
            a, lp, b = _expand(a, lp, b, inc, k)
        cand, cand_lp = _best(model, lp, b)
        if cand_lp > best_lp or (cand_lp == best_lp and cand < best):
            best, best_lp = cand, cand_lp
    return Labelling(tuple(int(v) for v in best), float(np.exp(best_lp)))


def greedy_mode(model, x):
    """Follow the chain, setting each label to 1 when its conditional is at least 0.5."""
    if isinstance(model, BRModel):
        return _br_mode(model, x)
    base, inc = _tree(model, x)
    acc = base.copy()
    logp = 0.0
    chain_bits = np.zeros(model.K, dtype=np.int8)
    for k in range(model.K):
        eta = acc[k]
        if expit(eta) >= 0.5:
            chain_bits[k] = 1
            logp += log_expit(eta)
            acc = acc + inc[k]
        else:
            logp += log_expit(-eta)
    return Labelling(tuple(int(v) for v in _to_original(model, chain_bits)), float(np.exp(logp)))


def beam_mode(model, x, b=2):
    """Breadth-first beam search keeping the ``b`` best prefixes per level.

    Prefix ties prefer a 1 at the earliest differing position, which makes
    ``b=1`` coincide with :func:`greedy_mode`.  The final leaf is chosen as in
    :func:`exhaustive_mode`.
    """
    if b < 1:
        raise ValueError("beam width must be at least 1")
    if isinstance(model, BRModel):
        return _br_mode(model, x)
    base, inc = _tree(model, x)
    acc, logp, bits = base[None, :], np.zeros(1), np.zeros((1, 0), np.int8)
    for k in range(model.K):
        acc, logp, bits = _expand(acc, logp, bits, inc, k)
        if len(logp) > b:
            order = sorted(range(len(logp)), key=lambda i: (-logp[i], tuple(-bits[i])))[:b]
            acc, logp, bits = acc[order], logp[order], bits[order]
    best, best_lp = _best(model, logp, bits)
    return Labelling(tuple(int(v) for v in best), float(np.exp(best_lp)))


def infer(model, x, engine="exhaustive", beam_width=2, max_labels=MAX_EXHAUSTIVE_LABELS):
    if engine == "exhaustive":
        return exhaustive_mode(model, x, max_labels)
    if engine == "greedy":
        return greedy_mode(model, x)
    if engine == "beam":
        return beam_mode(model, x, beam_width)
    raise ValueError(f"unknown inference engine {engine!r}; choose from {ENGINES}")


def predict(model, X, engine="exhaustive", beam_width=2, max_labels=MAX_EXHAUSTIVE_LABELS):
    """Mode labelling for every row of ``X`` (n x K array, original label order)."""
    X = np.asarray(X, dtype=float)
    if engine == "exhaustive" and not isinstance(model, BRModel) and model.K > max_labels:
        raise TooManyLabels(f"{model.K} labels exceeds the exhaustive-search cap of {max_labels}")
    out = np.empty((X.shape[0], model.K), dtype=np.int8)
    for i, x in enumerate(X):
        out[i] = infer(model, x, engine, beam_width, max_labels).bits
    return out
