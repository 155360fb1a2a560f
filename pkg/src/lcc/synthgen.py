"""Synthetic logistic chain models M1-M12 and their sampler."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dataio import Dataset
from .errors import DimensionMismatch, UnknownModel
from .logistic import sigmoid

FEATURE_RANGE = (-4.0, 4.0)


def make_rng(seed, *keys):
    """PCG64 generator for the substream ``(seed, *keys)``.

    Substreams with different keys are statistically independent and do not
    depend on the order in which they are created.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class ChainSpec:
    """True chain parameters; link k uses ``p + k`` coefficients (0-based k)."""

    thetas: tuple
    name: str = ""

    def __post_init__(self):
        thetas = tuple(np.asarray(t, dtype=float) for t in self.thetas)
        if not thetas:
            raise DimensionMismatch("a chain needs at least one link")
        p = len(thetas[0])
        for k, t in enumerate(thetas):
            if t.shape != (p + k,):
                raise DimensionMismatch(f"link {k} has {t.shape[0]} coefficients, expected {p + k}")
            if not np.all(np.isfinite(t)):
                raise DimensionMismatch(f"link {k} has non-finite coefficients")
        object.__setattr__(self, "thetas", thetas)

    @property
    def p(self):
        return len(self.thetas[0])

    @property
    def K(self):
        return len(self.thetas)


_A = (1, -1, 1, -1, 1, -1, 1, -1, 1, -1)
_FOUR_LINK = lambda head, s: (  # noqa: E731
    head, head + (s,), head + (s, -s), head + (-s, s, -s))

_MODELS = {
    "M1": ((0, 1), (0, 1, 3)),
    "M2": ((0, 1), (0, 1, 5)),
    "M3": ((2, -2, 1), (2, -2, 1, 5), (2, -2, 1, 5, -5), (2, -2, 1, -5, 5, -5),
           (2, -2, 1, 5, -5, 5, -5), (2, -2, 1, 5, -5, 5, -5, 5)),
    "M4": ((2, -2, 1), (2, -2, 1, 5), (2, -2, 1, 5, -5), (2, -2, 1, -5, 5, -5),
           (2, -2, 1, 5, -5, 5, -5)),
    "M5": _FOUR_LINK(_A, 5),
    # fourth link's label part printed garbled in the source table; read as (-5, 5, -5)
    "M6": ((1, -3, 0.5), (1.5, -2.5, 1, 5), (2, -2, 1.5, 5, -5), (2.5, -1.5, 2, -5, 5, -5)),
    "M7": _FOUR_LINK((2, -2, 1), 5),
    "M8": _FOUR_LINK((2, -2, 1), 2),
    "M9": _FOUR_LINK((2, -2, 1), 10),
    "M10": _FOUR_LINK((5, -5, 2), 5),
    "M11": (_A, _A + (-8,), _A + (1, 3), _A + (0.5, 5, 10)),
    # links 5..10 alternate (5, -5, ...); link 4 is (-5, 5, -5) as in M3/M4
    "M12": tuple(_A + ((-5, 5, -5) if k == 3 else tuple(5 if j % 2 == 0 else -5 for j in range(k)))
                 for k in range(10)),
}

MODEL_IDS = tuple(_MODELS)


def model_spec(model_id):
    key = str(model_id).upper()
    if key not in _MODELS:
        raise UnknownModel(f"unknown model {model_id!r}; choose from {', '.join(MODEL_IDS)}")
    return ChainSpec(_MODELS[key], name=key)


def sample(spec, n, seed=0, rng=None):
    """Draw ``n`` rows: features uniform on [-4, 4], labels along the order 1..K."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = make_rng(seed) if rng is None else rng
    lo, hi = FEATURE_RANGE
    F = rng.uniform(lo, hi, size=(n, spec.p - 1))
    X = np.hstack([np.ones((n, 1)), F])
    Y = np.zeros((n, spec.K), dtype=np.int8)
    Z = X
    for k, theta in enumerate(spec.thetas):
        u = rng.random(n)
        Y[:, k] = u < sigmoid(Z @ theta)
        Z = np.hstack([Z, Y[:, k:k + 1]])
    return Dataset(X, Y, name=spec.name)


def marginal_y2_example(x, a):
    """P(y2 = 1 | x) when y1 ~ sigma(x) and y2 | y1 ~ sigma(x + a*y1)."""
    s = sigmoid(x)
    return s + s * (sigmoid(x + a) - s)


def true_joint(spec, x):
    """All 2^K labellings (rows, in product order) with their exact probabilities at ``x``."""
    x = np.asarray(x, dtype=float)
    labs = np.array(list(itertools.product((0, 1), repeat=spec.K)), dtype=float)
    prob = np.ones(len(labs))
    for k, theta in enumerate(spec.thetas):
        eta = x @ theta[:spec.p] + labs[:, :k] @ theta[spec.p:]
        s = sigmoid(eta)
        prob *= np.where(labs[:, k] == 1, s, 1.0 - s)
    return labs.astype(np.int8), prob


def true_mode(spec, x):
    """Exact joint mode by brute force; ties go to the first labelling in product order."""
    labs, prob = true_joint(spec, x)
    return labs[int(np.argmax(prob))]
