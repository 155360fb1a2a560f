import numpy as np
import pytest
from scipy.special import logit

from lcc.chain import ChainModel


def section5_model():
    """Two-label chain at x = (1,): P(y1=1)=0.6, P(y2=1|y1=1)=0.5, P(y2=1|y1=0)=0.9."""
    return ChainModel((0, 1), (np.array([logit(0.6)]), np.array([logit(0.9), -logit(0.9)])), p=1, lam=0.0)


def random_chain(rng, K, p=3, scale=2.0, shuffle=True):
    ordering = tuple(rng.permutation(K)) if shuffle else tuple(range(K))
    coefs = tuple(rng.normal(0, scale, p + k) for k in range(K))
    return ChainModel(ordering, coefs, p=p, lam=0.0)


def random_x(rng, p=3):
    return np.concatenate([[1.0], rng.uniform(-2, 2, p - 1)])


@pytest.fixture
def s5():
    return section5_model()


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
