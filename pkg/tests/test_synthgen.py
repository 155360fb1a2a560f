import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcc.errors import UnknownModel
from lcc.logistic import sigmoid
from lcc.synthgen import ChainSpec, MODEL_IDS, make_rng, marginal_y2_example, model_spec, sample, true_joint, true_mode


def test_table_values():
    m1 = model_spec("M1")
    np.testing.assert_array_equal(m1.thetas[0], [0, 1])
    np.testing.assert_array_equal(m1.thetas[1], [0, 1, 3])
    np.testing.assert_array_equal(model_spec("M2").thetas[1], [0, 1, 5])
    np.testing.assert_array_equal(model_spec("M9").thetas[1], [2, -2, 1, 10])


@pytest.mark.parametrize("mid", MODEL_IDS)
def test_all_specs_valid(mid):
    spec = model_spec(mid)
    assert len(spec.thetas) == spec.K
    for k, t in enumerate(spec.thetas):
        assert t.shape == (spec.p + k,)
        assert np.all(np.isfinite(t))


def test_feature_dimensions():
    dims = {m: model_spec(m).p for m in MODEL_IDS}
    assert dims["M1"] == dims["M2"] == 2
    assert all(dims[f"M{i}"] == 3 for i in (3, 4, 6, 7, 8, 9, 10))
    assert dims["M5"] == dims["M11"] == dims["M12"] == 10
    assert model_spec("M12").K == 10


def test_unknown_model():
    with pytest.raises(UnknownModel):
        model_spec("M13")


def test_spec_rejects_bad_dimensions():
    with pytest.raises(Exception):
        ChainSpec((np.zeros(2), np.zeros(2)))


def test_zero_spec_marginals():
    n = 20000
    d = sample(ChainSpec((np.zeros(2), np.zeros(3), np.zeros(4))), n, seed=4)
    assert np.all(np.abs(d.Y.mean(axis=0) - 0.5) <= 4 * np.sqrt(0.25 / n))


def test_features_uniform_range():
    d = sample(model_spec("M3"), 5000, seed=0)
    assert np.all(d.X[:, 0] == 1)
    F = d.X[:, 1:]
    assert F.min() >= -4 and F.max() <= 4
    assert abs(F.mean()) < 0.15


def test_conditional_frequency_m1():
    d = sample(model_spec("M1"), 100000, seed=11)
    sel = (d.Y[:, 0] == 1) & (np.abs(d.X[:, 1]) < 0.1)
    freq = d.Y[sel, 1].mean()
    target = sigmoid(3.0)
    assert target == pytest.approx(0.952574, abs=1e-6)
    assert abs(freq - target) <= 4 * np.sqrt(target * (1 - target) / sel.sum()) + 0.01


def test_determinism():
    a = sample(model_spec("M5"), 300, seed=42)
    b = sample(model_spec("M5"), 300, seed=42)
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.Y, b.Y)
    c = sample(model_spec("M5"), 300, rng=make_rng(42, 300, 1))
    d = sample(model_spec("M5"), 300, rng=make_rng(42, 300, 1))
    np.testing.assert_array_equal(c.Y, d.Y)
    assert not np.array_equal(c.X, sample(model_spec("M5"), 300, rng=make_rng(42, 300, 2)).X)


def test_marginal_examples():
    assert marginal_y2_example(0.0, 0.0) == pytest.approx(0.5)
    assert marginal_y2_example(0.0, 3.0) == pytest.approx(0.72629, abs=1e-5)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(-6, 6), a=st.floats(-10, 10))
def test_marginal_matches_joint(x, a):
    spec = ChainSpec((np.array([0.0, 1.0]), np.array([0.0, 1.0, a])))
    labs, prob = true_joint(spec, np.array([1.0, x]))
    assert prob[labs[:, 1] == 1].sum() == pytest.approx(float(marginal_y2_example(x, a)), abs=1e-12)


def test_true_joint_normalized_and_mode():
    spec = model_spec("M5")
    x = np.concatenate([[1.0], np.linspace(-3, 3, 9)])
    labs, prob = true_joint(spec, x)
    assert prob.sum() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(true_mode(spec, x), labs[np.argmax(prob)])


def test_large_sample_trend_all_small_models():
    for mid in ("M1", "M2", "M8"):
        from lcc.chain import train_chain
        spec = model_spec(mid)
        errs = []
        for n in (1000, 20000):
            d = sample(spec, n, seed=5)
            m = train_chain(d.X, d.Y, lam=0.0)
            errs.append(max(np.abs(a - b).max() for a, b in zip(m.coefficients, spec.thetas)))
        assert errs[1] < errs[0]
