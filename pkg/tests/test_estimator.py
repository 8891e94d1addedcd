import numpy as np
import pytest
from sklearn.base import clone

from adaptivecrowd import AdaptiveCrowd
from adaptivecrowd._random import make_rng
from adaptivecrowd.estimator import check_signals
from adaptivecrowd.exceptions import ConfigurationError
from adaptivecrowd.learning import degroot_two_stage


def _data(seed=0, T=30, n=9):
    rng = make_rng(seed)
    y = rng.uniform(0.1, 0.9, T)
    bias = np.repeat([0.0, 0.1, 0.3], n // 3)
    X = np.clip(y[:, None] + bias + rng.normal(0, 0.05, (T, n)), 0, 1)
    return X, y


def test_params_roundtrip():
    est = AdaptiveCrowd(kappa=2, window=4, eta=0.1, random_state=3)
    assert est.get_params()["window"] == 4
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    est.set_params(kappa=1)
    assert est.kappa == 1


def test_fit_shapes_and_predict():
    X, y = _data()
    est = AdaptiveCrowd(random_state=0).fit(X, y)
    assert est.beliefs_.shape == X.shape
    assert est.n_rounds_ == len(X)
    np.testing.assert_allclose(est.influence_matrix().sum(axis=1), 1.0)
    np.testing.assert_allclose(est.predict(X), est.transform(X).mean(axis=1))


def test_transform_uses_learned_matrix():
    X, y = _data(1)
    est = AdaptiveCrowd(random_state=1).fit(X, y)
    M = est.influence_matrix()
    np.testing.assert_allclose(est.transform(X[:1])[0], degroot_two_stage(M, X[0]), atol=1e-15)


def test_fit_is_deterministic():
    X, y = _data(2)
    a = AdaptiveCrowd(random_state=5).fit(X, y)
    b = AdaptiveCrowd(random_state=5).fit(X, y)
    np.testing.assert_array_equal(a.graph_.shares, b.graph_.shares)
    np.testing.assert_array_equal(a.beliefs_, b.beliefs_)


def test_partial_fit_equals_fit():
    X, y = _data(3)
    whole = AdaptiveCrowd(random_state=4).fit(X, y)
    parts = AdaptiveCrowd(random_state=4)
    parts.partial_fit(X[:10], y[:10]).partial_fit(X[10:], y[10:])
    np.testing.assert_array_equal(whole.graph_.shares, parts.graph_.shares)


def test_static_keeps_initial_graph():
    X, y = _data(4)
    frozen = AdaptiveCrowd(rewire=False, random_state=6)
    frozen._start(X.shape[1])
    start = frozen.graph_.shares.copy()
    frozen.partial_fit(X, y)
    np.testing.assert_array_equal(frozen.graph_.shares, start)
    # same graph stream, so the dynamic run starts from the same network
    dyn = AdaptiveCrowd(random_state=6)._start(X.shape[1])
    np.testing.assert_array_equal(dyn.graph_.shares, start)


def test_validation():
    X, y = _data()
    with pytest.raises(ValueError):
        AdaptiveCrowd().fit(X, y[:-1])
    with pytest.raises(ValueError):
        check_signals(X + 2)
    with pytest.raises(ValueError):
        AdaptiveCrowd().fit(X[:, :1], y)
    with pytest.raises(ConfigurationError):
        AdaptiveCrowd(eta=-1).fit(X, y)
    est = AdaptiveCrowd(random_state=0).fit(X, y)
    with pytest.raises(ValueError):
        est.predict(X[:, :4])


def test_unfitted():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        AdaptiveCrowd().predict(np.full((2, 3), 0.5))


def test_random_state_mapping():
    X, y = _data()
    rs = {"graph": 1, "feedback": 2, "rewire": 3}
    a = AdaptiveCrowd(random_state=rs).fit(X, y)
    b = AdaptiveCrowd(random_state=dict(rs)).fit(X, y)
    np.testing.assert_array_equal(a.graph_.shares, b.graph_.shares)
    with pytest.raises(ConfigurationError):
        AdaptiveCrowd(random_state={"graph": 1}).fit(X, y)
