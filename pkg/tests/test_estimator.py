import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from reviewagg import LpqAggregator


def _monotone_data(rng, n=40, d=2):
    X = rng.integers(1, 11, size=(n, d)).astype(float)
    w = np.array([0.6, 0.4])[:d]
    y = X @ w + rng.normal(0, 0.3, size=n)
    return X, y


def test_fit_predict_interpolates_training_points():
    X = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    y = np.array([2.0, 4.0, 6.0])
    est = LpqAggregator(p=1, q=1).fit(X, y)
    assert est.predict(X) == pytest.approx(y)
    assert est.report_.objective == pytest.approx(0.0, abs=1e-9)


def test_predictions_are_monotone(rng):
    X, y = _monotone_data(rng)
    est = LpqAggregator(p=2, q=2, max_iters=800).fit(X, y)
    for _ in range(50):
        a = rng.integers(1, 11, size=2).astype(float)
        b = a + rng.integers(0, 3, size=2).astype(float)
        assert est.predict([a])[0] <= est.predict([b])[0] + 1e-12


def test_reviewer_grouping_changes_the_objective(rng):
    X, y = _monotone_data(rng, n=20)
    reviewers = np.arange(20) % 4
    pooled = LpqAggregator(p=1, q=2, max_iters=800).fit(X, y)
    grouped = LpqAggregator(p=1, q=2, max_iters=800).fit(X, y, reviewers=reviewers)
    assert pooled.report_.objective != pytest.approx(grouped.report_.objective)


def test_sklearn_protocol():
    est = LpqAggregator(p=2, q=1, max_iters=500)
    params = est.get_params()
    assert params["p"] == 2 and params["q"] == 1
    cloned = clone(est)
    assert cloned.get_params() == params

    with pytest.raises(NotFittedError):
        est.predict([[1.0, 1.0]])


def test_upper_envelope_extension():
    X = np.array([[2.0, 2.0], [4.0, 4.0]])
    y = np.array([3.0, 5.0])
    lower = LpqAggregator(extension_rule="lower_envelope").fit(X, y)
    upper = LpqAggregator(extension_rule="upper_envelope").fit(X, y)
    # between the observed points the rules bracket the learned values
    assert lower.predict([[3.0, 3.0]])[0] == 3.0
    assert upper.predict([[3.0, 3.0]])[0] == 5.0


def test_input_validation(rng):
    X, y = _monotone_data(rng, n=10)
    est = LpqAggregator().fit(X, y)
    with pytest.raises(ValueError):
        est.predict([[1.0, 2.0, 3.0]])
    with pytest.raises(ValueError):
        LpqAggregator().fit(X, y, reviewers=np.arange(3))
    with pytest.raises(ValueError):
        LpqAggregator(p=0.5).fit(X, y)
