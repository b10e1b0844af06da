import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from coordsketch import CoordinatedSketchEstimator
from coordsketch._validation import check_collection, check_k, check_seed

from .helpers import random_collection


def test_params_and_clone():
    est = CoordinatedSketchEstimator(k=8, family="PRI", seed=3)
    assert est.get_params()["k"] == 8
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    assert est.set_params(k=16).k == 16


def test_not_fitted():
    with pytest.raises(NotFittedError):
        CoordinatedSketchEstimator().predict(["in(A1)"])


def test_predict_transform_exact_when_k_large():
    c = random_collection(4, n=30)
    est = CoordinatedSketchEstimator(k=100).fit(c)
    preds = ["in(A1)", "in(A1) & in(A2)", "in(A1) | in(A2) | in(A3)"]
    truth = [c.weight(c.sets["A1"]), c.weight(c.sets["A1"] & c.sets["A2"]), c.weight(c.union_ids())]
    assert np.allclose(est.predict(preds), truth)
    out = est.fit_transform(c, predicates=preds)
    assert out.shape == (3, 2) and np.allclose(out[:, 0], truth)
    assert est.n_features_in_ == 3 and est.set_ids_ == ["A1", "A2", "A3"]


def test_estimate_with_combination():
    c = random_collection(4, n=60)
    est = CoordinatedSketchEstimator(k=5, seed=9).fit(c)
    assert est.estimate("in(A1) | in(A2)", "UNION").size <= 5
    assert est.estimate("in(A1) | in(A2)").kind.value == "LCS"


def test_sets_param_restricts():
    est = CoordinatedSketchEstimator(k=4, sets=["A1"]).fit(random_collection(1))
    assert est.set_ids_ == ["A1"]


def test_invalid_params():
    with pytest.raises(ValueError):
        CoordinatedSketchEstimator(k=0).fit({"A": [1]})
    with pytest.raises(ValueError):
        CoordinatedSketchEstimator(family="XYZ").fit({"A": [1]})
    with pytest.raises(ValueError):
        CoordinatedSketchEstimator(seed=-1).fit({"A": [1]})


def test_validation_helpers():
    c = check_collection({"A": {1: 2.0, 2: 1.0}, "B": {2: 1.0}})
    assert c.weight(c.union_ids()) == 3.0
    with pytest.raises(ValueError, match="conflicting"):
        check_collection({"A": {1: 2.0}, "B": {1: 3.0}})
    with pytest.raises(ValueError):
        check_collection([])
    with pytest.raises(ValueError):
        check_k(True)
    assert check_seed(np.int64(5)) == 5
