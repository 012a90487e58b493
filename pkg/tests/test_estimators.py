import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fnn.estimators import FourierNetworkRegressor, TanhNetworkRegressor
from fnn.optimize import TrainConfig, sample_training_points

X = sample_training_points(TrainConfig(sample_count=128))


def test_single_mode_fit_reads_as_fourier_coefficient():
    est = FourierNetworkRegressor(hidden_count=1).fit(X[:, None], np.cos(np.pi * X))
    s = est.spectrum(2)
    assert s.a[0] == pytest.approx(1.0, abs=1e-4)
    assert abs(s.b[0]) < 1e-4 and abs(s.constant) < 1e-4
    assert est.score(X[:, None], np.cos(np.pi * X)) > 0.9999
    assert est.n_iter_ == len(est.loss_curve_) - 1
    assert est.loss_ == est.loss_curve_[-1]


def test_params_api_and_clone():
    est = FourierNetworkRegressor(hidden_count=3, alpha1=1e-4, n_init=2)
    params = est.get_params()
    assert params["hidden_count"] == 3 and params["alpha1"] == 1e-4
    assert params["init_m"] == pytest.approx(math.sqrt(5))
    twin = clone(est)
    assert twin.get_params() == params
    twin.set_params(hidden_count=5)
    assert twin.hidden_count == 5 and est.hidden_count == 3
    tanh = TanhNetworkRegressor(hidden_layer_sizes=(4, 4))
    assert clone(tanh).get_params()["hidden_layer_sizes"] == (4, 4)


def test_not_fitted_and_input_checks():
    with pytest.raises(NotFittedError):
        FourierNetworkRegressor().predict(X[:, None])
    with pytest.raises(ValueError):
        FourierNetworkRegressor().fit(np.c_[X, X], X)
    with pytest.raises(ValueError):
        FourierNetworkRegressor().fit(X[:1, None], X[:1])
    with pytest.raises(ValueError):
        FourierNetworkRegressor(hidden_count=0).fit(X[:, None], X)
    with pytest.raises(ValueError):
        FourierNetworkRegressor(random_state=-1).fit(X[:, None], X)
    with pytest.raises(ValueError):
        FourierNetworkRegressor(max_iterations=0).fit(X[:, None], X)


def test_fit_is_deterministic():
    y = np.sin(np.pi * X) + 0.5 * np.cos(2 * np.pi * X)
    a = FourierNetworkRegressor(max_iterations=200).fit(X[:, None], y)
    b = FourierNetworkRegressor(max_iterations=200).fit(X[:, None], y)
    assert np.array_equal(a.params_.to_vector(), b.params_.to_vector())
    assert a.loss_curve_ == b.loss_curve_


def test_tanh_regressor_fits_and_predicts():
    y = X**2
    est = TanhNetworkRegressor(hidden_layer_sizes=(8,), max_iterations=500).fit(X[:, None], y)
    assert est.predict(X[:, None]).shape == X.shape
    assert est.loss_ < 1e-2
    assert est.score(X[:, None], y) > 0.95
