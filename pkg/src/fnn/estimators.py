"""scikit-learn style regressors for one-dimensional function approximation."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .fourier import extract_spectrum
from .mathstats import DEFAULT_INIT_M
from .model import dense_forward, fnn_forward
from .objective import DenseFitObjective, FourierFitObjective, LossSpec
from .optimize import TrainConfig, init_fourier, init_glorot, train_restarts

__all__ = ["FourierNetworkRegressor", "TanhNetworkRegressor"]


def _column(X):
    X = check_array(X, ensure_2d=True, dtype=np.float64)
    if X.shape[1] != 1:
        raise ValueError(f"expected one feature, got {X.shape[1]}")
    return X[:, 0]


def _xy(X, y):
    X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
    if X.shape[1] != 1:
        raise ValueError(f"expected one feature, got {X.shape[1]}")
    if X.shape[0] < 2:
        raise ValueError("need at least two samples")
    return X[:, 0], y


def _seed(random_state) -> int:
    if random_state is None:
        return 0
    if isinstance(random_state, (int, np.integer)) and random_state >= 0:
        return int(random_state)
    raise ValueError(f"random_state must be a nonnegative int or None, got {random_state!r}")


class _TrainedRegressor(RegressorMixin, BaseEstimator):
    def _config(self, n_samples: int) -> TrainConfig:
        return TrainConfig(
            max_iterations=self.max_iterations,
            loss_tolerance=self.loss_tolerance,
            grad_tolerance=self.grad_tolerance,
            optimizer=self.optimizer,
            learning_rate=self.learning_rate,
            sample_count=max(n_samples, 2),
            seed=_seed(self.random_state),
            n_init=self.n_init,
            **self._extra_config(),
        )

    def _extra_config(self) -> dict:
        return {}

    def _store(self, report):
        self.report_ = report
        self.params_ = report.final_params
        self.n_iter_ = report.iterations_run
        self.loss_curve_ = list(report.loss_history)
        self.loss_ = report.final_loss
        self.n_features_in_ = 1
        return self


class FourierNetworkRegressor(_TrainedRegressor):
    """Shallow cosine network ``phi0 + sum lam_k cos(w_k * omega * x + phi_k)``.

    Trained with periodicity penalties so the fitted frequencies settle on
    integers and the output weights read as Fourier coefficients.
    """

    def __init__(self, hidden_count=4, period=2.0, alpha1=1e-5, alpha2=1e-5, alpha3=1.0,
                 alpha4=1.0, reg_norm="L2", optimizer="quasi_newton", max_iterations=5000,
                 loss_tolerance=1e-6, grad_tolerance=1e-8, learning_rate=1e-3,
                 init_m=DEFAULT_INIT_M, n_init=1, random_state=0):
        self.hidden_count = hidden_count
        self.period = period
        self.alpha1 = alpha1
        self.alpha2 = alpha2
        self.alpha3 = alpha3
        self.alpha4 = alpha4
        self.reg_norm = reg_norm
        self.optimizer = optimizer
        self.max_iterations = max_iterations
        self.loss_tolerance = loss_tolerance
        self.grad_tolerance = grad_tolerance
        self.learning_rate = learning_rate
        self.init_m = init_m
        self.n_init = n_init
        self.random_state = random_state

    def _extra_config(self):
        return {"init_m": self.init_m}

    def loss_spec(self) -> LossSpec:
        return LossSpec(alpha1=self.alpha1, alpha2=self.alpha2, alpha3=self.alpha3,
                        alpha4=self.alpha4, reg_norm=self.reg_norm, period=self.period)

    def fit(self, X, y):
        x, y = _xy(X, y)
        if int(self.hidden_count) < 1:
            raise ValueError("hidden_count must be >= 1")
        config = self._config(x.size)
        objective = FourierFitObjective(x, y, self.loss_spec())
        report = train_restarts(objective, lambda c: init_fourier(c, int(self.hidden_count), self.period), config)
        return self._store(report)

    def predict(self, X):
        check_is_fitted(self, "params_")
        return fnn_forward(self.params_, _column(X))

    def spectrum(self, n_modes: int, **kwargs):
        """Fourier coefficients read off the fitted weights (see :func:`extract_spectrum`)."""
        check_is_fitted(self, "params_")
        return extract_spectrum(self.params_, n_modes, **kwargs)


class TanhNetworkRegressor(_TrainedRegressor):
    """Dense tanh network with a linear output, used as a baseline."""

    def __init__(self, hidden_layer_sizes=(10,), alpha=1e-5, reg_norm="L2",
                 optimizer="quasi_newton", max_iterations=5000, loss_tolerance=1e-6,
                 grad_tolerance=1e-8, learning_rate=1e-3, n_init=1, random_state=0):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.alpha = alpha
        self.reg_norm = reg_norm
        self.optimizer = optimizer
        self.max_iterations = max_iterations
        self.loss_tolerance = loss_tolerance
        self.grad_tolerance = grad_tolerance
        self.learning_rate = learning_rate
        self.n_init = n_init
        self.random_state = random_state

    def fit(self, X, y):
        x, y = _xy(X, y)
        sizes = (1, *(int(h) for h in self.hidden_layer_sizes), 1)
        config = self._config(x.size)
        template = init_glorot(config, sizes)
        spec = LossSpec(alpha1=self.alpha, reg_norm=self.reg_norm)
        objective = DenseFitObjective(x, y, spec, template)
        report = train_restarts(objective, lambda c: init_glorot(c, sizes), config)
        return self._store(report)

    def predict(self, X):
        check_is_fitted(self, "params_")
        return dense_forward(self.params_, _column(X))
