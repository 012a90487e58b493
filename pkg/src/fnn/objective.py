"""Training losses for the Fourier network and the tanh baseline.

All data-fit and residual terms are *means* of squared errors over the sample,
so loss values do not scale with the number of points. Regularization terms
are plain sums over the weights (``sum lam**2`` or ``sum |lam|``).

Coefficient roles (all nonnegative):

=========  ==============================================================
alpha1     regularization of the hidden-to-output weights ``lam``
alpha2     regularization of the frequencies ``w``
alpha3     periodicity penalty ``mean((u(x + T) - u(x))**2)``
alpha4     periodicity penalty ``mean((u(x - T) - u(x))**2)``
alpha5     initial-condition term of the heat loss
alpha6     zero-mean gauge of the Poisson loss, ``(period mean of u)**2``
=========  ==============================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .model import (
    DenseNetworkParams,
    FourierNetworkParams,
    dense_backward,
    dense_forward_tangent,
    fnn_input_derivatives,
    fnn_param_jacobian,
)

__all__ = [
    "LossSpec",
    "MODES",
    "OPERATORS",
    "regularization",
    "approximation_terms",
    "approximation_loss",
    "pde_residual_terms",
    "pde_residual_loss",
    "heat_composite_terms",
    "heat_composite_loss",
    "dense_fit_loss",
    "fnn_param_gradient",
    "dense_param_gradient",
    "period_mean",
    "FourierFitObjective",
    "DenseFitObjective",
    "PdeResidualObjective",
    "HeatObjective",
    "FrozenBlockObjective",
]

MODES = ("approximation", "pde_residual", "heat_composite")
OPERATORS = ("neg_laplacian",)


@dataclass(frozen=True)
class LossSpec:
    alpha1: float = 1e-5
    alpha2: float = 1e-5
    alpha3: float = 1.0
    alpha4: float = 1.0
    alpha5: float = 1.0
    alpha6: float = 1.0
    reg_norm: str = "L2"
    period: float = 2.0
    mode: str = "approximation"

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6"):
            val = getattr(self, name)
            if not (val >= 0 and math.isfinite(val)):
                raise ValueError(f"{name} must be a finite nonnegative number, got {val}")
        if self.reg_norm not in ("L1", "L2"):
            raise ValueError(f"reg_norm must be 'L1' or 'L2', got {self.reg_norm!r}")
        if not self.period > 0:
            raise ValueError("period must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    def with_mode(self, mode: str) -> "LossSpec":
        return replace(self, mode=mode)


def _require_mode(spec: LossSpec, mode: str) -> None:
    if spec.mode != mode:
        raise ValueError(f"loss spec has mode {spec.mode!r}, expected {mode!r}")


def _aligned(points, targets):
    x = np.atleast_1d(np.asarray(points, dtype=np.float64))
    y = np.atleast_1d(np.asarray(targets, dtype=np.float64))
    if x.shape != y.shape:
        raise ValueError(f"points and targets differ in length: {x.size} vs {y.size}")
    if x.size < 1:
        raise ValueError("empty sample")
    return x, y


def _norm_value_grad(v: np.ndarray, norm: str):
    if norm == "L2":
        return float(v @ v), 2.0 * v
    # subgradient 0 at 0
    return float(np.abs(v).sum()), np.sign(v)


def regularization(params: FourierNetworkParams, norm: str = "L2") -> tuple[float, float]:
    """Unscaled ``(lam piece, w piece)`` of the weight penalty."""
    if norm not in ("L1", "L2"):
        raise ValueError(f"unknown norm {norm!r}")
    return _norm_value_grad(params.lam, norm)[0], _norm_value_grad(params.w, norm)[0]


def period_mean(params: FourierNetworkParams) -> tuple[float, np.ndarray]:
    """Exact mean of u over one period and its parameter gradient.

    The mean of cos(omega w x + phi) over [-T/2, T/2] is cos(phi) * sinc(w).
    """
    w, phi, lam = params.w, params.phi, params.lam
    sw = np.sinc(w)
    u = math.pi * w
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    dsw = np.where(small, -math.pi * u / 3.0, math.pi * (safe * np.cos(safe) - np.sin(safe)) / safe**2)
    cphi = np.cos(phi)
    value = params.phi0 + float(lam @ (cphi * sw))
    grad = np.concatenate([lam * cphi * dsw, -lam * np.sin(phi) * sw, cphi * sw, [1.0]])
    return value, grad


def _fourier_penalties(params: FourierNetworkParams, x: np.ndarray, spec: LossSpec, terms: dict):
    """Regularization and periodicity terms shared by all Fourier losses."""
    n = params.hidden_count
    grad = np.zeros(params.size)
    lam_val, lam_grad = _norm_value_grad(params.lam, spec.reg_norm)
    w_val, w_grad = _norm_value_grad(params.w, spec.reg_norm)
    terms["reg_lambda"] = spec.alpha1 * lam_val
    terms["reg_w"] = spec.alpha2 * w_val
    grad[2 * n : 3 * n] += spec.alpha1 * lam_grad
    grad[:n] += spec.alpha2 * w_grad

    T = params.period
    m = x.size
    u0 = None
    j0 = None
    for name, alpha, shift in (("periodic_plus", spec.alpha3, T), ("periodic_minus", spec.alpha4, -T)):
        if alpha == 0.0:
            terms[name] = 0.0
            continue
        if u0 is None:
            u0 = fnn_input_derivatives(params, x, 0)[0]
            j0 = fnn_param_jacobian(params, x)
        d = fnn_input_derivatives(params, x + shift, 0)[0] - u0
        terms[name] = alpha * float(d @ d) / m
        grad += (2.0 * alpha / m) * ((fnn_param_jacobian(params, x + shift) - j0).T @ d)
    return grad


def approximation_terms(params, points, targets, spec: LossSpec, with_grad: bool = False):
    """Per-term breakdown of the approximation loss (and optionally the gradient)."""
    _require_mode(spec, "approximation")
    x, y = _aligned(points, targets)
    terms = {}
    grad = _fourier_penalties(params, x, spec, terms)
    r = fnn_input_derivatives(params, x, 0)[0] - y
    terms["data"] = float(r @ r) / x.size
    if with_grad:
        grad += (2.0 / x.size) * (fnn_param_jacobian(params, x).T @ r)
        return terms, grad
    return terms


def approximation_loss(params, points, targets, spec: LossSpec) -> float:
    """Data misfit plus weight regularization plus periodicity penalties."""
    return sum(approximation_terms(params, points, targets, spec).values())


def fnn_param_gradient(params, points, targets, loss: LossSpec) -> FourierNetworkParams:
    """Exact gradient of :func:`approximation_loss`, shaped like ``params``."""
    _, g = approximation_terms(params, points, targets, loss, with_grad=True)
    return FourierNetworkParams.from_vector(g, params.period)


def _forcing_values(forcing, x):
    f = forcing(x) if callable(forcing) else forcing
    f = np.broadcast_to(np.asarray(f, dtype=np.float64), x.shape)
    if not np.all(np.isfinite(f)):
        raise ValueError("forcing produced non-finite values")
    return f


def pde_residual_terms(params, points, forcing, operator: str = "neg_laplacian",
                       spec: LossSpec | None = None, with_grad: bool = False):
    """Per-term breakdown of the physics-informed loss for ``-u'' = f``."""
    spec = spec or LossSpec(mode="pde_residual")
    _require_mode(spec, "pde_residual")
    if operator not in OPERATORS:
        raise ValueError(f"unsupported operator {operator!r}; supported: {OPERATORS}")
    x = np.atleast_1d(np.asarray(points, dtype=np.float64))
    if x.size < 1:
        raise ValueError("empty sample")
    f = _forcing_values(forcing, x)
    terms = {}
    grad = _fourier_penalties(params, x, spec, terms)
    r = -fnn_input_derivatives(params, x, 2)[2] - f
    terms["residual"] = float(r @ r) / x.size
    grad += (2.0 / x.size) * (-fnn_param_jacobian(params, x, derivative=2).T @ r)
    g_mean, g_grad = period_mean(params)
    terms["gauge"] = spec.alpha6 * g_mean**2
    grad += 2.0 * spec.alpha6 * g_mean * g_grad
    return (terms, grad) if with_grad else terms


def pde_residual_loss(params, points, forcing, operator: str = "neg_laplacian",
                      spec: LossSpec | None = None) -> float:
    return sum(pde_residual_terms(params, points, forcing, operator, spec).values())


def heat_composite_terms(space: FourierNetworkParams, time: DenseNetworkParams,
                         x_points, t_points, u0, spec: LossSpec, with_grad: bool = False):
    """Per-term breakdown of the separated heat-equation loss.

    The residual ``X(x) T'(t) - X''(x) T(t)`` is averaged over the full
    ``x_points x t_points`` product; the initial-condition term compares
    ``X(x) T(0)`` with ``u0(x)`` on ``x_points``. Returns the gradient over
    ``[space vector, time vector]`` when ``with_grad``.
    """
    _require_mode(spec, "heat_composite")
    x = np.atleast_1d(np.asarray(x_points, dtype=np.float64))
    t = np.atleast_1d(np.asarray(t_points, dtype=np.float64))
    if x.size < 1 or t.size < 1:
        raise ValueError("empty sample")
    terms = {}
    g_space = _fourier_penalties(space, x, spec, terms)

    X, _, Xpp = fnn_input_derivatives(space, x, 2)
    T, Tp, cache = dense_forward_tangent(time, t)
    R = np.outer(X, Tp) - np.outer(Xpp, T)
    scale = 2.0 / R.size
    terms["residual"] = float(np.sum(R * R)) / R.size

    j0 = fnn_param_jacobian(space, x)
    j2 = fnn_param_jacobian(space, x, derivative=2)
    g_space = g_space + scale * (j0.T @ (R @ Tp) - j2.T @ (R @ T))
    g_time = dense_backward(time, cache, -scale * (R.T @ Xpp), scale * (R.T @ X))

    u0v = _forcing_values(u0, x)
    T0, _, cache0 = dense_forward_tangent(time, np.zeros(1))
    e = X * T0[0] - u0v
    terms["initial"] = spec.alpha5 * float(e @ e) / x.size
    ge = 2.0 * spec.alpha5 / x.size
    g_space = g_space + ge * T0[0] * (j0.T @ e)
    g_time = g_time + dense_backward(time, cache0, np.array([ge * float(e @ X)]))
    if with_grad:
        return terms, np.concatenate([g_space, g_time])
    return terms


def heat_composite_loss(space, time, x_points, t_points, u0, spec: LossSpec) -> float:
    return sum(heat_composite_terms(space, time, x_points, t_points, u0, spec).values())


def dense_fit_terms(params: DenseNetworkParams, points, targets, spec: LossSpec,
                    with_grad: bool = False):
    """Baseline loss: mean squared misfit plus alpha1 times the weight-matrix norm.

    Biases are not regularized and no periodicity terms are applied.
    """
    x, y = _aligned(points, targets)
    yhat, _, cache = dense_forward_tangent(params, x)
    r = yhat - y
    terms = {"data": float(r @ r) / x.size}
    reg = 0.0
    reg_grads = []
    for W, b in zip(params.weights, params.biases):
        val, g = _norm_value_grad(W.ravel(), spec.reg_norm)
        reg += val
        reg_grads += [g, np.zeros(b.size)]
    terms["reg_weights"] = spec.alpha1 * reg
    if not with_grad:
        return terms
    grad = dense_backward(params, cache, (2.0 / x.size) * r) + spec.alpha1 * np.concatenate(reg_grads)
    return terms, grad


def dense_fit_loss(params, points, targets, spec: LossSpec) -> float:
    return sum(dense_fit_terms(params, points, targets, spec).values())


def dense_param_gradient(params, points, targets, loss: LossSpec) -> DenseNetworkParams:
    """Exact gradient of :func:`dense_fit_loss`, shaped like ``params``."""
    _, g = dense_fit_terms(params, points, targets, loss, with_grad=True)
    return params.with_vector(g)


# --- objective handles for the optimizer ----------------------------------


class _Objective:
    """Maps flat parameter vectors to (loss, gradient)."""

    def value_and_grad(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        terms, grad = self._terms(self.unpack(theta), with_grad=True)
        return float(sum(terms.values())), grad

    def value(self, theta: np.ndarray) -> float:
        return float(sum(self._terms(self.unpack(theta)).values()))

    def terms(self, params) -> dict:
        return self._terms(params)


class FourierFitObjective(_Objective):
    def __init__(self, points, targets, spec: LossSpec):
        self.x, self.y = _aligned(points, targets)
        self.spec = spec.with_mode("approximation")

    def pack(self, params):
        return params.to_vector()

    def unpack(self, theta):
        return FourierNetworkParams.from_vector(theta, self.spec.period)

    def _terms(self, params, with_grad=False):
        return approximation_terms(params, self.x, self.y, self.spec, with_grad)


class DenseFitObjective(_Objective):
    def __init__(self, points, targets, spec: LossSpec, template: DenseNetworkParams):
        self.x, self.y = _aligned(points, targets)
        self.spec = spec
        self.template = template

    def pack(self, params):
        return params.to_vector()

    def unpack(self, theta):
        return self.template.with_vector(theta)

    def _terms(self, params, with_grad=False):
        return dense_fit_terms(params, self.x, self.y, self.spec, with_grad)


class PdeResidualObjective(_Objective):
    def __init__(self, points, forcing: Callable, spec: LossSpec, operator: str = "neg_laplacian"):
        self.x = np.atleast_1d(np.asarray(points, dtype=np.float64))
        self.forcing = _forcing_values(forcing, self.x)
        self.spec = spec.with_mode("pde_residual")
        self.operator = operator

    def pack(self, params):
        return params.to_vector()

    def unpack(self, theta):
        return FourierNetworkParams.from_vector(theta, self.spec.period)

    def _terms(self, params, with_grad=False):
        return pde_residual_terms(params, self.x, self.forcing, self.operator, self.spec, with_grad)


class HeatObjective(_Objective):
    """Joint objective over the concatenated (space, time) parameter vector."""

    def __init__(self, x_points, t_points, u0, spec: LossSpec, space_hidden: int,
                 time_template: DenseNetworkParams):
        self.x = np.atleast_1d(np.asarray(x_points, dtype=np.float64))
        self.t = np.atleast_1d(np.asarray(t_points, dtype=np.float64))
        self.u0 = _forcing_values(u0, self.x)
        self.spec = spec.with_mode("heat_composite")
        self.n_space = 3 * space_hidden + 1
        self.time_template = time_template

    def pack(self, pair):
        space, time = pair
        return np.concatenate([space.to_vector(), time.to_vector()])

    def unpack(self, theta):
        space = FourierNetworkParams.from_vector(theta[: self.n_space], self.spec.period)
        return space, self.time_template.with_vector(theta[self.n_space :])

    def _terms(self, pair, with_grad=False):
        space, time = pair
        return heat_composite_terms(space, time, self.x, self.t, self.u0, self.spec, with_grad)


class FrozenBlockObjective(_Objective):
    """Restriction of another objective to a slice of its parameter vector.

    Entries outside ``free`` stay at their values in ``theta``.
    """

    def __init__(self, objective, theta, free: slice):
        self.objective = objective
        self.theta = np.array(theta, dtype=np.float64)
        self.free = free

    def _full(self, sub):
        full = self.theta.copy()
        full[self.free] = sub
        return full

    def pack(self, params):
        return self.objective.pack(params)[self.free]

    def unpack(self, sub):
        return self.objective.unpack(self._full(sub))

    def value_and_grad(self, sub):
        f, g = self.objective.value_and_grad(self._full(sub))
        return f, g[self.free]

    def value(self, sub):
        return self.objective.value(self._full(sub))

    def terms(self, params):
        return self.objective.terms(params)
