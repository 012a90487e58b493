"""Full-batch training: initializers, sampling and the optimizers."""

from __future__ import annotations

import json
import math
import time
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .mathstats import DEFAULT_INIT_M, derive_seed, output_weight_std, sample_normal, sample_uniform
from .model import DenseNetworkParams, FourierNetworkParams

__all__ = [
    "OPTIMIZERS",
    "DivergenceError",
    "TrainConfig",
    "TrainReport",
    "init_fourier",
    "init_glorot",
    "sample_training_points",
    "minimize",
    "train",
    "train_restarts",
    "restart_seed",
]

OPTIMIZERS = ("quasi_newton", "adam", "gradient_descent")

# sub-stream ids for derive_seed
STREAM_POINTS = 0
STREAM_W = 1
STREAM_LAMBDA = 2
STREAM_GLOROT = 100


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""


@dataclass(frozen=True)
class TrainConfig:
    max_iterations: int = 5000
    loss_tolerance: float = 1e-6
    grad_tolerance: float = 1e-8
    optimizer: str = "quasi_newton"
    learning_rate: float = 1e-3
    sample_count: int = 256
    seed: int = 0
    init_m: float = DEFAULT_INIT_M
    resample: bool = False
    history_size: int = 10
    n_init: int = 1
    stall_window: int = 100
    stall_tolerance: float = 1e-10

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.loss_tolerance > 0 and self.grad_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if self.sample_count < 2:
            raise ValueError("sample_count must be >= 2")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not self.init_m > 0:
            raise ValueError("init_m must be positive")
        if self.history_size < 1:
            raise ValueError("history_size must be >= 1")
        if self.n_init < 1:
            raise ValueError("n_init must be >= 1")
        if self.stall_window < 1 or not self.stall_tolerance >= 0:
            raise ValueError("stall_window must be >= 1 and stall_tolerance >= 0")


@dataclass
class TrainReport:
    iterations_run: int
    final_loss: float
    loss_history: list
    final_params: Any
    converged: bool
    message: str = ""
    init_seed: int | None = None
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "iterations_run": self.iterations_run,
            "final_loss": self.final_loss,
            "converged": self.converged,
            "message": self.message,
            "init_seed": self.init_seed,
            "loss_history": list(self.loss_history),
        }
        params = self.final_params
        if isinstance(params, tuple):
            d["final_params"] = [p.to_dict() for p in params]
        elif params is not None:
            d["final_params"] = params.to_dict()
        if include_timing:
            d["wall_time"] = self.wall_time
        return d

    def write_json(self, path, include_timing: bool = False) -> None:
        Path(path).write_text(json.dumps(self.to_dict(include_timing), indent=2) + "\n")

    def write_history_csv(self, path) -> None:
        lines = ["iteration,loss"]
        lines += [f"{i},{v!r}" for i, v in enumerate(self.loss_history)]
        Path(path).write_text("\n".join(lines) + "\n")


def init_fourier(config: TrainConfig, hidden_count: int, period: float = 2.0) -> FourierNetworkParams:
    """w ~ N(0, m**2), lam ~ N(0, v**2) with v from the variance-matching rule; biases 0."""
    if hidden_count < 1:
        raise ValueError("hidden_count must be >= 1")
    m = config.init_m
    v = output_weight_std(m, hidden_count)
    w = sample_normal(derive_seed(config.seed, STREAM_W), hidden_count, 0.0, m)
    lam = sample_normal(derive_seed(config.seed, STREAM_LAMBDA), hidden_count, 0.0, v)
    return FourierNetworkParams(w, np.zeros(hidden_count), lam, 0.0, period)


def init_glorot(config: TrainConfig, layer_sizes, stream: int = STREAM_GLOROT) -> DenseNetworkParams:
    """Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)); zero biases."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or min(sizes) < 1:
        raise ValueError(f"invalid layer sizes {layer_sizes}")
    ws, bs = [], []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        seed = derive_seed(config.seed, stream + i)
        ws.append(sample_uniform(seed, fan_in * fan_out, -bound, bound).reshape(fan_out, fan_in))
        bs.append(np.zeros(fan_out))
    return DenseNetworkParams(ws, bs)


def sample_training_points(config: TrainConfig, domain=(-1.0, 1.0), stream: int = STREAM_POINTS) -> np.ndarray:
    """``config.sample_count`` uniform points on the domain, reproducible from the seed."""
    lo, hi = domain
    return sample_uniform(derive_seed(config.seed, stream), config.sample_count, lo, hi)


# --- optimizers ---------------------------------------------------------------


def _check_finite(f: float, where: str) -> None:
    if not math.isfinite(f):
        raise DivergenceError(f"non-finite loss {f} {where}")


def _backtrack(fun, theta, f, g, d, step, c1=1e-4, max_steps=60):
    """Armijo backtracking with safeguarded quadratic interpolation."""
    slope = float(g @ d)
    for _ in range(max_steps):
        cand = theta + step * d
        f_new, g_new = fun(cand)
        if math.isfinite(f_new) and f_new <= f + c1 * step * slope:
            return cand, f_new, g_new, step
        if math.isfinite(f_new):
            denom = 2.0 * (f_new - f - slope * step)
            trial = -slope * step * step / denom if denom > 0 else 0.5 * step
            step = min(max(trial, 0.1 * step), 0.5 * step)
        else:
            step *= 0.1
    return None


def _lbfgs_direction(g, pairs):
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= float(s @ y) / float(y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * float(y @ q)
        q += (a - b) * s
    return -q


def minimize(fun: Callable, theta0, config: TrainConfig, resampler: Callable | None = None):
    """Minimize ``fun(theta) -> (loss, grad)`` from ``theta0``.

    Returns ``(theta, loss_history, converged, message)``. The quasi-Newton
    path never accepts an iterate with a higher loss, and stops early when
    the loss fell by less than ``stall_tolerance * loss`` over the last
    ``stall_window`` iterations.
    """
    if config.resample and resampler is None:
        raise ValueError("resample=True needs a resampler")
    if config.resample and config.optimizer == "quasi_newton":
        raise ValueError("per-iteration resampling is only supported for first-order optimizers")
    theta = np.array(theta0, dtype=np.float64)
    f, g = fun(theta)
    _check_finite(f, "at the initial point")
    history = [float(f)]

    def done():
        if f < config.loss_tolerance:
            return "loss below tolerance"
        if np.max(np.abs(g)) < config.grad_tolerance:
            return "gradient below tolerance"
        return None

    msg = done()
    if msg:
        return theta, history, True, msg

    if config.optimizer == "quasi_newton":
        pairs = deque(maxlen=config.history_size)
        for _ in range(config.max_iterations):
            d = _lbfgs_direction(g, pairs)
            if not float(g @ d) < 0:
                pairs.clear()
                d = -g
            step = 1.0 if pairs else min(1.0, 1.0 / max(float(np.max(np.abs(g))), 1e-300))
            found = _backtrack(fun, theta, f, g, d, step)
            if found is None and pairs:
                pairs.clear()
                d = -g
                found = _backtrack(fun, theta, f, g, d, min(1.0, 1.0 / float(np.max(np.abs(g)))))
            if found is None:
                return theta, history, False, "line search made no progress"
            theta_new, f_new, g_new, _ = found
            s, y = theta_new - theta, g_new - g
            sy = float(s @ y)
            if sy > 1e-10 * float(np.linalg.norm(s) * np.linalg.norm(y)):
                pairs.append((s, y, 1.0 / sy))
            theta, f, g = theta_new, f_new, g_new
            history.append(float(f))
            msg = done()
            if msg:
                return theta, history, True, msg
            w = config.stall_window
            if len(history) > w and history[-1 - w] - f <= config.stall_tolerance * f:
                return theta, history, False, "loss stagnated"
        return theta, history, False, "iteration limit reached"

    lr = config.learning_rate
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    b1, b2, eps = 0.9, 0.999, 1e-8
    for it in range(1, config.max_iterations + 1):
        if config.optimizer == "adam":
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            theta = theta - lr * (m / (1 - b1**it)) / (np.sqrt(v / (1 - b2**it)) + eps)
        else:
            theta = theta - lr * g
        if config.resample:
            fun = resampler(it)
        f, g = fun(theta)
        _check_finite(f, f"at iteration {it}")
        history.append(float(f))
        msg = done()
        if msg:
            return theta, history, True, msg
    return theta, history, False, "iteration limit reached"


def train(objective, init_params, config: TrainConfig, resampler: Callable | None = None) -> TrainReport:
    """Train ``init_params`` against an objective handle.

    ``objective`` provides ``pack``, ``unpack`` and ``value_and_grad``;
    ``resampler(iteration)`` returns a fresh objective when resampling.
    """
    start = time.perf_counter()
    theta0 = objective.pack(init_params)
    fun = objective.value_and_grad
    resample_fun = None
    if resampler is not None:
        def resample_fun(it):
            return resampler(it).value_and_grad
    theta, history, converged, msg = minimize(fun, theta0, config, resample_fun)
    return TrainReport(
        iterations_run=len(history) - 1,
        final_loss=history[-1],
        loss_history=history,
        final_params=objective.unpack(theta),
        converged=converged,
        message=msg,
        wall_time=time.perf_counter() - start,
    )


def restart_seed(seed: int, restart: int) -> int:
    """Seed of restart ``restart``; restart 0 is ``seed`` itself."""
    return int(seed) if restart == 0 else derive_seed(seed, 1000 + restart)


def train_restarts(objective, make_init: Callable[[TrainConfig], Any], config: TrainConfig) -> TrainReport:
    """Run ``config.n_init`` trainings from fresh initializations; keep the lowest final loss.

    The training sample is whatever ``objective`` holds, so all restarts see
    the same points. Ties go to the earliest restart.
    """
    best = None
    total_time = 0.0
    for r in range(config.n_init):
        cfg = replace(config, seed=restart_seed(config.seed, r))
        report = train(objective, make_init(cfg), cfg)
        report.init_seed = cfg.seed
        total_time += report.wall_time
        if best is None or report.final_loss < best.final_loss:
            best = report
    best.wall_time = total_time
    return best
