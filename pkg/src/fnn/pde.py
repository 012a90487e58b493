"""Physics-informed solvers for the periodic 1-D Poisson and heat problems."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .mathstats import derive_seed, sample_uniform
from .model import DenseNetworkParams, FourierNetworkParams, dense_forward, fnn_forward
from .objective import (
    FourierFitObjective,
    FrozenBlockObjective,
    HeatObjective,
    LossSpec,
    PdeResidualObjective,
)
from .optimize import TrainConfig, TrainReport, init_fourier, init_glorot, sample_training_points, train, train_restarts

__all__ = [
    "PdeProblem",
    "HeatSolution",
    "ErrorGrid",
    "SolvabilityError",
    "solve_poisson",
    "solve_heat",
    "exact_poisson",
    "exact_heat",
    "error_grid",
    "write_poisson_csv",
    "write_heat_csv",
]

STREAM_TIME = 7


class SolvabilityError(ValueError):
    """The periodic Poisson problem has no solution for this forcing."""


@dataclass(frozen=True)
class PdeProblem:
    kind: str
    forcing: Callable | None = None
    initial_condition: Callable | None = None
    domain: tuple = (-1.0, 1.0)
    time_horizon: float = 4.0
    period: float | None = None

    def __post_init__(self):
        lo, hi = self.domain
        if not hi > lo:
            raise ValueError(f"invalid domain {self.domain}")
        if self.period is None:
            object.__setattr__(self, "period", hi - lo)
        if not math.isclose(self.period, hi - lo):
            raise ValueError("period must equal the domain length")
        if self.kind == "poisson":
            if self.forcing is None:
                raise ValueError("a Poisson problem needs a forcing")
        elif self.kind == "heat":
            if self.initial_condition is None:
                raise ValueError("a heat problem needs an initial condition")
            if not self.time_horizon > 0:
                raise ValueError("time_horizon must be positive")
        else:
            raise ValueError(f"kind must be 'poisson' or 'heat', got {self.kind!r}")


@dataclass(frozen=True)
class HeatSolution:
    """Separated solution u(x, t) = X(x) T(t)."""

    space: FourierNetworkParams
    time: DenseNetworkParams

    def __call__(self, x, t):
        """Values on the grid ``x`` by ``t`` (shape ``(len(x), len(t))``)."""
        return np.outer(fnn_forward(self.space, np.atleast_1d(x)), dense_forward(self.time, np.atleast_1d(t)))

    def normalized(self) -> "HeatSolution":
        """Same product with T(0) = 1 (moves the scale and sign into X)."""
        s = float(dense_forward(self.time, 0.0))
        if s == 0.0:
            return self
        space = FourierNetworkParams(self.space.w, self.space.phi, self.space.lam * s,
                                     self.space.phi0 * s, self.space.period)
        ws = list(self.time.weights)
        bs = list(self.time.biases)
        ws[-1] = ws[-1] / s
        bs[-1] = bs[-1] / s
        return HeatSolution(space.normalized(), DenseNetworkParams(ws, bs))


def exact_poisson(x):
    """Solution of -u'' = cos(pi x) with zero mean."""
    return np.cos(np.pi * np.asarray(x, dtype=np.float64)) / math.pi**2


def exact_heat(x, t):
    """sin(pi x) exp(-pi**2 t); broadcasts like numpy."""
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    return np.sin(np.pi * x) * np.exp(-math.pi**2 * t)


def _period_mean(f: Callable, domain) -> tuple[float, float]:
    x = np.linspace(domain[0], domain[1], 4097)
    fx = np.broadcast_to(np.asarray(f(x), dtype=np.float64), x.shape)
    return simpson(fx, x=x) / (domain[1] - domain[0]), float(np.max(np.abs(fx)))


def solve_poisson(problem: PdeProblem, hidden_count: int = 4, loss: LossSpec | None = None,
                  config: TrainConfig | None = None, solvability_tol: float = 1e-6):
    """Train a network on -u'' = f with periodic structure and a zero-mean gauge.

    Returns ``(normalized params, report)``.
    """
    if problem.kind != "poisson":
        raise ValueError("solve_poisson needs a Poisson problem")
    loss = replace(loss or LossSpec(), period=problem.period, mode="pde_residual")
    config = config or TrainConfig()
    mean, scale = _period_mean(problem.forcing, problem.domain)
    if abs(mean) > solvability_tol * max(1.0, scale):
        raise SolvabilityError(
            f"forcing has mean {mean:.3e} over the period; the periodic problem needs zero mean"
        )
    x = sample_training_points(config, problem.domain)
    objective = PdeResidualObjective(x, problem.forcing, loss)
    report = train_restarts(objective, lambda c: init_fourier(c, hidden_count, problem.period), config)
    return report.final_params.normalized(), report


def heat_time_points(config: TrainConfig, count: int, horizon: float) -> np.ndarray:
    """Collocation times ``horizon * u**2`` with u uniform; dense where the decay is fast."""
    return horizon * sample_uniform(derive_seed(config.seed, STREAM_TIME), count, 0.0, 1.0) ** 2


def solve_heat(problem: PdeProblem, space_hidden: int = 4, time_layers=(16,),
               loss: LossSpec | None = None, config: TrainConfig | None = None,
               space_samples: int = 64, time_samples: int = 64):
    """Train the separated heat solution X(x) T(t).

    Three passes share ``config``: X is first fit to the initial condition,
    then T is trained with X held fixed, then both are trained jointly on the
    composite loss. The report covers the last two passes.
    """
    if problem.kind != "heat":
        raise ValueError("solve_heat needs a heat problem")
    loss = replace(loss or LossSpec(), period=problem.period)
    config = config or TrainConfig()
    x = sample_training_points(replace(config, sample_count=space_samples), problem.domain)
    t = heat_time_points(config, time_samples, problem.time_horizon)
    u0 = problem.initial_condition

    warm = FourierFitObjective(x, u0(x), loss.with_mode("approximation"))
    space0 = train_restarts(warm, lambda c: init_fourier(c, space_hidden, problem.period), config).final_params

    time0 = init_glorot(config, (1, *time_layers, 1))
    objective = HeatObjective(x, t, u0, loss, space_hidden, time0)
    theta = objective.pack((space0, time0))
    frozen = FrozenBlockObjective(objective, theta, slice(space0.size, None))
    stage_t = train(frozen, (space0, time0), config)
    joint = train(objective, stage_t.final_params, config)

    history = stage_t.loss_history + joint.loss_history[1:]
    report = TrainReport(
        iterations_run=len(history) - 1,
        final_loss=history[-1],
        loss_history=history,
        final_params=joint.final_params,
        converged=joint.converged,
        message=joint.message,
        init_seed=config.seed,
        wall_time=stage_t.wall_time + joint.wall_time,
    )
    space, time_net = joint.final_params
    return HeatSolution(space, time_net).normalized(), report


@dataclass(frozen=True)
class ErrorGrid:
    sup_error: float
    l2_error: float
    field: np.ndarray
    approx: np.ndarray
    exact: np.ndarray


def error_grid(approx, exact) -> ErrorGrid:
    """Compare two arrays of grid values; ``l2_error`` is the root mean square."""
    a = np.asarray(approx, dtype=np.float64)
    e = np.asarray(exact, dtype=np.float64)
    if a.size == 0:
        raise ValueError("empty grid")
    err = np.abs(a - e)
    return ErrorGrid(float(err.max()), float(np.sqrt(np.mean(err**2))), err, a, e)


def write_poisson_csv(path, x, grid: ErrorGrid) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "u_hat", "u_exact", "error"])
        for row in zip(x, grid.approx, grid.exact, grid.field):
            w.writerow([repr(float(v)) for v in row])


def write_heat_csv(path, x, t, grid: ErrorGrid) -> None:
    """Long format, one row per (x, t) pair; ``grid`` arrays are ``(len(x), len(t))``."""
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "t", "u_hat", "u_exact", "error"])
        for i, xi in enumerate(x):
            for j, tj in enumerate(t):
                w.writerow([repr(float(xi)), repr(float(tj)), repr(float(grid.approx[i, j])),
                            repr(float(grid.exact[i, j])), repr(float(grid.field[i, j]))])
