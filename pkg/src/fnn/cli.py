"""Command-line front end: ``fnn <command> [--config FILE] [--seed N] [--out DIR] [key=value ...]``.

Settings come from, in increasing priority: built-in defaults, per-command
defaults, the ``FNN_SEED`` environment variable, the INI file given by
``--config``, ``key=value`` overrides, then ``--seed``. Every run writes the
merged settings to ``config.ini`` in the output directory; passing that file
back with ``--config`` reproduces the run.

Exit codes: 0 success, 1 configuration error, 2 training divergence, 3 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .estimators import FourierNetworkRegressor, TanhNetworkRegressor
from .expression import ParseError, parse_expression
from .fourier import (
    FourierSpectrum,
    evaluate_series,
    extract_spectrum,
    quadrature_coefficients,
    spectrum_error,
    write_spectrum_csv,
)
from .mathstats import (
    DEFAULT_INIT_M,
    hidden_mean,
    hidden_second_moment,
    hidden_variance,
    monte_carlo_moments,
    output_weight_std,
    solve_variance_match,
)
from .model import FourierNetworkParams, dense_forward, fnn_forward, load_model, save_model
from .objective import LossSpec
from .optimize import DivergenceError, TrainConfig, sample_training_points
from .pde import PdeProblem, error_grid, solve_heat, solve_poisson, write_heat_csv, write_poisson_csv
from .svg import line_plot

__all__ = ["main", "BUILTIN_TARGETS", "COMMANDS", "DEFAULTS", "load_settings"]

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_IO = 0, 1, 2, 3

BUILTIN_TARGETS = {
    "cos-sin": "cos(pi*x) + sin(pi*x)",
    "multi-freq": "8*cos(4*pi*x) + sin(2*pi*x) + sin(pi*x)",
    "x-squared": "x^2",
    "abs-x": "abs(x)",
}

# section -> key -> (default, type, help)
DEFAULTS = {
    "train": {
        "max_iterations": (5000, int, "iteration budget per training run"),
        "loss_tolerance": (1e-6, float, "stop when the loss drops below this"),
        "grad_tolerance": (1e-8, float, "stop when the largest gradient entry drops below this"),
        "optimizer": ("quasi_newton", str, "quasi_newton, adam or gradient_descent"),
        "learning_rate": (1e-3, float, "step size of the first-order optimizers"),
        "sample_count": (256, int, "uniform training points on one period"),
        "seed": (0, int, "master seed (FNN_SEED overrides the default)"),
        "init_m": (DEFAULT_INIT_M, float, "std of the initial frequencies"),
        "n_init": (1, int, "independent initializations; the lowest loss wins"),
        "history_size": (10, int, "quasi-Newton memory"),
        "stall_window": (100, int, "quasi-Newton stops if the loss stalls over this many iterations"),
        "stall_tolerance": (1e-10, float, "relative decrease counted as a stall"),
    },
    "loss": {
        "alpha1": (1e-5, float, "output-weight regularization"),
        "alpha2": (1e-5, float, "frequency regularization"),
        "alpha3": (1.0, float, "forward periodicity penalty"),
        "alpha4": (1.0, float, "backward periodicity penalty"),
        "alpha5": (1.0, float, "heat initial-condition weight"),
        "alpha6": (1.0, float, "Poisson zero-mean gauge weight"),
        "reg_norm": ("L2", str, "L1 or L2"),
    },
    "model": {
        "hidden_count": (4, int, "cosine nodes"),
        "period": (2.0, float, "period T; the training domain is [-T/2, T/2]"),
    },
    "target": {
        "name": ("cos-sin", str, "builtin (" + ", ".join(BUILTIN_TARGETS) + ") or an expression in x"),
    },
    "spectrum": {
        "model": ("", str, "model JSON to analyse"),
        "reference": ("", str, "reference target (empty: target.name)"),
        "n_modes": (4, int, "modes to compare"),
    },
    "poisson": {
        "forcing": ("cos(pi*x)", str, "right-hand side f of -u'' = f"),
    },
    "heat": {
        "initial": ("sin(pi*x)", str, "initial condition u(x, 0)"),
        "time_horizon": (4.0, float, "training window [0, time_horizon]"),
        "eval_horizon": (1.0, float, "error grid window [0, eval_horizon]"),
        "time_layers": ("16", str, "hidden widths of the time network, comma separated"),
        "space_samples": (64, int, "collocation points in x"),
        "time_samples": (64, int, "collocation points in t"),
    },
    "baseline": {
        "hidden_layers": ("10", str, "hidden widths of the tanh network, comma separated"),
    },
    "init": {
        "samples": (1_000_000, int, "Monte Carlo draws per row"),
        "m_values": ("0.5, 1.0, 1.5, 2.23606797749979, 3.0", str, "m values to tabulate"),
        "hidden_counts": ("4, 8, 16", str, "N values for the output-weight std columns"),
    },
    "output": {
        "x_min": (-3.0, float, "left end of the comparison range"),
        "x_max": (3.0, float, "right end of the comparison range"),
        "points": (601, int, "points on the comparison range"),
        "grid_points": (101, int, "points per axis of the error grids"),
        "svg": (False, bool, "also write SVG plots"),
    },
}

COMMAND_DEFAULTS = {
    "fit": {},
    "spectrum": {},
    "solve-poisson": {},
    "solve-heat": {("train", "max_iterations"): 3000, ("train", "loss_tolerance"): 1e-14},
    "compare-baseline": {("train", "max_iterations"): 2000},
    "init-stats": {},
}
COMMANDS = tuple(COMMAND_DEFAULTS)

ALIASES = {"target": ("target", "name")}


class ConfigError(ValueError):
    pass


def _parse_value(kind, text: str, where: str):
    text = text.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        return kind(text)
    except ValueError:
        raise ConfigError(f"{where}: cannot read {text!r} as {kind.__name__}") from None


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _resolve_key(key: str):
    if key in ALIASES:
        return ALIASES[key]
    if "." in key:
        section, name = key.split(".", 1)
        if section in DEFAULTS and name in DEFAULTS[section]:
            return section, name
        raise ConfigError(f"unknown setting {key!r}")
    hits = [(s, key) for s in DEFAULTS if key in DEFAULTS[s]]
    if len(hits) != 1:
        raise ConfigError(f"unknown setting {key!r}" if not hits else f"ambiguous setting {key!r}; use section.key")
    return hits[0]


def load_settings(command: str, config_path=None, overrides=(), seed=None, environ=None) -> dict:
    """Merge every settings source into ``{section: {key: value}}``."""
    environ = os.environ if environ is None else environ
    settings = {s: {k: v[0] for k, v in keys.items()} for s, keys in DEFAULTS.items()}
    for (s, k), v in COMMAND_DEFAULTS[command].items():
        settings[s][k] = v
    if environ.get("FNN_SEED", "").strip():
        settings["train"]["seed"] = _parse_value(int, environ["FNN_SEED"], "FNN_SEED")
    if config_path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        with open(config_path) as fh:
            try:
                parser.read_file(fh)
            except configparser.Error as exc:
                raise ConfigError(f"{config_path}: {exc}") from None
        for section in parser.sections():
            if section not in DEFAULTS:
                raise ConfigError(f"{config_path}: unknown section [{section}]")
            for key, text in parser[section].items():
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"{config_path}: unknown key {key!r} in [{section}]")
                settings[section][key] = _parse_value(DEFAULTS[section][key][1], text, f"{section}.{key}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, text = item.split("=", 1)
        section, name = _resolve_key(key.strip())
        settings[section][name] = _parse_value(DEFAULTS[section][name][1], text, key)
    if seed is not None:
        settings["train"]["seed"] = seed
    return settings


def write_settings(settings: dict, path) -> None:
    parser = configparser.ConfigParser(interpolation=None)
    for section, keys in settings.items():
        parser[section] = {k: _format_value(v) for k, v in keys.items()}
    with open(path, "w") as fh:
        parser.write(fh)


def _int_list(text: str, where: str) -> tuple:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise ConfigError(f"{where}: expected positive integers, got {text!r}")
    return values


def _float_list(text: str, where: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated numbers, got {text!r}") from None


# --- run context ------------------------------------------------------------


@dataclass
class Run:
    settings: dict
    out: Path

    def get(self, section, key):
        return self.settings[section][key]

    def train_config(self, **changes) -> TrainConfig:
        values = dict(self.settings["train"])
        values.update(changes)
        return TrainConfig(**values)

    def loss_spec(self) -> LossSpec:
        return LossSpec(period=self.get("model", "period"), **self.settings["loss"])

    def path(self, name) -> Path:
        return self.out / name

    def write_json(self, name, data) -> None:
        self.path(name).write_text(json.dumps(data, indent=2) + "\n")

    def write_csv(self, name, header, rows) -> None:
        with open(self.path(name), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])

    @property
    def svg(self) -> bool:
        return self.get("output", "svg")


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return v


def resolve_target(text: str):
    """Builtin id or expression -> (label, callable)."""
    source = BUILTIN_TARGETS.get(text, text)
    return text, parse_expression(source)


def periodic_extension(f, period: float):
    """f restricted to [-T/2, T/2) and repeated with period T."""
    half = period / 2.0

    def g(x):
        x = np.asarray(x, dtype=np.float64)
        return f(np.mod(x + half, period) - half)

    return g


def _comparison_grid(run: Run) -> np.ndarray:
    lo, hi, n = run.get("output", "x_min"), run.get("output", "x_max"), run.get("output", "points")
    if not (hi > lo and n >= 2):
        raise ConfigError("output range needs x_max > x_min and points >= 2")
    return np.linspace(lo, hi, n)


def _region_error(x, a, b, lo, hi):
    sel = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    return float(np.max(np.abs(a[sel] - b[sel]))) if np.any(sel) else None


def _fourier_estimator(run: Run, config: TrainConfig) -> FourierNetworkRegressor:
    loss = run.settings["loss"]
    return FourierNetworkRegressor(
        hidden_count=run.get("model", "hidden_count"), period=run.get("model", "period"),
        alpha1=loss["alpha1"], alpha2=loss["alpha2"], alpha3=loss["alpha3"], alpha4=loss["alpha4"],
        reg_norm=loss["reg_norm"], optimizer=config.optimizer, max_iterations=config.max_iterations,
        loss_tolerance=config.loss_tolerance, grad_tolerance=config.grad_tolerance,
        learning_rate=config.learning_rate, init_m=config.init_m, n_init=config.n_init,
        random_state=config.seed,
    )


def _training_data(run: Run, config: TrainConfig):
    label, f = resolve_target(run.get("target", "name"))
    period = run.get("model", "period")
    x = sample_training_points(config, (-period / 2, period / 2))
    return label, f, x, f(x)


# --- commands ---------------------------------------------------------------


def cmd_fit(run: Run) -> dict:
    config = run.train_config()
    run.loss_spec()
    label, f, x, y = _training_data(run, config)
    est = _fourier_estimator(run, config).fit(x[:, None], y)
    period = run.get("model", "period")
    save_model(est.params_, run.path("model.json"))
    est.report_.write_json(run.path("report.json"))
    est.report_.write_history_csv(run.path("loss.csv"))

    grid = _comparison_grid(run)
    target = periodic_extension(f, period)(grid)
    fnn = est.predict(grid[:, None])
    run.write_csv("comparison.csv", ["x", "target", "fnn"], zip(grid, target, fnn))
    spectrum = est.spectrum(run.get("spectrum", "n_modes"))
    write_spectrum_csv(spectrum, run.path("spectrum.csv"))
    if run.svg:
        line_plot(run.path("comparison.svg"), grid, {"target": target, "fnn": fnn}, title=label)
        line_plot(run.path("loss.svg"), np.arange(len(est.loss_curve_)), {"loss": est.loss_curve_},
                  title="loss", log_y=True)
    half = period / 2
    return {
        "target": label,
        "final_loss": est.loss_,
        "iterations_run": est.n_iter_,
        "converged": est.report_.converged,
        "init_seed": est.report_.init_seed,
        "max_error_train": _region_error(grid, fnn, target, -half, half),
        "max_error_extrapolation": _region_error(grid, fnn, target, half, half + period),
        "params": est.params_.normalized().to_dict(),
    }


def _compare_rows(fnn: FourierSpectrum, ref: FourierSpectrum):
    err = spectrum_error(fnn, ref)
    rows = [(0, "a0/2", fnn.constant, ref.constant, err.constant)]
    for n in range(1, min(fnn.n_modes, ref.n_modes) + 1):
        rows.append((n, "a", fnn.a[n - 1], ref.a[n - 1], err.a[n - 1]))
        rows.append((n, "b", fnn.b[n - 1], ref.b[n - 1], err.b[n - 1]))
    return rows, err


def cmd_spectrum(run: Run) -> dict:
    path = run.get("spectrum", "model")
    if not path:
        raise ConfigError("spectrum needs spectrum.model=<model JSON>")
    params = load_model(path)
    if not isinstance(params, FourierNetworkParams):
        raise ConfigError(f"{path}: spectrum needs a Fourier network model")
    period = run.get("model", "period")
    if not math.isclose(params.period, period, rel_tol=1e-12):
        raise ConfigError(f"period mismatch: model has {params.period}, settings have {period}")
    n_modes = run.get("spectrum", "n_modes")
    if n_modes < 1:
        raise ConfigError("spectrum.n_modes must be >= 1")
    label, f = resolve_target(run.get("spectrum", "reference") or run.get("target", "name"))
    fnn = extract_spectrum(params, n_modes)
    ref = quadrature_coefficients(periodic_extension(f, period), n_modes, period)
    write_spectrum_csv(fnn, run.path("spectrum.csv"))
    write_spectrum_csv(ref, run.path("reference_spectrum.csv"))
    rows, err = _compare_rows(fnn, ref)
    run.write_csv("spectrum_compare.csv", ["n", "coeff", "fnn_coeff", "fourier_coeff", "abs_error"], rows)
    return {"reference": label, "n_modes": n_modes, "max_abs_error": err.max}


def _poisson_reference(forcing, period, n_modes=64):
    """Zero-mean periodic solution of -u'' = f from the forcing's Fourier series."""
    fs = quadrature_coefficients(forcing, n_modes, period, grid_size=16 * n_modes + 1)
    k2 = (2.0 * math.pi / period * np.arange(1, n_modes + 1)) ** 2
    return FourierSpectrum(0.0, fs.a / k2, fs.b / k2, period)


def _heat_reference(initial, period, n_modes=64):
    fs = quadrature_coefficients(initial, n_modes, period, grid_size=16 * n_modes + 1)
    k2 = (2.0 * math.pi / period * np.arange(1, n_modes + 1)) ** 2
    omega = 2.0 * math.pi / period

    def u(x, t):
        x = np.asarray(x, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        decay = np.exp(-np.multiply.outer(t, k2))  # (len t, modes)
        arg = omega * np.multiply.outer(x, np.arange(1, n_modes + 1))
        return fs.constant + (np.cos(arg) * fs.a) @ decay.T + (np.sin(arg) * fs.b) @ decay.T

    return u


def cmd_solve_poisson(run: Run) -> dict:
    config = run.train_config()
    period = run.get("model", "period")
    forcing = parse_expression(run.get("poisson", "forcing"))
    problem = PdeProblem("poisson", forcing=forcing, domain=(-period / 2, period / 2))
    params, report = solve_poisson(problem, run.get("model", "hidden_count"), run.loss_spec(), config)
    save_model(params, run.path("model.json"))
    report.write_json(run.path("report.json"))
    report.write_history_csv(run.path("loss.csv"))
    x = np.linspace(-period / 2, period / 2, run.get("output", "grid_points"))
    exact = evaluate_series(_poisson_reference(forcing, period), x)
    grid = error_grid(fnn_forward(params, x), exact)
    write_poisson_csv(run.path("poisson_grid.csv"), x, grid)
    if run.svg:
        line_plot(run.path("poisson.svg"), x, {"fnn": grid.approx, "exact": grid.exact}, title="Poisson")
    k = int(np.argmax(np.abs(params.lam)))
    return {
        "forcing": run.get("poisson", "forcing"),
        "sup_error": grid.sup_error,
        "l2_error": grid.l2_error,
        "final_loss": report.final_loss,
        "iterations_run": report.iterations_run,
        "dominant_w": float(params.w[k]),
        "dominant_lambda": float(params.lam[k]),
        "params": params.to_dict(),
    }


def cmd_solve_heat(run: Run) -> dict:
    config = run.train_config()
    period = run.get("model", "period")
    initial = parse_expression(run.get("heat", "initial"))
    horizon = run.get("heat", "time_horizon")
    eval_horizon = run.get("heat", "eval_horizon")
    if not 0 < eval_horizon <= horizon:
        raise ConfigError("heat.eval_horizon must lie in (0, time_horizon]")
    problem = PdeProblem("heat", initial_condition=initial, domain=(-period / 2, period / 2),
                         time_horizon=horizon)
    layers = _int_list(run.get("heat", "time_layers"), "heat.time_layers")
    sol, report = solve_heat(problem, run.get("model", "hidden_count"), layers, run.loss_spec(), config,
                             run.get("heat", "space_samples"), run.get("heat", "time_samples"))
    save_model(sol.space, run.path("space_model.json"))
    save_model(sol.time, run.path("time_model.json"))
    report.write_json(run.path("report.json"))
    report.write_history_csv(run.path("loss.csv"))
    n = run.get("output", "grid_points")
    x = np.linspace(-period / 2, period / 2, n)
    t = np.linspace(0.0, eval_horizon, n)
    t_full = np.linspace(0.0, horizon, n)
    exact = _heat_reference(initial, period)
    grid = error_grid(sol(x, t), exact(x, t))
    full = error_grid(sol(x, t_full), exact(x, t_full))
    write_heat_csv(run.path("heat_grid.csv"), x, t, grid)
    if run.svg:
        line_plot(run.path("heat_time.svg"), t_full,
                  {"T(t)": dense_forward(sol.time, t_full), "exp(-pi^2 t)": np.exp(-math.pi**2 * t_full)},
                  title="time factor")
    return {
        "initial": run.get("heat", "initial"),
        "sup_error": grid.sup_error,
        "l2_error": grid.l2_error,
        "eval_horizon": eval_horizon,
        "sup_error_full_horizon": full.sup_error,
        "time_horizon": horizon,
        "final_loss": report.final_loss,
        "iterations_run": report.iterations_run,
    }


def cmd_compare_baseline(run: Run) -> dict:
    config = run.train_config()
    run.loss_spec()
    label, f, x, y = _training_data(run, config)
    period = run.get("model", "period")
    fnn = _fourier_estimator(run, config).fit(x[:, None], y)
    layers = _int_list(run.get("baseline", "hidden_layers"), "baseline.hidden_layers")
    tanh = TanhNetworkRegressor(
        hidden_layer_sizes=layers, alpha=run.get("loss", "alpha1"), reg_norm=run.get("loss", "reg_norm"),
        optimizer=config.optimizer, max_iterations=config.max_iterations,
        loss_tolerance=config.loss_tolerance, grad_tolerance=config.grad_tolerance,
        learning_rate=config.learning_rate, n_init=config.n_init, random_state=config.seed,
    ).fit(x[:, None], y)
    save_model(fnn.params_, run.path("fnn_model.json"))
    save_model(tanh.params_, run.path("tanh_model.json"))
    a, b = fnn.loss_curve_, tanh.loss_curve_
    rows = [(i, a[i] if i < len(a) else None, b[i] if i < len(b) else None) for i in range(max(len(a), len(b)))]
    run.write_csv("loss.csv", ["iteration", "fnn", "tanh"], rows)
    grid = _comparison_grid(run)
    target = periodic_extension(f, period)(grid)
    pf, pt = fnn.predict(grid[:, None]), tanh.predict(grid[:, None])
    run.write_csv("extrapolation.csv", ["x", "target", "fnn", "tanh"], zip(grid, target, pf, pt))
    if run.svg:
        line_plot(run.path("extrapolation.svg"), grid, {"target": target, "fnn": pf, "tanh": pt}, title=label)
        it = np.arange(len(rows))
        line_plot(run.path("loss.svg"), it,
                  {"fnn": [r[1] if r[1] is not None else np.nan for r in rows],
                   "tanh": [r[2] if r[2] is not None else np.nan for r in rows]},
                  title="loss", log_y=True)
    half = period / 2
    return {
        "target": label,
        "fnn_final_loss": fnn.loss_,
        "tanh_final_loss": tanh.loss_,
        "fnn_iterations": fnn.n_iter_,
        "tanh_iterations": tanh.n_iter_,
        "fnn_max_error_train": _region_error(grid, pf, target, -half, half),
        "tanh_max_error_train": _region_error(grid, pt, target, -half, half),
        "fnn_max_error_extrapolation": _region_error(grid, pf, target, half, half + period),
        "tanh_max_error_extrapolation": _region_error(grid, pt, target, half, half + period),
    }


def cmd_init_stats(run: Run) -> dict:
    samples = run.get("init", "samples")
    seed = run.get("train", "seed")
    ms = _float_list(run.get("init", "m_values"), "init.m_values")
    counts = _int_list(run.get("init", "hidden_counts"), "init.hidden_counts")
    root = solve_variance_match(1.0 / 3.0)
    header = ["row", "m", "hidden_mean", "hidden_second_moment", "hidden_variance",
              "mc_mean", "mc_mean_se", "mc_variance", "mc_variance_se"] + [f"v_n{n}" for n in counts]
    rows = []
    worst = 0.0
    for label, m in [("grid", m) for m in ms] + [("root", root)]:
        if not m > 0:
            raise ConfigError(f"init.m_values must be positive, got {m}")
        mc = monte_carlo_moments(m, samples, seed)
        mean, var = hidden_mean(m), hidden_variance(m)
        worst = max(worst, abs(mc.mean - mean) / mc.mean_se, abs(mc.variance - var) / mc.variance_se)
        rows.append([label, m, mean, hidden_second_moment(m), var, mc.mean, mc.mean_se, mc.variance,
                     mc.variance_se] + [output_weight_std(m, n) for n in counts])
    run.write_csv("init_stats.csv", header, rows)
    return {
        "variance_match_root": root,
        "variance_at_sqrt5": hidden_variance(DEFAULT_INIT_M),
        "samples": samples,
        "max_standard_errors": worst,
    }


HANDLERS = {
    "fit": cmd_fit,
    "spectrum": cmd_spectrum,
    "solve-poisson": cmd_solve_poisson,
    "solve-heat": cmd_solve_heat,
    "compare-baseline": cmd_compare_baseline,
    "init-stats": cmd_init_stats,
}


def _defaults_help() -> str:
    lines = ["settings (section.key, default):"]
    for section, keys in DEFAULTS.items():
        for key, (default, _, text) in keys.items():
            lines.append(f"  {section}.{key} = {_format_value(default)}    {text}")
    lines.append("per-command defaults:")
    for cmd, changes in COMMAND_DEFAULTS.items():
        for (s, k), v in changes.items():
            lines.append(f"  {cmd}: {s}.{k} = {_format_value(v)}")
    lines.append("bare keys work when unique; 'target=...' sets target.name")
    lines.append("exit codes: 0 ok, 1 config error, 2 divergence, 3 I/O error")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are configuration errors; argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fnn", description="Fourier neural networks: fitting, spectra and periodic PDE solvers.",
        epilog=_defaults_help(), formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="INI settings file")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", default="fnn_output", help="output directory (default: fnn_output)")
    parser.add_argument("overrides", nargs="*", metavar="key=value")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    try:
        settings = load_settings(args.command, args.config, args.overrides, args.seed)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        run = Run(settings, out)
        write_settings(settings, run.path("config.ini"))
        summary = HANDLERS[args.command](run)
        run.write_json("summary.json", {"command": args.command, **summary})
    except DivergenceError as exc:
        print(f"fnn: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"fnn: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, ParseError) as exc:
        print(f"fnn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps({k: v for k, v in summary.items() if k != "params"}, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
