"""Fourier neural networks: shallow cosine networks whose trained weights read
as Fourier coefficients, with periodic Poisson and heat solvers."""

from .estimators import FourierNetworkRegressor, TanhNetworkRegressor
from .expression import ParseError, parse_expression
from .fourier import (
    FourierSpectrum,
    analytic_spectrum,
    extract_spectrum,
    params_from_spectrum,
    quadrature_coefficients,
    reduced_form,
    spectrum_error,
)
from .mathstats import hidden_mean, hidden_variance, output_weight_std, solve_variance_match
from .model import DenseNetworkParams, FourierNetworkParams, fnn_forward, load_model, save_model
from .objective import LossSpec
from .optimize import DivergenceError, TrainConfig, TrainReport, train, train_restarts
from .pde import HeatSolution, PdeProblem, solve_heat, solve_poisson

__version__ = "0.1.0"

__all__ = [
    "FourierNetworkRegressor",
    "TanhNetworkRegressor",
    "ParseError",
    "parse_expression",
    "FourierSpectrum",
    "analytic_spectrum",
    "extract_spectrum",
    "params_from_spectrum",
    "quadrature_coefficients",
    "reduced_form",
    "spectrum_error",
    "hidden_mean",
    "hidden_variance",
    "output_weight_std",
    "solve_variance_match",
    "DenseNetworkParams",
    "FourierNetworkParams",
    "fnn_forward",
    "load_model",
    "save_model",
    "LossSpec",
    "DivergenceError",
    "TrainConfig",
    "TrainReport",
    "train",
    "train_restarts",
    "HeatSolution",
    "PdeProblem",
    "solve_heat",
    "solve_poisson",
]
