import math

import numpy as np
import pytest

from fnn.model import DenseNetworkParams, FourierNetworkParams, fnn_forward
from fnn.objective import (
    DenseFitObjective,
    FourierFitObjective,
    FrozenBlockObjective,
    HeatObjective,
    LossSpec,
    PdeResidualObjective,
    approximation_loss,
    approximation_terms,
    dense_fit_loss,
    dense_param_gradient,
    fnn_param_gradient,
    heat_composite_loss,
    heat_composite_terms,
    pde_residual_loss,
    pde_residual_terms,
    period_mean,
    regularization,
)

rng = np.random.default_rng(0)
X = rng.uniform(-1, 1, 24)


def random_params(n=4, seed=0):
    r = np.random.default_rng(seed)
    return FourierNetworkParams(r.normal(size=n), r.normal(size=n), r.normal(size=n), r.normal())


def test_default_coefficients():
    s = LossSpec()
    assert (s.alpha1, s.alpha2) == (1e-5, 1e-5)
    assert (s.alpha3, s.alpha4, s.alpha5, s.alpha6) == (1.0, 1.0, 1.0, 1.0)
    assert s.reg_norm == "L2" and s.mode == "approximation"


@pytest.mark.parametrize("kwargs", [{"alpha1": -1.0}, {"alpha3": float("nan")}, {"reg_norm": "L3"},
                                    {"period": 0.0}, {"mode": "other"}])
def test_loss_spec_validation(kwargs):
    with pytest.raises(ValueError):
        LossSpec(**kwargs)


def test_exact_fit_with_integer_frequencies_has_only_regularization():
    p = FourierNetworkParams([1.0], [-math.pi / 4], [math.sqrt(2)])
    y = np.cos(np.pi * X) + np.sin(np.pi * X)
    terms = approximation_terms(p, X, y, LossSpec())
    assert terms["data"] < 1e-28
    assert terms["periodic_plus"] < 1e-28 and terms["periodic_minus"] < 1e-28
    assert terms["reg_lambda"] == pytest.approx(1e-5 * 2.0)
    assert terms["reg_w"] == pytest.approx(1e-5)


def test_periodicity_null_space_on_integer_frequencies():
    for seed in range(10):
        r = np.random.default_rng(seed)
        w = r.integers(-6, 7, size=5).astype(float)
        p = FourierNetworkParams(w, r.normal(size=5), r.normal(size=5), r.normal())
        t = approximation_terms(p, X, fnn_forward(p, X), LossSpec(alpha1=0, alpha2=0))
        assert t["periodic_plus"] < 1e-24 and t["periodic_minus"] < 1e-24
        assert sum(t.values()) < 1e-24


def test_periodicity_penalty_positive_off_integers():
    p = FourierNetworkParams([1.3], [0.0], [1.0])
    t = approximation_terms(p, X, fnn_forward(p, X), LossSpec())
    assert t["periodic_plus"] > 1e-3 and t["periodic_minus"] > 1e-3


def test_regularization_norms():
    p = FourierNetworkParams([1.0, -2.0], [0.0, 0.0], [3.0, -4.0])
    assert regularization(p, "L2") == (25.0, 5.0)
    assert regularization(p, "L1") == (7.0, 3.0)
    with pytest.raises(ValueError):
        regularization(p, "L0")


def test_data_term_is_a_mean():
    p = FourierNetworkParams([1.0], [0.0], [1.0])
    spec = LossSpec(alpha1=0, alpha2=0, alpha3=0, alpha4=0)
    one = approximation_loss(p, X, fnn_forward(p, X) + 0.1, spec)
    two = approximation_loss(p, np.tile(X, 2), np.tile(fnn_forward(p, X) + 0.1, 2), spec)
    assert one == pytest.approx(0.01) and two == pytest.approx(one)


def test_mode_mismatch_rejected():
    p = random_params()
    with pytest.raises(ValueError):
        approximation_terms(p, X, X, LossSpec(mode="pde_residual"))
    with pytest.raises(ValueError):
        pde_residual_terms(p, X, np.cos, spec=LossSpec())
    with pytest.raises(ValueError):
        pde_residual_terms(p, X, np.cos, operator="laplacian", spec=LossSpec(mode="pde_residual"))
    with pytest.raises(ValueError):
        approximation_terms(p, X, X[:-1], LossSpec())


def test_period_mean_exact_and_gradient(fd):
    p = random_params(3, seed=2)
    x = np.linspace(-1, 1, 20001)
    value, grad = period_mean(p)
    assert value == pytest.approx(np.trapezoid(fnn_forward(p, x), x) / 2, abs=1e-8)
    num = fd(lambda th: period_mean(FourierNetworkParams.from_vector(th))[0], p.to_vector())
    assert np.allclose(grad, num, atol=1e-8)
    zero_w = FourierNetworkParams([0.0, 1e-6], [0.3, 0.0], [2.0, 1.0], 0.5)
    assert period_mean(zero_w)[0] == pytest.approx(0.5 + 2 * math.cos(0.3) + 1.0, abs=1e-9)


def test_poisson_exact_solution_has_zero_loss():
    p = FourierNetworkParams([1.0], [0.0], [1 / math.pi**2])
    spec = LossSpec(alpha1=0, alpha2=0, mode="pde_residual")
    terms = pde_residual_terms(p, X, lambda x: np.cos(np.pi * x), spec=spec)
    assert terms["residual"] < 1e-28 and terms["gauge"] < 1e-28
    shifted = FourierNetworkParams([1.0], [0.0], [1 / math.pi**2], 0.1)
    assert pde_residual_terms(shifted, X, lambda x: np.cos(np.pi * x), spec=spec)["gauge"] == pytest.approx(0.01)
    assert pde_residual_loss(p, X, np.cos(np.pi * X), spec=spec) < 1e-28


def exact_time_net():
    # T(t) = exp(-pi^2 t) is not a tanh net, so use a large-ish residual check instead
    return DenseNetworkParams([np.array([[0.5]]), np.array([[2.0]])], [np.array([0.1]), np.array([0.3])])


def test_heat_terms_by_hand():
    space = FourierNetworkParams([1.0], [-math.pi / 2], [1.0])  # sin(pi x)
    time = exact_time_net()
    t = np.array([0.0, 0.5, 1.0])
    spec = LossSpec(alpha1=0, alpha2=0, mode="heat_composite")
    terms = heat_composite_terms(space, time, X, t, lambda x: np.sin(np.pi * x), spec)
    T = 0.3 + 2.0 * np.tanh(0.5 * t + 0.1)
    Tp = 2.0 * 0.5 / np.cosh(0.5 * t + 0.1) ** 2
    Xv = np.sin(np.pi * X)
    R = np.outer(Xv, Tp) + math.pi**2 * np.outer(Xv, T)
    assert terms["residual"] == pytest.approx(np.mean(R**2))
    assert terms["initial"] == pytest.approx(np.mean((Xv * T[0] - Xv) ** 2))
    assert heat_composite_loss(space, time, X, t, np.sin(np.pi * X), spec) == pytest.approx(sum(terms.values()))


def test_dense_loss_has_no_bias_regularization():
    p = DenseNetworkParams([np.array([[1.0]]), np.array([[2.0]])], [np.array([5.0]), np.array([7.0])])
    spec = LossSpec(alpha1=0.1)
    y = np.zeros_like(X)
    pred = 7.0 + 2.0 * np.tanh(X + 5.0)
    assert dense_fit_loss(p, X, y, spec) == pytest.approx(np.mean(pred**2) + 0.1 * 5.0)


@pytest.mark.parametrize("norm", ["L1", "L2"])
def test_gradients_match_finite_differences(norm, fd):
    spec = LossSpec(alpha1=0.3, alpha2=0.2, alpha3=0.7, alpha4=0.5, alpha5=0.9, alpha6=0.4, reg_norm=norm)
    theta = random_params(4, seed=5).to_vector()
    y = np.cos(np.pi * X)
    objectives = [
        FourierFitObjective(X, y, spec),
        PdeResidualObjective(X, lambda x: np.cos(np.pi * x), spec),
    ]
    for obj in objectives:
        f, g = obj.value_and_grad(theta)
        assert f == pytest.approx(obj.value(theta))
        assert np.allclose(g, fd(obj.value, theta), rtol=1e-6, atol=1e-7)
    tmpl = DenseNetworkParams.zeros((1, 4, 1))
    dense_theta = np.random.default_rng(6).normal(size=tmpl.size)
    obj = DenseFitObjective(X, y, spec, tmpl)
    assert np.allclose(obj.value_and_grad(dense_theta)[1], fd(obj.value, dense_theta), rtol=1e-6, atol=1e-7)
    heat = HeatObjective(X, np.linspace(0, 1, 6), np.sin, spec, 4, tmpl)
    full = np.concatenate([theta, dense_theta])
    assert np.allclose(heat.value_and_grad(full)[1], fd(heat.value, full), rtol=1e-6, atol=1e-6)


def test_param_gradient_helpers_are_shaped_like_params():
    p = random_params()
    spec = LossSpec()
    g = fnn_param_gradient(p, X, np.cos(X), spec)
    assert isinstance(g, FourierNetworkParams) and g.hidden_count == 4
    d = DenseNetworkParams.zeros((1, 3, 1))
    gd = dense_param_gradient(d, X, np.cos(X), spec)
    assert gd.layer_sizes == d.layer_sizes


def test_frozen_block_objective():
    tmpl = DenseNetworkParams.zeros((1, 3, 1))
    heat = HeatObjective(X, np.linspace(0, 1, 5), np.sin, LossSpec(), 2, tmpl)
    full = np.random.default_rng(2).normal(size=7 + tmpl.size)
    frozen = FrozenBlockObjective(heat, full, slice(7, None))
    sub = full[7:] + 0.1
    f, g = frozen.value_and_grad(sub)
    joined = full.copy()
    joined[7:] = sub
    f_full, g_full = heat.value_and_grad(joined)
    assert f == f_full and np.array_equal(g, g_full[7:])
    space, time = frozen.unpack(sub)
    assert np.array_equal(space.to_vector(), full[:7])
    assert np.array_equal(frozen.pack((space, time)), sub)
