import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fnn.fourier import (
    FourierSpectrum,
    NonIntegerFrequencyWarning,
    analytic_spectrum,
    evaluate_series,
    extract_spectrum,
    params_from_spectrum,
    quadrature_coefficients,
    read_spectrum_csv,
    reduced_form,
    spectrum_error,
    write_spectrum_csv,
)
from fnn.model import FourierNetworkParams, fnn_forward

# trained 8cos(4 pi x) + sin(2 pi x) + sin(pi x) network with L2 regularization
TABLE3 = FourierNetworkParams(
    [1.00000000, 5.40604942e-06, 4.00000000, -2.00000000],
    [1.57079627, 1.01888743e01, -9.14402304e-10, 4.71238899],
    [-9.99999993e-01, 3.34351764e-06, 7.99999983, -9.99999984e-01],
    2.41330937e-06,
)
# trained x**2 and |x| networks
TABLE5 = FourierNetworkParams(
    [0.99995578, 2.99892898, 3.99604127, -1.99965386],
    [-0.00477923, -3.139197051, 0.01794715, 0.00445702],
    [-0.40479907, 0.04915202, 0.02874206, 0.10497063],
    0.335023246,
)
TABLE6 = FourierNetworkParams(
    [0.99995402, 2.98845687, 2.99445216, -1.99075052],
    [-2.44738021e-03, -1.68031025e-01, -6.78306499e-02, -9.45244148],
    [-0.40420162, 0.03295792, -0.07711458, -0.00391551],
    0.502531,
)


def test_quadrature_matches_analytic_series():
    for name, f in (("x-squared", lambda x: x**2), ("abs-x", np.abs),
                    ("cos-sin", lambda x: np.cos(np.pi * x) + np.sin(np.pi * x)),
                    ("multi-freq", lambda x: 8 * np.cos(4 * np.pi * x) + np.sin(2 * np.pi * x) + np.sin(np.pi * x))):
        err = spectrum_error(quadrature_coefficients(f, 6), analytic_spectrum(name, 6))
        assert err.max < 1e-9, name


def test_abs_x_series_values():
    s = analytic_spectrum("abs-x", 4)
    assert s.constant == 0.5
    assert s.a[0] == pytest.approx(-4 / math.pi**2)
    assert s.a[1] == 0.0 and s.a[3] == 0.0
    assert s.a[2] == pytest.approx(-4 / (9 * math.pi**2))


def test_quadrature_grid_checks():
    with pytest.raises(ValueError):
        quadrature_coefficients(np.cos, 100, grid_size=101)
    even = quadrature_coefficients(lambda x: x**2, 3, grid_size=1000)
    assert spectrum_error(even, analytic_spectrum("x-squared", 3)).max < 1e-9


def test_quadrature_general_period():
    f = lambda x: 2 + 3 * np.cos(2 * np.pi * x / 5) - np.sin(4 * np.pi * x / 5)  # noqa: E731
    s = quadrature_coefficients(f, 3, period=5.0)
    assert s.constant == pytest.approx(2.0)
    assert np.allclose(s.a, [3, 0, 0], atol=1e-12) and np.allclose(s.b, [0, -1, 0], atol=1e-12)


def test_reduced_form_conventions():
    s = FourierSpectrum(0.0, [1.0, 0.0, -1.0, 0.0], [1.0, 0.0, 0.0, -2.0])
    r = reduced_form(s)
    assert r.c[0] == pytest.approx(math.sqrt(2)) and r.psi[0] == pytest.approx(-math.pi / 4)
    assert r.c[1] == 0 and r.psi[1] == 0
    assert r.psi[2] == pytest.approx(math.pi)
    assert r.psi[3] == pytest.approx(math.pi / 2)
    back = r.to_spectrum()
    assert np.allclose(back.a, s.a) and np.allclose(back.b, s.b)


spectra = st.builds(
    lambda a0, a, b: FourierSpectrum(a0, a, b),
    st.floats(-5, 5),
    arrays(np.float64, 5, elements=st.floats(-5, 5)),
    arrays(np.float64, 5, elements=st.floats(-5, 5)),
)


@settings(max_examples=60)
@given(spectra)
def test_spectrum_round_trip_through_network(s):
    back = extract_spectrum(params_from_spectrum(s), 5, amp_tol=0.0)
    assert spectrum_error(back, s).max < 1e-12


@settings(max_examples=30)
@given(spectra)
def test_network_from_spectrum_evaluates_the_series(s):
    x = np.linspace(-1, 1, 33)
    assert np.allclose(fnn_forward(params_from_spectrum(s), x), evaluate_series(s, x), atol=1e-10)


def test_empty_spectrum_to_params():
    p = params_from_spectrum(FourierSpectrum(1.0, [0.0], [0.0]))
    assert fnn_forward(p, 0.3) == 0.5


def test_table3_extraction():
    s = extract_spectrum(TABLE3, 4)
    assert s.b[0] == pytest.approx(1.0, abs=1e-6)
    assert s.b[1] == pytest.approx(1.0, abs=1e-6)
    assert s.a[3] == pytest.approx(8.0, abs=1e-6)
    assert spectrum_error(s, analytic_spectrum("multi-freq", 4)).max < 1e-5


def test_table5_and_table6_are_third_order():
    assert spectrum_error(extract_spectrum(TABLE5, 4), analytic_spectrum("x-squared", 4)).max <= 5e-3
    assert spectrum_error(extract_spectrum(TABLE6, 4), quadrature_coefficients(np.abs, 4)).max <= 1e-2


def test_duplicate_frequency_nodes_are_summed():
    p = FourierNetworkParams([3.0, 3.0], [0.0, 0.0], [0.25, 0.5])
    assert extract_spectrum(p, 3).a[2] == pytest.approx(0.75)


def test_small_and_zero_frequency_nodes_join_the_constant():
    p = FourierNetworkParams([0.0, 2.7, 1.0], [0.0, 0.3, 0.0], [0.5, 1e-5, 1.0], 0.25)
    s = extract_spectrum(p, 2)
    assert s.constant == pytest.approx(0.75 + 1e-5 * math.cos(0.3))
    assert s.a[0] == 1.0


def test_off_grid_nodes_warn_and_are_skipped():
    p = FourierNetworkParams([1.5, 1.0], [0.0, 0.0], [1.0, 2.0])
    with pytest.warns(NonIntegerFrequencyWarning):
        s = extract_spectrum(p, 2)
    assert s.a[0] == 2.0 and s.a[1] == 0.0


def test_high_modes_dropped_without_warning():
    p = FourierNetworkParams([5.0], [0.0], [1.0])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        s = extract_spectrum(p, 3)
    assert np.all(s.a == 0)


def test_spectrum_error_period_mismatch():
    with pytest.raises(ValueError):
        spectrum_error(FourierSpectrum(0, [1], [0], 2.0), FourierSpectrum(0, [1], [0], 4.0))


def test_spectrum_validation_and_truncation():
    with pytest.raises(ValueError):
        FourierSpectrum(0, [1, 2], [1])
    with pytest.raises(ValueError):
        FourierSpectrum(float("nan"), [1], [1])
    s = FourierSpectrum(1.0, [1, 2, 3], [4, 5, 6]).truncated(5)
    assert s.n_modes == 5 and s.a[4] == 0 and s.b[2] == 6


def test_csv_round_trip(tmp_path):
    s = analytic_spectrum("x-squared", 4)
    text = write_spectrum_csv(s, tmp_path / "s.csv")
    lines = text.splitlines()
    assert lines[0] == "n,a_n,b_n,c_n,psi_n"
    assert lines[1].startswith("0,")
    assert len(lines) == 6
    back = read_spectrum_csv(tmp_path / "s.csv")
    assert spectrum_error(back, s).max == 0.0
    (tmp_path / "bad.csv").write_text("x,y\n1,2\n")
    with pytest.raises(ValueError):
        read_spectrum_csv(tmp_path / "bad.csv")
