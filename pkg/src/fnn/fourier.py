"""Fourier analysis helpers: reference coefficients, the amplitude/phase form,
and reading a spectrum off trained network weights."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .model import FourierNetworkParams, wrap_phase

__all__ = [
    "FourierSpectrum",
    "ReducedSpectrum",
    "SpectrumError",
    "NonIntegerFrequencyWarning",
    "quadrature_coefficients",
    "reduced_form",
    "extract_spectrum",
    "params_from_spectrum",
    "spectrum_error",
    "evaluate_series",
    "analytic_spectrum",
    "write_spectrum_csv",
    "read_spectrum_csv",
]


class NonIntegerFrequencyWarning(UserWarning):
    """A node with a significant amplitude sits away from every integer frequency."""


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Truncated series a0/2 + sum_n a_n cos(n w x) + b_n sin(n w x), w = 2 pi / T.

    ``a[n-1]`` and ``b[n-1]`` hold mode ``n``.
    """

    a0: float
    a: np.ndarray
    b: np.ndarray
    period: float = 2.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64).reshape(-1)
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        if a.shape != b.shape:
            raise ValueError("a and b must have the same length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and math.isfinite(self.a0)):
            raise ValueError("non-finite Fourier coefficients")
        if not self.period > 0:
            raise ValueError("period must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "period", float(self.period))

    @property
    def n_modes(self) -> int:
        return self.a.size

    @property
    def constant(self) -> float:
        return 0.5 * self.a0

    def truncated(self, n_modes: int) -> "FourierSpectrum":
        a = np.zeros(n_modes)
        b = np.zeros(n_modes)
        k = min(n_modes, self.n_modes)
        a[:k], b[:k] = self.a[:k], self.b[:k]
        return FourierSpectrum(self.a0, a, b, self.period)

    def to_dict(self) -> dict:
        return {"period": self.period, "a0": self.a0, "a": self.a.tolist(), "b": self.b.tolist()}


@dataclass(frozen=True, eq=False)
class ReducedSpectrum:
    """Amplitude/phase form a0/2 + sum_n c_n cos(n w x + psi_n)."""

    c: np.ndarray
    psi: np.ndarray
    a0: float
    period: float = 2.0

    def to_spectrum(self) -> FourierSpectrum:
        c = np.asarray(self.c, dtype=np.float64)
        psi = np.asarray(self.psi, dtype=np.float64)
        return FourierSpectrum(self.a0, c * np.cos(psi), -c * np.sin(psi), self.period)


@dataclass(frozen=True)
class SpectrumError:
    """Absolute coefficient differences; ``constant`` compares the a0/2 terms."""

    constant: float
    a: np.ndarray
    b: np.ndarray

    @property
    def max(self) -> float:
        return float(max(self.constant, np.max(self.a, initial=0.0), np.max(self.b, initial=0.0)))


def quadrature_coefficients(f: Callable, n_modes: int, period: float = 2.0,
                            grid_size: int = 4097) -> FourierSpectrum:
    """Coefficients (2/T) * integral of f cos(n w x) and f sin(n w x) over one period.

    Composite Simpson on a uniform grid over [-T/2, T/2].
    """
    if n_modes < 0:
        raise ValueError("n_modes must be nonnegative")
    if grid_size < max(8 * n_modes, 3):
        raise ValueError(
            f"grid_size {grid_size} too coarse for {n_modes} modes (need >= {8 * n_modes})"
        )
    if grid_size % 2 == 0:
        grid_size += 1
    x = np.linspace(-period / 2, period / 2, grid_size)
    fx = np.broadcast_to(np.asarray(f(x), dtype=np.float64), x.shape)
    omega = 2.0 * math.pi / period
    scale = 2.0 / period
    a0 = scale * simpson(fx, x=x)
    n = np.arange(1, n_modes + 1)
    arg = omega * np.multiply.outer(n, x)
    a = scale * simpson(fx * np.cos(arg), x=x, axis=1)
    b = scale * simpson(fx * np.sin(arg), x=x, axis=1)
    return FourierSpectrum(a0, a, b, period)


def reduced_form(spectrum: FourierSpectrum) -> ReducedSpectrum:
    """c_n = sqrt(a_n**2 + b_n**2), psi_n = atan2(-b_n, a_n) in (-pi, pi]; psi = 0 where c = 0."""
    c = np.hypot(spectrum.a, spectrum.b)
    psi = np.where(c == 0.0, 0.0, np.arctan2(-spectrum.b, spectrum.a))
    psi = np.where(psi == -math.pi, math.pi, psi)
    return ReducedSpectrum(c, psi, spectrum.a0, spectrum.period)


def extract_spectrum(params: FourierNetworkParams, n_modes: int, freq_tol: float = 0.05,
                     amp_tol: float = 1e-3) -> FourierSpectrum:
    """Read Fourier coefficients off the network weights.

    Nodes with |lam| >= amp_tol and a frequency within ``freq_tol`` of an
    integer n >= 1 add their phasor to mode n; nodes at n = 0 and nodes below
    ``amp_tol`` add lam * cos(phi) to the constant. Significant nodes far
    from an integer are skipped with a :class:`NonIntegerFrequencyWarning`;
    modes above ``n_modes`` are dropped.
    """
    p = params.normalized()
    a = np.zeros(n_modes)
    b = np.zeros(n_modes)
    constant = p.phi0
    off_grid = []
    for w, phi, lam in zip(p.w, p.phi, p.lam):
        n = int(round(w))
        if abs(lam) < amp_tol or (n == 0 and abs(w) <= freq_tol):
            constant += lam * math.cos(phi)
        elif abs(w - n) > freq_tol:
            off_grid.append(w)
        elif n <= n_modes:
            a[n - 1] += lam * math.cos(phi)
            b[n - 1] -= lam * math.sin(phi)
    if off_grid:
        warnings.warn(
            f"significant nodes at non-integer frequencies {np.round(off_grid, 4).tolist()} "
            f"were left out of the spectrum",
            NonIntegerFrequencyWarning,
            stacklevel=2,
        )
    return FourierSpectrum(2.0 * constant, a, b, p.period)


def params_from_spectrum(spectrum: FourierSpectrum) -> FourierNetworkParams:
    """One node per nonzero mode with w = n, phi = psi_n, lam = c_n; phi0 = a0/2."""
    red = reduced_form(spectrum)
    modes = np.flatnonzero(red.c)
    if modes.size == 0:
        return FourierNetworkParams([0.0], [0.0], [0.0], spectrum.constant, spectrum.period)
    return FourierNetworkParams(
        (modes + 1).astype(float), red.psi[modes], red.c[modes], spectrum.constant, spectrum.period
    )


def spectrum_error(extracted: FourierSpectrum, reference: FourierSpectrum) -> SpectrumError:
    """Per-mode absolute differences over the common modes."""
    if not math.isclose(extracted.period, reference.period, rel_tol=1e-12):
        raise ValueError(f"period mismatch: {extracted.period} vs {reference.period}")
    k = min(extracted.n_modes, reference.n_modes)
    return SpectrumError(
        abs(extracted.constant - reference.constant),
        np.abs(extracted.a[:k] - reference.a[:k]),
        np.abs(extracted.b[:k] - reference.b[:k]),
    )


def evaluate_series(spectrum: FourierSpectrum, x):
    xa = np.asarray(x, dtype=np.float64)
    omega = 2.0 * math.pi / spectrum.period
    n = np.arange(1, spectrum.n_modes + 1)
    arg = omega * np.multiply.outer(xa, n)
    out = spectrum.constant + np.cos(arg) @ spectrum.a + np.sin(arg) @ spectrum.b
    return float(out) if xa.ndim == 0 else out


def analytic_spectrum(name: str, n_modes: int) -> FourierSpectrum:
    """Closed-form series of the builtin 2-periodic targets."""
    n = np.arange(1, n_modes + 1, dtype=float)
    zeros = np.zeros(n_modes)
    if name == "cos-sin":
        a, b = zeros.copy(), zeros.copy()
        if n_modes >= 1:
            a[0] = b[0] = 1.0
        return FourierSpectrum(0.0, a, b)
    if name == "multi-freq":
        a, b = zeros.copy(), zeros.copy()
        for mode, arr, val in ((1, b, 1.0), (2, b, 1.0), (4, a, 8.0)):
            if mode <= n_modes:
                arr[mode - 1] = val
        return FourierSpectrum(0.0, a, b)
    if name == "x-squared":
        return FourierSpectrum(2.0 / 3.0, 4.0 * (-1.0) ** n / (math.pi**2 * n**2), zeros)
    if name == "abs-x":
        odd = n % 2 == 1
        return FourierSpectrum(1.0, np.where(odd, -4.0 / (math.pi**2 * n**2), 0.0), zeros)
    raise KeyError(f"no analytic spectrum for {name!r}")


_CSV_HEADER = ["n", "a_n", "b_n", "c_n", "psi_n"]


def write_spectrum_csv(spectrum: FourierSpectrum, path=None) -> str:
    """CSV with one row per mode; row n = 0 carries a0 in ``a_n`` and a0/2 in ``c_n``."""
    red = reduced_form(spectrum)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    writer.writerow([0, repr(spectrum.a0), repr(0.0), repr(spectrum.constant), repr(0.0)])
    for i in range(spectrum.n_modes):
        writer.writerow([i + 1, repr(float(spectrum.a[i])), repr(float(spectrum.b[i])),
                         repr(float(red.c[i])), repr(float(red.psi[i]))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_spectrum_csv(path, period: float = 2.0) -> FourierSpectrum:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or rows[0].keys() != set(_CSV_HEADER):
        raise ValueError(f"{path}: expected columns {_CSV_HEADER}")
    a0 = 0.0
    modes = {}
    for row in rows:
        n = int(row["n"])
        if n == 0:
            a0 = float(row["a_n"])
        else:
            modes[n] = (float(row["a_n"]), float(row["b_n"]))
    k = max(modes, default=0)
    a = np.zeros(k)
    b = np.zeros(k)
    for n, (an, bn) in modes.items():
        a[n - 1], b[n - 1] = an, bn
    return FourierSpectrum(a0, a, b, period)
