"""Scalar special functions, seeded sampling and initialization statistics.

The random streams are produced by a counter-based SplitMix64 generator so
that sequences are reproducible across numpy releases and platforms:

    state_i = seed + (i + 1) * 0x9E3779B97F4A7C15      (mod 2**64)
    z = (state_i ^ (state_i >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out_i = z ^ (z >> 31)

Uniform variates take the top 53 bits, ``(out_i >> 11) * 2**-53``, which lie in
[0, 1). Normal variates use the Box-Muller transform on consecutive pairs of
uniforms ``(u1, u2)``, with ``1 - u1`` in place of ``u1`` to keep the logarithm
finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "InitSpec",
    "erf",
    "hidden_mean",
    "hidden_second_moment",
    "hidden_variance",
    "solve_variance_match",
    "output_weight_std",
    "reference_variance",
    "splitmix64",
    "derive_seed",
    "sample_uniform",
    "sample_normal",
    "DEFAULT_INIT_M",
    "MonteCarloMoments",
    "monte_carlo_moments",
]

DEFAULT_INIT_M = math.sqrt(5.0)

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_ERF_SATURATION = 6.0

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def erf(x: float) -> float:
    """Error function.

    Uses the everywhere-convergent series

        erf(x) = 2/sqrt(pi) * exp(-x**2) * sum_n 2**n x**(2n+1) / (1*3*...*(2n+1))

    whose terms are all of one sign, so there is no cancellation. For
    ``|x| >= 6`` the result is ``+-1`` (erfc(6) is about 2e-17).
    """
    x = float(x)
    if math.isnan(x):
        return math.nan
    ax = abs(x)
    if ax >= _ERF_SATURATION:
        return math.copysign(1.0, x)
    x2 = ax * ax
    term = ax
    total = ax
    n = 0
    while True:
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
        if term <= total * 1e-17:
            break
    return math.copysign(_TWO_OVER_SQRT_PI * math.exp(-x2) * total, x)


def _check_m(m: float) -> float:
    m = float(m)
    if m == 0.0 or not math.isfinite(m):
        raise ValueError(f"m must be finite and nonzero, got {m}")
    return abs(m)


def hidden_mean(m: float) -> float:
    """E[cos(pi W X)] for X ~ U[-1, 1] and W ~ N(0, m**2).

    The m -> 0 limit is 1; m = 0 itself is rejected.
    """
    m = _check_m(m)
    return erf(m * math.pi / math.sqrt(2.0)) / (m * _SQRT_2PI)


def hidden_second_moment(m: float) -> float:
    """E[cos(pi W X)**2], i.e. 1/2 + erf(sqrt(2) m pi) / (4 sqrt(2 pi) m)."""
    m = _check_m(m)
    return 0.5 + erf(math.sqrt(2.0) * m * math.pi) / (4.0 * _SQRT_2PI * m)


def hidden_variance(m: float) -> float:
    """Variance of a hidden activation cos(pi W X) under the same model."""
    return hidden_second_moment(m) - hidden_mean(m) ** 2


def reference_variance() -> float:
    """Hidden variance at the practical choice m = sqrt(5) (about 0.5128)."""
    return hidden_variance(DEFAULT_INIT_M)


def solve_variance_match(
    target: float = 1.0 / 3.0,
    bracket: tuple[float, float] = (0.1, 2.0),
    tol: float = 1e-12,
) -> float:
    """Find m in ``bracket`` with ``hidden_variance(m) == target`` by bisection."""
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"invalid bracket {bracket}")
    f_lo = hidden_variance(lo) - target
    f_hi = hidden_variance(hi) - target
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError(
            f"hidden_variance - target does not change sign over {bracket}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = hidden_variance(mid) - target
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def output_weight_std(
    m: float, hidden_count: int, target_variance: float | None = None
) -> float:
    """Standard deviation v of the hidden-to-output weights.

    Chosen so that the first-pass output variance
    ``N * v**2 * E[cos(pi W X)**2]`` equals ``target_variance``, which defaults
    to the hidden variance at m = sqrt(5).
    """
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    if hidden_count < 1:
        raise ValueError(f"hidden_count must be >= 1, got {hidden_count}")
    if target_variance is None:
        target_variance = reference_variance()
    v2 = target_variance / (hidden_count * hidden_second_moment(m))
    return math.sqrt(v2)


@dataclass(frozen=True)
class InitSpec:
    """Standard deviations of the two weight layers of a Fourier network."""

    m: float
    v: float
    hidden_count: int

    def __post_init__(self):
        if not (self.m > 0 and self.v > 0):
            raise ValueError("m and v must be positive")
        if self.hidden_count < 1:
            raise ValueError("hidden_count must be >= 1")

    @classmethod
    def from_m(cls, hidden_count: int, m: float = DEFAULT_INIT_M) -> "InitSpec":
        return cls(m=m, v=output_weight_std(m, hidden_count), hidden_count=hidden_count)


# --- sampling -------------------------------------------------------------


def splitmix64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs ``offset .. offset+count-1`` of the SplitMix64 stream for ``seed``."""
    state0 = np.uint64(int(seed) & _MASK64)
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = state0 + idx * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, stream: int) -> int:
    """Independent child seed for a named sub-stream of ``seed``."""
    return int(splitmix64(int(seed) ^ (int(stream) * 0x632BE59BD9B4E019), 1)[0])


def _unit_uniform(seed: int, count: int) -> np.ndarray:
    return (splitmix64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def sample_uniform(seed: int, count: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """``count`` reproducible uniform draws on [lo, hi)."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if not hi > lo:
        raise ValueError(f"invalid range [{lo}, {hi})")
    return lo + (hi - lo) * _unit_uniform(seed, count)


def sample_normal(seed: int, count: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
    """``count`` reproducible N(mean, std**2) draws via Box-Muller."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if std < 0:
        raise ValueError("std must be nonnegative")
    pairs = (count + 1) // 2
    u = _unit_uniform(seed, 2 * pairs)
    u1 = 1.0 - u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return mean + std * z[:count]


@dataclass(frozen=True)
class MonteCarloMoments:
    """Sample moments of cos(pi W X) with their standard errors."""

    mean: float
    second_moment: float
    variance: float
    mean_se: float
    second_moment_se: float
    variance_se: float
    samples: int


def monte_carlo_moments(m: float, samples: int, seed: int = 0) -> MonteCarloMoments:
    """Estimate the hidden-activation moments from ``samples`` draws of (W, X).

    The variance standard error uses the delta method on (mean, second moment).
    """
    m = _check_m(m)
    if samples < 2:
        raise ValueError("samples must be >= 2")
    w = sample_normal(derive_seed(seed, 1), samples, 0.0, m)
    x = sample_uniform(derive_seed(seed, 2), samples, -1.0, 1.0)
    h = np.cos(math.pi * w * x)
    h2 = h * h
    mean, second = float(h.mean()), float(h2.mean())
    cov = np.cov(np.vstack([h, h2])) / samples
    grad = np.array([-2.0 * mean, 1.0])
    return MonteCarloMoments(
        mean=mean,
        second_moment=second,
        variance=second - mean**2,
        mean_se=float(math.sqrt(cov[0, 0])),
        second_moment_se=float(math.sqrt(cov[1, 1])),
        variance_se=float(math.sqrt(grad @ cov @ grad)),
        samples=samples,
    )
