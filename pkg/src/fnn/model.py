"""Parameter containers and evaluation of the cosine network and the tanh baseline.

The Fourier network computes

    u(x) = phi0 + sum_k lam_k * cos(omega * w_k * x + phi_k),   omega = 2 pi / T

so that for T = 2 the activation is cos(pi z) and integer ``w_k`` are Fourier
modes. Parameter vectors are flattened in the order ``[w, phi, lam, phi0]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "FourierNetworkParams",
    "DenseNetworkParams",
    "fnn_forward",
    "fnn_input_derivatives",
    "fnn_param_jacobian",
    "dense_forward",
    "dense_forward_tangent",
    "dense_backward",
    "save_model",
    "load_model",
]


def _as_1d(a, name):
    arr = np.asarray(a, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class FourierNetworkParams:
    """Weights and biases of a one-hidden-layer cosine network."""

    w: np.ndarray
    phi: np.ndarray
    lam: np.ndarray
    phi0: float = 0.0
    period: float = 2.0

    def __post_init__(self):
        w = _as_1d(self.w, "w")
        phi = _as_1d(self.phi, "phi")
        lam = _as_1d(self.lam, "lam")
        if not (w.size == phi.size == lam.size) or w.size < 1:
            raise ValueError(
                f"w, phi, lam must share a length >= 1, got {w.size}, {phi.size}, {lam.size}"
            )
        if not (math.isfinite(self.phi0) and self.period > 0 and math.isfinite(self.period)):
            raise ValueError("phi0 must be finite and period positive")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "phi0", float(self.phi0))
        object.__setattr__(self, "period", float(self.period))

    @property
    def hidden_count(self) -> int:
        return self.w.size

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period

    @property
    def size(self) -> int:
        return 3 * self.hidden_count + 1

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.w, self.phi, self.lam, [self.phi0]])

    @classmethod
    def from_vector(cls, theta, period: float = 2.0) -> "FourierNetworkParams":
        theta = np.asarray(theta, dtype=np.float64)
        n, rem = divmod(theta.size - 1, 3)
        if rem or n < 1:
            raise ValueError(f"vector of length {theta.size} is not 3N+1")
        return cls(theta[:n], theta[n : 2 * n], theta[2 * n : 3 * n], theta[-1], period)

    def normalized(self, positive_amplitude: bool = False) -> "FourierNetworkParams":
        """Equivalent parameters with w >= 0 and phases wrapped to (-pi, pi].

        Uses cos(-z) = cos(z) to flip (w, phi) together. With
        ``positive_amplitude`` also uses -cos(z) = cos(z + pi) to make lam >= 0.
        """
        w, phi, lam = self.w.copy(), self.phi.copy(), self.lam.copy()
        neg = w < 0
        w[neg] = -w[neg]
        phi[neg] = -phi[neg]
        if positive_amplitude:
            flip = lam < 0
            lam[flip] = -lam[flip]
            phi[flip] = phi[flip] + math.pi
        return FourierNetworkParams(w, wrap_phase(phi), lam, self.phi0, self.period)

    def to_dict(self) -> dict:
        return {
            "kind": "fourier",
            "period": self.period,
            "w": self.w.tolist(),
            "phi": self.phi.tolist(),
            "lambda": self.lam.tolist(),
            "phi0": self.phi0,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FourierNetworkParams":
        try:
            return cls(d["w"], d["phi"], d["lambda"], d["phi0"], d.get("period", 2.0))
        except KeyError as exc:
            raise ValueError(f"missing key {exc} in Fourier model record") from None


def wrap_phase(phi):
    """Map angles into (-pi, pi]."""
    out = np.mod(np.asarray(phi, dtype=np.float64) + math.pi, 2.0 * math.pi) - math.pi
    out = np.where(out == -math.pi, math.pi, out)
    return out if out.ndim else float(out)


def _hidden_args(params: FourierNetworkParams, x: np.ndarray) -> np.ndarray:
    return params.omega * np.multiply.outer(x, params.w) + params.phi


def fnn_forward(params: FourierNetworkParams, x):
    """Network output at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=np.float64)
    out = params.phi0 + np.cos(_hidden_args(params, xa)) @ params.lam
    return float(out) if xa.ndim == 0 else out


def fnn_input_derivatives(params: FourierNetworkParams, x, order: int = 2):
    """``(u, u', u'')`` truncated to ``order + 1`` entries."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    xa = np.asarray(x, dtype=np.float64)
    z = _hidden_args(params, xa)
    c = np.cos(z)
    out = [params.phi0 + c @ params.lam]
    if order >= 1:
        k = params.omega * params.w
        out.append(-np.sin(z) @ (params.lam * k))
    if order >= 2:
        out.append(-c @ (params.lam * k**2))
    if xa.ndim == 0:
        out = [float(v) for v in out]
    return tuple(out)


def fnn_param_jacobian(params: FourierNetworkParams, x, derivative: int = 0):
    """Jacobian of u (``derivative=0``) or u'' (``derivative=2``) w.r.t. the parameters.

    Returns an ``(M, 3N+1)`` array whose columns follow ``to_vector`` order.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=np.float64))
    z = _hidden_args(params, xa)
    c, s = np.cos(z), np.sin(z)
    om = params.omega
    lam, w = params.lam, params.w
    m = xa.size
    if derivative == 0:
        d_w = -s * lam * om * xa[:, None]
        d_phi = -s * lam
        d_lam = c
        d_phi0 = np.ones((m, 1))
    elif derivative == 2:
        k2 = (om * w) ** 2
        # u'' = -sum lam k^2 cos(z)
        d_w = -lam * (2.0 * om**2 * w * c - k2 * s * om * xa[:, None])
        d_phi = lam * k2 * s
        d_lam = -k2 * c
        d_phi0 = np.zeros((m, 1))
    else:
        raise ValueError("derivative must be 0 or 2")
    return np.hstack([d_w, d_phi, d_lam, d_phi0])


# --- tanh baseline ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DenseNetworkParams:
    """Feedforward network with tanh hidden layers and a linear scalar output.

    ``weights[i]`` has shape ``(layer_sizes[i+1], layer_sizes[i])``.
    """

    weights: list
    biases: list
    layer_sizes: tuple = field(init=False)

    def __post_init__(self):
        ws = [np.atleast_2d(np.asarray(W, dtype=np.float64)) for W in self.weights]
        bs = [np.atleast_1d(np.asarray(b, dtype=np.float64)).reshape(-1) for b in self.biases]
        if len(ws) != len(bs) or not ws:
            raise ValueError("need matching, nonempty weight and bias lists")
        sizes = [ws[0].shape[1]]
        for W, b in zip(ws, bs):
            if W.shape[1] != sizes[-1] or b.size != W.shape[0]:
                raise ValueError(
                    f"shape mismatch: weight {W.shape}, bias {b.shape}, previous width {sizes[-1]}"
                )
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ValueError("non-finite dense network parameters")
            sizes.append(W.shape[0])
        if sizes[0] != 1 or sizes[-1] != 1:
            raise ValueError(f"network must map scalars to scalars, got sizes {sizes}")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "biases", bs)
        object.__setattr__(self, "layer_sizes", tuple(sizes))

    @property
    def size(self) -> int:
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def to_vector(self) -> np.ndarray:
        parts = []
        for W, b in zip(self.weights, self.biases):
            parts += [W.ravel(), b]
        return np.concatenate(parts)

    def with_vector(self, theta) -> "DenseNetworkParams":
        theta = np.asarray(theta, dtype=np.float64)
        if theta.size != self.size:
            raise ValueError(f"expected {self.size} parameters, got {theta.size}")
        ws, bs, i = [], [], 0
        for W, b in zip(self.weights, self.biases):
            ws.append(theta[i : i + W.size].reshape(W.shape))
            i += W.size
            bs.append(theta[i : i + b.size])
            i += b.size
        return DenseNetworkParams(ws, bs)

    @classmethod
    def zeros(cls, layer_sizes) -> "DenseNetworkParams":
        ws = [np.zeros((o, i)) for i, o in zip(layer_sizes[:-1], layer_sizes[1:])]
        bs = [np.zeros(o) for o in layer_sizes[1:]]
        return cls(ws, bs)

    def to_dict(self) -> dict:
        return {
            "kind": "dense",
            "layer_sizes": list(self.layer_sizes),
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DenseNetworkParams":
        return cls(d["weights"], d["biases"])


def dense_forward_tangent(params: DenseNetworkParams, t):
    """Forward pass carrying d/dt alongside the values.

    Returns ``(y, dy_dt, cache)``; ``cache`` feeds :func:`dense_backward`.
    """
    a = np.atleast_1d(np.asarray(t, dtype=np.float64))[:, None]
    da = np.ones_like(a)
    cache = []
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W.T + b
        dz = da @ W.T
        if i == last:
            cache.append((a, da, None, None))
            return z[:, 0], dz[:, 0], cache
        s = np.tanh(z)
        ds = 1.0 - s * s
        cache.append((a, da, s, dz))
        a, da = s, ds * dz


def dense_forward(params: DenseNetworkParams, x):
    """Network output at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=np.float64)
    a = np.atleast_1d(xa)[:, None]
    for W, b in zip(params.weights[:-1], params.biases[:-1]):
        a = np.tanh(a @ W.T + b)
    y = (a @ params.weights[-1].T + params.biases[-1])[:, 0]
    return float(y[0]) if xa.ndim == 0 else y


def dense_backward(params: DenseNetworkParams, cache, g_y, g_dy=None) -> np.ndarray:
    """Gradient of ``sum(g_y * y + g_dy * dy/dt)`` w.r.t. the flattened parameters."""
    g_a = np.asarray(g_y, dtype=np.float64)[:, None]
    g_da = None if g_dy is None else np.asarray(g_dy, dtype=np.float64)[:, None]
    grads = []
    for i in range(len(params.weights) - 1, -1, -1):
        W = params.weights[i]
        a_prev, da_prev, s, dz = cache[i]
        if s is None:
            g_z, g_dz = g_a, g_da
        else:
            ds = 1.0 - s * s
            g_z = g_a * ds
            if g_da is not None:
                g_z = g_z - 2.0 * g_da * dz * s * ds
                g_dz = g_da * ds
            else:
                g_dz = None
        gW = g_z.T @ a_prev
        gb = g_z.sum(axis=0)
        g_a = g_z @ W
        if g_dz is not None:
            gW = gW + g_dz.T @ da_prev
            g_da = g_dz @ W
        grads.append((gW, gb))
    parts = []
    for gW, gb in reversed(grads):
        parts += [gW.ravel(), gb]
    return np.concatenate(parts)


# --- persistence -----------------------------------------------------------


def save_model(params, path) -> None:
    Path(path).write_text(json.dumps(params.to_dict(), indent=2) + "\n")


def load_model(path):
    """Read a model written by :func:`save_model` (Fourier or dense)."""
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(d, dict):
        raise ValueError(f"{path}: expected a JSON object")
    kind = d.get("kind", "fourier")
    loaders = {"fourier": FourierNetworkParams.from_dict, "dense": DenseNetworkParams.from_dict}
    if kind not in loaders:
        raise ValueError(f"{path}: unknown model kind {kind!r}")
    try:
        return loaders[kind](d)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed {kind} model ({exc!r})") from None
