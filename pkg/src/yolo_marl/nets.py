"""Minimal differentiable MLP core on flat float64 parameter vectors.

Parameter layout, per layer in order: weight matrix W_l of shape
(n_in, n_out) in row-major order, then bias b_l of length n_out. Hidden
layers apply the configured activation; the output layer is linear.

Checkpoint byte layout (little-endian):
    magic     8 bytes  b"MLPCKPT1"
    act       uint8    0 = relu, 1 = tanh
    n_sizes   uint32
    sizes     uint32 * n_sizes
    n_params  uint64
    params    float64 * n_params
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractViolationError, OptimizerError

_MAGIC = b"MLPCKPT1"
_ACT_CODES = {"relu": 0, "tanh": 1}
_ACT_NAMES = {v: k for k, v in _ACT_CODES.items()}


def param_count(layer_sizes) -> int:
    return sum(n_in * n_out + n_out for n_in, n_out in zip(layer_sizes, layer_sizes[1:]))


class Mlp:
    """Feedforward network; owns a flat parameter vector plus per-layer views."""

    def __init__(self, layer_sizes, activation: str = "relu",
                 params: np.ndarray | None = None):
        if len(layer_sizes) < 2:
            raise ContractViolationError("need at least input and output sizes")
        if activation not in _ACT_CODES:
            raise ContractViolationError(f"unknown activation {activation!r}")
        self.layer_sizes = tuple(int(n) for n in layer_sizes)
        self.activation = activation
        n = param_count(self.layer_sizes)
        if params is None:
            params = np.zeros(n, dtype=np.float64)
        else:
            params = np.ascontiguousarray(params, dtype=np.float64)
            if params.shape != (n,):
                raise ContractViolationError(
                    f"parameter vector has shape {params.shape}, expected ({n},)")
        self.params = params
        self._weights = []
        self._biases = []
        k = 0
        for n_in, n_out in zip(self.layer_sizes, self.layer_sizes[1:]):
            self._weights.append(self.params[k:k + n_in * n_out].reshape(n_in, n_out))
            k += n_in * n_out
            self._biases.append(self.params[k:k + n_out])
            k += n_out

    @property
    def n_layers(self) -> int:
        return len(self._weights)

    def param_slices(self):
        """Named (start, stop) ranges into the flat vector, layer by layer."""
        out = []
        k = 0
        for l, (n_in, n_out) in enumerate(zip(self.layer_sizes, self.layer_sizes[1:])):
            out.append((f"layer{l}.weight", k, k + n_in * n_out))
            k += n_in * n_out
            out.append((f"layer{l}.bias", k, k + n_out))
            k += n_out
        return out

    def set_params(self, flat: np.ndarray) -> None:
        self.params[:] = flat  # keeps layer views valid

    def clone(self) -> "Mlp":
        return Mlp(self.layer_sizes, self.activation, self.params.copy())

    # -- forward / backward --------------------------------------------------

    def _act(self, z):
        if self.activation == "relu":
            return np.maximum(z, 0.0)
        return np.tanh(z)

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.shape[-1] != self.layer_sizes[0]:
            raise ContractViolationError(
                f"input length {h.shape[-1]} != layer_sizes[0] = {self.layer_sizes[0]}")
        last = self.n_layers - 1
        for l, (W, b) in enumerate(zip(self._weights, self._biases)):
            h = h @ W + b
            if l != last:
                h = self._act(h)
        return h[0] if single else h

    def vjp(self, x: np.ndarray, output_grad: np.ndarray):
        """Gradient of <forward(x), output_grad> (summed over any batch).

        Returns (flat parameter gradient, gradient w.r.t. x).
        """
        x = np.asarray(x, dtype=np.float64)
        g = np.asarray(output_grad, dtype=np.float64)
        single = x.ndim == 1
        h = x[None, :] if single else x
        g = g[None, :] if g.ndim == 1 else g
        if h.shape[-1] != self.layer_sizes[0] or g.shape[-1] != self.layer_sizes[-1]:
            raise ContractViolationError("input or output_grad length mismatch")
        if h.shape[0] != g.shape[0]:
            raise ContractViolationError("batch sizes of input and output_grad differ")

        last = self.n_layers - 1
        hs = [h]  # post-activation values per layer boundary
        for l, (W, b) in enumerate(zip(self._weights, self._biases)):
            z = hs[-1] @ W + b
            hs.append(self._act(z) if l != last else z)

        grad = np.zeros_like(self.params)
        k = len(self.params)
        dh = g
        for l in range(last, -1, -1):
            if l != last:
                out = hs[l + 1]
                dh = dh * (out > 0.0) if self.activation == "relu" else dh * (1.0 - out * out)
            W = self._weights[l]
            n_out = W.shape[1]
            grad[k - n_out:k] = dh.sum(axis=0)
            k -= n_out
            dW = hs[l].T @ dh
            grad[k - dW.size:k] = dW.ravel()
            k -= dW.size
            dh = dh @ W.T
        return grad, (dh[0] if single else dh)

    def backward(self, x: np.ndarray, output_grad: np.ndarray) -> np.ndarray:
        """Flat parameter gradient of <forward(x), output_grad>."""
        return self.vjp(x, output_grad)[0]

    # -- persistence ----------------------------------------------------------

    def save(self, path) -> None:
        sizes = self.layer_sizes
        blob = b"".join([
            _MAGIC,
            struct.pack("<B", _ACT_CODES[self.activation]),
            struct.pack("<I", len(sizes)),
            struct.pack(f"<{len(sizes)}I", *sizes),
            struct.pack("<Q", len(self.params)),
            self.params.astype("<f8").tobytes(),
        ])
        Path(path).write_bytes(blob)

    @classmethod
    def load(cls, path) -> "Mlp":
        raw = Path(path).read_bytes()
        if raw[:8] != _MAGIC:
            raise ContractViolationError(f"{path}: not a checkpoint file")
        act = _ACT_NAMES[struct.unpack_from("<B", raw, 8)[0]]
        (n_sizes,) = struct.unpack_from("<I", raw, 9)
        sizes = struct.unpack_from(f"<{n_sizes}I", raw, 13)
        off = 13 + 4 * n_sizes
        (n_params,) = struct.unpack_from("<Q", raw, off)
        params = np.frombuffer(raw, dtype="<f8", count=n_params, offset=off + 8).copy()
        if n_params != param_count(sizes):
            raise ContractViolationError(f"{path}: parameter count does not match sizes")
        return cls(sizes, act, params)


def init_mlp(layer_sizes, activation: str = "relu", scheme: str = "orthogonal",
             rng: np.random.Generator | None = None, final_gain: float = 1.0) -> Mlp:
    """Build a network. ``orthogonal``: per-layer scaled semi-orthogonal
    weights (QR of a standard normal draw), zero biases; hidden gain is
    sqrt(2) for relu and 1.0 for tanh, output gain is ``final_gain``.
    ``zeros``: all parameters zero."""
    net = Mlp(layer_sizes, activation)
    if scheme == "zeros":
        return net
    if scheme != "orthogonal":
        raise ContractViolationError(f"unknown init scheme {scheme!r}")
    rng = rng or np.random.default_rng()
    hidden_gain = np.sqrt(2.0) if activation == "relu" else 1.0
    last = net.n_layers - 1
    for l, W in enumerate(net._weights):
        n_in, n_out = W.shape
        a = rng.standard_normal((max(n_in, n_out), min(n_in, n_out)))
        q, r = np.linalg.qr(a)
        q = q * np.sign(np.diag(r))
        if n_in < n_out:
            q = q.T
        W[:] = q[:n_in, :n_out] * (final_gain if l == last else hidden_gain)
    return net


# -- Adam ----------------------------------------------------------------------

@dataclass
class AdamState:
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: np.ndarray | None = None
    v: np.ndarray | None = None


def adam_step(opt: AdamState, params: np.ndarray, grads: np.ndarray):
    """One bias-corrected Adam update; returns (new_params, opt).

    Raises OptimizerError on non-finite gradients so runs abort loudly
    instead of silently corrupting parameters.
    """
    if params.shape != grads.shape:
        raise ContractViolationError("params and grads must have equal length")
    if not np.all(np.isfinite(grads)):
        bad = int(np.count_nonzero(~np.isfinite(grads)))
        raise OptimizerError(f"{bad} non-finite gradient components at step {opt.step + 1}")
    if opt.m is None:
        opt.m = np.zeros_like(params)
        opt.v = np.zeros_like(params)
    opt.step += 1
    opt.m = opt.beta1 * opt.m + (1.0 - opt.beta1) * grads
    opt.v = opt.beta2 * opt.v + (1.0 - opt.beta2) * grads * grads
    m_hat = opt.m / (1.0 - opt.beta1 ** opt.step)
    v_hat = opt.v / (1.0 - opt.beta2 ** opt.step)
    return params - opt.lr * m_hat / (np.sqrt(v_hat) + opt.eps), opt


# -- finite-difference verification ---------------------------------------------

def finite_difference_grad(net: Mlp, x: np.ndarray, output_grad: np.ndarray,
                           h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of <forward(x), output_grad>; touches only
    the forward pass, never the analytic backward."""
    g = np.asarray(output_grad, dtype=np.float64)
    base = net.params.copy()
    out = np.empty_like(base)
    probe = Mlp(net.layer_sizes, net.activation, base.copy())
    for i in range(len(base)):
        probe.params[i] = base[i] + h
        up = float(np.sum(probe.forward(x) * g))
        probe.params[i] = base[i] - h
        down = float(np.sum(probe.forward(x) * g))
        probe.params[i] = base[i]
        out[i] = (up - down) / (2.0 * h)
    return out


@dataclass
class GradCheckReport:
    max_rel_error: float
    worst_layer: str
    per_layer: list = field(default_factory=list)  # (name, max rel error)

    def passed(self, tol: float = 1e-4) -> bool:
        return self.max_rel_error < tol


def gradient_check(net: Mlp, x: np.ndarray, output_grad: np.ndarray | None = None,
                   h: float = 1e-5, mutate_grad=None) -> GradCheckReport:
    """Compare analytic and central-difference gradients component-wise.

    Relative error uses max(|analytic|, |numeric|) as the scale; components
    where both are below 1e-5 are treated as exact (difference noise).
    ``mutate_grad`` is a test hook applied to the analytic gradient.
    """
    if output_grad is None:
        output_grad = np.ones(net.layer_sizes[-1])
    analytic = net.backward(x, output_grad)
    if mutate_grad is not None:
        analytic = mutate_grad(analytic)
    numeric = finite_difference_grad(net, x, output_grad, h=h)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    err = np.where(scale < 1e-5, 0.0, np.abs(analytic - numeric) / np.maximum(scale, 1e-300))
    per_layer = []
    for name, start, stop in net.param_slices():
        per_layer.append((name, float(err[start:stop].max()) if stop > start else 0.0))
    worst = max(per_layer, key=lambda kv: kv[1])
    return GradCheckReport(max_rel_error=float(err.max()), worst_layer=worst[0],
                           per_layer=per_layer)
