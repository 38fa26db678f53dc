"""Deterministic MLP: forward pass, exact reverse-mode gradients, training.

Weights live in one flat vector in layer-major order (each layer's weight
matrix row-major, then its bias vector), which keeps the Bayesian layer's
per-weight posterior bookkeeping trivial. Hidden activations are ReLU with
subgradient 0 at the kink; the output neuron is linear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, batches
from .errors import DimensionMismatch, Diverged
from .rng import make_rng


@dataclass(frozen=True)
class MlpArchitecture:
    """Fully connected feed-forward net: sizes of every layer, input first."""

    layer_sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.layer_sizes) < 3:
            raise ValueError("need at least one hidden layer")
        if self.layer_sizes[-1] != 1:
            raise ValueError("output layer must have exactly one neuron")
        if any(s < 1 for s in self.layer_sizes):
            raise ValueError("layer sizes must be positive")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_params(self) -> int:
        return sum(
            self.layer_sizes[i] * self.layer_sizes[i + 1] + self.layer_sizes[i + 1]
            for i in range(len(self.layer_sizes) - 1)
        )

    def layer_shapes(self) -> list[tuple[int, int]]:
        return [
            (self.layer_sizes[i], self.layer_sizes[i + 1])
            for i in range(len(self.layer_sizes) - 1)
        ]


DEFAULT_ARCH = MlpArchitecture((19, 256, 128, 64, 32, 16, 1))


@dataclass(frozen=True)
class TrainHyper:
    max_epochs: int = 500
    batch_size: int = 64
    learning_rate: float = 1.0e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1.0e-8
    early_stop_patience: int = 20
    seed: int = 0

    def __post_init__(self):
        if min(self.max_epochs, self.batch_size, self.early_stop_patience) < 1:
            raise ValueError("epochs, batch size and patience must be positive")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be > 0")
        if self.early_stop_patience >= self.max_epochs:
            raise ValueError("patience must be smaller than max_epochs")


def unpack(arch: MlpArchitecture, w: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a flat weight vector into per-layer (W, b) views."""
    if w.shape != (arch.n_params,):
        raise DimensionMismatch(
            f"weight vector has {w.shape}, expected ({arch.n_params},)"
        )
    out = []
    pos = 0
    for n_in, n_out in arch.layer_shapes():
        W = w[pos : pos + n_in * n_out].reshape(n_in, n_out)
        pos += n_in * n_out
        b = w[pos : pos + n_out]
        pos += n_out
        out.append((W, b))
    return out


def init_weights(arch: MlpArchitecture, seed: int) -> np.ndarray:
    """Fan-in-scaled Gaussian weights (std sqrt(2/fan_in)), zero biases."""
    rng = make_rng(seed, "init")
    w = np.empty(arch.n_params)
    pos = 0
    for n_in, n_out in arch.layer_shapes():
        w[pos : pos + n_in * n_out] = rng.standard_normal(n_in * n_out) * math.sqrt(
            2.0 / n_in
        )
        pos += n_in * n_out
        w[pos : pos + n_out] = 0.0
        pos += n_out
    return w


def _forward_cached(layers, X):
    """Batch forward keeping activations for the backward pass."""
    acts = [X]
    n_layers = len(layers)
    pre = []
    a = X
    for i, (W, b) in enumerate(layers):
        z = a @ W + b
        pre.append(z)
        a = np.maximum(z, 0.0) if i < n_layers - 1 else z
        acts.append(a)
    return acts[-1][:, 0], acts, pre


def _backward(arch, layers, acts, pre, d_out):
    """Flat gradient for an arbitrary per-sample output gradient `d_out`."""
    grad = np.empty(arch.n_params)
    pos = arch.n_params
    dz = d_out[:, None]
    for i in range(len(layers) - 1, -1, -1):
        W, _ = layers[i]
        a_prev = acts[i]
        n_in, n_out = W.shape
        db = dz.sum(axis=0)
        dW = a_prev.T @ dz
        pos -= n_out
        grad[pos : pos + n_out] = db
        pos -= n_in * n_out
        grad[pos : pos + n_in * n_out] = dW.ravel()
        if i > 0:
            da = dz @ W.T
            dz = da * (pre[i - 1] > 0.0)
    return grad


def _as_batch(arch, x):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != arch.n_inputs:
        raise DimensionMismatch(
            f"input width {X.shape[-1]} != architecture input {arch.n_inputs}"
        )
    return X, single


def forward(arch: MlpArchitecture, w: np.ndarray, x) -> float | np.ndarray:
    """Network output for one feature vector or a batch of them."""
    X, single = _as_batch(arch, x)
    y, _, _ = _forward_cached(unpack(arch, w), X)
    return float(y[0]) if single else y


def loss_grad(
    arch: MlpArchitecture, w: np.ndarray, X: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean squared error over the batch and its exact gradient."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(X) == 0:
        raise DimensionMismatch("empty batch")
    X, _ = _as_batch(arch, X)
    layers = unpack(arch, w)
    yhat, acts, pre = _forward_cached(layers, X)
    resid = yhat - y
    loss = float(np.mean(resid * resid))
    grad = _backward(arch, layers, acts, pre, 2.0 * resid / len(y))
    return loss, grad


@dataclass
class AdamState:
    """First/second moment accumulators with the shared step counter."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n), t=0)


def adaptive_step(
    opt: AdamState, w: np.ndarray, grad: np.ndarray, hyper: TrainHyper
) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected adaptive-moment descent step against `grad`."""
    if grad.shape != w.shape:
        raise DimensionMismatch("gradient and weights differ in shape")
    t = opt.t + 1
    m = hyper.beta1 * opt.m + (1.0 - hyper.beta1) * grad
    v = hyper.beta2 * opt.v + (1.0 - hyper.beta2) * grad * grad
    m_hat = m / (1.0 - hyper.beta1**t)
    v_hat = v / (1.0 - hyper.beta2**t)
    w_new = w - hyper.learning_rate * m_hat / (np.sqrt(v_hat) + hyper.epsilon)
    return AdamState(m=m, v=v, t=t), w_new


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float


def train_dnn(
    train: Dataset, val: Dataset, arch: MlpArchitecture, hyper: TrainHyper
) -> tuple[np.ndarray, list[EpochRecord]]:
    """Minibatch MSE training with early stopping on validation loss.

    Returns the weight snapshot that achieved the best recorded validation
    loss, plus the per-epoch loss history. Raises Diverged on non-finite
    losses.
    """
    if len(train) == 0 or len(val) == 0:
        raise DimensionMismatch("train and validation sets must be non-empty")
    w = init_weights(arch, hyper.seed)
    opt = AdamState.zeros(arch.n_params)
    best_w = w.copy()
    best_val = math.inf
    best_epoch = 0
    history: list[EpochRecord] = []
    for epoch in range(1, hyper.max_epochs + 1):
        total = 0.0
        for idx in batches(train, hyper.batch_size, hyper.seed, epoch):
            loss, grad = loss_grad(arch, w, train.features[idx], train.labels[idx])
            if not math.isfinite(loss):
                raise Diverged(f"training loss became {loss} at epoch {epoch}")
            opt, w = adaptive_step(opt, w, grad, hyper)
            total += loss * len(idx)
        train_loss = total / len(train)
        val_pred = forward(arch, w, val.features)
        val_loss = float(np.mean((val_pred - val.labels) ** 2))
        if not math.isfinite(val_loss):
            raise Diverged(f"validation loss became {val_loss} at epoch {epoch}")
        history.append(EpochRecord(epoch, train_loss, val_loss))
        if val_loss < best_val:
            best_val = val_loss
            best_w = w.copy()
            best_epoch = epoch
        if epoch - best_epoch >= hyper.early_stop_patience:
            break
    return best_w, history
