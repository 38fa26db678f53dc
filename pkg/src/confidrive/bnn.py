"""Bayesian MLP: mean-field Gaussian posterior trained by stochastic ELBO ascent.

Each weight gets an independent Gaussian q(w) = N(mu, sigma^2) with
sigma = softplus(rho), trained by reparameterized Monte Carlo gradients of

    ELBO = E_q[log p(labels | weights)] - kl_scale * KL(q || prior)

against a zero-mean Gaussian prior and a fixed-noise Gaussian likelihood.
Prediction draws weight vectors from q and summarizes the induced steering
distribution: mean, sample std, signed coefficient of variance, and the
count of draws beyond two standard deviations from the mean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, batches
from .errors import DimensionMismatch, Diverged
from .mlp import (
    MlpArchitecture,
    TrainHyper,
    AdamState,
    _as_batch,
    _backward,
    _forward_cached,
    adaptive_step,
    init_weights,
    unpack,
)
from .rng import make_rng

# Denominator floor for the coefficient of variance, in steering units.
# Keeps straight-road predictions (mean near zero) from reading as
# unbounded relative uncertainty.
COV_MU_FLOOR = 0.02

_LOG_2PI = math.log(2.0 * math.pi)


def softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def softplus_inv(y) -> np.ndarray:
    return np.log(np.expm1(y))


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class VariationalParams:
    """Per-weight posterior: means mu and pre-softplus widths rho."""

    mu: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        if self.mu.shape != self.rho.shape or self.mu.ndim != 1:
            raise DimensionMismatch("mu and rho must be equal-length vectors")

    @property
    def sigma(self) -> np.ndarray:
        return softplus(self.rho)

    @property
    def n_params(self) -> int:
        return len(self.mu)

    def copy(self) -> "VariationalParams":
        return VariationalParams(self.mu.copy(), self.rho.copy())


@dataclass(frozen=True)
class PriorSpec:
    """Independent zero-mean Gaussian prior over every weight."""

    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError("prior sigma must be > 0")


@dataclass(frozen=True)
class LikelihoodSpec:
    """Gaussian observation noise on the steering labels."""

    sigma: float = 0.05

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError("likelihood sigma must be > 0")


@dataclass(frozen=True)
class BnnHyper(TrainHyper):
    mc_samples: int = 2
    n_pred: int = 30
    sigma_init_scale: float = 0.05

    def __post_init__(self):
        super().__post_init__()
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")
        if self.n_pred < 2:
            raise ValueError("n_pred must be >= 2")


def sample_weights(vp: VariationalParams, noise: np.ndarray) -> np.ndarray:
    """Reparameterized draw(s): w = mu + softplus(rho) * eps."""
    noise = np.asarray(noise, dtype=float)
    if noise.shape[-1] != vp.n_params:
        raise DimensionMismatch(
            f"noise width {noise.shape[-1]} != parameter count {vp.n_params}"
        )
    return vp.mu + vp.sigma * noise


def kl_to_prior(vp: VariationalParams, prior: PriorSpec) -> float:
    """Closed-form KL(q || prior), summed over all weights."""
    sigma = vp.sigma
    sp2 = prior.sigma * prior.sigma
    terms = (
        np.log(prior.sigma / sigma)
        + (sigma * sigma + vp.mu * vp.mu) / (2.0 * sp2)
        - 0.5
    )
    return float(np.sum(terms))


def _kl_grads(vp: VariationalParams, prior: PriorSpec):
    sigma = vp.sigma
    sp2 = prior.sigma * prior.sigma
    d_mu = vp.mu / sp2
    d_sigma = sigma / sp2 - 1.0 / sigma
    return d_mu, d_sigma * sigmoid(vp.rho)


def _elbo_terms(arch, vp, X, y, prior, like, noise, kl_scale, want_grad):
    X, _ = _as_batch(arch, X)
    y = np.asarray(y, dtype=float)
    noise = np.atleast_2d(np.asarray(noise, dtype=float))
    if noise.shape[1] != vp.n_params or vp.n_params != arch.n_params:
        raise DimensionMismatch("noise/posterior width mismatch with architecture")
    n_draws = len(noise)
    sn2 = like.sigma * like.sigma
    const = -0.5 * _LOG_2PI - math.log(like.sigma)
    sigma = vp.sigma
    loglik = 0.0
    g_mu = np.zeros(vp.n_params) if want_grad else None
    g_rho = np.zeros(vp.n_params) if want_grad else None
    for eps in noise:
        w = vp.mu + sigma * eps
        layers = unpack(arch, w)
        yhat, acts, pre = _forward_cached(layers, X)
        resid = yhat - y
        loglik += float(np.sum(const - resid * resid / (2.0 * sn2)))
        if want_grad:
            g_w = _backward(arch, layers, acts, pre, -resid / sn2)
            g_mu += g_w
            g_rho += g_w * eps
    loglik /= n_draws
    kl = kl_to_prior(vp, prior)
    value = loglik - kl_scale * kl
    if not want_grad:
        return value, None, None
    g_mu /= n_draws
    g_rho = (g_rho / n_draws) * sigmoid(vp.rho)
    kl_mu, kl_rho = _kl_grads(vp, prior)
    g_mu -= kl_scale * kl_mu
    g_rho -= kl_scale * kl_rho
    return value, g_mu, g_rho


def elbo(arch, vp, X, y, prior, like, noise, kl_scale) -> float:
    """Monte Carlo ELBO for explicitly supplied (frozen) noise draws."""
    value, _, _ = _elbo_terms(arch, vp, X, y, prior, like, noise, kl_scale, False)
    return value


def elbo_grad(arch, vp, X, y, prior, like, noise, kl_scale):
    """Exact gradient of `elbo` for the same frozen noise; (d_mu, d_rho)."""
    _, g_mu, g_rho = _elbo_terms(arch, vp, X, y, prior, like, noise, kl_scale, True)
    return g_mu, g_rho


def signed_cov(mean: float, std: float, mu_floor: float = COV_MU_FLOOR) -> float:
    """Coefficient of variance in percent, carrying the mean's sign.

    The denominator magnitude is floored at `mu_floor` so near-zero means
    (straight-road steering) cannot blow the ratio up to infinity.
    """
    if abs(mean) >= mu_floor:
        return 100.0 * std / mean
    sign = 1.0 if mean >= 0.0 else -1.0
    return 100.0 * std / (sign * mu_floor)


@dataclass(frozen=True)
class PredictiveDistribution:
    """Summary of Monte Carlo steering draws for one input."""

    mean: float
    std: float
    cov: float
    samples: np.ndarray
    odd_count: int

    @classmethod
    def from_samples(
        cls, samples: np.ndarray, mu_floor: float = COV_MU_FLOOR
    ) -> "PredictiveDistribution":
        samples = np.asarray(samples, dtype=float)
        if len(samples) < 2:
            raise DimensionMismatch("need at least two predictive samples")
        mean = float(np.mean(samples))
        std = float(np.std(samples, ddof=1))
        odd = int(np.count_nonzero(np.abs(samples - mean) > 2.0 * std)) if std > 0 else 0
        return cls(
            mean=mean,
            std=std,
            cov=signed_cov(mean, std, mu_floor),
            samples=samples,
            odd_count=odd,
        )


def _stack_layers(arch: MlpArchitecture, w_flat: np.ndarray):
    """Per-layer (N, n_in, n_out) weight and (N, 1, n_out) bias tensors."""
    n = len(w_flat)
    out = []
    pos = 0
    for n_in, n_out in arch.layer_shapes():
        W = w_flat[:, pos : pos + n_in * n_out].reshape(n, n_in, n_out)
        pos += n_in * n_out
        b = w_flat[:, pos : pos + n_out].reshape(n, 1, n_out)
        pos += n_out
        out.append((W, b))
    return out


class PosteriorEnsemble:
    """N weight vectors drawn once from the posterior, ready for fast reuse.

    Calling `predict` for many inputs against a fixed (n, seed) is exactly
    equivalent to calling the module-level `predict` with that seed for each
    input; the draws are simply cached and the per-layer tensors stacked so
    each query costs one batched forward pass.
    """

    def __init__(self, arch: MlpArchitecture, vp: VariationalParams, n: int, seed: int):
        if n < 2:
            raise DimensionMismatch("ensemble needs at least two draws")
        if vp.n_params != arch.n_params:
            raise DimensionMismatch("posterior size does not match architecture")
        self.arch = arch
        self.n = n
        eps = make_rng(seed, "predict").standard_normal((n, vp.n_params))
        self._layers = _stack_layers(arch, sample_weights(vp, eps))

    def outputs(self, X) -> np.ndarray:
        """(n_draws, batch) network outputs for a batch of inputs."""
        X, _ = _as_batch(self.arch, X)
        return _stacked_forward(self._layers, self.n, X)

    def predict(self, x, mu_floor: float = COV_MU_FLOOR) -> PredictiveDistribution:
        return PredictiveDistribution.from_samples(
            self.outputs(np.asarray(x, dtype=float)[None, :])[:, 0], mu_floor
        )


def predict(
    vp: VariationalParams,
    arch: MlpArchitecture,
    x,
    n: int,
    seed: int,
    mu_floor: float = COV_MU_FLOOR,
) -> PredictiveDistribution:
    """Monte Carlo predictive distribution from `n` seeded posterior draws."""
    return PosteriorEnsemble(arch, vp, n, seed).predict(x, mu_floor)


def init_variational(arch: MlpArchitecture, seed: int, sigma_scale: float) -> VariationalParams:
    """Means from the deterministic init; widths at sigma_scale x He std."""
    mu = init_weights(arch, seed)
    rho = np.empty(arch.n_params)
    pos = 0
    for n_in, n_out in arch.layer_shapes():
        r = float(softplus_inv(sigma_scale * math.sqrt(2.0 / n_in)))
        rho[pos : pos + n_in * n_out + n_out] = r
        pos += n_in * n_out + n_out
    return VariationalParams(mu, rho)


@dataclass(frozen=True)
class BnnEpochRecord:
    epoch: int
    train_elbo: float
    val_mse: float


def train_bnn(
    train: Dataset,
    val: Dataset,
    arch: MlpArchitecture,
    prior: PriorSpec,
    like: LikelihoodSpec,
    hyper: BnnHyper,
) -> tuple[VariationalParams, list[BnnEpochRecord]]:
    """Stochastic ELBO ascent with early stopping on validation MSE.

    The per-batch KL weight is len(batch)/len(train), so one epoch's summed
    objective equals the full-dataset ELBO. Validation MSE uses the mean of
    `n_pred` posterior draws under noise frozen once per run, keeping the
    early-stopping signal free of fresh Monte Carlo jitter.
    """
    if len(train) == 0 or len(val) == 0:
        raise DimensionMismatch("train and validation sets must be non-empty")
    vp = init_variational(arch, hyper.seed, hyper.sigma_init_scale)
    opt = AdamState.zeros(2 * arch.n_params)
    theta = np.concatenate([vp.mu, vp.rho])
    noise_rng = make_rng(hyper.seed, "elbo-noise")
    val_eps = make_rng(hyper.seed, "val-noise").standard_normal(
        (hyper.n_pred, arch.n_params)
    )
    n_train = len(train)
    best = vp.copy()
    best_val = math.inf
    best_epoch = 0
    history: list[BnnEpochRecord] = []
    for epoch in range(1, hyper.max_epochs + 1):
        total = 0.0
        for idx in batches(train, hyper.batch_size, hyper.seed, epoch):
            eps = noise_rng.standard_normal((hyper.mc_samples, arch.n_params))
            value, g_mu, g_rho = _elbo_terms(
                arch,
                vp,
                train.features[idx],
                train.labels[idx],
                prior,
                like,
                eps,
                len(idx) / n_train,
                True,
            )
            if not math.isfinite(value):
                raise Diverged(f"ELBO became {value} at epoch {epoch}")
            grad = np.concatenate([-g_mu, -g_rho])
            opt, theta = adaptive_step(opt, theta, grad, hyper)
            vp = VariationalParams(theta[: arch.n_params], theta[arch.n_params :])
            total += value
        draws = sample_weights(vp, val_eps)
        outputs = _ensemble_outputs(arch, draws, val.features)
        val_mse = float(np.mean((outputs.mean(axis=0) - val.labels) ** 2))
        if not math.isfinite(val_mse):
            raise Diverged(f"validation MSE became {val_mse} at epoch {epoch}")
        history.append(BnnEpochRecord(epoch, total, val_mse))
        if val_mse < best_val:
            best_val = val_mse
            best = vp.copy()
            best_epoch = epoch
        if epoch - best_epoch >= hyper.early_stop_patience:
            break
    return best, history


def _stacked_forward(layers, n_draws, X) -> np.ndarray:
    a = np.broadcast_to(X, (n_draws,) + X.shape)
    last = len(layers) - 1
    for i, (W, b) in enumerate(layers):
        z = a @ W + b
        a = np.maximum(z, 0.0) if i < last else z
    return a[:, :, 0]


def _ensemble_outputs(arch, w_flat, X) -> np.ndarray:
    """(n_draws, batch) outputs for pre-drawn flat weight vectors."""
    X, _ = _as_batch(arch, X)
    return _stacked_forward(_stack_layers(arch, w_flat), len(w_flat), X)
