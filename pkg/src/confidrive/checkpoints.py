"""Model checkpoint files: text header plus 9-significant-digit weight lines.

The header carries the model kind, architecture, training seed, posterior
hyperparameters for the Bayesian model, and a SHA-256 digest of the value
lines. Loading verifies the digest and the value count against the declared
architecture.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .bnn import LikelihoodSpec, PriorSpec, VariationalParams
from .errors import DigestMismatch, MalformedRow
from .mlp import MlpArchitecture

_FMT = "%.9g"


@dataclass(frozen=True)
class DnnModel:
    arch: MlpArchitecture
    weights: np.ndarray


@dataclass(frozen=True)
class BnnModel:
    arch: MlpArchitecture
    vp: VariationalParams
    prior: PriorSpec
    like: LikelihoodSpec


def _digest_lines(lines: list[str]) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def _write(path, header: dict[str, str], values: np.ndarray) -> str:
    lines = [(_FMT % v) for v in values]
    digest = _digest_lines(lines)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key, val in header.items():
            f.write(f"# {key}={val}\n")
        f.write(f"# digest={digest}\n")
        for line in lines:
            f.write(line + "\n")
    return digest


def save_dnn(path, model: DnnModel, seed: int) -> str:
    """Write a deterministic-MLP checkpoint; returns its digest."""
    header = {
        "model": "dnn",
        "layers": ",".join(str(s) for s in model.arch.layer_sizes),
        "seed": str(int(seed)),
    }
    return _write(path, header, model.weights)


def save_bnn(path, model: BnnModel, seed: int) -> str:
    """Write a Bayesian-MLP checkpoint (mu block then rho block)."""
    header = {
        "model": "bnn",
        "layers": ",".join(str(s) for s in model.arch.layer_sizes),
        "prior_sigma": _FMT % model.prior.sigma,
        "noise_sigma": _FMT % model.like.sigma,
        "seed": str(int(seed)),
    }
    values = np.concatenate([model.vp.mu, model.vp.rho])
    return _write(path, header, values)


def load_model(path):
    """Read a checkpoint, verify digest and shape, return the model."""
    header: dict[str, str] = {}
    lines: list[str] = []
    with open(path, "r", encoding="utf-8") as f:
        for raw in f:
            raw = raw.rstrip("\n")
            if not raw:
                continue
            if raw.startswith("#"):
                body = raw[1:].strip()
                if "=" not in body:
                    raise MalformedRow(f"bad checkpoint header line: {raw!r}")
                key, _, val = body.partition("=")
                header[key.strip()] = val.strip()
            else:
                lines.append(raw)
    for key in ("model", "layers", "seed", "digest"):
        if key not in header:
            raise MalformedRow(f"missing checkpoint header field '{key}'")
    if _digest_lines(lines) != header["digest"]:
        raise DigestMismatch("checkpoint digest does not match its value lines")
    try:
        arch = MlpArchitecture(tuple(int(s) for s in header["layers"].split(",")))
        values = np.array([float(line) for line in lines])
    except ValueError as exc:
        raise MalformedRow(f"unparsable checkpoint content: {exc}") from exc
    kind = header["model"]
    if kind == "dnn":
        if len(values) != arch.n_params:
            raise MalformedRow(
                f"{len(values)} weights, architecture wants {arch.n_params}"
            )
        return DnnModel(arch=arch, weights=values)
    if kind == "bnn":
        if len(values) != 2 * arch.n_params:
            raise MalformedRow(
                f"{len(values)} values, posterior wants {2 * arch.n_params}"
            )
        for key in ("prior_sigma", "noise_sigma"):
            if key not in header:
                raise MalformedRow(f"missing bnn header field '{key}'")
        vp = VariationalParams(values[: arch.n_params], values[arch.n_params :])
        return BnnModel(
            arch=arch,
            vp=vp,
            prior=PriorSpec(sigma=float(header["prior_sigma"])),
            like=LikelihoodSpec(sigma=float(header["noise_sigma"])),
        )
    raise MalformedRow(f"unknown checkpoint model kind '{kind}'")
