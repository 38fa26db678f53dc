"""Declarative experiment configuration: one YAML tree drives the pipeline.

Every field has a documented default; unknown keys anywhere in the tree are
rejected. The canonical dump of the effective configuration (defaults plus
overrides, sorted) is hashed so every command can print a digest that
identifies the experiment exactly.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import yaml

from .bnn import BnnHyper, LikelihoodSpec, PriorSpec
from .errors import ConfigInvalid
from .geometry import (
    Arc,
    Straight,
    Track,
    TrackSpec,
    builtin_track,
    builtin_tracks,
    compile_track,
)
from .lidar import LidarConfig
from .mlp import TrainHyper
from .pid import PidGains
from .supervisor import SupervisorConfig
from .vehicle import VehicleParams


@dataclass(frozen=True)
class DatasetConfig:
    speeds_mph: tuple[float, ...] = (50.0, 60.0, 70.0)
    laps_per_speed: int = 2
    record_every: int = 25
    train_fraction: float = 0.9


@dataclass(frozen=True)
class DnnConfig:
    max_epochs: int = 500
    batch_size: int = 64
    learning_rate: float = 1.0e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1.0e-8
    patience: int = 20


@dataclass(frozen=True)
class BnnConfig(DnnConfig):
    mc_samples: int = 2
    n_pred: int = 30
    prior_sigma: float = 1.0
    noise_sigma: float = 0.05
    sigma_init_scale: float = 0.05
    mu_floor: float = 0.02


@dataclass(frozen=True)
class LidarSection:
    n_rays: int = 19
    fov_deg: float = 180.0
    max_range: float = 100.0


@dataclass(frozen=True)
class VehicleSection:
    wheelbase: float = 2.6
    max_steer_deg: float = math.degrees(0.37)
    dt: float = 0.002
    speed_mph: float = 60.0


@dataclass(frozen=True)
class SupervisorSection:
    cov_threshold: float = 3.0
    consecutive: int = 50


@dataclass
class ExperimentConfig:
    seed: int = 0
    out_dir: str = "runs"
    lidar: LidarSection = field(default_factory=LidarSection)
    vehicle: VehicleSection = field(default_factory=VehicleSection)
    pid: PidGains = field(default_factory=PidGains)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    dnn: DnnConfig = field(default_factory=DnnConfig)
    bnn: BnnConfig = field(default_factory=BnnConfig)
    supervisor: SupervisorSection = field(default_factory=SupervisorSection)
    custom_tracks: dict[str, TrackSpec] = field(default_factory=dict)

    # -- materialized component configs ----------------------------------

    def lidar_config(self) -> LidarConfig:
        return LidarConfig(
            n_rays=self.lidar.n_rays,
            fov=math.radians(self.lidar.fov_deg),
            max_range=self.lidar.max_range,
        )

    def vehicle_params(self) -> VehicleParams:
        return VehicleParams(
            wheelbase=self.vehicle.wheelbase,
            max_steer_angle=math.radians(self.vehicle.max_steer_deg),
            dt=self.vehicle.dt,
        )

    def supervisor_config(self) -> SupervisorConfig:
        return SupervisorConfig(
            cov_threshold=self.supervisor.cov_threshold,
            required_consecutive=self.supervisor.consecutive,
        )

    def dnn_hyper(self, seed: int) -> TrainHyper:
        d = self.dnn
        return TrainHyper(
            max_epochs=d.max_epochs,
            batch_size=d.batch_size,
            learning_rate=d.learning_rate,
            beta1=d.beta1,
            beta2=d.beta2,
            epsilon=d.epsilon,
            early_stop_patience=d.patience,
            seed=seed,
        )

    def bnn_hyper(self, seed: int) -> BnnHyper:
        b = self.bnn
        return BnnHyper(
            max_epochs=b.max_epochs,
            batch_size=b.batch_size,
            learning_rate=b.learning_rate,
            beta1=b.beta1,
            beta2=b.beta2,
            epsilon=b.epsilon,
            early_stop_patience=b.patience,
            seed=seed,
            mc_samples=b.mc_samples,
            n_pred=b.n_pred,
            sigma_init_scale=b.sigma_init_scale,
        )

    def prior(self) -> PriorSpec:
        return PriorSpec(sigma=self.bnn.prior_sigma)

    def likelihood(self) -> LikelihoodSpec:
        return LikelihoodSpec(sigma=self.bnn.noise_sigma)

    def track_names(self) -> list[str]:
        return [s.name for s in builtin_tracks()] + sorted(self.custom_tracks)

    def resolve_track(self, name: str) -> Track:
        if name in self.custom_tracks:
            return compile_track(self.custom_tracks[name])
        try:
            return builtin_track(name)
        except KeyError:
            raise ConfigInvalid(
                f"unknown track '{name}'; valid tracks: {', '.join(self.track_names())}"
            ) from None


def _take(section: dict, name: str, fields: dict):
    """Pop known keys from a raw mapping, rejecting anything unknown."""
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigInvalid(f"section '{name}' must be a mapping")
    unknown = set(section) - set(fields)
    if unknown:
        raise ConfigInvalid(
            f"unknown keys in '{name}': {', '.join(sorted(map(str, unknown)))}"
        )
    out = {}
    for key, conv in fields.items():
        if key in section:
            try:
                out[key] = conv(section[key])
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid(f"bad value for {name}.{key}: {exc}") from exc
    return out


def _parse_segments(name: str, raw) -> tuple:
    if not isinstance(raw, list) or not raw:
        raise ConfigInvalid(f"track '{name}': segments must be a non-empty list")
    segments = []
    for i, rec in enumerate(raw):
        if not isinstance(rec, dict) or "kind" not in rec:
            raise ConfigInvalid(f"track '{name}' segment {i}: need a 'kind' field")
        kind = str(rec["kind"]).lower()
        if kind == "straight":
            extra = set(rec) - {"kind", "length"}
            if extra or "length" not in rec:
                raise ConfigInvalid(
                    f"track '{name}' segment {i}: straight needs exactly 'length'"
                )
            segments.append(Straight(length=float(rec["length"])))
        elif kind == "arc":
            extra = set(rec) - {"kind", "radius", "sweep_deg"}
            if extra or "radius" not in rec or "sweep_deg" not in rec:
                raise ConfigInvalid(
                    f"track '{name}' segment {i}: arc needs 'radius' and 'sweep_deg'"
                )
            segments.append(
                Arc(radius=float(rec["radius"]), sweep=math.radians(float(rec["sweep_deg"])))
            )
        else:
            raise ConfigInvalid(f"track '{name}' segment {i}: unknown kind '{kind}'")
    return tuple(segments)


def _parse_tracks(raw) -> dict[str, TrackSpec]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigInvalid("'tracks' must map names to track definitions")
    builtin_names = {s.name for s in builtin_tracks()}
    out = {}
    for name, body in raw.items():
        name = str(name)
        if name in builtin_names:
            raise ConfigInvalid(f"track '{name}' shadows a builtin track")
        if not isinstance(body, dict):
            raise ConfigInvalid(f"track '{name}' must be a mapping")
        unknown = set(body) - {"width", "segments", "start_pose"}
        if unknown:
            raise ConfigInvalid(
                f"track '{name}': unknown keys {', '.join(sorted(unknown))}"
            )
        if "width" not in body or "segments" not in body:
            raise ConfigInvalid(f"track '{name}': need 'width' and 'segments'")
        pose = body.get("start_pose", (0.0, 0.0, 0.0))
        if not isinstance(pose, (list, tuple)) or len(pose) != 3:
            raise ConfigInvalid(f"track '{name}': start_pose must be [x, y, heading]")
        out[name] = TrackSpec(
            name=name,
            segments=_parse_segments(name, body["segments"]),
            width=float(body["width"]),
            start_pose=tuple(float(v) for v in pose),
        )
    return out


def parse_config(raw: dict | None) -> ExperimentConfig:
    """Build a validated ExperimentConfig from a raw mapping."""
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigInvalid("configuration root must be a mapping")
    known = {
        "seed",
        "out_dir",
        "lidar",
        "vehicle",
        "pid",
        "dataset",
        "dnn",
        "bnn",
        "supervisor",
        "tracks",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigInvalid(f"unknown top-level keys: {', '.join(sorted(map(str, unknown)))}")
    try:
        cfg = ExperimentConfig(
            seed=int(raw.get("seed", 0)),
            out_dir=str(raw.get("out_dir", "runs")),
            lidar=LidarSection(
                **_take(raw.get("lidar"), "lidar", {"n_rays": int, "fov_deg": float, "max_range": float})
            ),
            vehicle=VehicleSection(
                **_take(
                    raw.get("vehicle"),
                    "vehicle",
                    {"wheelbase": float, "max_steer_deg": float, "dt": float, "speed_mph": float},
                )
            ),
            pid=PidGains(
                **_take(
                    raw.get("pid"),
                    "pid",
                    {"kp": float, "ki": float, "kd": float, "k_heading": float, "integral_limit": float},
                )
            ),
            dataset=DatasetConfig(
                **_take(
                    raw.get("dataset"),
                    "dataset",
                    {
                        "speeds_mph": lambda v: tuple(float(x) for x in v),
                        "laps_per_speed": int,
                        "record_every": int,
                        "train_fraction": float,
                    },
                )
            ),
            dnn=DnnConfig(
                **_take(
                    raw.get("dnn"),
                    "dnn",
                    {
                        "max_epochs": int,
                        "batch_size": int,
                        "learning_rate": float,
                        "beta1": float,
                        "beta2": float,
                        "epsilon": float,
                        "patience": int,
                    },
                )
            ),
            bnn=BnnConfig(
                **_take(
                    raw.get("bnn"),
                    "bnn",
                    {
                        "max_epochs": int,
                        "batch_size": int,
                        "learning_rate": float,
                        "beta1": float,
                        "beta2": float,
                        "epsilon": float,
                        "patience": int,
                        "mc_samples": int,
                        "n_pred": int,
                        "prior_sigma": float,
                        "noise_sigma": float,
                        "sigma_init_scale": float,
                        "mu_floor": float,
                    },
                )
            ),
            supervisor=SupervisorSection(
                **_take(
                    raw.get("supervisor"),
                    "supervisor",
                    {"cov_threshold": float, "consecutive": int},
                )
            ),
            custom_tracks=_parse_tracks(raw.get("tracks")),
        )
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc
    return cfg


def load_config(path=None) -> ExperimentConfig:
    """Load a YAML config file, or the pure defaults when path is None."""
    if path is None:
        return parse_config({})
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ConfigInvalid(f"could not parse {path}: {exc}") from exc
    return parse_config(raw)


def _dump_canonical(obj, prefix: str, lines: list[str]) -> None:
    if hasattr(obj, "__dataclass_fields__"):
        for name in sorted(obj.__dataclass_fields__):
            _dump_canonical(getattr(obj, name), f"{prefix}.{name}" if prefix else name, lines)
    elif isinstance(obj, dict):
        for key in sorted(obj):
            _dump_canonical(obj[key], f"{prefix}.{key}", lines)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _dump_canonical(v, f"{prefix}.{i}", lines)
    else:
        lines.append(f"{prefix}={obj!r}")


def config_digest(cfg: ExperimentConfig) -> str:
    """SHA-256 of the canonical sorted key=value dump of the configuration."""
    lines: list[str] = []
    _dump_canonical(cfg, "", lines)
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()
