"""Supervised steering dataset: generation, persistence, splitting, batching.

Rows pair one normalized lidar scan with the expert steering command issued
at the same instant. Files are plain UTF-8 CSV with `#`-prefixed metadata
header lines followed by data rows of 9-significant-digit decimals; a
SHA-256 digest of the data rows rides in the header and is verified on load.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DigestMismatch, EmptySplit, ExpertCrashed, MalformedRow
from .geometry import Track
from .lidar import LidarConfig, scan
from .pid import PidGains, pid_steer, reset
from .rng import make_rng
from .vehicle import VehicleParams, VehicleState, mph_to_mps, step

_FMT = "%.9g"


@dataclass(frozen=True)
class Sample:
    """One (normalized scan, steering label) pair."""

    features: np.ndarray
    label: float


@dataclass(frozen=True)
class DatasetMeta:
    track_name: str
    n_rays: int
    max_range: float
    speeds_mph: tuple[float, ...]
    seed: int


class Dataset:
    """Ordered sample collection stored as dense feature/label arrays."""

    def __init__(self, features: np.ndarray, labels: np.ndarray, meta: DatasetMeta):
        features = np.asarray(features, dtype=float)
        labels = np.asarray(labels, dtype=float)
        if features.ndim != 2 or len(features) != len(labels):
            raise MalformedRow("features must be (n, d) with matching labels")
        if features.shape[1] != meta.n_rays:
            raise MalformedRow(
                f"feature width {features.shape[1]} != n_rays {meta.n_rays}"
            )
        self.features = features
        self.labels = labels
        self.meta = meta

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, i: int) -> Sample:
        return Sample(features=self.features[i], label=float(self.labels[i]))

    def rows_text(self) -> list[str]:
        """Data rows exactly as persisted (9 significant digits)."""
        out = []
        for feat, lab in zip(self.features, self.labels):
            cells = [(_FMT % v) for v in feat] + [_FMT % lab]
            out.append(",".join(cells))
        return out

    def digest(self) -> str:
        """SHA-256 over the newline-terminated data rows."""
        h = hashlib.sha256()
        for row in self.rows_text():
            h.update(row.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


def generate(
    track: Track,
    gains: PidGains,
    speeds_mph: list[float],
    laps_per_speed: int,
    record_every: int,
    seed: int,
    lidar: LidarConfig | None = None,
    vehicle: VehicleParams | None = None,
) -> Dataset:
    """Drive the PID expert and record decimated (scan, steer) pairs.

    One continuous run per speed covers `laps_per_speed` laps; a sample is
    recorded at every `record_every`-th simulation step, counted per run.
    Raises ExpertCrashed if the expert ever leaves the corridor.
    """
    lidar = lidar or LidarConfig()
    base = vehicle or VehicleParams()
    feats, labels = [], []
    L = track.total_length
    for speed in speeds_mph:
        params = replace(base, target_speed=mph_to_mps(speed))
        x, y, h, _ = track.pose_at(0.0)
        state = VehicleState(x, y, h, params.target_speed)
        pstate = reset()
        laps_done = 0
        cum = 0.0
        s_prev = 0.0
        k = 0
        max_steps = int(
            math.ceil((laps_per_speed + 1) * L / (params.target_speed * params.dt))
        )
        while laps_done < laps_per_speed:
            if k > max_steps:
                raise ExpertCrashed(
                    f"expert stalled on '{track.name}' at {speed} mph"
                )
            off, s = track.lateral_offset((state.x, state.y))
            if abs(off) > track.width / 2.0:
                raise ExpertCrashed(
                    f"expert left '{track.name}' at {speed} mph, step {k}"
                )
            if k > 0:
                raw = s - s_prev
                ds = raw - L * round(raw / L)
                cum += ds
                if ds > 0.0 and raw < 0.0 and cum >= 0.95 * L:
                    laps_done += 1
                    cum = 0.0
            s_prev = s
            if laps_done >= laps_per_speed:
                break
            cmd, pstate = pid_steer(
                gains, pstate, track, state, params.dt, offset_s=(off, s)
            )
            if k % record_every == 0:
                sc = scan(track, state, lidar, verify_origin=False)
                feats.append(sc.normalized)
                labels.append(cmd.steer)
            state = step(state, cmd, params)
            k += 1
    meta = DatasetMeta(
        track_name=track.name,
        n_rays=lidar.n_rays,
        max_range=lidar.max_range,
        speeds_mph=tuple(float(v) for v in speeds_mph),
        seed=int(seed),
    )
    return Dataset(np.array(feats), np.array(labels), meta)


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle split; first floor(n * fraction) samples go to train."""
    if not 0.0 < train_fraction < 1.0:
        raise EmptySplit("train_fraction must lie strictly between 0 and 1")
    n = len(ds)
    n_train = int(math.floor(n * train_fraction))
    if n_train == 0 or n_train == n:
        raise EmptySplit(f"split {n_train}/{n - n_train} would leave a side empty")
    perm = make_rng(seed, "split").permutation(n)
    tr, va = perm[:n_train], perm[n_train:]
    return (
        Dataset(ds.features[tr], ds.labels[tr], ds.meta),
        Dataset(ds.features[va], ds.labels[va], ds.meta),
    )


def batches(ds: Dataset, batch_size: int, seed: int, epoch: int) -> list[np.ndarray]:
    """Per-epoch seeded permutation chopped into batches; last may be short."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    perm = make_rng(seed, "batches", epoch).permutation(len(ds))
    return [perm[i : i + batch_size] for i in range(0, len(ds), batch_size)]


def save(ds: Dataset, path) -> str:
    """Write the dataset file; returns the content digest."""
    digest = ds.digest()
    m = ds.meta
    speeds = ",".join(_FMT % v for v in m.speeds_mph)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# n_rays={m.n_rays}\n")
        f.write(f"# max_range={m.max_range!r}\n")
        f.write(f"# track={m.track_name}\n")
        f.write(f"# speeds={speeds}\n")
        f.write(f"# seed={m.seed}\n")
        f.write(f"# digest={digest}\n")
        for row in ds.rows_text():
            f.write(row + "\n")
    return digest


def load(path) -> Dataset:
    """Read and validate a dataset file written by `save`."""
    header: dict[str, str] = {}
    rows: list[str] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" not in body:
                    raise MalformedRow(f"bad header line: {line!r}")
                key, _, val = body.partition("=")
                header[key.strip()] = val.strip()
            else:
                rows.append(line)
    for key in ("n_rays", "max_range", "track", "speeds", "seed", "digest"):
        if key not in header:
            raise MalformedRow(f"missing header field '{key}'")
    try:
        n_rays = int(header["n_rays"])
        max_range = float(header["max_range"])
        speeds = tuple(float(v) for v in header["speeds"].split(",") if v)
        seed = int(header["seed"])
    except ValueError as exc:
        raise MalformedRow(f"unparsable header value: {exc}") from exc
    h = hashlib.sha256()
    feats, labels = [], []
    for line in rows:
        h.update(line.encode("utf-8"))
        h.update(b"\n")
        cells = line.split(",")
        if len(cells) != n_rays + 1:
            raise MalformedRow(
                f"row has {len(cells)} columns, expected {n_rays + 1}"
            )
        try:
            vals = [float(c) for c in cells]
        except ValueError as exc:
            raise MalformedRow(f"non-numeric cell in row: {line!r}") from exc
        feat, lab = vals[:-1], vals[-1]
        if any(not 0.0 <= v <= 1.0 for v in feat):
            raise MalformedRow(f"feature outside [0, 1] in row: {line!r}")
        if not -1.0 <= lab <= 1.0:
            raise MalformedRow(f"label outside [-1, 1] in row: {line!r}")
        feats.append(feat)
        labels.append(lab)
    if h.hexdigest() != header["digest"]:
        raise DigestMismatch(
            f"stored digest {header['digest'][:12]}... does not match data rows"
        )
    meta = DatasetMeta(
        track_name=header["track"],
        n_rays=n_rays,
        max_range=max_range,
        speeds_mph=speeds,
        seed=seed,
    )
    return Dataset(np.array(feats, dtype=float), np.array(labels, dtype=float), meta)
