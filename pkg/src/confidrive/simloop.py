"""Closed-loop episode engine: sense, predict, supervise, actuate, integrate.

Each loop pass senses the vehicle state, runs the configured controller,
logs one step record, and integrates the vehicle one time step. Termination:
crossing the start line forward with at least 95% of the track length
accumulated (LapCompleted), leaving the corridor (Crashed, logged as a final
zero-command frame), or exhausting the step budget (StepLimit).

For the Bayesian controller the posterior is sampled once per episode with a
seed derived from the episode seed; every step then evaluates the same
cached draw set, which is exactly `predict` called with that fixed seed each
step. Prediction statistics are computed and logged every step, in Manual
mode too, because the supervisor needs the confidence signal to hand
authority back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bnn import COV_MU_FLOOR, PosteriorEnsemble
from .checkpoints import BnnModel, DnnModel
from .errors import ConfigInvalid, MissingModel
from .geometry import Track
from .lidar import LidarConfig, scan
from .mlp import forward
from .pid import PidGains, pid_steer, reset
from .rng import derive_seed
from .supervisor import AUTONOMOUS, MANUAL, SupervisorConfig, SupervisorState, update
from .vehicle import ControlCommand, VehicleParams, VehicleState, mph_to_mps, step

_FMT = "%.9g"

LOG_COLUMNS = "t,x,y,heading,s,offset,steer,mean,std,cov,odd,odd_total,mode"


@dataclass
class EpisodeConfig:
    track: Track
    controller: str
    supervisor_enabled: bool = False
    speed_mph: float = 60.0
    max_steps: int | None = None
    seed: int = 0
    lidar: LidarConfig = field(default_factory=LidarConfig)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    pid: PidGains = field(default_factory=PidGains)
    supervisor: SupervisorConfig = field(default_factory=SupervisorConfig)
    n_pred: int = 30
    mu_floor: float = COV_MU_FLOOR


@dataclass(frozen=True)
class StepRecord:
    t: float
    x: float
    y: float
    heading: float
    s: float
    offset: float
    steer: float
    mean: float | None
    std: float | None
    cov: float | None
    odd: int | None
    odd_total: int
    mode: str


@dataclass(frozen=True)
class EpisodeResult:
    outcome: str  # LapCompleted | Crashed | StepLimit
    lap_time: float
    interventions: int
    steps_in_manual: int
    max_abs_offset: float
    records: list[StepRecord]
    log_path: str | None = None


def _write_log(path, records) -> None:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return _FMT % v
        return str(v)

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(LOG_COLUMNS + "\n")
        for r in records:
            f.write(
                ",".join(
                    cell(v)
                    for v in (
                        r.t,
                        r.x,
                        r.y,
                        r.heading,
                        r.s,
                        r.offset,
                        r.steer,
                        r.mean,
                        r.std,
                        r.cov,
                        r.odd,
                        r.odd_total,
                        r.mode,
                    )
                )
                + "\n"
            )


def run_episode(
    cfg: EpisodeConfig,
    dnn: DnnModel | None = None,
    bnn: BnnModel | None = None,
    log_path=None,
) -> EpisodeResult:
    """Run one closed-loop episode and optionally write its step log."""
    if cfg.controller not in ("pid", "dnn", "bnn"):
        raise ConfigInvalid(f"unknown controller '{cfg.controller}'")
    if cfg.supervisor_enabled and cfg.controller != "bnn":
        raise ConfigInvalid("the supervisor requires the bnn controller")
    if cfg.controller == "dnn" and dnn is None:
        raise MissingModel("dnn controller requested without a checkpoint")
    if cfg.controller == "bnn" and bnn is None:
        raise MissingModel("bnn controller requested without a checkpoint")
    track = cfg.track
    params = replace(cfg.vehicle, target_speed=mph_to_mps(cfg.speed_mph))
    dt = params.dt
    L = track.total_length
    max_steps = cfg.max_steps
    if max_steps is None:
        max_steps = 10 * math.ceil(L / (params.target_speed * dt))
    if max_steps < 1:
        raise ConfigInvalid("max_steps must be >= 1")

    ensemble = None
    if cfg.controller == "bnn":
        ensemble = PosteriorEnsemble(
            bnn.arch, bnn.vp, cfg.n_pred, derive_seed(cfg.seed, "episode-predict")
        )

    x0, y0, h0, _ = track.pose_at(0.0)
    state = VehicleState(x0, y0, h0, params.target_speed)
    sup = SupervisorState()
    pid_state = reset()
    records: list[StepRecord] = []
    odd_total = 0
    cum = 0.0
    s_prev = 0.0
    max_off = 0.0
    outcome = "StepLimit"
    k = 0
    while True:
        if k >= max_steps:
            outcome = "StepLimit"
            break
        off, s = track.lateral_offset((state.x, state.y))
        max_off = max(max_off, abs(off))
        if abs(off) > track.width / 2.0:
            records.append(
                StepRecord(
                    t=k * dt,
                    x=state.x,
                    y=state.y,
                    heading=state.heading,
                    s=s,
                    offset=off,
                    steer=0.0,
                    mean=None,
                    std=None,
                    cov=None,
                    odd=None,
                    odd_total=odd_total,
                    mode=sup.mode if cfg.supervisor_enabled else AUTONOMOUS,
                )
            )
            outcome = "Crashed"
            break
        lap_done = False
        if k > 0:
            raw = s - s_prev
            ds = raw - L * round(raw / L)
            cum += ds
            if ds > 0.0 and raw < 0.0 and cum >= 0.95 * L:
                lap_done = True
        s_prev = s

        mean = std = cov = None
        odd = None
        mode = AUTONOMOUS
        if cfg.controller == "pid":
            # The expert steers from track ground truth; no scan needed.
            cmd, pid_state = pid_steer(
                cfg.pid, pid_state, track, state, dt, offset_s=(off, s)
            )
        elif cfg.controller == "dnn":
            sc = scan(track, state, cfg.lidar, verify_origin=False)
            cmd = ControlCommand(forward(dnn.arch, dnn.weights, sc.normalized))
        else:
            sc = scan(track, state, cfg.lidar, verify_origin=False)
            pd = ensemble.predict(sc.normalized, cfg.mu_floor)
            mean, std, cov, odd = pd.mean, pd.std, pd.cov, pd.odd_count
            odd_total += pd.odd_count
            if cfg.supervisor_enabled:
                prev_mode = sup.mode
                sup = update(sup, pd.cov, cfg.supervisor)
                mode = sup.mode
                if mode == MANUAL:
                    if prev_mode == AUTONOMOUS:
                        pid_state = reset()
                    cmd, pid_state = pid_steer(
                        cfg.pid, pid_state, track, state, dt, offset_s=(off, s)
                    )
                else:
                    cmd = ControlCommand(pd.mean)
            else:
                cmd = ControlCommand(pd.mean)
        records.append(
            StepRecord(
                t=k * dt,
                x=state.x,
                y=state.y,
                heading=state.heading,
                s=s,
                offset=off,
                steer=cmd.steer,
                mean=mean,
                std=std,
                cov=cov,
                odd=odd,
                odd_total=odd_total,
                mode=mode,
            )
        )
        if lap_done:
            outcome = "LapCompleted"
            break
        state = step(state, cmd, params)
        k += 1

    if log_path is not None:
        _write_log(log_path, records)
    return EpisodeResult(
        outcome=outcome,
        lap_time=records[-1].t if records else 0.0,
        interventions=sup.intervention_count,
        steps_in_manual=sup.steps_in_manual,
        max_abs_offset=max_off,
        records=records,
        log_path=str(log_path) if log_path is not None else None,
    )


@dataclass(frozen=True)
class SuiteRow:
    track: str
    outcome: str
    lap_time: float
    interventions: int
    steps_in_manual: int
    max_abs_offset: float
    log_path: str | None
    error: str | None = None


def evaluate_suite(
    tracks: list[Track],
    make_config,
    dnn: DnnModel | None = None,
    bnn: BnnModel | None = None,
    log_dir=None,
) -> list[SuiteRow]:
    """One episode per track; per-episode errors are recorded, not raised.

    `make_config` maps a Track to the EpisodeConfig for its episode. Row
    order follows the input track order.
    """
    rows: list[SuiteRow] = []
    for track in tracks:
        log_path = None
        if log_dir is not None:
            log_path = f"{log_dir}/episode_{track.name}.csv"
        try:
            res = run_episode(make_config(track), dnn=dnn, bnn=bnn, log_path=log_path)
            rows.append(
                SuiteRow(
                    track=track.name,
                    outcome=res.outcome,
                    lap_time=res.lap_time,
                    interventions=res.interventions,
                    steps_in_manual=res.steps_in_manual,
                    max_abs_offset=res.max_abs_offset,
                    log_path=res.log_path,
                )
            )
        except Exception as exc:  # noqa: BLE001 - suite must keep going
            rows.append(
                SuiteRow(
                    track=track.name,
                    outcome="Error",
                    lap_time=0.0,
                    interventions=0,
                    steps_in_manual=0,
                    max_abs_offset=0.0,
                    log_path=None,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return rows
