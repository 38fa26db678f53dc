"""Command-line entry point orchestrating the full pipeline.

Commands: gen-data, train, drive, eval-suite, report. Every command loads
the YAML experiment configuration (defaults when omitted), honors a --seed
override, and prints the digest of the effective configuration so runs can
be identified exactly. Relative output paths resolve under $CONFIDRIVE_OUT
when that variable is set.

Exit codes: 0 success (for drive: lap completed), 1 invalid configuration or
missing/malformed files, 2 domain failure (expert crashed during generation,
training diverged), 3 drive ended in a crash, 4 drive hit the step limit.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import checkpoints, data
from .bnn import train_bnn
from .config import config_digest, load_config
from .errors import (
    ConfidriveError,
    ConfigInvalid,
    Diverged,
    ExpertCrashed,
)
from .mlp import MlpArchitecture, train_dnn
from .simloop import EpisodeConfig, evaluate_suite, run_episode
from .report import (
    format_summary_table,
    read_episode_log,
    render_cov_svg,
    render_trajectory_svg,
    summarize_log,
    write_summary_csv,
)

_EXIT_OK = 0
_EXIT_CONFIG = 1
_EXIT_DOMAIN = 2
_EXIT_CRASHED = 3
_EXIT_STEPLIMIT = 4


def _out_path(p) -> Path:
    root = os.environ.get("CONFIDRIVE_OUT")
    p = Path(p)
    if root and not p.is_absolute():
        p = Path(root) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = int(args.seed)
    print(f"config digest: {config_digest(cfg)}")
    return cfg


def _arch_for(n_rays: int) -> MlpArchitecture:
    return MlpArchitecture((n_rays, 256, 128, 64, 32, 16, 1))


def cmd_gen_data(args) -> int:
    cfg = _load(args)
    track = cfg.resolve_track(args.track)
    ds = data.generate(
        track=track,
        gains=cfg.pid,
        speeds_mph=list(cfg.dataset.speeds_mph),
        laps_per_speed=cfg.dataset.laps_per_speed,
        record_every=cfg.dataset.record_every,
        seed=cfg.seed,
        lidar=cfg.lidar_config(),
        vehicle=cfg.vehicle_params(),
    )
    out = _out_path(args.out)
    digest = data.save(ds, out)
    print(f"wrote {out}: {len(ds)} samples, digest={digest}")
    return _EXIT_OK


def cmd_train(args) -> int:
    cfg = _load(args)
    ds = data.load(args.data)
    train, val = data.split(ds, cfg.dataset.train_fraction, cfg.seed)
    arch = _arch_for(ds.meta.n_rays)
    out = _out_path(args.out)
    history_path = out.with_suffix(out.suffix + ".history.csv")
    if args.model == "dnn":
        weights, history = train_dnn(train, val, arch, cfg.dnn_hyper(cfg.seed))
        digest = checkpoints.save_dnn(out, checkpoints.DnnModel(arch, weights), cfg.seed)
        with open(history_path, "w", encoding="utf-8") as f:
            f.write("epoch,train_mse,val_mse\n")
            for r in history:
                f.write(f"{r.epoch},{r.train_loss:.9g},{r.val_loss:.9g}\n")
        best = min(r.val_loss for r in history)
    else:
        vp, history = train_bnn(
            train, val, arch, cfg.prior(), cfg.likelihood(), cfg.bnn_hyper(cfg.seed)
        )
        model = checkpoints.BnnModel(arch, vp, cfg.prior(), cfg.likelihood())
        digest = checkpoints.save_bnn(out, model, cfg.seed)
        with open(history_path, "w", encoding="utf-8") as f:
            f.write("epoch,train_elbo,val_mse\n")
            for r in history:
                f.write(f"{r.epoch},{r.train_elbo:.9g},{r.val_mse:.9g}\n")
        best = min(r.val_mse for r in history)
    print(
        f"wrote {out} (digest={digest}), history {history_path}; "
        f"train/val sizes {len(train)}/{len(val)}; best val mse={best:.6g}"
    )
    return _EXIT_OK


def _episode_config(cfg, track, controller, supervisor_enabled) -> EpisodeConfig:
    return EpisodeConfig(
        track=track,
        controller=controller,
        supervisor_enabled=supervisor_enabled,
        speed_mph=cfg.vehicle.speed_mph,
        seed=cfg.seed,
        lidar=cfg.lidar_config(),
        vehicle=cfg.vehicle_params(),
        pid=cfg.pid,
        supervisor=cfg.supervisor_config(),
        n_pred=cfg.bnn.n_pred,
        mu_floor=cfg.bnn.mu_floor,
    )


def _load_models(path):
    model = checkpoints.load_model(path)
    if isinstance(model, checkpoints.DnnModel):
        return "dnn", model, None
    return "bnn", None, model


def cmd_drive(args) -> int:
    cfg = _load(args)
    track = cfg.resolve_track(args.track)
    controller, dnn, bnn = _load_models(args.model_file)
    supervisor_on = args.supervisor == "on"
    ep = _episode_config(cfg, track, controller, supervisor_on)
    out = _out_path(args.out)
    result = run_episode(ep, dnn=dnn, bnn=bnn, log_path=out)
    print(
        f"outcome={result.outcome} lap_time={result.lap_time:.3f} "
        f"interventions={result.interventions} steps_in_manual={result.steps_in_manual} "
        f"max_abs_offset={result.max_abs_offset:.3f} log={out}"
    )
    if result.outcome == "LapCompleted":
        return _EXIT_OK
    if result.outcome == "Crashed":
        return _EXIT_CRASHED
    return _EXIT_STEPLIMIT


def cmd_eval_suite(args) -> int:
    cfg = _load(args)
    names = [n.strip() for n in args.tracks.split(",") if n.strip()]
    tracks = [cfg.resolve_track(n) for n in names]
    controller, dnn, bnn = _load_models(args.model_file)
    supervisor_on = args.supervisor == "on"
    out_dir = _out_path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = evaluate_suite(
        tracks,
        lambda trk: _episode_config(cfg, trk, controller, supervisor_on),
        dnn=dnn,
        bnn=bnn,
        log_dir=out_dir,
    )
    report_csv = out_dir / "report.csv"
    with open(report_csv, "w", encoding="utf-8") as f:
        f.write("track,outcome,lap_time_s,interventions,steps_in_manual,max_abs_offset_m,error\n")
        for r in rows:
            f.write(
                f"{r.track},{r.outcome},{r.lap_time:.3f},{r.interventions},"
                f"{r.steps_in_manual},{r.max_abs_offset:.3f},{r.error or ''}\n"
            )
    width = max([len("track")] + [len(r.track) for r in rows]) + 2
    print(f"{'track':<{width}}{'outcome':<14}{'time[s]':>9}{'interv':>7}{'max|off|':>9}")
    for r in rows:
        print(
            f"{r.track:<{width}}{r.outcome:<14}{r.lap_time:>9.1f}"
            f"{r.interventions:>7}{r.max_abs_offset:>9.2f}"
        )
    print(f"wrote {report_csv}")
    return _EXIT_OK


def cmd_report(args) -> int:
    _load(args)
    out_dir = _out_path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    logs_dir = Path(args.logs)
    if not logs_dir.is_dir():
        raise FileNotFoundError(f"log directory {logs_dir} does not exist")
    log_paths = sorted(logs_dir.glob("*.csv"))
    log_paths = [p for p in log_paths if p.name != "report.csv"]
    summaries = []
    for path in log_paths:
        log = read_episode_log(path)
        render_trajectory_svg(log, out_dir / (path.stem + "_trajectory.svg"))
        render_cov_svg(log, out_dir / (path.stem + "_cov.svg"))
        summaries.append(summarize_log(log))
    write_summary_csv(summaries, out_dir / "summary.csv")
    table = format_summary_table(summaries)
    print(table)
    print(f"wrote {out_dir / 'summary.csv'} and {2 * len(summaries)} SVG plots")
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confidrive",
        description="Uncertainty-aware lateral control workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="YAML experiment config")
        p.add_argument("--seed", type=int, default=None, help="override the global seed")

    p = sub.add_parser("gen-data", help="drive the PID expert and record a dataset")
    common(p)
    p.add_argument("--track", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="train a model on a dataset file")
    common(p)
    p.add_argument("--model", choices=("dnn", "bnn"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("drive", help="run one closed-loop episode")
    common(p)
    p.add_argument("--model-file", required=True)
    p.add_argument("--track", required=True)
    p.add_argument("--supervisor", choices=("on", "off"), default="off")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_drive)

    p = sub.add_parser("eval-suite", help="one episode per track, plus a report")
    common(p)
    p.add_argument("--model-file", required=True)
    p.add_argument("--tracks", required=True, help="comma-separated track names")
    p.add_argument("--supervisor", choices=("on", "off"), default="off")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_eval_suite)

    p = sub.add_parser("report", help="aggregate episode logs into tables and SVGs")
    common(p)
    p.add_argument("--logs", required=True, help="directory of episode CSV logs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ExpertCrashed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DOMAIN
    except Diverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DOMAIN
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except ConfidriveError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
