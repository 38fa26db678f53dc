"""Episode log parsing, aggregate tables, and SVG rendering.

Logs are the step CSVs written by the episode engine. Validation checks the
exact column header, strictly increasing timestamps, and the steering range
before anything is aggregated or drawn.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .errors import MalformedRow
from .geometry import Track, builtin_track
from .simloop import LOG_COLUMNS
from .supervisor import MANUAL


@dataclass
class EpisodeLog:
    path: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    offset: np.ndarray
    steer: np.ndarray
    mean: np.ndarray  # nan where empty
    std: np.ndarray
    cov: np.ndarray
    odd_total: np.ndarray
    mode: list[str]

    @property
    def n_steps(self) -> int:
        return len(self.t)

    @property
    def duration(self) -> float:
        return float(self.t[-1]) if len(self.t) else 0.0

    @property
    def interventions(self) -> int:
        count = 0
        prev = None
        for m in self.mode:
            if m == MANUAL and prev != MANUAL:
                count += 1
            prev = m
        return count

    @property
    def steps_in_manual(self) -> int:
        return sum(1 for m in self.mode if m == MANUAL)


def read_episode_log(path) -> EpisodeLog:
    """Parse one episode CSV, enforcing the log contract."""
    with open(path, "r", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path}: empty log") from None
        if ",".join(header) != LOG_COLUMNS:
            raise MalformedRow(f"{path}: unexpected columns {header}")
        cols = {name: [] for name in header}
        for row in reader:
            if len(row) != len(header):
                raise MalformedRow(f"{path}: row with {len(row)} cells")
            for name, cell in zip(header, row):
                cols[name].append(cell)

    def floats(name, optional=False):
        out = []
        for cell in cols[name]:
            if cell == "":
                if not optional:
                    raise MalformedRow(f"{path}: empty required cell in '{name}'")
                out.append(np.nan)
            else:
                out.append(float(cell))
        return np.array(out)

    t = floats("t")
    if len(t) == 0:
        raise MalformedRow(f"{path}: no data rows")
    if np.any(np.diff(t) <= 0):
        raise MalformedRow(f"{path}: non-monotone timestamps")
    steer = floats("steer")
    if np.any(np.abs(steer) > 1.0):
        raise MalformedRow(f"{path}: steering outside [-1, 1]")
    odd_total = floats("odd_total")
    return EpisodeLog(
        path=str(path),
        t=t,
        x=floats("x"),
        y=floats("y"),
        s=floats("s"),
        offset=floats("offset"),
        steer=steer,
        mean=floats("mean", optional=True),
        std=floats("std", optional=True),
        cov=floats("cov", optional=True),
        odd_total=odd_total,
        mode=cols["mode"],
    )


def _manual_spans(log: EpisodeLog) -> list[tuple[int, int]]:
    spans = []
    start = None
    for i, m in enumerate(log.mode):
        if m == MANUAL and start is None:
            start = i
        elif m != MANUAL and start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, len(log.mode)))
    return spans


def _guess_track(path) -> Track | None:
    stem = Path(path).stem
    if stem.startswith("episode_"):
        try:
            return builtin_track(stem[len("episode_") :])
        except KeyError:
            return None
    return None


def render_trajectory_svg(log: EpisodeLog, out_path, track: Track | None = None) -> None:
    """Top-down trajectory with Manual-authority spans highlighted."""
    if track is None:
        track = _guess_track(log.path)
    fig, ax = plt.subplots(figsize=(8, 8))
    if track is not None:
        for poly in (track.left_boundary, track.right_boundary):
            closed = np.vstack([poly, poly[:1]])
            ax.plot(closed[:, 0], closed[:, 1], color="0.6", lw=0.8)
    ax.plot(log.x, log.y, color="tab:blue", lw=1.0, label="autonomous")
    for a, b in _manual_spans(log):
        ax.plot(log.x[a:b], log.y[a:b], color="tab:red", lw=2.0)
    if log.steps_in_manual:
        ax.plot([], [], color="tab:red", lw=2.0, label="manual")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(Path(log.path).stem)
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)


def render_cov_svg(log: EpisodeLog, out_path, cov_threshold: float = 3.0) -> None:
    """Confidence trace: |CoV| against time with the handover threshold."""
    fig, ax = plt.subplots(figsize=(10, 3.5))
    cov = log.cov
    if np.all(np.isnan(cov)):
        ax.text(0.5, 0.5, "no prediction statistics in this log", ha="center")
    else:
        ax.plot(log.t, np.abs(cov), lw=0.7, color="tab:blue")
        ax.axhline(cov_threshold, color="tab:red", ls="--", lw=1.0, label="threshold")
        for a, b in _manual_spans(log):
            ax.axvspan(log.t[a], log.t[min(b, len(log.t) - 1)], color="tab:red", alpha=0.15)
        ax.set_yscale("log")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("|CoV| [%]")
    ax.set_title(Path(log.path).stem)
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)


@dataclass(frozen=True)
class LogSummary:
    name: str
    steps: int
    duration: float
    interventions: int
    steps_in_manual: int
    max_abs_offset: float
    odd_total: int


def summarize_log(log: EpisodeLog) -> LogSummary:
    return LogSummary(
        name=Path(log.path).stem,
        steps=log.n_steps,
        duration=log.duration,
        interventions=log.interventions,
        steps_in_manual=log.steps_in_manual,
        max_abs_offset=float(np.max(np.abs(log.offset))),
        odd_total=int(log.odd_total[-1]),
    )


def write_summary_csv(summaries: list[LogSummary], out_path) -> None:
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["name", "steps", "duration_s", "interventions", "steps_in_manual", "max_abs_offset_m", "odd_total"]
        )
        for s in summaries:
            writer.writerow(
                [s.name, s.steps, "%.3f" % s.duration, s.interventions, s.steps_in_manual, "%.3f" % s.max_abs_offset, s.odd_total]
            )


def format_summary_table(summaries: list[LogSummary]) -> str:
    header = f"{'episode':<28}{'steps':>8}{'time[s]':>9}{'manual':>8}{'interv':>7}{'max|off|':>9}{'odd':>6}"
    lines = [header, "-" * len(header)]
    for s in summaries:
        lines.append(
            f"{s.name:<28}{s.steps:>8}{s.duration:>9.1f}{s.steps_in_manual:>8}"
            f"{s.interventions:>7}{s.max_abs_offset:>9.2f}{s.odd_total:>6}"
        )
    return "\n".join(lines)
