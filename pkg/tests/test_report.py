"""Episode-log validation, summaries, and SVG rendering."""
import math

import pytest

from confidrive.errors import MalformedRow
from confidrive.geometry import Arc, Straight, TrackSpec, compile_track
from confidrive.report import (
    format_summary_table,
    read_episode_log,
    render_cov_svg,
    render_trajectory_svg,
    summarize_log,
    write_summary_csv,
)
from confidrive.simloop import EpisodeConfig, run_episode


@pytest.fixture(scope="module")
def stadium():
    spec = TrackSpec(
        "stadium",
        (Straight(200.0), Arc(50.0, math.pi), Straight(200.0), Arc(50.0, math.pi)),
        15.0,
    )
    return compile_track(spec)


@pytest.fixture(scope="module")
def pid_log(stadium, tmp_path_factory):
    path = tmp_path_factory.mktemp("logs") / "episode_stadium.csv"
    run_episode(
        EpisodeConfig(track=stadium, controller="pid", max_steps=800), log_path=path
    )
    return path


class TestReadLog:
    def test_round_trip_fields(self, pid_log):
        log = read_episode_log(pid_log)
        assert log.n_steps == 800
        assert log.duration == pytest.approx(799 * 0.002)
        assert log.interventions == 0
        assert log.steps_in_manual == 0

    def test_non_monotone_time_rejected(self, pid_log, tmp_path):
        lines = pid_log.read_text().splitlines()
        lines[5], lines[6] = lines[6], lines[5]
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedRow):
            read_episode_log(bad)

    def test_wrong_columns_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(MalformedRow):
            read_episode_log(bad)

    def test_empty_log_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("")
        with pytest.raises(MalformedRow):
            read_episode_log(bad)

    def test_steer_out_of_range_rejected(self, pid_log, tmp_path):
        lines = pid_log.read_text().splitlines()
        cells = lines[1].split(",")
        cells[6] = "1.5"
        lines[1] = ",".join(cells)
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedRow):
            read_episode_log(bad)


class TestRendering:
    def test_trajectory_svg_written(self, pid_log, tmp_path):
        log = read_episode_log(pid_log)
        out = tmp_path / "traj.svg"
        render_trajectory_svg(log, out)
        content = out.read_text()
        assert content.lstrip().startswith("<?xml")
        assert "<svg" in content

    def test_cov_svg_written_for_pid_log(self, pid_log, tmp_path):
        log = read_episode_log(pid_log)
        out = tmp_path / "cov.svg"
        render_cov_svg(log, out)
        assert "<svg" in out.read_text()


class TestSummaries:
    def test_summary_values(self, pid_log):
        s = summarize_log(read_episode_log(pid_log))
        assert s.steps == 800
        assert s.interventions == 0
        assert s.max_abs_offset < 7.5
        assert s.odd_total == 0

    def test_csv_and_table(self, pid_log, tmp_path):
        s = summarize_log(read_episode_log(pid_log))
        out = tmp_path / "summary.csv"
        write_summary_csv([s], out)
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        table = format_summary_table([s])
        assert "episode_stadium" in table
