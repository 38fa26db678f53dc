"""Episode engine: termination, logging contract, supervisor integration."""
import math

import numpy as np
import pytest

from confidrive.bnn import LikelihoodSpec, PriorSpec, VariationalParams, init_variational
from confidrive.checkpoints import BnnModel, DnnModel
from confidrive.errors import ConfigInvalid, MissingModel
from confidrive.geometry import Arc, Straight, TrackSpec, compile_track
from confidrive.mlp import MlpArchitecture
from confidrive.simloop import EpisodeConfig, LOG_COLUMNS, evaluate_suite, run_episode
from confidrive.supervisor import MANUAL, SupervisorConfig, SupervisorState, update


@pytest.fixture(scope="module")
def stadium():
    spec = TrackSpec(
        "stadium",
        (Straight(200.0), Arc(50.0, math.pi), Straight(200.0), Arc(50.0, math.pi)),
        15.0,
    )
    return compile_track(spec)


ARCH = MlpArchitecture((19, 8, 1))


def degenerate_bnn(mu_scale=0.0):
    vp = init_variational(ARCH, 0, 0.05)
    vp = VariationalParams(vp.mu * mu_scale, np.full(ARCH.n_params, -40.0))
    return BnnModel(ARCH, vp, PriorSpec(), LikelihoodSpec())


class TestValidation:
    def test_unknown_controller(self, stadium):
        with pytest.raises(ConfigInvalid):
            run_episode(EpisodeConfig(track=stadium, controller="mpc"))

    def test_supervisor_requires_bnn(self, stadium):
        cfg = EpisodeConfig(track=stadium, controller="pid", supervisor_enabled=True)
        with pytest.raises(ConfigInvalid):
            run_episode(cfg)

    def test_missing_models(self, stadium):
        with pytest.raises(MissingModel):
            run_episode(EpisodeConfig(track=stadium, controller="dnn"))
        with pytest.raises(MissingModel):
            run_episode(EpisodeConfig(track=stadium, controller="bnn"))


class TestTermination:
    def test_single_step_limit(self, stadium):
        cfg = EpisodeConfig(track=stadium, controller="pid", max_steps=1)
        res = run_episode(cfg)
        assert res.outcome == "StepLimit"
        assert len(res.records) == 1
        assert res.records[0].t == 0.0

    def test_pid_completes_lap(self, stadium):
        res = run_episode(EpisodeConfig(track=stadium, controller="pid"))
        assert res.outcome == "LapCompleted"
        assert res.max_abs_offset < stadium.width / 4
        assert res.interventions == 0
        # Lap time close to length/speed.
        assert res.lap_time == pytest.approx(stadium.total_length / 26.8224, rel=0.02)

    def test_crash_detection_and_final_record(self, stadium):
        # A constant-steer "model": zero-weight net drives straight into the
        # wall on the first arc.
        dnn = DnnModel(ARCH, np.zeros(ARCH.n_params))
        res = run_episode(EpisodeConfig(track=stadium, controller="dnn", seed=1), dnn=dnn)
        assert res.outcome == "Crashed"
        final = res.records[-1]
        assert abs(final.offset) > stadium.width / 2
        assert final.steer == 0.0
        for r in res.records[:-1]:
            assert abs(r.offset) <= stadium.width / 2

    def test_crash_requires_model(self, stadium):
        dnn = DnnModel(ARCH, np.zeros(ARCH.n_params))
        res = run_episode(EpisodeConfig(track=stadium, controller="dnn"), dnn=dnn)
        assert res.outcome == "Crashed"


class TestLogContract:
    def test_log_columns_and_timestamps(self, stadium, tmp_path):
        path = tmp_path / "ep.csv"
        cfg = EpisodeConfig(track=stadium, controller="pid", max_steps=500)
        res = run_episode(cfg, log_path=path)
        lines = path.read_text().splitlines()
        assert lines[0] == LOG_COLUMNS
        assert len(lines) - 1 == len(res.records) == 500
        for k, line in enumerate(lines[1:]):
            cells = line.split(",")
            assert float(cells[0]) == pytest.approx(k * 0.002, abs=1e-12)
            assert abs(float(cells[6])) <= 1.0
            # pid episodes leave prediction statistics empty
            assert cells[7] == "" and cells[8] == "" and cells[9] == "" and cells[10] == ""
            assert cells[12] == "Autonomous"

    def test_bnn_statistics_logged(self, stadium):
        cfg = EpisodeConfig(track=stadium, controller="bnn", max_steps=50, n_pred=5)
        res = run_episode(cfg, bnn=degenerate_bnn())
        for r in res.records:
            assert r.mean is not None and r.std is not None
            assert r.odd is not None and r.cov is not None
        totals = [r.odd_total for r in res.records]
        assert totals == sorted(totals)

    def test_supervisor_log_replay_matches_live(self, stadium):
        # Feed the logged cov sequence back through the FSM offline: the
        # logged mode column must reproduce exactly.
        cfg = EpisodeConfig(
            track=stadium,
            controller="bnn",
            supervisor_enabled=True,
            max_steps=400,
            n_pred=5,
            supervisor=SupervisorConfig(cov_threshold=3.0, required_consecutive=10),
        )
        res = run_episode(cfg, bnn=degenerate_bnn(mu_scale=1.0))
        state = SupervisorState()
        for r in res.records:
            if r.cov is None:
                continue
            state = update(state, r.cov, cfg.supervisor)
            assert r.mode == state.mode


class TestSupervisedEpisodes:
    def test_confident_posterior_never_intervenes(self, stadium):
        cfg = EpisodeConfig(
            track=stadium, controller="bnn", supervisor_enabled=True, max_steps=2000,
            n_pred=5,
        )
        res = run_episode(cfg, bnn=degenerate_bnn(mu_scale=1.0))
        assert res.interventions == 0
        assert all(r.mode == "Autonomous" for r in res.records)

    def test_wide_posterior_triggers_and_pid_rescues(self, stadium):
        # Inflate posterior width so |cov| stays far beyond threshold: the
        # supervisor must hand over within required_consecutive steps and the
        # expert then finishes the lap.
        vp = init_variational(ARCH, 0, 0.05)
        vp = VariationalParams(vp.mu * 0.0, np.full(ARCH.n_params, 0.5))
        bnn = BnnModel(ARCH, vp, PriorSpec(), LikelihoodSpec())
        cfg = EpisodeConfig(
            track=stadium,
            controller="bnn",
            supervisor_enabled=True,
            n_pred=5,
            supervisor=SupervisorConfig(cov_threshold=3.0, required_consecutive=25),
        )
        res = run_episode(cfg, bnn=bnn)
        assert res.outcome == "LapCompleted"
        assert res.interventions == 1
        assert res.steps_in_manual > 0
        assert res.records[24].mode == MANUAL  # handover on the 25th step


class TestEvaluateSuite:
    def test_rows_follow_input_order(self, stadium):
        rows = evaluate_suite(
            [stadium, stadium],
            lambda trk: EpisodeConfig(track=trk, controller="pid", max_steps=10),
        )
        assert [r.track for r in rows] == ["stadium", "stadium"]
        assert all(r.outcome == "StepLimit" for r in rows)

    def test_empty_track_list(self):
        assert evaluate_suite([], lambda trk: None) == []

    def test_errors_recorded_not_raised(self, stadium):
        rows = evaluate_suite(
            [stadium],
            lambda trk: EpisodeConfig(track=trk, controller="bnn", max_steps=5),
        )
        assert rows[0].outcome == "Error"
        assert "MissingModel" in rows[0].error

    def test_logs_written(self, stadium, tmp_path):
        rows = evaluate_suite(
            [stadium],
            lambda trk: EpisodeConfig(track=trk, controller="pid", max_steps=20),
            log_dir=tmp_path,
        )
        assert (tmp_path / "episode_stadium.csv").exists()
        assert rows[0].log_path.endswith("episode_stadium.csv")
