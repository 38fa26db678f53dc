"""PID expert unit behavior; closed-loop competence lives in acceptance."""
import functools
import math

import pytest
from hypothesis import given, settings, strategies as st

from confidrive.geometry import Arc, Straight, TrackSpec, compile_track
from confidrive.pid import PidGains, PidState, pid_steer, reset
from confidrive.vehicle import VehicleState


@functools.lru_cache(maxsize=1)
def _windup_track():
    return compile_track(
        TrackSpec(
            "c2",
            (Straight(400.0), Arc(60.0, math.pi), Straight(400.0), Arc(60.0, math.pi)),
            15.0,
        )
    )


@pytest.fixture(scope="module")
def corridor():
    spec = TrackSpec(
        "corridor",
        (Straight(400.0), Arc(60.0, math.pi), Straight(400.0), Arc(60.0, math.pi)),
        15.0,
    )
    return compile_track(spec)


class TestPidSteer:
    def test_zero_error_zero_output(self, corridor):
        cmd, _ = pid_steer(
            PidGains(), reset(), corridor, VehicleState(100.0, 0.0, 0.0, 26.8), 0.002
        )
        assert cmd.steer == 0.0

    def test_proportional_clamp_at_boundary(self, corridor):
        gains = PidGains(kp=0.5, ki=0.0, kd=0.0, k_heading=0.0)
        cmd, _ = pid_steer(
            gains, reset(), corridor, VehicleState(100.0, 2.0, 0.0, 26.8), 0.002
        )
        assert cmd.steer == -1.0

    def test_mirror_sign_symmetry(self, corridor):
        gains = PidGains(kp=0.5, ki=0.0, kd=0.0, k_heading=0.0)
        cmd, _ = pid_steer(
            gains, reset(), corridor, VehicleState(100.0, -2.0, 0.0, 26.8), 0.002
        )
        assert cmd.steer == 1.0

    def test_full_mirror_negates_output(self, corridor):
        gains = PidGains()
        state = PidState(integral=0.7, prev_error=0.3)
        mirrored = PidState(integral=-0.7, prev_error=-0.3)
        up, up_next = pid_steer(
            gains, state, corridor, VehicleState(100.0, 1.5, 0.1, 26.8), 0.002
        )
        dn, dn_next = pid_steer(
            gains, mirrored, corridor, VehicleState(100.0, -1.5, -0.1, 26.8), 0.002
        )
        assert up.steer == pytest.approx(-dn.steer, abs=1e-12)
        assert up_next.integral == pytest.approx(-dn_next.integral, abs=1e-12)
        assert up_next.prev_error == pytest.approx(-dn_next.prev_error, abs=1e-12)

    def test_heading_term_contributes(self, corridor):
        gains = PidGains(kp=1.0, ki=0.0, kd=0.0, k_heading=2.0)
        cmd, nxt = pid_steer(
            gains, reset(), corridor, VehicleState(100.0, 0.0, 0.1, 26.8), 0.002
        )
        assert cmd.steer == pytest.approx(-0.2, abs=1e-9)
        assert nxt.prev_error == pytest.approx(-0.2, abs=1e-9)

    @settings(deadline=None, max_examples=60)
    @given(st.lists(st.floats(-10.0, 10.0), min_size=1, max_size=60))
    def test_anti_windup_over_any_sequence(self, offsets):
        gains = PidGains(ki=1.0, integral_limit=2.0)
        track = _windup_track()
        pstate = reset()
        for off in offsets:
            _, pstate = pid_steer(
                gains, pstate, track, VehicleState(100.0, off, 0.0, 26.8), 0.1
            )
            assert abs(pstate.integral) <= gains.integral_limit


class TestReset:
    def test_zeros(self):
        st0 = reset()
        assert st0.integral == 0.0 and st0.prev_error == 0.0

    def test_idempotent(self):
        assert reset() == reset()

    def test_first_derivative_uses_zero_history(self, corridor):
        gains = PidGains(kp=0.0, ki=0.0, kd=1.0, k_heading=0.0)
        dt = 0.1
        cmd, _ = pid_steer(
            gains, reset(), corridor, VehicleState(100.0, -0.05, 0.0, 26.8), dt
        )
        # derivative = (e - 0)/dt with e = +0.05
        assert cmd.steer == pytest.approx(0.05 / dt, abs=1e-9)


def test_gain_validation():
    with pytest.raises(ValueError):
        PidGains(integral_limit=0.0)
