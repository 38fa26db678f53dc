"""Tuned PID lateral controller: the data-generation expert and fallback driver.

The error signal combines the signed lateral offset with a heading-alignment
term measured against the centerline tangent, both taken from track ground
truth. Positive offset (left of center) produces a rightward correction.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import Track, normalize_angle
from .vehicle import ControlCommand, VehicleState


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.30
    ki: float = 0.01
    kd: float = 0.08
    k_heading: float = 2.0
    integral_limit: float = 5.0

    def __post_init__(self):
        if not self.integral_limit > 0.0:
            raise ValueError("integral_limit must be > 0")


@dataclass(frozen=True)
class PidState:
    integral: float = 0.0
    prev_error: float = 0.0


def reset() -> PidState:
    """Fresh controller state: zero integral and derivative history."""
    return PidState()


def pid_steer(
    gains: PidGains,
    pstate: PidState,
    track: Track,
    vstate: VehicleState,
    dt: float,
    offset_s: tuple[float, float] | None = None,
) -> tuple[ControlCommand, PidState]:
    """One PID update; returns the clamped command and the updated state.

    The integral accumulator clamps at +-integral_limit (anti-windup) and the
    derivative acts on the combined error signal. Callers that already
    queried the track this step can pass (offset, s) to skip the repeat.
    """
    if offset_s is None:
        offset, s = track.lateral_offset((vstate.x, vstate.y))
    else:
        offset, s = offset_s
    _, _, tangent, _ = track.pose_at(s)
    heading_error = normalize_angle(vstate.heading - tangent)
    e = -offset - gains.k_heading * heading_error
    integral = pstate.integral + e * dt
    integral = min(gains.integral_limit, max(-gains.integral_limit, integral))
    derivative = (e - pstate.prev_error) / dt
    raw = gains.kp * e + gains.ki * integral + gains.kd * derivative
    return ControlCommand(steer=raw), PidState(integral=integral, prev_error=e)
