"""Kinematic bicycle model stepped by explicit Euler integration.

The vehicle runs in a constant-speed regime: each step pins the speed to
the configured target, so the controller only shapes lateral motion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import normalize_angle

MPS_PER_MPH = 0.44704


def mph_to_mps(v: float) -> float:
    """Miles per hour to meters per second."""
    if v < 0.0:
        raise ValueError("speed must be non-negative")
    return v * MPS_PER_MPH


@dataclass(frozen=True)
class VehicleState:
    """Planar pose plus forward speed; heading normalized to (-pi, pi]."""

    x: float
    y: float
    heading: float
    speed: float


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 2.6
    max_steer_angle: float = 0.37
    dt: float = 0.002
    target_speed: float = mph_to_mps(60.0)

    def __post_init__(self):
        if not self.wheelbase > 0.0:
            raise ValueError("wheelbase must be > 0")
        if not 0.0 < self.max_steer_angle < math.pi / 2:
            raise ValueError("max_steer_angle must lie in (0, pi/2)")
        if not self.dt > 0.0:
            raise ValueError("dt must be > 0")


@dataclass(frozen=True)
class ControlCommand:
    """Normalized steering in [-1, 1], positive to the left; clamps on build."""

    steer: float

    def __post_init__(self):
        object.__setattr__(self, "steer", min(1.0, max(-1.0, float(self.steer))))


def step(state: VehicleState, cmd: ControlCommand, params: VehicleParams) -> VehicleState:
    """One Euler step: advance pose with the current speed, then pin speed."""
    delta = cmd.steer * params.max_steer_angle
    v = state.speed
    dt = params.dt
    return VehicleState(
        x=state.x + v * math.cos(state.heading) * dt,
        y=state.y + v * math.sin(state.heading) * dt,
        heading=normalize_angle(
            state.heading + (v / params.wheelbase) * math.tan(delta) * dt
        ),
        speed=params.target_speed,
    )
