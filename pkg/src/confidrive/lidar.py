"""Raycast range sensor: a fan of wall distances around the vehicle heading.

Rays are ordered from the right end of the fan to the left (angle
-fov/2 ... +fov/2 relative to heading). Distances clip at max_range and the
normalized channel divides by max_range, giving features in [0, 1]. The
normalized vector is what the steering networks consume, and its ordering
is part of the dataset file contract.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import Track
from .vehicle import VehicleState


@lru_cache(maxsize=8)
def _relative_angles(n_rays: int, fov: float) -> np.ndarray:
    rel = np.linspace(-fov / 2.0, fov / 2.0, n_rays)
    rel.setflags(write=False)
    return rel


@dataclass(frozen=True)
class LidarConfig:
    n_rays: int = 19
    fov: float = np.pi
    max_range: float = 100.0

    def __post_init__(self):
        if self.n_rays < 2:
            raise ValueError("n_rays must be >= 2")
        if not 0.0 < self.fov <= 2.0 * np.pi:
            raise ValueError("fov must lie in (0, 2*pi]")
        if not self.max_range > 0.0:
            raise ValueError("max_range must be > 0")

    def ray_angles(self, heading: float) -> np.ndarray:
        """Absolute ray angles for a vehicle heading, right edge first."""
        return heading + _relative_angles(self.n_rays, self.fov)


@dataclass(frozen=True)
class LidarScan:
    distances: np.ndarray
    normalized: np.ndarray


def scan(
    track: Track, state: VehicleState, config: LidarConfig, verify_origin: bool = True
) -> LidarScan:
    """Cast the configured ray fan from the vehicle position.

    Propagates OriginOutsideTrack when the vehicle has left the corridor;
    the episode loop disables the redundant check after its own off-track
    test.
    """
    angles = config.ray_angles(state.heading)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    distances = track.cast_rays(
        (state.x, state.y), dirs, config.max_range, verify_origin=verify_origin
    )
    return LidarScan(distances=distances, normalized=distances / config.max_range)
