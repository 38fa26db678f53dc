"""Tour of the built-in tracks and the raycast range sensor.

Compiles the five named circuits, prints their vital statistics, draws all
layouts to one figure, and overlays a 19-ray scan fan at a few poses of the
switchback track to show what the steering network actually sees.

Run from the repository root:  python demos/01_tracks_and_sensing.py
Outputs land in demos/out/.
"""
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from confidrive.geometry import Arc, builtin_track, builtin_tracks
from confidrive.lidar import LidarConfig, scan
from confidrive.vehicle import VehicleState

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# ---------------------------------------------------------------- statistics
print(f"{'track':<12}{'length [m]':>12}{'min radius [m]':>16}{'samples':>9}")
for spec in builtin_tracks():
    track = builtin_track(spec.name)
    radii = [seg.radius for seg in spec.segments if isinstance(seg, Arc)]
    print(f"{spec.name:<12}{track.total_length:>12.1f}{min(radii):>16.1f}{len(track.s):>9}")

# ---------------------------------------------------------------- layouts
fig, axes = plt.subplots(1, 5, figsize=(22, 5))
for ax, spec in zip(axes, builtin_tracks()):
    track = builtin_track(spec.name)
    for poly in (track.left_boundary, track.right_boundary):
        closed = np.vstack([poly, poly[:1]])
        ax.plot(closed[:, 0], closed[:, 1], color="0.4", lw=0.8)
    x0, y0, _, _ = track.pose_at(0.0)
    ax.plot([x0], [y0], "g^", ms=8, label="start")
    ax.set_aspect("equal")
    ax.set_title(f"{spec.name} ({track.total_length:.0f} m)")
    ax.legend(loc="lower right", fontsize=7)
fig.tight_layout()
fig.savefig(OUT / "tracks.svg")
print(f"\nwrote {OUT / 'tracks.svg'}")

# ------------------------------------------------------- scan visualisation
# Contrasting poses on the hairpin circuit: the open top straight, the
# switchback entry, and a U-turn apex where every ray is short.
hairpin = builtin_track("hairpin")
cfg = LidarConfig()
fig, ax = plt.subplots(figsize=(8, 8))
for poly in (hairpin.left_boundary, hairpin.right_boundary):
    closed = np.vstack([poly, poly[:1]])
    ax.plot(closed[:, 0], closed[:, 1], color="0.4", lw=0.8)
for s_query, color in ((1150.0, "tab:green"), (190.0, "tab:orange"), (233.0, "tab:red")):
    x, y, h, _ = hairpin.pose_at(s_query)
    state = VehicleState(x, y, h, 26.8)
    sc = scan(hairpin, state, cfg)
    angles = cfg.ray_angles(h)
    for dist, ang in zip(sc.distances, angles):
        ax.plot(
            [x, x + dist * math.cos(ang)],
            [y, y + dist * math.sin(ang)],
            color=color,
            lw=0.6,
            alpha=0.7,
        )
    ax.plot([x], [y], "o", color=color, ms=6)
    forward = sc.distances[cfg.n_rays // 2]
    print(
        f"scan at s={s_query:6.1f} m: forward ray={forward:6.2f} m  "
        f"min={sc.distances.min():5.2f} m  clipped rays="
        f"{int((sc.normalized == 1.0).sum())}"
    )
ax.set_aspect("equal")
ax.set_title("lidar fans approaching the switchbacks")
fig.tight_layout()
fig.savefig(OUT / "scan_fans.svg")
print(f"wrote {OUT / 'scan_fans.svg'}")
