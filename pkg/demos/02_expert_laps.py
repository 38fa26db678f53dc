"""The tuned PID expert lapping every circuit at 60 mph.

Runs one closed-loop lap per track, reports lap time and worst centerline
deviation, and plots the lateral-offset trace on the hairpin circuit, where
the 16 m switchbacks stress the controller hardest.

Run from the repository root:  python demos/02_expert_laps.py
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from confidrive.geometry import builtin_track, builtin_tracks
from confidrive.simloop import EpisodeConfig, run_episode

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

print(f"{'track':<12}{'outcome':<14}{'lap time [s]':>13}{'max |offset| [m]':>18}")
hairpin_records = None
for spec in builtin_tracks():
    track = builtin_track(spec.name)
    res = run_episode(EpisodeConfig(track=track, controller="pid", speed_mph=60.0))
    print(
        f"{spec.name:<12}{res.outcome:<14}{res.lap_time:>13.1f}{res.max_abs_offset:>18.2f}"
    )
    if spec.name == "hairpin":
        hairpin_records = res.records

t = np.array([r.t for r in hairpin_records])
off = np.array([r.offset for r in hairpin_records])
steer = np.array([r.steer for r in hairpin_records])

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(11, 6), sharex=True)
ax1.plot(t, off, lw=0.8)
ax1.axhline(7.5, color="tab:red", ls="--", lw=0.8)
ax1.axhline(-7.5, color="tab:red", ls="--", lw=0.8)
ax1.set_ylabel("lateral offset [m]")
ax1.set_title("expert on the hairpin circuit at 60 mph")
ax2.plot(t, steer, lw=0.8, color="tab:orange")
ax2.set_ylabel("steering command")
ax2.set_xlabel("t [s]")
fig.tight_layout()
fig.savefig(OUT / "expert_hairpin.svg")
print(f"\nwrote {OUT / 'expert_hairpin.svg'}")
