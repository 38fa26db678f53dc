"""End-to-end at demo scale: expert data, Bayesian training, held-out laps.

A scaled-down version of the main experiment so the whole script finishes in
a few minutes on a laptop: one expert lap per speed on the training loop, a
short Bayesian training run, then closed-loop deployment on the three
held-out circuits with the supervisor disabled.

Run from the repository root:  python demos/03_train_and_generalize.py
"""
import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from confidrive.bnn import BnnHyper, LikelihoodSpec, PriorSpec, train_bnn
from confidrive.checkpoints import BnnModel, save_bnn
from confidrive.data import generate, save, split
from confidrive.geometry import builtin_track
from confidrive.mlp import MlpArchitecture
from confidrive.pid import PidGains
from confidrive.simloop import EpisodeConfig, run_episode

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

SEED = 0

print("1. generating expert data on train-loop (one lap at 50/60/70 mph)...")
t0 = time.time()
train_track = builtin_track("train-loop")
ds = generate(
    train_track,
    PidGains(),
    speeds_mph=[50.0, 60.0, 70.0],
    laps_per_speed=1,
    record_every=25,
    seed=SEED,
)
save(ds, OUT / "demo_dataset.csv")
print(f"   {len(ds)} samples in {time.time() - t0:.0f}s -> {OUT / 'demo_dataset.csv'}")

print("2. training the Bayesian steering network...")
t0 = time.time()
train_ds, val_ds = split(ds, 0.9, seed=SEED)
arch = MlpArchitecture((ds.meta.n_rays, 256, 128, 64, 32, 16, 1))
prior, like = PriorSpec(1.0), LikelihoodSpec(0.01)
hyper = BnnHyper(
    seed=SEED,
    max_epochs=40,
    early_stop_patience=15,
    learning_rate=1e-3,
    sigma_init_scale=0.02,
)
vp, history = train_bnn(train_ds, val_ds, arch, prior, like, hyper)
save_bnn(OUT / "demo_bnn.ckpt", BnnModel(arch, vp, prior, like), SEED)
print(
    f"   {len(history)} epochs in {time.time() - t0:.0f}s, "
    f"best val MSE {min(h.val_mse for h in history):.2e}"
)

fig, ax1 = plt.subplots(figsize=(8, 4))
epochs = [h.epoch for h in history]
ax1.plot(epochs, [h.train_elbo for h in history], color="tab:blue", label="train ELBO")
ax1.set_xlabel("epoch")
ax1.set_ylabel("ELBO", color="tab:blue")
ax2 = ax1.twinx()
ax2.semilogy(epochs, [h.val_mse for h in history], color="tab:orange", label="val MSE")
ax2.set_ylabel("validation MSE", color="tab:orange")
fig.tight_layout()
fig.savefig(OUT / "training_curves.svg")
print(f"   wrote {OUT / 'training_curves.svg'}")

print("3. deploying closed-loop on the held-out circuits (supervisor off)...")
bnn = BnnModel(arch, vp, prior, like)
fig, axes = plt.subplots(1, 3, figsize=(16, 5))
for ax, name in zip(axes, ("eval-a", "eval-b", "eval-c")):
    track = builtin_track(name)
    res = run_episode(
        EpisodeConfig(track=track, controller="bnn", seed=SEED), bnn=bnn
    )
    print(
        f"   {name}: {res.outcome}, lap {res.lap_time:.1f}s, "
        f"max |offset| {res.max_abs_offset:.2f} m"
    )
    for poly in (track.left_boundary, track.right_boundary):
        closed = np.vstack([poly, poly[:1]])
        ax.plot(closed[:, 0], closed[:, 1], color="0.5", lw=0.7)
    xs = [r.x for r in res.records]
    ys = [r.y for r in res.records]
    ax.plot(xs, ys, color="tab:blue", lw=1.0)
    ax.set_aspect("equal")
    ax.set_title(f"{name}: {res.outcome}")
fig.tight_layout()
fig.savefig(OUT / "held_out_laps.svg")
print(f"   wrote {OUT / 'held_out_laps.svg'}")
