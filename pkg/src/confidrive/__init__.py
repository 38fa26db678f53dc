"""confidrive: uncertainty-aware lateral vehicle control workbench.

Train a Bayesian neural steering network on PID-generated lidar data from
one closed track, deploy it closed-loop on held-out tracks, and gate its
control authority with a coefficient-of-variance handover supervisor.
"""

from .geometry import Arc, Straight, Track, TrackSpec, builtin_track, builtin_tracks, compile_track
from .vehicle import ControlCommand, VehicleParams, VehicleState, mph_to_mps, step
from .lidar import LidarConfig, LidarScan, scan
from .pid import PidGains, PidState, pid_steer, reset
from .data import Dataset, Sample, batches, generate, load, save, split
from .mlp import MlpArchitecture, TrainHyper, forward, init_weights, loss_grad, train_dnn
from .bnn import (
    BnnHyper,
    LikelihoodSpec,
    PosteriorEnsemble,
    PredictiveDistribution,
    PriorSpec,
    VariationalParams,
    elbo,
    elbo_grad,
    kl_to_prior,
    predict,
    sample_weights,
    signed_cov,
    train_bnn,
)
from .supervisor import SupervisorConfig, SupervisorState, authority, update
from .simloop import EpisodeConfig, EpisodeResult, evaluate_suite, run_episode
from .checkpoints import BnnModel, DnnModel, load_model, save_bnn, save_dnn
from .config import ExperimentConfig, config_digest, load_config

__version__ = "0.1.0"
