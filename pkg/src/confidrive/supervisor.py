"""Control-authority state machine driven by the prediction confidence signal.

Authority moves from the learned controller to the fallback driver after the
coefficient of variance stays strictly beyond the threshold for the required
number of consecutive steps, and moves back once it stays within (inclusive)
for the same number of consecutive steps. Any non-qualifying step resets the
running streak, and both counters reset on every transition.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

AUTONOMOUS = "Autonomous"
MANUAL = "Manual"


@dataclass(frozen=True)
class SupervisorConfig:
    cov_threshold: float = 3.0
    required_consecutive: int = 50

    def __post_init__(self):
        if not self.cov_threshold > 0.0:
            raise ValueError("cov_threshold must be > 0")
        if self.required_consecutive < 1:
            raise ValueError("required_consecutive must be >= 1")


@dataclass(frozen=True)
class SupervisorState:
    mode: str = AUTONOMOUS
    beyond_count: int = 0
    within_count: int = 0
    intervention_count: int = 0
    steps_in_manual: int = 0


def authority(state: SupervisorState) -> str:
    """Who steers right now: AUTONOMOUS or MANUAL."""
    return state.mode


def update(state: SupervisorState, cov: float, cfg: SupervisorConfig) -> SupervisorState:
    """Advance the state machine by one confidence observation.

    "Beyond" means |cov| strictly greater than the threshold; a value exactly
    at the threshold counts as within, in both modes.
    """
    beyond = abs(cov) > cfg.cov_threshold
    if state.mode == AUTONOMOUS:
        count = state.beyond_count + 1 if beyond else 0
        if count >= cfg.required_consecutive:
            return SupervisorState(
                mode=MANUAL,
                intervention_count=state.intervention_count + 1,
                steps_in_manual=state.steps_in_manual,
            )
        return replace(state, beyond_count=count)
    count = state.within_count + 1 if not beyond else 0
    steps = state.steps_in_manual + 1
    if count >= cfg.required_consecutive:
        return SupervisorState(
            mode=AUTONOMOUS,
            intervention_count=state.intervention_count,
            steps_in_manual=steps,
        )
    return replace(state, within_count=count, steps_in_manual=steps)
