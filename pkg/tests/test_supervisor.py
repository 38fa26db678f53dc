"""Authority state machine against a brute-force trace oracle."""
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from confidrive.supervisor import (
    AUTONOMOUS,
    MANUAL,
    SupervisorConfig,
    SupervisorState,
    authority,
    update,
)


def oracle_trace(qualifies: list[bool], required: int):
    """Reference trace computed from the rule's plain-language statement.

    `qualifies[k]` is True when step k's |cov| exceeds the threshold. Returns
    the mode after every step plus total interventions, recomputing streaks
    from scratch each step.
    """
    mode = AUTONOMOUS
    modes = []
    interventions = 0
    streak = 0
    for q in qualifies:
        if mode == AUTONOMOUS:
            streak = streak + 1 if q else 0
            if streak >= required:
                mode = MANUAL
                interventions += 1
                streak = 0
        else:
            streak = streak + 1 if not q else 0
            if streak >= required:
                mode = AUTONOMOUS
                streak = 0
        modes.append(mode)
    return modes, interventions


def run_machine(covs, cfg):
    state = SupervisorState()
    modes = []
    for c in covs:
        state = update(state, c, cfg)
        modes.append(state.mode)
    return modes, state


class TestFiftyStepRule:
    def test_trigger_after_exactly_fifty(self):
        cfg = SupervisorConfig()
        state = SupervisorState()
        for k in range(49):
            state = update(state, 5.0, cfg)
            assert state.mode == AUTONOMOUS
        state = update(state, 5.0, cfg)
        assert state.mode == MANUAL
        assert state.intervention_count == 1

    def test_streak_broken_resets(self):
        cfg = SupervisorConfig()
        state = SupervisorState()
        for _ in range(49):
            state = update(state, 5.0, cfg)
        state = update(state, 0.0, cfg)
        assert state.mode == AUTONOMOUS
        assert state.beyond_count == 0

    def test_relinquish_after_fifty_within(self):
        cfg = SupervisorConfig()
        state = SupervisorState(mode=MANUAL, intervention_count=1)
        for k in range(50):
            state = update(state, 0.0, cfg)
        assert state.mode == AUTONOMOUS
        assert state.intervention_count == 1


class TestBoundary:
    def test_exactly_threshold_counts_as_within(self):
        cfg = SupervisorConfig(cov_threshold=3.0, required_consecutive=2)
        state = SupervisorState()
        for _ in range(10):
            state = update(state, 3.0, cfg)
        assert state.mode == AUTONOMOUS and state.beyond_count == 0
        manual = SupervisorState(mode=MANUAL)
        manual = update(manual, 3.0, cfg)
        manual = update(manual, 3.0, cfg)
        assert manual.mode == AUTONOMOUS

    def test_negative_cov_uses_magnitude(self):
        cfg = SupervisorConfig(cov_threshold=3.0, required_consecutive=1)
        state = update(SupervisorState(), -5.0, cfg)
        assert state.mode == MANUAL


class TestExhaustiveEquivalence:
    @pytest.mark.parametrize("required", [1, 2, 3, 4])
    def test_all_sequences_up_to_length_twelve(self, required):
        cfg = SupervisorConfig(cov_threshold=3.0, required_consecutive=required)
        for n in range(1, 13):
            for bits in itertools.product((False, True), repeat=n):
                covs = [5.0 if b else 1.0 for b in bits]
                modes, final = run_machine(covs, cfg)
                want_modes, want_interventions = oracle_trace(list(bits), required)
                assert modes == want_modes, (required, bits)
                assert final.intervention_count == want_interventions


class TestInvariants:
    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-10.0, 10.0), max_size=300), st.integers(1, 6))
    def test_counter_bounds_and_monotonicity(self, covs, required):
        cfg = SupervisorConfig(cov_threshold=3.0, required_consecutive=required)
        state = SupervisorState()
        last_interventions = 0
        last_manual = 0
        for c in covs:
            state = update(state, c, cfg)
            assert 0 <= state.beyond_count < required
            assert 0 <= state.within_count < required
            if state.mode == AUTONOMOUS:
                assert state.within_count == 0
            else:
                assert state.beyond_count == 0
            assert state.intervention_count >= last_interventions
            assert state.steps_in_manual >= last_manual
            last_interventions = state.intervention_count
            last_manual = state.steps_in_manual

    def test_update_is_pure(self):
        cfg = SupervisorConfig()
        s = SupervisorState(beyond_count=10)
        a = update(s, 5.0, cfg)
        b = update(s, 5.0, cfg)
        assert a == b
        assert s.beyond_count == 10

    def test_steps_in_manual_only_in_manual(self):
        cfg = SupervisorConfig(required_consecutive=2)
        state = SupervisorState()
        state = update(state, 5.0, cfg)
        assert state.steps_in_manual == 0
        state = update(state, 5.0, cfg)  # transition to Manual
        manual_before = state.steps_in_manual
        state = update(state, 5.0, cfg)  # first update processed in Manual
        assert state.steps_in_manual == manual_before + 1


class TestAuthority:
    def test_fresh_state_autonomous(self):
        assert authority(SupervisorState()) == AUTONOMOUS

    def test_after_trigger_manual(self):
        cfg = SupervisorConfig(required_consecutive=1)
        state = update(SupervisorState(), 9.0, cfg)
        assert authority(state) == MANUAL

    def test_after_relinquish_autonomous(self):
        cfg = SupervisorConfig(required_consecutive=1)
        state = update(SupervisorState(), 9.0, cfg)
        state = update(state, 0.0, cfg)
        assert authority(state) == AUTONOMOUS


def test_config_validation():
    with pytest.raises(ValueError):
        SupervisorConfig(cov_threshold=0.0)
    with pytest.raises(ValueError):
        SupervisorConfig(required_consecutive=0)
