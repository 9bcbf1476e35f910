"""Hierarchical dual-objective session loop around the policy improvement.

The low level runs epochs: K noise-perturbed exploration strides, one weight
update, one noiseless evaluation stride whose masked RMS error is the epoch
cost.  The high level averages the last M epoch costs and switches the
learning objective with hysteresis:

  compliance  -> intervention  when the average cost exceeds the upper bound
  intervention -> compliance   when it falls below the lower bound

Intervention weights the tracking error heavily (stiffen assistance where
the subject struggles); compliance weights the impedance heavily (fade
assistance to keep the subject engaged).  Every mode change resets the
exploration-noise decay so the landscape can reorganize, and the loop never
terminates on its own: it runs for as long as the session lasts.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError
from .phase import (TWO_PI, ImpedancePolicy, sample_segment_indices,
                    segment_indices)
from .pi2 import (CostWeights, cost_to_go_table, draw_noise, ExplorationBatch,
                  NOISE_PER_STRIDE, parameter_update, probability_table,
                  sigma_effective)

DEFAULT_UPPER_BOUND = 1.5   # deg
DEFAULT_LOWER_BOUND = 0.5   # deg
DEFAULT_EPOCHS_PER_DECISION = 4
DEFAULT_INITIAL_COST = 2.5  # deg
DEFAULT_EVAL_SEGMENTS = (6, 7, 8, 9, 10)  # latter half of the cycle

INTERVENTION_WEIGHTS = CostWeights(error=80.0, impedance=5.0)
COMPLIANCE_WEIGHTS = CostWeights(error=5.0, impedance=80.0)


class LearningMode(Enum):
    INTERVENTION = "intervention"
    COMPLIANCE = "compliance"


@dataclass(frozen=True)
class SupervisorConfig:
    upper_bound: float = DEFAULT_UPPER_BOUND
    lower_bound: float = DEFAULT_LOWER_BOUND
    epochs_per_decision: int = DEFAULT_EPOCHS_PER_DECISION
    intervention_weights: CostWeights = INTERVENTION_WEIGHTS
    compliance_weights: CostWeights = COMPLIANCE_WEIGHTS
    eval_segments: tuple = DEFAULT_EVAL_SEGMENTS
    initial_cost: float = DEFAULT_INITIAL_COST

    def __post_init__(self):
        if not 0.0 < self.lower_bound < self.upper_bound:
            raise ConfigError(
                f"bounds must satisfy 0 < lower < upper, got "
                f"({self.lower_bound}, {self.upper_bound})")
        if self.epochs_per_decision < 1:
            raise ConfigError("epochs_per_decision must be >= 1")
        if not self.eval_segments:
            raise ConfigError("eval_segments must not be empty")
        if self.initial_cost < 0.0:
            raise ConfigError("initial_cost must be >= 0")

    def weights_for(self, mode):
        return (self.intervention_weights if mode is LearningMode.INTERVENTION
                else self.compliance_weights)


@dataclass
class SessionState:
    """Mutable learning state carried across epochs (and across sessions)."""

    policy: ImpedancePolicy
    mode: LearningMode
    strides_since_reset: int = 0
    epoch_window: list = field(default_factory=list)  # costs since last decision
    epoch_index: int = 0
    total_strides: int = 0


def initial_state(policy, config):
    """Fresh state: intervention by default, then the initial-cost decision.

    The very first high-level decision is taken on the configured initial
    cost before anything has been measured; with the default 2.5 deg this
    keeps intervention selected, and a small value would start compliant.
    """
    mode = mode_transition(config.initial_cost, LearningMode.INTERVENTION,
                           config.upper_bound, config.lower_bound)
    return SessionState(policy=policy, mode=mode)


def epoch_cost(outcome, eval_segments, n_segments):
    """Masked RMS of the raw tracking error of one (evaluation) stride."""
    if not eval_segments:
        raise ConfigError("eval_segments must not be empty")
    seg = sample_segment_indices(outcome.raw_error.size, n_segments)
    mask = np.isin(seg, list(eval_segments))
    if not mask.any():
        raise ConfigError("evaluation mask selects no samples")
    return float(np.sqrt(np.mean(outcome.raw_error[mask] ** 2)))


def high_level_cost(window, epochs_per_decision):
    """Mean of the last M epoch costs; None while fewer than M are present."""
    if len(window) > epochs_per_decision:
        raise ConfigError("decision window overflowed; decide every M epochs")
    if len(window) < epochs_per_decision:
        return None
    return float(np.mean(window))


def mode_transition(average_cost, mode, upper_bound, lower_bound):
    """Hysteresis rule between the two learning objectives.

    Inside (lower_bound, upper_bound) the current mode persists, so a single
    window can never flip the mode twice.
    """
    if not lower_bound < upper_bound:
        raise ConfigError("lower_bound must be < upper_bound")
    if mode is LearningMode.COMPLIANCE and average_cost > upper_bound:
        return LearningMode.INTERVENTION
    if mode is LearningMode.INTERVENTION and average_cost < lower_bound:
        return LearningMode.COMPLIANCE
    return mode


@dataclass(frozen=True)
class StrideLog:
    kind: str                    # "explore" | "eval"
    mode: LearningMode
    sigma: float
    epoch_index: int
    rms_full: float
    rms_masked: float
    kernel_impedance: np.ndarray  # executed g at the P kernel centers
    segment_rms: np.ndarray
    epoch_cost: float | None = None


@dataclass(frozen=True)
class EpochRecord:
    index: int
    mode: LearningMode
    cost: float
    weights: np.ndarray           # policy weights after the update
    kernel_impedance: np.ndarray  # evaluation-stride g at kernel centers
    strides: tuple


@dataclass(frozen=True)
class ModeDecision:
    epoch_index: int
    average_cost: float
    before: LearningMode
    after: LearningMode

    @property
    def changed(self):
        return self.before is not self.after


@dataclass(frozen=True)
class SessionRun:
    records: tuple
    decisions: tuple


class Supervisor:
    """Binds the basis, the optimizer settings, and the evaluation rule to a
    fixed stride sampling grid.

    Plants expose `phases` (the uniform within-stride sample grid, starting
    at 0) and `stride(impedance, assisted)` returning a StrideOutcome.
    Segment membership of the samples is derived in exact integer
    arithmetic so boundary samples always land in the upper (half-open)
    segment.
    """

    def __init__(self, basis, pi2_config, config, sample_phases):
        self.basis = basis
        self.pi2 = pi2_config
        self.config = config
        grid = basis.grid
        bad = [s for s in config.eval_segments if not 1 <= s <= grid.instant_count]
        if bad:
            raise ConfigError(
                f"eval_segments {bad} outside 1..{grid.instant_count}")
        self.sample_phases = np.asarray(sample_phases, dtype=float)
        n_samples = self.sample_phases.size
        uniform = TWO_PI * np.arange(n_samples) / n_samples
        if not np.allclose(self.sample_phases, uniform, atol=1e-12):
            raise ConfigError("plant phases must be the uniform stride grid")
        self._sample_segments = sample_segment_indices(n_samples,
                                                       grid.instant_count)
        self._mask = np.isin(self._sample_segments, list(config.eval_segments))
        self._psi_samples = basis.matrix(self.sample_phases)
        self._psi_instants = basis.matrix(grid.instant_centers)
        self._psi_kernels = basis.matrix(grid.kernel_centers)
        # evaluation segment of each kernel center, for executed-g logging
        self._kernel_segments = segment_indices(grid.kernel_centers,
                                                grid.instant_count)

    def _executed_profile(self, base, noise_rows, clamp):
        """Clamped landscape over the sample grid when segment j runs under
        weights base + noise_rows[j - 1]."""
        rows = base[None, :] + noise_rows[self._sample_segments - 1]
        psi = self._psi_samples
        raw = (psi * rows).sum(axis=1) / psi.sum(axis=1)
        return np.clip(raw, 0.0, clamp)

    def _instant_impedance(self, base, noise_rows, clamp):
        rows = base[None, :] + noise_rows
        raw = (self._psi_instants * rows).sum(axis=1) / self._psi_instants.sum(axis=1)
        return np.clip(raw, 0.0, clamp)

    def _kernel_impedance(self, base, noise_rows, clamp):
        rows = base[None, :] + noise_rows[self._kernel_segments - 1]
        raw = (self._psi_kernels * rows).sum(axis=1) / self._psi_kernels.sum(axis=1)
        return np.clip(raw, 0.0, clamp)

    def _rms_pair(self, raw_error):
        full = float(np.sqrt(np.mean(raw_error ** 2)))
        masked = float(np.sqrt(np.mean(raw_error[self._mask] ** 2)))
        return full, masked

    def run_epoch(self, state, plant, rng):
        """K exploration strides, one weight update, one evaluation stride.

        Consumes exactly K + 1 strides and advances the noise-decay counter
        by the same amount (the noiseless evaluation stride counts too).
        """
        grid = self.basis.grid
        n_rollouts = self.pi2.exploration_strides
        n_inst, n_kern = grid.instant_count, grid.kernel_count
        base = state.policy.weights
        clamp = state.policy.max_impedance
        mode = state.mode

        noise = np.empty((n_rollouts, n_inst, n_kern))
        seg_rms = np.empty((n_rollouts, n_inst))
        g_inst = np.empty((n_rollouts, n_inst))
        logs = []
        for k in range(n_rollouts):
            sigma = sigma_effective(self.pi2.noise_sigma, self.pi2.noise_decay,
                                    state.strides_since_reset)
            eps = draw_noise(rng, sigma, 1, n_inst, n_kern)[0]
            if self.pi2.noise_mode == NOISE_PER_STRIDE:
                eps[:] = eps[0]
            noise[k] = eps
            outcome = plant.stride(
                self._executed_profile(base, eps, clamp), assisted=True)
            seg_rms[k] = outcome.segment_rms
            g_inst[k] = self._instant_impedance(base, eps, clamp)
            state.strides_since_reset += 1
            state.total_strides += 1
            full, masked = self._rms_pair(outcome.raw_error)
            logs.append(StrideLog(
                kind="explore", mode=mode, sigma=sigma,
                epoch_index=state.epoch_index + 1, rms_full=full,
                rms_masked=masked,
                kernel_impedance=self._kernel_impedance(base, eps, clamp),
                segment_rms=outcome.segment_rms))

        batch = ExplorationBatch(noise=noise, segment_rms=seg_rms,
                                 impedance=g_inst, base_weights=base)
        table = cost_to_go_table(batch, self.basis,
                                 self.config.weights_for(mode),
                                 self.pi2.control_cost)
        probs = probability_table(table, self.pi2.discrimination)
        delta = parameter_update(probs, noise, self.basis)
        state.policy = state.policy.updated(delta)

        sigma = sigma_effective(self.pi2.noise_sigma, self.pi2.noise_decay,
                                state.strides_since_reset)
        flat = np.zeros((n_inst, n_kern))
        eval_outcome = plant.stride(
            self._executed_profile(state.policy.weights, flat, clamp),
            assisted=True)
        state.strides_since_reset += 1
        state.total_strides += 1
        cost = epoch_cost(eval_outcome, self.config.eval_segments, n_inst)
        state.epoch_index += 1
        full, masked = self._rms_pair(eval_outcome.raw_error)
        kernel_g = self._kernel_impedance(state.policy.weights, flat, clamp)
        logs.append(StrideLog(
            kind="eval", mode=mode, sigma=sigma,
            epoch_index=state.epoch_index, rms_full=full, rms_masked=masked,
            kernel_impedance=kernel_g, segment_rms=eval_outcome.segment_rms,
            epoch_cost=cost))
        state.epoch_window.append(cost)
        return EpochRecord(
            index=state.epoch_index, mode=mode, cost=cost,
            weights=state.policy.weights.copy(), kernel_impedance=kernel_g,
            strides=tuple(logs))

    def run_session(self, state, plant, n_epochs, rng):
        """Run n_epochs, taking a mode decision after every M completed
        epochs.

        A mode change swaps the cost weights for the following epochs and
        resets the noise-decay counter.  A final window with fewer than M
        epochs stays pending in the state (it completes in the next session
        when state is carried over) and yields no decision here.
        """
        records, decisions = [], []
        m_per_decision = self.config.epochs_per_decision
        for _ in range(n_epochs):
            records.append(self.run_epoch(state, plant, rng))
            average = high_level_cost(state.epoch_window, m_per_decision)
            if average is None:
                continue
            state.epoch_window.clear()
            before = state.mode
            after = mode_transition(average, before, self.config.upper_bound,
                                    self.config.lower_bound)
            decisions.append(ModeDecision(
                epoch_index=state.epoch_index, average_cost=average,
                before=before, after=after))
            if after is not before:
                state.mode = after
                state.strides_since_reset = 0
        return SessionRun(records=tuple(records), decisions=tuple(decisions))
