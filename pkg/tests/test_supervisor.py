import numpy as np
import pytest

from aangait import (BasisSet, ConfigError, ImpedancePolicy, LearningMode,
                     PhaseGrid, PI2Config, Supervisor, SupervisorConfig,
                     epoch_cost, high_level_cost, initial_state,
                     mode_transition)
from helpers import ScriptedCostPlant, constant_error_outcome


def make_supervisor(pi2=None, config=None, samples=200):
    basis = BasisSet(width=5.0, grid=PhaseGrid(10, 10))
    phases = 2 * np.pi * np.arange(samples) / samples
    return Supervisor(basis, pi2 or PI2Config(), config or SupervisorConfig(),
                      phases)


def fresh_state(config=None):
    return initial_state(ImpedancePolicy(np.zeros(10)),
                         config or SupervisorConfig())


# ------------------------------------------------------------ cost evaluation

def test_epoch_cost_zero_error():
    out = constant_error_outcome(0.0)
    assert epoch_cost(out, (6, 7, 8, 9, 10), 10) == 0.0


def test_epoch_cost_constant_error():
    out = constant_error_outcome(1.0)
    assert abs(epoch_cost(out, (6, 7, 8, 9, 10), 10) - 1.0) < 1e-12


def test_epoch_cost_mask_excludes_clean_half():
    seg_values = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1]
    out = constant_error_outcome(None, segment_values=seg_values)
    assert abs(epoch_cost(out, (6, 7, 8, 9, 10), 10) - 1.0) < 1e-12
    assert epoch_cost(out, (1, 2, 3, 4, 5), 10) == 0.0


def test_epoch_cost_empty_mask_rejected():
    out = constant_error_outcome(1.0)
    with pytest.raises(ConfigError):
        epoch_cost(out, (), 10)


def test_high_level_cost():
    assert high_level_cost([2.0], 1) == 2.0
    assert high_level_cost([1.0, 2.0, 3.0, 4.0], 4) == 2.5
    assert high_level_cost([0.7, 0.7, 0.7], 3) == pytest.approx(0.7)
    assert high_level_cost([1.0, 2.0], 4) is None
    with pytest.raises(ConfigError):
        high_level_cost([1.0] * 5, 4)


def test_mode_transition_rule():
    up, lo = 1.5, 0.5
    assert mode_transition(1.6, LearningMode.COMPLIANCE, up, lo) \
        is LearningMode.INTERVENTION
    assert mode_transition(0.4, LearningMode.INTERVENTION, up, lo) \
        is LearningMode.COMPLIANCE
    for mode in LearningMode:
        assert mode_transition(1.0, mode, up, lo) is mode
    with pytest.raises(ConfigError):
        mode_transition(1.0, LearningMode.COMPLIANCE, 0.5, 1.5)


def test_initial_mode_from_initial_cost():
    assert fresh_state().mode is LearningMode.INTERVENTION  # 2.5 > 1.5
    compliant = initial_state(
        ImpedancePolicy(np.zeros(10)), SupervisorConfig(initial_cost=0.3))
    assert compliant.mode is LearningMode.COMPLIANCE


def test_supervisor_config_validation():
    with pytest.raises(ConfigError):
        SupervisorConfig(lower_bound=1.5, upper_bound=0.5)
    with pytest.raises(ConfigError):
        SupervisorConfig(eval_segments=())
    with pytest.raises(ConfigError):
        SupervisorConfig(epochs_per_decision=0)
    with pytest.raises(ConfigError):
        make_supervisor(config=SupervisorConfig(eval_segments=(11,)))


def test_supervisor_requires_uniform_plant_grid():
    basis = BasisSet(width=5.0, grid=PhaseGrid(10, 10))
    with pytest.raises(ConfigError):
        Supervisor(basis, PI2Config(), SupervisorConfig(),
                   np.sort(np.random.default_rng(0).uniform(0, 6.2, 200)))


def test_supervisor_segments_respect_halfopen_boundaries():
    # sample 120 of 200 sits exactly on the segment 6|7 boundary and must
    # land in segment 7 (naive float division would put it in 6)
    sup = make_supervisor(samples=200)
    assert sup._sample_segments[120] == 7
    assert sup._sample_segments[60] == 4


# ------------------------------------------------------------------ the epoch

def test_epoch_consumes_k_plus_one_strides():
    sup = make_supervisor()
    state = fresh_state()
    plant = ScriptedCostPlant([2.0] * 10)
    record = sup.run_epoch(state, plant, np.random.default_rng(0))
    assert state.total_strides == 5
    assert state.strides_since_reset == 5
    assert plant.calls == 5
    kinds = [s.kind for s in record.strides]
    assert kinds == ["explore"] * 4 + ["eval"]
    assert record.cost == pytest.approx(2.0)
    assert record.strides[-1].epoch_cost == record.cost


def test_epoch_is_deterministic():
    outs = []
    for _ in range(2):
        sup = make_supervisor()
        state = fresh_state()
        record = sup.run_epoch(state, ScriptedCostPlant([2.0] * 10),
                               np.random.default_rng(123))
        outs.append(record)
    assert np.array_equal(outs[0].weights, outs[1].weights)
    assert outs[0].cost == outs[1].cost
    for a, b in zip(outs[0].strides, outs[1].strides):
        assert a.sigma == b.sigma
        assert np.array_equal(a.kernel_impedance, b.kernel_impedance)


def test_epoch_with_vanishing_noise_is_a_fixed_point():
    # noise below double precision cannot move the policy or the plant
    sup = make_supervisor(pi2=PI2Config(noise_sigma=1e-300))
    state = fresh_state()
    plant = ScriptedCostPlant([2.0] * 10)
    costs = []
    for _ in range(3):
        record = sup.run_epoch(state, plant, np.random.default_rng(0))
        costs.append(record.cost)
        assert np.max(np.abs(record.weights)) < 1e-250
    assert costs[0] == costs[1] == costs[2]


def test_epoch_sigma_decays_within_the_batch():
    sup = make_supervisor()
    state = fresh_state()
    record = sup.run_epoch(state, ScriptedCostPlant([2.0] * 10),
                           np.random.default_rng(0))
    sigmas = [s.sigma for s in record.strides]
    expected = [0.03 * 0.992 ** s for s in range(5)]
    assert np.allclose(sigmas, expected, rtol=1e-12)


# ---------------------------------------------------------------- the session

def test_session_scripted_mode_switch_and_reset():
    script = [2, 2, 2, 2, 0.3, 0.3, 0.3, 0.3]
    sup = make_supervisor()
    state = fresh_state()
    run = sup.run_session(state, ScriptedCostPlant(script), 8,
                          np.random.default_rng(0))
    assert [d.average_cost for d in run.decisions] == \
        [pytest.approx(2.0), pytest.approx(0.3)]
    assert run.decisions[0].before is LearningMode.INTERVENTION
    assert not run.decisions[0].changed
    assert run.decisions[1].changed
    assert run.decisions[1].after is LearningMode.COMPLIANCE
    assert state.mode is LearningMode.COMPLIANCE
    # the switch happened on the final epoch, so the counter is fresh
    assert state.strides_since_reset == 0


def test_session_counter_runs_after_reset():
    script = [2, 2, 2, 2, 0.3, 0.3, 0.3, 0.3, 1.0, 1.0, 1.0, 1.0]
    sup = make_supervisor()
    state = fresh_state()
    sup.run_session(state, ScriptedCostPlant(script), 12,
                    np.random.default_rng(0))
    # reset at epoch 8, then 4 more epochs = 20 strides
    assert state.strides_since_reset == 20
    assert state.total_strides == 60


def test_session_hysteresis_band_freezes_mode():
    sup = make_supervisor()
    for start, script in ((LearningMode.INTERVENTION, [1.0] * 8),
                          (LearningMode.COMPLIANCE, [1.0] * 8)):
        cfg = SupervisorConfig(initial_cost=2.5 if
                               start is LearningMode.INTERVENTION else 0.3)
        state = fresh_state(cfg)
        assert state.mode is start
        run = sup.run_session(state, ScriptedCostPlant(script), 8,
                              np.random.default_rng(0))
        assert all(not d.changed for d in run.decisions)
        assert state.mode is start


def test_session_permanently_large_error_stays_intervention():
    sup = make_supervisor()
    state = fresh_state()
    run = sup.run_session(state, ScriptedCostPlant([5.0] * 20), 20,
                          np.random.default_rng(0))
    assert all(r.mode is LearningMode.INTERVENTION for r in run.records)
    on_time = sum(s.mode is LearningMode.INTERVENTION
                  for r in run.records for s in r.strides)
    assert on_time == 100  # 20 epochs * 5 strides, all intervention


def test_session_decision_every_twenty_strides():
    sup = make_supervisor()
    state = fresh_state()
    stride_marks = []
    plant = ScriptedCostPlant([2.0] * 12)
    for _ in range(12):
        sup.run_epoch(state, plant, np.random.default_rng(1))
        if len(state.epoch_window) == 4:
            stride_marks.append(state.total_strides)
            state.epoch_window.clear()
    assert stride_marks == [20, 40, 60]


def test_session_partial_window_pends_without_decision():
    sup = make_supervisor()
    state = fresh_state()
    run = sup.run_session(state, ScriptedCostPlant([2.0] * 6), 6,
                          np.random.default_rng(0))
    assert len(run.decisions) == 1
    assert len(state.epoch_window) == 2  # carries into the next session


def test_sessions_chain_like_one_long_session():
    # running 3 + 3 epochs on carried state must match a single 6-epoch run
    script = [2, 2, 2, 2, 0.3, 0.3]
    chained_state = fresh_state()
    sup = make_supervisor()
    rng = np.random.default_rng(77)
    first = sup.run_session(chained_state, ScriptedCostPlant(script), 3, rng)
    second = sup.run_session(chained_state, ScriptedCostPlant(script[3:],
                                                              ), 3, rng)
    single_state = fresh_state()
    rng2 = np.random.default_rng(77)
    whole = sup.run_session(single_state, ScriptedCostPlant(script), 6, rng2)
    got = list(first.records) + list(second.records)
    assert [r.cost for r in got] == [r.cost for r in whole.records]
    for a, b in zip(got, whole.records):
        assert np.array_equal(a.weights, b.weights)
    assert chained_state.total_strides == single_state.total_strides
    assert np.array_equal(chained_state.policy.weights,
                          single_state.policy.weights)


def test_mode_weights_swap_after_switch():
    script = [2, 2, 2, 2, 0.3, 0.3, 0.3, 0.3, 2.0, 2.0, 2.0, 2.0]
    sup = make_supervisor()
    state = fresh_state()
    run = sup.run_session(state, ScriptedCostPlant(script), 12,
                          np.random.default_rng(0))
    modes = [r.mode for r in run.records]
    assert modes[:8] == [LearningMode.INTERVENTION] * 8
    assert modes[8:] == [LearningMode.COMPLIANCE] * 4
    # the third window (costs 2.0 under compliance) flips back at its end
    assert run.decisions[2].after is LearningMode.INTERVENTION
