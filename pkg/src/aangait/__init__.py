"""Adaptive assist-as-needed impedance shaping for simulated gait training.

The library couples a phase-locked impedance controller (Gaussian kernels
over the gait cycle, weights learned by roll-out based policy improvement,
and a dual-objective supervisor that stiffens or fades assistance with
hysteresis) to a simulated walker that adapts its feed-forward motion from
stride to stride and slacks when assistance masks its errors.
"""

from .config import RunConfig, config_violations, load_config
from .errors import (BaselineFormatError, ConfigError, GridMismatchError,
                     PhaseDomainError)
from .force_field import (ForceFieldConfig, TrackingError, assist_torque,
                          deadband_error)
from .phase import (BasisSet, ImpedancePolicy, PhaseGrid, basis_eval,
                    kernel_centers, landscape_eval, landscape_profile,
                    segment_of)
from .pi2 import (CostTable, CostWeights, ExplorationBatch, PI2Config,
                  cost_to_go_table, draw_noise, immediate_cost,
                  instant_updates, parameter_update, probability_table,
                  projection_matrix, rollout_probabilities, sigma_effective)
from .protocol import (StrideRow, build_summary, read_stride_csv,
                       recompute_summary, run_protocol, write_stride_csv)
from .subject import (BaselineGait, StrideOutcome, SubjectParams,
                      SubjectPlant, SubjectState, baseline_gait, make_target,
                      simulate_stride, subject_update, swing_peak_phase)
from .supervisor import (EpochRecord, LearningMode, ModeDecision,
                         SessionState, Supervisor, SupervisorConfig,
                         epoch_cost, high_level_cost, initial_state,
                         mode_transition)
from .surrogate import LinearAssistancePlant

__version__ = "0.1.0"
