"""Shared test plants and small oracles."""

import numpy as np

from aangait.phase import TWO_PI, sample_segment_indices
from aangait.subject import StrideOutcome, segment_rms_errors


class ScriptedCostPlant:
    """Every stride of epoch m carries the constant error script[m].

    The error ignores the commanded impedance entirely, so evaluation-stride
    costs follow the script exactly and the supervisor's decisions can be
    predicted by hand.
    """

    def __init__(self, script, strides_per_epoch=5, samples=200,
                 n_segments=10):
        self.script = list(script)
        self.strides_per_epoch = strides_per_epoch
        self.n_segments = n_segments
        self.phases = TWO_PI * np.arange(samples) / samples
        self.calls = 0

    def stride(self, impedance, assisted=True):
        epoch = min(self.calls // self.strides_per_epoch,
                    len(self.script) - 1)
        self.calls += 1
        err = np.full_like(self.phases, float(self.script[epoch]))
        if impedance is None:
            g = np.zeros_like(self.phases)
        elif callable(impedance):
            g = np.asarray(impedance(self.phases), dtype=float)
        else:
            g = np.asarray(impedance, dtype=float)
        return StrideOutcome(
            measured=-err, torque=np.zeros_like(err), impedance=g,
            raw_error=err,
            segment_rms=segment_rms_errors(err, self.n_segments))


def constant_error_outcome(value, samples=200, n_segments=10,
                           segment_values=None):
    """StrideOutcome whose raw error is constant (or constant per segment)."""
    if segment_values is None:
        err = np.full(samples, float(value))
    else:
        seg = sample_segment_indices(samples, n_segments)
        err = np.asarray(segment_values, dtype=float)[seg - 1]
    return StrideOutcome(
        measured=-err, torque=np.zeros(samples), impedance=np.zeros(samples),
        raw_error=err, segment_rms=segment_rms_errors(err, n_segments))
