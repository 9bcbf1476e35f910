"""Deterministic surrogate plants for optimizer checks and worked examples.

These bypass the walker entirely: the tracking error is a direct, known
function of the commanded impedance, so the cost landscape the optimizer
sees can be verified independently (for instance by a grid search over
constant-weight policies).
"""

import numpy as np

from .errors import ConfigError
from .phase import TWO_PI, sample_segment_indices
from .subject import StrideOutcome, segment_rms_errors


class LinearAssistancePlant:
    """Error falls linearly with impedance inside chosen segments.

    Samples inside `responsive_segments` carry error
    max(initial_error - assist_gain * g, 0); everything else is error-free.
    Deterministic and stateless, so repeated strides under the same
    landscape give identical outcomes.
    """

    def __init__(self, initial_error=1.5, assist_gain=5.0,
                 responsive_segments=(7, 8), samples=200, n_segments=10):
        if initial_error < 0.0:
            raise ConfigError("initial_error must be >= 0")
        if assist_gain < 0.0:
            raise ConfigError("assist_gain must be >= 0")
        bad = [s for s in responsive_segments if not 1 <= s <= n_segments]
        if bad:
            raise ConfigError(f"segments {bad} outside 1..{n_segments}")
        self.initial_error = initial_error
        self.assist_gain = assist_gain
        self.n_segments = n_segments
        self.phases = TWO_PI * np.arange(samples) / samples
        seg = sample_segment_indices(samples, n_segments)
        self._responsive = np.isin(seg, list(responsive_segments))

    def stride(self, impedance, assisted=True):
        if impedance is None:
            g = np.zeros_like(self.phases)
        elif callable(impedance):
            g = np.asarray(impedance(self.phases), dtype=float)
        else:
            g = np.asarray(impedance, dtype=float)
        err = np.zeros_like(self.phases)
        if assisted:
            err[self._responsive] = np.maximum(
                self.initial_error - self.assist_gain * g[self._responsive], 0.0)
        else:
            err[self._responsive] = self.initial_error
        return StrideOutcome(
            measured=-err, torque=np.zeros_like(err), impedance=g,
            raw_error=err, segment_rms=segment_rms_errors(err, self.n_segments))
