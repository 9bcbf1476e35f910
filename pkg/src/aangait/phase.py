"""Gait-phase geometry and the kernel-parameterized impedance landscape.

A stride is indexed by a phase angle in [0, 2*pi) running from one heel
strike to the next.  Two independent uniform partitions of the cycle are
used: ``kernel_count`` segments whose midpoints carry the Gaussian kernels
of the policy, and ``instant_count`` segments over which roll-outs are
scored.  The impedance landscape g(phi) is the convex (normalized) kernel
combination of the shape weights; it is clamped to [0, g_max] only where it
drives the actuator, so weights are free to go negative while learning.

Units: phases in radians, impedance in deg^-2.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigError, PhaseDomainError

TWO_PI = 2.0 * np.pi

DEFAULT_KERNEL_COUNT = 10
DEFAULT_INSTANT_COUNT = 10
DEFAULT_KERNEL_WIDTH = 5.0   # rad^-2, sets kernel overlap for 10 kernels
DEFAULT_IMPEDANCE_CLAMP = 10.0  # deg^-2, actuation ceiling for g


def kernel_centers(count):
    """Midpoints of `count` equal phase segments: (2i - 1) * pi / count.

    Strictly increasing and strictly inside [0, 2*pi).
    """
    if count < 1:
        raise ConfigError(f"segment count must be >= 1, got {count}")
    return (2.0 * np.arange(1, count + 1) - 1.0) * np.pi / count


def segment_of(phi, n_segments):
    """1-based index of the half-open segment [lo, hi) containing phi."""
    if not 0.0 <= phi < TWO_PI:
        raise PhaseDomainError(f"phase {phi!r} outside [0, 2*pi)")
    idx = int(phi / (TWO_PI / n_segments)) + 1
    return min(idx, n_segments)  # guards the float edge just below 2*pi


def segment_indices(phis, n_segments):
    """Vector version of segment_of; returns 1-based indices."""
    phis = np.asarray(phis, dtype=float)
    if phis.size and (phis.min() < 0.0 or phis.max() >= TWO_PI):
        raise PhaseDomainError("phases outside [0, 2*pi)")
    idx = (phis / (TWO_PI / n_segments)).astype(int) + 1
    return np.minimum(idx, n_segments)


def sample_segment_indices(n_samples, n_segments):
    """Segment index (1-based) of each of n_samples uniform phase samples.

    Computed in integer arithmetic so segment boundaries that coincide with
    sample points are never misassigned by float rounding.
    """
    return (np.arange(n_samples) * n_segments) // n_samples + 1


def _readonly(arr):
    arr = np.asarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PhaseGrid:
    """The two uniform phase partitions (policy kernels and scoring instants)."""

    kernel_count: int = DEFAULT_KERNEL_COUNT
    instant_count: int = DEFAULT_INSTANT_COUNT

    def __post_init__(self):
        if self.kernel_count < 1:
            raise ConfigError(f"kernel_count must be >= 1, got {self.kernel_count}")
        if self.instant_count < 1:
            raise ConfigError(f"instant_count must be >= 1, got {self.instant_count}")

    @cached_property
    def kernel_centers(self):
        return _readonly(kernel_centers(self.kernel_count))

    @cached_property
    def instant_centers(self):
        return _readonly(kernel_centers(self.instant_count))

    @property
    def segment_width(self):
        return TWO_PI / self.instant_count


@dataclass(frozen=True)
class BasisSet:
    """Gaussian kernels exp(-0.5 * width * (phi - center)^2) on a PhaseGrid.

    Phase distance is taken on the linear axis; kernels do not wrap around
    the stride boundary.  The resulting asymmetry near phi = 0 is accepted
    because stance-phase impedance stays near zero in practice.
    """

    width: float = DEFAULT_KERNEL_WIDTH
    grid: PhaseGrid = field(default_factory=PhaseGrid)

    def __post_init__(self):
        if not self.width > 0.0:
            raise ConfigError(f"kernel width must be > 0, got {self.width}")

    def matrix(self, phis):
        """Kernel values at each phase in `phis`: shape (len(phis), P)."""
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        d = phis[:, None] - self.grid.kernel_centers[None, :]
        return np.exp(-0.5 * self.width * d * d)


@dataclass(frozen=True)
class ImpedancePolicy:
    """Shape weights for the impedance landscape plus the actuation clamp.

    Weights may be negative while learning; the landscape is clamped to
    [0, max_impedance] only at actuation time.  Immutable: updates build a
    new policy.
    """

    weights: np.ndarray
    max_impedance: float = DEFAULT_IMPEDANCE_CLAMP

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1:
            raise ConfigError(f"weights must be a 1-D vector, got shape {w.shape}")
        if not self.max_impedance > 0.0:
            raise ConfigError(f"max_impedance must be > 0, got {self.max_impedance}")
        object.__setattr__(self, "weights", _readonly(w))

    @property
    def kernel_count(self):
        return self.weights.shape[0]

    def updated(self, delta):
        return ImpedancePolicy(self.weights + np.asarray(delta, dtype=float),
                               self.max_impedance)


def basis_eval(phi, basis):
    """Kernel vector at a single phase (or an array of phases).

    Every component lies in (0, 1]; the component for kernel i equals 1
    exactly when phi sits on that kernel's center.
    """
    out = basis.matrix(phi)
    return out[0] if np.isscalar(phi) or np.ndim(phi) == 0 else out


def landscape_eval(policy, phi, basis):
    """Impedance landscape at phi: (raw, clamped).

    raw = sum_i psi_i(phi) * w_i / sum_i psi_i(phi); the denominator is
    strictly positive everywhere because the kernels are strictly positive.
    clamped = raw clipped to [0, max_impedance].
    """
    psi = basis.matrix(phi)
    if policy.kernel_count != psi.shape[1]:
        raise ConfigError(
            f"policy has {policy.kernel_count} weights but basis has "
            f"{psi.shape[1]} kernels")
    raw = psi @ policy.weights / psi.sum(axis=1)
    if np.isscalar(phi) or np.ndim(phi) == 0:
        raw = raw[0]
    return raw, np.clip(raw, 0.0, policy.max_impedance)


def landscape_profile(weight_rows, phis, basis, max_impedance):
    """Landscape over `phis` when the weight vector varies per sample.

    `weight_rows` has shape (len(phis), P); row q is the weight vector in
    force at sample q (used to execute per-segment exploration noise).
    Returns (raw, clamped) arrays.
    """
    psi = basis.matrix(phis)
    weight_rows = np.asarray(weight_rows, dtype=float)
    if weight_rows.shape != psi.shape:
        raise ConfigError(
            f"weight rows shape {weight_rows.shape} does not match "
            f"(samples, kernels) = {psi.shape}")
    raw = (psi * weight_rows).sum(axis=1) / psi.sum(axis=1)
    return raw, np.clip(raw, 0.0, max_impedance)
