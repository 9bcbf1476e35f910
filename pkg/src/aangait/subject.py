"""Simulated walker: baseline gait, target construction, and motor adaptation.

The plant closes the loop around the controller.  Each stride, the subject
commands its natural trajectory plus a learned feed-forward adjustment plus
motor noise; the orthosis torque (computed from the pre-assistance command
error) shifts the measured angle through a quasi-static compliance.  Between
strides the adjustment is updated from the logged (post-assistance) error
with a forgetting factor, which is exactly the mechanism that reproduces
slacking: assistance masks the error, masked error starves learning, and
forgetting erodes what was learned.

Angles in degrees, phases in radians, torque in N*m.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BaselineFormatError, ConfigError, GridMismatchError
from .force_field import ForceFieldConfig, assist_torque, deadband_error
from .phase import TWO_PI, sample_segment_indices

DEFAULT_SAMPLES_PER_STRIDE = 200   # at a nominal 1.1 s stride time

# Default bump geometry: 5 deg of extra dorsiflexion, wide enough to feel
# but fading below 0.05 deg before 55% of the cycle.
DEFAULT_BUMP_AMPLITUDE = 5.0          # deg
DEFAULT_BUMP_WIDTH = 0.07 * TWO_PI    # rad

# Synthetic ankle profile: dorsiflexion peak late in swing (~78% of the
# cycle), push-off plantarflexion dip near 62%, mild dorsiflexion through
# mid stance.  Built from wrapped Gaussian bumps so it is exactly periodic.
_PROFILE_TERMS = (
    # (amplitude deg, center as cycle fraction, concentration)
    (9.0, 0.78, 14.0),
    (-14.0, 0.62, 18.0),
    (5.0, 0.30, 6.0),
)


def _default_profile(phases):
    out = np.zeros_like(phases, dtype=float)
    for amp, frac, conc in _PROFILE_TERMS:
        out += amp * np.exp(conc * (np.cos(phases - frac * TWO_PI) - 1.0))
    return out


@dataclass(frozen=True)
class BaselineGait:
    """A periodic ankle trajectory sampled at uniform phase points."""

    angles: np.ndarray

    def __post_init__(self):
        a = np.array(self.angles, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise ConfigError("baseline needs a 1-D array of >= 2 samples")
        a.flags.writeable = False
        object.__setattr__(self, "angles", a)

    @property
    def samples(self):
        return self.angles.shape[0]

    @property
    def phases(self):
        return TWO_PI * np.arange(self.samples) / self.samples


def load_baseline_table(path):
    """Parse a (phase fraction, angle deg) table, one pair per line.

    Fractions must lie in [0, 1) and increase strictly; blank lines and
    '#' comments are skipped.
    """
    fracs, angles = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise BaselineFormatError(
                f"{path}:{lineno}: expected 'fraction angle', got {line!r}")
        try:
            frac, ang = float(parts[0]), float(parts[1])
        except ValueError:
            raise BaselineFormatError(
                f"{path}:{lineno}: non-numeric value in {line!r}") from None
        if not 0.0 <= frac < 1.0:
            raise BaselineFormatError(
                f"{path}:{lineno}: phase fraction {frac} outside [0, 1)")
        if fracs and frac <= fracs[-1]:
            raise BaselineFormatError(
                f"{path}:{lineno}: phase fractions must increase strictly")
        fracs.append(frac)
        angles.append(ang)
    if len(fracs) < 2:
        raise BaselineFormatError(f"{path}: need at least 2 samples")
    return np.asarray(fracs), np.asarray(angles)


def baseline_gait(profile="default", samples=DEFAULT_SAMPLES_PER_STRIDE):
    """Baseline trajectory from the built-in preset or a sample file.

    The preset peaks between 5 and 20 deg of dorsiflexion late in swing.
    A file table is interpolated periodically onto the uniform grid.
    """
    if samples < 2:
        raise ConfigError("samples must be >= 2")
    phases = TWO_PI * np.arange(samples) / samples
    if profile == "default":
        return BaselineGait(_default_profile(phases))
    fracs, angles = load_baseline_table(profile)
    # periodic wrap: repeat the first point at fraction + 1
    fr = np.concatenate([fracs, [fracs[0] + 1.0]])
    an = np.concatenate([angles, [angles[0]]])
    return BaselineGait(np.interp(phases / TWO_PI, fr, an, period=1.0))


@dataclass(frozen=True)
class TargetTask:
    """Gaussian dorsiflexion bump added to the baseline to form the target.

    center=None resolves to the phase of maximum swing dorsiflexion of the
    baseline the target is built from.
    """

    amplitude: float = DEFAULT_BUMP_AMPLITUDE
    center: float | None = None
    width: float = DEFAULT_BUMP_WIDTH

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise ConfigError("bump amplitude must be >= 0")
        if not self.width > 0.0:
            raise ConfigError("bump width must be > 0")
        if self.center is not None and not np.pi <= self.center < TWO_PI:
            raise ConfigError(
                f"bump center {self.center} must lie in the swing half [pi, 2*pi)")


def swing_peak_phase(baseline):
    """Phase of the maximum dorsiflexion within the swing half [pi, 2*pi)."""
    phases = baseline.phases
    swing = phases >= np.pi
    masked = np.where(swing, baseline.angles, -np.inf)
    return float(phases[int(np.argmax(masked))])


def make_target(baseline, task):
    """Target trajectory: baseline plus the Gaussian bump.

    Returns (target angles, resolved bump center).  The bump is evaluated on
    the linear phase axis; with the default width it is below 0.05 deg
    before 55% of the cycle, so stance stays effectively unaltered.
    """
    center = task.center if task.center is not None else swing_peak_phase(baseline)
    if not np.pi <= center < TWO_PI:
        raise ConfigError(f"bump center {center} not in the swing half")
    d = baseline.phases - center
    bump = task.amplitude * np.exp(-d * d / (2.0 * task.width ** 2))
    return baseline.angles + bump, center


@dataclass(frozen=True)
class SubjectParams:
    """Plant constants (simulation knobs, not claims about real subjects)."""

    learn_gain: float = 0.1         # error-learning gain per stride
    forgetting: float = 0.99        # retention factor per stride
    torque_compliance: float = 0.4  # deg per N*m of assistive torque
    motor_noise: float = 0.3        # deg, per-sample standard deviation

    def __post_init__(self):
        if self.learn_gain < 0.0:
            raise ConfigError("learn_gain must be >= 0")
        if not 0.0 < self.forgetting <= 1.0:
            raise ConfigError("forgetting must be in (0, 1]")
        if self.torque_compliance < 0.0:
            raise ConfigError("torque_compliance must be >= 0")
        if self.motor_noise < 0.0:
            raise ConfigError("motor_noise must be >= 0")


@dataclass(frozen=True)
class SubjectState:
    """Learned feed-forward trajectory adjustment, one value per sample."""

    adjustment: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjustment, dtype=float)
        a.flags.writeable = False
        object.__setattr__(self, "adjustment", a)

    @classmethod
    def fresh(cls, samples):
        return cls(np.zeros(samples))


@dataclass(frozen=True)
class StrideOutcome:
    """Everything measured during one simulated stride."""

    measured: np.ndarray     # theta_m, deg
    torque: np.ndarray       # N*m
    impedance: np.ndarray    # executed g, deg^-2
    raw_error: np.ndarray    # target - measured, deg
    segment_rms: np.ndarray  # per evaluation segment, deg


def _impedance_samples(impedance, phases):
    if impedance is None:
        return np.zeros_like(phases)
    if callable(impedance):
        impedance = impedance(phases)
    g = np.asarray(impedance, dtype=float)
    if g.shape != phases.shape:
        raise GridMismatchError(
            f"impedance has shape {g.shape}, expected {phases.shape}")
    return g


def segment_rms_errors(raw_error, n_segments):
    """RMS of the raw error within each of n_segments uniform phase segments."""
    raw_error = np.asarray(raw_error, dtype=float)
    seg = sample_segment_indices(raw_error.size, n_segments)
    return np.sqrt(np.array([
        np.mean(raw_error[seg == j] ** 2) for j in range(1, n_segments + 1)]))


def simulate_stride(target, impedance, baseline, params, state, mode, rng,
                    force_field=None, n_segments=10):
    """One stride of the walker under the given impedance landscape.

    mode "aan": torque from the deadbanded pre-assistance command error;
    mode "transparent": torque identically zero (the landscape is ignored).
    The measured angle is command + compliance * torque; logged errors are
    taken against the measured angle.
    """
    if mode not in ("aan", "transparent"):
        raise ConfigError(f"mode must be 'aan' or 'transparent', got {mode!r}")
    force_field = force_field or ForceFieldConfig()
    target = np.asarray(target, dtype=float)
    if target.shape != (baseline.samples,):
        raise GridMismatchError(
            f"target has shape {target.shape}, expected ({baseline.samples},)")
    if state.adjustment.shape != target.shape:
        raise GridMismatchError("subject adjustment is on a different grid")
    phases = baseline.phases

    noise = rng.normal(0.0, params.motor_noise, size=target.shape)
    command = baseline.angles + state.adjustment + noise
    if mode == "aan":
        g = _impedance_samples(impedance, phases)
        err_pre = deadband_error(target, command, force_field.deadband)
        torque = assist_torque(err_pre, g, force_field)
    else:
        g = np.zeros_like(phases)
        torque = np.zeros_like(phases)
    measured = command + params.torque_compliance * torque
    raw = target - measured
    return StrideOutcome(
        measured=measured, torque=torque, impedance=g, raw_error=raw,
        segment_rms=segment_rms_errors(raw, n_segments))


def subject_update(state, raw_error, params):
    """Stride-to-stride adaptation: a' = forgetting * a + learn_gain * error.

    With a constant error e the adjustment converges to
    learn_gain * e / (1 - forgetting) when forgetting < 1.
    """
    raw_error = np.asarray(raw_error, dtype=float)
    if raw_error.shape != state.adjustment.shape:
        raise GridMismatchError("error samples are on a different grid")
    return SubjectState(
        params.forgetting * state.adjustment + params.learn_gain * raw_error)


class SubjectPlant:
    """Stateful stride provider wrapping the walker for the session loop.

    Exposes the interface the supervisor consumes: a `phases` array and a
    `stride(impedance, assisted)` method returning a StrideOutcome.  When
    `adapt` is True the subject updates its adjustment after every stride.
    """

    def __init__(self, baseline, target, params, rng, force_field=None,
                 n_segments=10, adapt=True):
        self.baseline = baseline
        self.target = np.asarray(target, dtype=float)
        self.params = params
        self.rng = rng
        self.force_field = force_field or ForceFieldConfig()
        self.n_segments = n_segments
        self.adapt = adapt
        self.state = SubjectState.fresh(baseline.samples)

    @property
    def phases(self):
        return self.baseline.phases

    def stride(self, impedance, assisted=True):
        outcome = simulate_stride(
            self.target, impedance, self.baseline, self.params, self.state,
            "aan" if assisted else "transparent", self.rng,
            self.force_field, self.n_segments)
        if self.adapt:
            self.state = subject_update(self.state, outcome.raw_error, self.params)
        return outcome
