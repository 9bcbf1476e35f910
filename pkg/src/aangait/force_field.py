"""Deadbanded, saturating assistive-torque law.

The force field exerts a restoring torque toward the desired trajectory.
Inside a deadband around the target the assistance is exactly zero, so small
gait variations pass through unassisted.  Outside it the torque magnitude is
tau_max * (1 - exp(-g * err^2)): it grows with both the error and the
impedance g and saturates strictly below tau_max.

Angles and errors in degrees, torque in N*m, impedance g in deg^-2 (the
exponent is dimensionless).  All functions are pure and accept scalars or
numpy arrays.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

DEFAULT_TORQUE_CEILING = 5.0  # N*m
DEFAULT_DEADBAND = 1.0        # deg


@dataclass(frozen=True)
class ForceFieldConfig:
    tau_max: float = DEFAULT_TORQUE_CEILING
    deadband: float = DEFAULT_DEADBAND

    def __post_init__(self):
        if not self.tau_max > 0.0:
            raise ConfigError(f"tau_max must be > 0, got {self.tau_max}")
        if self.deadband < 0.0:
            raise ConfigError(f"deadband must be >= 0, got {self.deadband}")


@dataclass(frozen=True)
class TrackingError:
    """Raw error (desired - measured) and its deadbanded version."""

    raw: np.ndarray
    deadbanded: np.ndarray


def deadband_error(desired, measured, deadband):
    """Tracking error with the deadband applied.

    The deadbanded error keeps the sign of the raw error and has magnitude
    max(|raw| - deadband, 0).
    """
    if deadband < 0.0:
        raise ConfigError(f"deadband must be >= 0, got {deadband}")
    raw = np.asarray(desired, dtype=float) - np.asarray(measured, dtype=float)
    dead = np.sign(raw) * np.maximum(np.abs(raw) - deadband, 0.0)
    if raw.ndim == 0:
        raw, dead = float(raw), float(dead)
    return TrackingError(raw=raw, deadbanded=dead)


def assist_torque(err, impedance, config):
    """Restoring torque for a deadbanded tracking error.

    |tau| = tau_max * (1 - exp(-g * err^2)), signed like the error so the
    field always pulls toward the target.  The impedance must already be
    clamped non-negative by the caller.
    """
    g = np.asarray(impedance, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("impedance must be clamped to >= 0 before actuation")
    e = np.asarray(err.deadbanded, dtype=float)
    tau = np.sign(e) * config.tau_max * (1.0 - np.exp(-g * e * e))
    return float(tau) if tau.ndim == 0 else tau
