"""Roll-out based policy improvement for the impedance shape weights.

One learning epoch runs K exploration strides under noise-perturbed weights,
scores each stride at N phase instants, and moves the weights toward the
perturbations that made the remaining cost of the stride small:

  1. For stride k and instant n, the cost-to-go S(n, k) accumulates the
     per-segment immediate cost (weighted squared tracking error plus
     weighted squared impedance) from instant n to the end of the stride,
     plus a small quadratic control cost on the perturbed weights.
  2. Costs at each instant are turned into probabilities over the K strides
     with a range-normalized softmax: the discrimination constant h fixes
     how sharply the cheapest stride dominates, independent of cost scale.
  3. The per-instant update is the probability-weighted average of the
     noise, projected onto the kernel direction active at that instant.
     Per-instant updates are then averaged across instants with weights
     (N - n) * psi_i(phi_n), so early instants (whose cost-to-go summarizes
     more of the stride) count more; the last instant gets zero weight.

Exploration noise is zero-mean Gaussian per weight component.  Its standard
deviation decays by a fixed factor once per stride so the landscape settles,
and the caller resets the decay counter when the learning objective changes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

DEFAULT_EXPLORATION_STRIDES = 4     # K
DEFAULT_DISCRIMINATION = 10.0       # h
DEFAULT_NOISE_SIGMA = 0.03          # deg^-2
DEFAULT_NOISE_DECAY = 0.992         # per stride
DEFAULT_CONTROL_COST = 1e-6         # rho, scale of R = rho * I

NOISE_PER_SEGMENT = "per_segment"   # fresh noise vector at every instant
NOISE_PER_STRIDE = "per_stride"     # one noise vector held for the stride


@dataclass(frozen=True)
class CostWeights:
    """Weights of the immediate cost: error term vs. impedance term."""

    error: float      # lambda_theta, deg^-2 cost
    impedance: float  # lambda_g, deg^4 cost

    def __post_init__(self):
        if self.error < 0.0 or self.impedance < 0.0:
            raise ConfigError("cost weights must be >= 0")


@dataclass(frozen=True)
class PI2Config:
    exploration_strides: int = DEFAULT_EXPLORATION_STRIDES
    discrimination: float = DEFAULT_DISCRIMINATION
    noise_sigma: float = DEFAULT_NOISE_SIGMA
    noise_decay: float = DEFAULT_NOISE_DECAY
    control_cost: float = DEFAULT_CONTROL_COST
    noise_mode: str = NOISE_PER_SEGMENT

    def __post_init__(self):
        if self.exploration_strides < 1:
            raise ConfigError("exploration_strides must be >= 1")
        if not self.discrimination > 0.0:
            raise ConfigError("discrimination must be > 0")
        if not self.noise_sigma > 0.0:
            raise ConfigError("noise_sigma must be > 0")
        if not 0.0 < self.noise_decay <= 1.0:
            raise ConfigError("noise_decay must be in (0, 1]")
        if self.control_cost < 0.0:
            raise ConfigError("control_cost must be >= 0")
        if self.noise_mode not in (NOISE_PER_SEGMENT, NOISE_PER_STRIDE):
            raise ConfigError(f"unknown noise_mode {self.noise_mode!r}")


@dataclass(frozen=True)
class ExplorationBatch:
    """Everything the update needs from K executed exploration strides.

    noise:       (K, N, P) perturbations drawn per stride and instant
    segment_rms: (K, N) per-segment RMS of the raw tracking error, deg
    impedance:   (K, N) executed (clamped) impedance at the instant centers
    base_weights:(P,) the policy weights in force when the batch was sampled
    """

    noise: np.ndarray
    segment_rms: np.ndarray
    impedance: np.ndarray
    base_weights: np.ndarray

    def __post_init__(self):
        noise = np.asarray(self.noise, dtype=float)
        seg = np.asarray(self.segment_rms, dtype=float)
        imp = np.asarray(self.impedance, dtype=float)
        base = np.asarray(self.base_weights, dtype=float)
        if noise.ndim != 3:
            raise ConfigError(f"noise must be (K, N, P), got shape {noise.shape}")
        k, n, p = noise.shape
        if seg.shape != (k, n) or imp.shape != (k, n):
            raise ConfigError("segment_rms and impedance must both be (K, N)")
        if base.shape != (p,):
            raise ConfigError("base_weights must be (P,)")
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "segment_rms", seg)
        object.__setattr__(self, "impedance", imp)
        object.__setattr__(self, "base_weights", base)

    @property
    def shape(self):
        return self.noise.shape


@dataclass(frozen=True)
class CostTable:
    """Cost-to-go values, shape (N, K): instant n down the rows."""

    values: np.ndarray


def sigma_effective(sigma0, decay, strides_since_reset):
    """Noise standard deviation after `strides_since_reset` strides.

    sigma = sigma0 * decay**s; every stride (exploration or evaluation)
    advances the counter.  At the default decay 0.992 the level falls to
    about 20% of sigma0 after 200 strides.
    """
    if strides_since_reset < 0:
        raise ConfigError("strides_since_reset must be >= 0")
    return sigma0 * decay ** strides_since_reset


def draw_noise(rng, sigma, strides, instants, kernels):
    """(strides, instants, kernels) table of N(0, sigma^2) perturbations."""
    if sigma < 0.0:
        raise ConfigError("sigma must be >= 0")
    return rng.normal(0.0, sigma, size=(strides, instants, kernels))


def projection_matrix(kernel_values, control_cost=DEFAULT_CONTROL_COST):
    """Rank-1 projector onto the kernel direction active at one instant.

    With a scalar control-cost matrix R = rho * I the general form
    R^-1 psi psi^T / (psi^T R^-1 psi) collapses to psi psi^T / (psi^T psi)
    for every rho > 0, which is also the rho -> 0 limit, so the returned
    matrix never depends on `control_cost`.
    """
    psi = np.asarray(kernel_values, dtype=float)
    nrm = psi @ psi
    if nrm == 0.0:
        raise ConfigError("kernel vector is zero; cannot build a projection")
    if control_cost < 0.0:
        raise ConfigError("control_cost must be >= 0")
    return np.outer(psi, psi) / nrm


def immediate_cost(segment_rms, impedance, weights):
    """Per-segment cost: weights.error * rms^2 + weights.impedance * g^2."""
    rms = np.asarray(segment_rms, dtype=float)
    g = np.asarray(impedance, dtype=float)
    return weights.error * rms * rms + weights.impedance * g * g


def _projected_noise(batch, basis):
    """M_n eps_{n,k} for every (k, n): shape (K, N, P).

    M_n projects onto psi(phi_n), so each projected vector is a multiple of
    the kernel vector at that instant.
    """
    psi = basis.matrix(basis.grid.instant_centers)          # (N, P)
    norms = (psi * psi).sum(axis=1)                         # (N,)
    dots = np.einsum("knp,np->kn", batch.noise, psi)        # (K, N)
    return dots[:, :, None] * psi[None, :, :] / norms[None, :, None]


def cost_to_go_table(batch, basis, weights, control_cost=DEFAULT_CONTROL_COST):
    """Suffix-accumulated stride costs S(n, k) for a batch.

    S(n, k) sums, from instant n to the stride end, the immediate cost of
    segment j in stride k plus 0.5 * rho * ||w + M_j eps_{j,k}||^2.  Rows
    are nonincreasing down the suffix because every term is >= 0.
    """
    run = immediate_cost(batch.segment_rms, batch.impedance, weights)  # (K, N)
    if control_cost > 0.0:
        perturbed = batch.base_weights[None, None, :] + _projected_noise(batch, basis)
        run = run + 0.5 * control_cost * (perturbed * perturbed).sum(axis=2)
    suffix = np.cumsum(run[:, ::-1], axis=1)[:, ::-1]                  # (K, N)
    return CostTable(values=suffix.T.copy())                           # (N, K)


def rollout_probabilities(costs, discrimination=DEFAULT_DISCRIMINATION):
    """Probability over the K strides at one instant.

    The exponent is -h * (S_k - min S) / (max S - min S), so the spread of
    the probabilities depends only on h, not on the cost scale.  When all
    costs are equal the ratio is 0/0; the strides are then indistinguishable
    and the distribution is uniform.
    """
    costs = np.asarray(costs, dtype=float)
    lo, hi = costs.min(), costs.max()
    if hi == lo:
        return np.full(costs.shape, 1.0 / costs.size)
    e = np.exp(-discrimination * (costs - lo) / (hi - lo))
    return e / e.sum()


def probability_table(table, discrimination=DEFAULT_DISCRIMINATION):
    """rollout_probabilities applied to every row of a CostTable: (N, K)."""
    return np.apply_along_axis(
        rollout_probabilities, 1, table.values, discrimination)


def instant_updates(probabilities, noise, basis):
    """Per-instant weight updates: probability-weighted projected noise.

    Row n is sum_k P(n, k) * M_n eps_{n,k}; as a convex combination it lies
    inside the hull of the projected noise vectors (all along psi(phi_n)).
    """
    probabilities = np.asarray(probabilities, dtype=float)
    noise = np.asarray(noise, dtype=float)
    k, n, p = noise.shape
    if probabilities.shape != (n, k):
        raise ConfigError(
            f"probabilities must be (N, K) = {(n, k)}, got {probabilities.shape}")
    psi = basis.matrix(basis.grid.instant_centers)            # (N, P)
    norms = (psi * psi).sum(axis=1)
    dots = np.einsum("knp,np->kn", noise, psi)                # (K, N)
    coef = (probabilities.T * dots).sum(axis=0) / norms       # (N,)
    return coef[:, None] * psi


def parameter_update(probabilities, noise, basis):
    """Weight update delta for one epoch, to be applied as w <- w + delta.

    Per-instant updates are averaged per kernel i with weights
    (N - n) * psi_i(phi_n); the kernel values are strictly positive so the
    denominator never vanishes for N >= 2.  With a single instant every
    weight would be zero, so that configuration is rejected.
    """
    per_instant = instant_updates(probabilities, noise, basis)   # (N, P)
    n_instants = per_instant.shape[0]
    if n_instants < 2:
        raise ConfigError("parameter_update needs at least 2 phase instants")
    psi = basis.matrix(basis.grid.instant_centers)               # (N, P)
    coef = (n_instants - 1.0 - np.arange(n_instants))[:, None] * psi
    return (coef * per_instant).sum(axis=0) / coef.sum(axis=0)
