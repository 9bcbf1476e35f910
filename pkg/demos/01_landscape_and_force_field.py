"""
Phase-locked impedance landscapes and the assistive force field
===============================================================

Walk through the controller's static pieces: the Gaussian kernels spread
over the gait cycle, the landscape their weighted mixture produces, and the
deadbanded saturating torque the landscape commands.

Run:  python demos/01_landscape_and_force_field.py  (figures land in
demo_output/).
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from aangait import (BasisSet, ForceFieldConfig, ImpedancePolicy, PhaseGrid,
                     assist_torque, basis_eval, deadband_error,
                     landscape_eval)

out_dir = Path(__file__).resolve().parent.parent / "demo_output"
out_dir.mkdir(exist_ok=True)

# Ten kernels at the midpoints of ten equal phase segments, width 5 rad^-2.
basis = BasisSet(width=5.0, grid=PhaseGrid(kernel_count=10, instant_count=10))
phases = np.linspace(0, 2 * np.pi, 800, endpoint=False)
kernels = basis_eval(phases, basis)

# A hand-picked weight vector with most of its mass late in swing, the
# shape the learner typically converges to for a mid-swing dorsiflexion
# task.  One weight is negative on purpose: the landscape is clamped at
# actuation, the weights themselves are unconstrained.
weights = np.array([0.0, -0.05, 0.0, 0.02, 0.05, 0.1, 0.45, 0.8, 0.35, 0.1])
policy = ImpedancePolicy(weights, max_impedance=10.0)
raw, clamped = landscape_eval(policy, phases, basis)

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
ax1.plot(phases, kernels, color="tab:orange", lw=0.8)
ax1.set_ylabel("kernel value")
ax1.set_title("Gaussian kernels over the gait cycle")
ax2.plot(phases, raw, label="raw mixture", color="tab:gray", ls="--")
ax2.plot(phases, clamped, label="clamped landscape g", color="tab:blue")
ax2.scatter(basis.grid.kernel_centers, weights, color="k", s=18,
            label="kernel weights")
ax2.set_xlabel("gait phase (rad)")
ax2.set_ylabel("impedance (deg$^{-2}$)")
ax2.legend()
fig.tight_layout()
fig.savefig(out_dir / "01_landscape.png", dpi=130)

# The force field: torque against tracking error for a few impedance
# levels.  Inside the 1 deg deadband the assistance is exactly zero; far
# outside it saturates just below the 5 N*m ceiling.
cfg = ForceFieldConfig(tau_max=5.0, deadband=1.0)
errors = np.linspace(-6, 6, 600)
fig, ax = plt.subplots(figsize=(7, 4))
for g in (0.1, 0.5, 1.0, 3.0):
    err = deadband_error(errors, 0.0, cfg.deadband)
    ax.plot(errors, assist_torque(err, g, cfg), label=f"g = {g}")
ax.axvspan(-cfg.deadband, cfg.deadband, color="0.9",
           label="deadband (no assist)")
ax.set_xlabel("tracking error (deg)")
ax.set_ylabel("assistive torque (N m)")
ax.set_title("Deadbanded, saturating restoring torque")
ax.legend()
fig.tight_layout()
fig.savefig(out_dir / "01_force_field.png", dpi=130)

print(f"peak landscape value: {clamped.max():.3f} deg^-2")
print(f"torque at 5 deg error, g=1: "
      f"{assist_torque(deadband_error(5.0, 0.0, 1.0), 1.0, cfg):.3f} N m")
print(f"figures written to {out_dir}")
