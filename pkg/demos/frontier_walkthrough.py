"""
Guessing path and phase: the ellipse
====================================

Four qubit states are prepared, one for each pair of bits ``(b_ww, b_wp)``.
A single measurement is made and both bits are guessed from the outcome.
This script walks along the family of four-outcome measurements that is
optimal for the task and shows that it traces the ellipse

    ((2 P_WW - 1) / d_ww)^2 + ((2 P_WP - 1) / d_wp)^2 = 1

while random measurements stay inside it.
"""
import numpy as np

from pathphase import EnsembleGeometry, optimal_family, pareto_sweep
from pathphase.discrimination import frontier_lhs, guess_probabilities, joint_distribution

###############################################################################
# The ensemble
# ------------
# Only two numbers matter: how far apart the states of each bit sit.

geom = EnsembleGeometry.pure(d_ww=0.65, d_wp=0.6)
print(f"d0 = {geom.d0:.4f}")
print(geom.input_vectors().reshape(-1, 3).round(4))

###############################################################################
# Walking the optimal family
# --------------------------
# ``z0`` tilts the four measurement directions from the phase axis towards
# the path axis.

print(f"\n{'z0':>5} {'P_WW':>8} {'P_WP':>8} {'lhs':>8}")
for z0 in np.linspace(0, 1, 6):
    gp = guess_probabilities(joint_distribution(geom, optimal_family(0.5, z0)))
    print(f"{z0:5.2f} {gp.P_WW:8.4f} {gp.P_WP:8.4f} {frontier_lhs(gp, geom):8.4f}")

###############################################################################
# Random measurements
# -------------------
# A few thousand random POVMs with 2 to 8 outcomes never cross the ellipse.

rep = pareto_sweep(geom, 5000, seed=1)
print(f"\nlargest lhs over {rep.n_samples} random POVMs: {rep.max_lhs:.6f}")
print(f"violations: {rep.violations}")
