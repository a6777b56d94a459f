"""
A third bit: the ellipsoid
==========================

Mixing each state with a partner along ``x`` adds a third bit to guess.
Two detectors in series spread the measurement strength over all three
axes and land exactly on the ellipsoid.
"""
import numpy as np

from pathphase import EnsembleGeometry, pareto_sweep, two_detector_scheme
from pathphase.discrimination import frontier_lhs, guess_probabilities, joint_distribution

geom = EnsembleGeometry.mixed(0.65, 0.6, 0.3)
print(f"distances: {geom.distances}, d0 = {geom.d0:.4f}")

print(f"\n{'E1':>5} {'E2':>5} {'P_WW':>7} {'P_WP':>7} {'P_WM':>7} {'lhs':>7}")
for E1 in (0.0, 0.5, 1.0):
    for E2 in (0.0, 0.5, 1.0):
        gp = guess_probabilities(joint_distribution(geom, two_detector_scheme(E1, E2)))
        print(f"{E1:5.2f} {E2:5.2f} {gp.P_WW:7.4f} {gp.P_WP:7.4f} {gp.P_WM:7.4f} "
              f"{frontier_lhs(gp, geom):7.4f}")

###############################################################################
# Random measurements again stay inside.

rep = pareto_sweep(geom, 5000, seed=3)
print(f"\nlargest lhs: {rep.max_lhs:.6f}, violations: {rep.violations}")
