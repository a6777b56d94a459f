"""
Playing the game
================

The probabilities computed from Born's rule can be checked by simply
playing: draw a label, measure, guess, and count.
"""
from pathphase import EnsembleGeometry, monte_carlo_game, optimal_family

geom = EnsembleGeometry.pure(0.65, 0.6)
p = optimal_family(0.5, 0.6)

res = monte_carlo_game(geom, p, 1_000_000, seed=7)
print(f"rounds: {res.n_rounds}")
for name in ("P_WW", "P_WP", "P_c"):
    print(f"{name:5s} simulated {getattr(res, name):.5f}   exact {getattr(res.analytic, name):.5f}")

###############################################################################
# Deviations in units of the standard error. Values beyond 4 should be rare.

print({k: round(v, 2) for k, v in res.sigmas().items()})
