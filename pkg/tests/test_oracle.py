import math

import numpy as np
import pytest

from pathphase.bloch import EnsembleGeometry
from pathphase.discrimination import frontier_lhs, guess_probabilities, joint_distribution
from pathphase.oracle import (HIST_EDGES, maximize_joint_correct, monte_carlo_game, pareto_sweep,
                              random_povm, random_povm_batch)
from pathphase.povm import TRIVIAL, Povm, is_valid_povm, optimal_family, two_detector_scheme


def test_random_povm_validates_many_seeds():
    for seed in range(10_000):
        p = random_povm(np.random.default_rng(seed), 4)
        assert is_valid_povm(p), seed


@pytest.mark.parametrize("n", range(2, 9))
def test_random_batch_constraints(n):
    mu, R = random_povm_batch(np.random.default_rng(n), n, 500)
    assert np.abs(mu.sum(axis=1) - 2).max() <= 1e-12
    assert np.abs(np.einsum("bn,bnk->bk", mu, R)).max() <= 1e-12
    assert np.linalg.norm(R, axis=-1).max() <= 1 + 1e-12
    assert mu.min() > 0


def test_random_povm_deterministic():
    a = random_povm(np.random.default_rng(42), 4)
    b = random_povm(np.random.default_rng(42), 4)
    assert a.to_json() == b.to_json()


def test_random_povm_needs_two_outcomes():
    with pytest.raises(ValueError):
        random_povm(np.random.default_rng(0), 1)


def test_random_povm_covers_interior():
    # non-projective draws land strictly inside the ball
    p = random_povm(np.random.default_rng(2), 6)
    assert np.linalg.norm(p.R, axis=1).max() < 1


def test_sweep_small(base_geom):
    rep = pareto_sweep(base_geom, 2_000, seed=3)
    assert rep.violations == 0 and rep.invalid_samples == 0
    assert rep.max_lhs <= 1 + 1e-9
    assert int(rep.hist_counts.sum()) + rep.hist_overflow == 2_000
    assert len(rep.hist_counts) == len(HIST_EDGES) - 1 == 105
    assert rep.controls_max_dev <= 1e-12
    assert sum(rep.outcome_counts.values()) == 2_000
    assert set(rep.outcome_counts) == set(range(2, 9))
    lhs = frontier_lhs(guess_probabilities(joint_distribution(base_geom, rep.argmax_povm)), base_geom)
    assert lhs == pytest.approx(rep.max_lhs, abs=1e-12)


def test_sweep_independent_of_workers(mixed_geom):
    a = pareto_sweep(mixed_geom, 3_000, seed=5, shard_size=700)
    b = pareto_sweep(mixed_geom, 3_000, seed=5, shard_size=700, workers=3)
    assert a.to_json() == b.to_json()


def test_sweep_rejects_empty(base_geom):
    with pytest.raises(ValueError):
        pareto_sweep(base_geom, 0)


def test_maximize_which_way_only():
    geom = EnsembleGeometry.pure(1.0, 0.0)
    p, pc = maximize_joint_correct(geom, 500, seed=1)
    assert pc == pytest.approx(0.5, abs=1e-12)
    gp = guess_probabilities(joint_distribution(geom, p))
    assert gp.P_WW == pytest.approx(1, abs=1e-12)


def test_maximize_base_geometry(base_geom):
    p, pc = maximize_joint_correct(base_geom, 2_000, seed=1)
    # P_c = 1/4 + (z0 d_ww + y0 d_wp)/4 peaks at z0 = d_ww / hypot(d_ww, d_wp)
    z_star = 0.65 / math.hypot(0.65, 0.6)
    grid = max(0.25 + 0.25 * (z * 0.65 + math.sqrt(1 - z * z) * 0.6)
               for z in np.linspace(0, 1, 100_001))
    assert pc == pytest.approx(0.25 + 0.25 * math.hypot(0.65, 0.6), abs=1e-10)
    assert pc >= grid - 1e-12
    assert np.abs(p.R[:, 2]).max() == pytest.approx(z_star, abs=1e-5)
    assert frontier_lhs(guess_probabilities(joint_distribution(base_geom, p)), base_geom) >= 1 - 1e-3


def test_maximize_trivial_geometry():
    geom = EnsembleGeometry.pure(0.0, 0.0)
    _, pc = maximize_joint_correct(geom, 300, seed=0)
    assert pc == pytest.approx(0.25, abs=1e-12)


def test_game_trivial(base_geom):
    res = monte_carlo_game(base_geom, TRIVIAL, 100_000, seed=1)
    assert abs(res.P_WW - 0.5) <= 5 * math.sqrt(0.25 / 100_000)
    assert res.stderr["P_WW"] == pytest.approx(math.sqrt(res.P_WW * (1 - res.P_WW) / 100_000))


def test_game_family(base_geom):
    res = monte_carlo_game(base_geom, optimal_family(0.5, 0.6), 1_000_000, seed=7)
    band = 4 * math.sqrt(0.695 * 0.305 / 1e6)
    assert round(band, 4) == 0.0018
    assert abs(res.P_WW - 0.695) <= band
    assert abs(res.P_WP - 0.74) <= 4 * math.sqrt(0.74 * 0.26 / 1e6)


def test_game_deterministic(base_geom):
    p = optimal_family(0.3, 0.4)
    a = monte_carlo_game(base_geom, p, 50_000, seed=11, shard_size=10_000)
    b = monte_carlo_game(base_geom, p, 50_000, seed=11, shard_size=10_000, workers=4)
    assert a.to_json() == b.to_json()


def test_game_mixed():
    geom = EnsembleGeometry.mixed(0.65, 0.6, 0.3)
    res = monte_carlo_game(geom, two_detector_scheme(0.6, 0.5), 400_000, seed=2)
    assert res.P_WM is not None
    assert max(res.sigmas().values()) < 5


def test_game_unequal_outcomes(base_geom):
    # sampling must follow p(j|i), checked on a lopsided 3-outcome POVM
    p = Povm([1.5, 0.25, 0.25], [[0, 0, 0.4 / 1.5], [0, 0.6, -0.8], [0, -0.6, -0.8]])
    assert is_valid_povm(p)
    res = monte_carlo_game(base_geom, p, 400_000, seed=3)
    assert max(res.sigmas().values()) < 5


def test_game_rejects_empty(base_geom):
    with pytest.raises(ValueError):
        monte_carlo_game(base_geom, TRIVIAL, 0)
