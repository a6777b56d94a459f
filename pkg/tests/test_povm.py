import json
import math

import numpy as np
import pytest

from pathphase.bloch import EnsembleGeometry
from pathphase.discrimination import joint_distribution
from pathphase.oracle import random_povm
from pathphase.povm import (TRIVIAL, Povm, PovmError, canonical, is_valid_povm, optimal_family,
                            refine, refine_map, two_detector_scheme, validate_povm, vn_scheme,
                            ww_detector_scheme)

GRID = np.linspace(0, 1, 21)


def as_set(p):
    return sorted((round(float(m), 12), tuple(np.round(r, 12) + 0.0)) for m, r in zip(p.mu, p.R))


def test_validate_examples():
    validate_povm(TRIVIAL)
    validate_povm(Povm([1, 1], [[0, 0, 1], [0, 0, -1]]))
    with pytest.raises(PovmError) as err:
        validate_povm(Povm([1, 1], [[0, 0, 1], [0, 0, 1]]))
    assert err.value.constraint == "centroid"


@pytest.mark.parametrize("mu, R, constraint, index", [
    ([2.5, -0.5], [[0, 0, 0], [0, 0, 0]], "weight_sign", 1),
    ([1, 1], [[0, 0, 1.1], [0, 0, -1.1]], "direction_norm", 0),
    ([1, 0.5], [[0, 0, 0], [0, 0, 0]], "weight_sum", None),
])
def test_validate_reports_element(mu, R, constraint, index):
    with pytest.raises(PovmError) as err:
        validate_povm(Povm(mu, R))
    assert (err.value.constraint, err.value.index) == (constraint, index)


def test_operators_resolve_identity():
    for p in (optimal_family(0.3, 0.7), two_detector_scheme(0.6, 0.5), TRIVIAL):
        ops = p.operators()
        assert np.allclose(ops.sum(axis=0), np.eye(2), atol=1e-12)
        assert np.linalg.eigvalsh(ops).min() >= -1e-12


def test_refine_examples():
    assert as_set(refine(TRIVIAL)) == as_set(Povm([1, 1], [[0, 0, 1], [0, 0, -1]]))
    halves = refine(Povm([1, 1], [[0, 0, 0.5], [0, 0, -0.5]]))
    assert halves.mu.tolist() == [0.75, 0.25, 0.75, 0.25]
    assert halves.R[:, 2].tolist() == [1, -1, -1, 1]


def test_refine_single_interior_element():
    # a lone (2, z/2) element is not itself a POVM, but the split rule is local
    out = refine(Povm([2.0], [[0, 0, 0.5]]))
    assert out.mu.tolist() == [1.5, 0.5]
    assert out.R.tolist() == [[0, 0, 1], [0, 0, -1]]


def test_refine_idempotent_and_unit():
    rng = np.random.default_rng(5)
    for n in range(2, 9):
        p = random_povm(rng, n)
        r = refine(p)
        validate_povm(r)
        assert np.allclose(np.linalg.norm(r.R, axis=1), 1, atol=1e-12)
        assert refine(r) == r


def test_refine_drops_zero_weights():
    p = Povm([1, 1, 0], [[0, 0, 1], [0, 0, -1], [0.5, 0, 0]])
    assert len(refine(p)) == 2


@pytest.mark.parametrize("geom", [EnsembleGeometry.pure(0.65, 0.6),
                                  EnsembleGeometry.mixed(0.65, 0.6, 0.3)])
def test_refine_merges_back(geom):
    rng = np.random.default_rng(11)
    for _ in range(50):
        p = random_povm(rng, int(rng.integers(2, 9)))
        r, parent = refine_map(p)
        fine = joint_distribution(geom, r).table
        merged = np.zeros_like(joint_distribution(geom, p).table)
        for j, k in enumerate(parent):
            merged[..., k] += fine[..., j]
        assert np.abs(merged - joint_distribution(geom, p).table).max() <= 1e-12


def test_optimal_family_examples():
    assert as_set(optimal_family(1, 1)) == as_set(Povm([1, 1], [[0, 0, 1], [0, 0, -1]]))
    assert as_set(optimal_family(0, 0)) == as_set(Povm([1, 1], [[0, 1, 0], [0, -1, 0]]))
    p = optimal_family(0.5, 0.6)
    assert as_set(p) == as_set(Povm([0.5] * 4, [[0, 0.8, 0.6], [0, -0.8, -0.6],
                                                [0, 0.8, -0.6], [0, -0.8, 0.6]]))
    validate_povm(p)


def test_optimal_family_grid_invariants():
    for m in GRID:
        for z0 in GRID:
            p = optimal_family(float(m), float(z0))
            assert abs(p.mu.sum() - 2) <= 1e-12
            assert np.abs(p.mu @ p.R).max() <= 1e-12
            assert np.abs(np.linalg.norm(p.R, axis=1) - 1).max() <= 1e-12


@pytest.mark.parametrize("mu, z0", [(-0.1, 0.5), (0.5, 1.2)])
def test_optimal_family_domain(mu, z0):
    with pytest.raises(ValueError):
        optimal_family(mu, z0)


def test_ww_detector():
    assert as_set(ww_detector_scheme(1)) == as_set(Povm([1, 1], [[0, 0, 1], [0, 0, -1]]))
    assert as_set(ww_detector_scheme(0)) == as_set(Povm([1, 1], [[0, 1, 0], [0, -1, 0]]))
    assert ww_detector_scheme(0.6) == optimal_family(0.5, 0.6)
    with pytest.raises(ValueError):
        ww_detector_scheme(1.5)


def test_vn_scheme():
    assert as_set(vn_scheme(0.5)) == as_set(Povm([1, 1], [[0, 1, 0], [0, -1, 0]]))
    assert as_set(vn_scheme(1.0)) == as_set(Povm([1, 1], [[0, 0, 1], [0, 0, -1]]))
    assert as_set(vn_scheme(0.8, 1)) == as_set(Povm([1, 1], [[0, 0.8, 0.6], [0, -0.8, -0.6]]))
    assert as_set(vn_scheme(0.8, -1)) == as_set(Povm([1, 1], [[0, 0.8, -0.6], [0, -0.8, 0.6]]))
    with pytest.raises(ValueError):
        vn_scheme(0.4)


def test_two_detector_examples():
    assert as_set(two_detector_scheme(1, 0.3)) == as_set(Povm([1, 1], [[0, 0, 1], [0, 0, -1]]))
    assert as_set(two_detector_scheme(0, 0)) == as_set(Povm([1, 1], [[1, 0, 0], [-1, 0, 0]]))
    p = two_detector_scheme(0.6, 0.5)
    assert len(p) == 8
    assert np.allclose(np.abs(p.R), [math.sqrt(0.48), 0.4, 0.6], atol=1e-15)
    assert round(math.sqrt(0.48), 5) == 0.69282
    validate_povm(p)


def test_two_detector_unit_norm_grid():
    for E1 in GRID:
        for E2 in GRID:
            p = two_detector_scheme(float(E1), float(E2))
            assert np.abs(np.linalg.norm(p.R, axis=1) - 1).max() <= 1e-12
            assert is_valid_povm(p)


def test_canonical_order_and_json_round_trip():
    p = two_detector_scheme(0.6, 0.5)
    z = p.R[:, 2]
    assert np.all(np.diff(z) <= 0)
    again = Povm.from_json(p.to_json())
    assert again == p
    doc = json.loads(p.to_json())
    assert set(doc) == {"elements"} and set(doc["elements"][0]) == {"mu", "R"}
    assert canonical(Povm(p.mu[::-1], p.R[::-1])).to_json() == p.to_json()


def test_json_schema_errors():
    with pytest.raises(PovmError):
        Povm.from_json('{"elements": [{"mu": 1}]}')
    with pytest.raises(PovmError):
        Povm.from_json('{"elements": [{"mu": 1, "R": [0, 1]}]}')


def test_immutable():
    p = optimal_family(0.5, 0.6)
    with pytest.raises(AttributeError):
        p.mu = np.ones(4)
    with pytest.raises(ValueError):
        p.mu[0] = 3
