import itertools

import numpy as np
import pytest

from pathphase.bloch import EnsembleGeometry

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE: list[str] = []


def density(r):
    """Density matrix of a Bloch vector, built from Pauli matrices."""
    return 0.5 * (np.eye(2) + np.einsum("k,kab->ab", np.asarray(r, float), PAULI))


def brute_force_table(geom, povm):
    """p(i, j) = Tr(rho_i A_j) / n_inputs from explicit 2x2 matrices, keyed by sign tuples."""
    ops = [m * density(r) for m, r in zip(povm.mu, povm.R)]
    out = {}
    for bits in itertools.product((1, -1), repeat=geom.n_bits):
        x = geom.d0 + (bits[2] * geom.d_wm if geom.is_mixed else 0.0)
        rho = density([x, bits[1] * geom.d_wp, bits[0] * geom.d_ww])
        for j, A in enumerate(ops):
            out[bits, j] = float(np.real(np.trace(rho @ A))) / geom.n_inputs
    return out


@pytest.fixture
def base_geom():
    return EnsembleGeometry.pure(0.65, 0.6)


@pytest.fixture
def mixed_geom():
    return EnsembleGeometry.mixed(0.65, 0.6, 0.3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
