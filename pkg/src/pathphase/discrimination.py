"""Joint input/outcome statistics and maximum-likelihood guessing.

Probability tables are numpy arrays of shape ``(2, 2[, 2], n)``: one axis per
input bit in the order ``ww, wp[, wm]`` (index 0 is the +1 value), then the
outcome index.  The array helpers accept extra leading batch axes so the
oracle can evaluate many POVMs at once.
"""
from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass

import numpy as np

from .bloch import BITS, SIGNS, EnsembleGeometry, InputLabel
from .povm import Povm, validate_povm


def joint_table(geom: EnsembleGeometry, mu, R) -> np.ndarray:
    """``p(i, j) = p_i Tr(rho_i A_j)`` for weights ``mu (..., n)`` and directions ``R (..., n, 3)``."""
    mu = np.asarray(mu, dtype=float)
    R = np.asarray(R, dtype=float)
    r = geom.input_vectors().reshape(-1, 3)
    n_in = r.shape[0]
    overlap = R @ r.T  # (..., n, n_in)
    table = (mu[..., None] / (2 * n_in)) * (1 + overlap)
    table = np.swapaxes(table, -1, -2)
    return table.reshape(table.shape[:-2] + (2,) * geom.n_bits + (table.shape[-1],))


def _bit_axis(n_bits: int, bit: int) -> int:
    return bit - n_bits - 1


def bit_marginal(table: np.ndarray, n_bits: int, bit: int) -> np.ndarray:
    """Joint of one input bit and the outcome, shape ``(..., 2, n)``."""
    others = tuple(_bit_axis(n_bits, b) for b in range(n_bits) if b != bit)
    return table.sum(axis=others) if others else table


def bit_success(table: np.ndarray, n_bits: int) -> np.ndarray:
    """Maximum-likelihood success probability of every bit, shape ``(..., n_bits)``."""
    return np.stack([bit_marginal(table, n_bits, b).max(axis=-2).sum(axis=-1)
                     for b in range(n_bits)], axis=-1)


def label_success(table: np.ndarray, n_bits: int) -> np.ndarray:
    """Probability of guessing every input bit at once."""
    flat = table.reshape(table.shape[:-n_bits - 1] + (-1, table.shape[-1]))
    return flat.max(axis=-2).sum(axis=-1)


def closed_form_success(geom: EnsembleGeometry, mu, R) -> np.ndarray:
    """``1/2 (1 + sum_j mu_j/2 |R_j.e_k| d_k)`` for each bit axis ``e_k``."""
    mu = np.asarray(mu, dtype=float)
    R = np.abs(np.asarray(R, dtype=float))
    # ww reads z, wp reads y, wm reads x
    cols = [2, 1, 0][:geom.n_bits]
    spread = np.einsum("...n,...nk->...k", mu / 2, R[..., cols])
    return 0.5 * (1 + spread * np.array(geom.distances))


def frontier_value(success, distances) -> np.ndarray:
    """Ellipse/ellipsoid left-hand side; axes with zero distance are skipped."""
    success = np.asarray(success, dtype=float)
    total = np.zeros(success.shape[:-1])
    for k, d in enumerate(distances):
        if d > 0:
            total = total + ((2 * success[..., k] - 1) / d) ** 2
    return total


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over (input label, outcome index)."""

    table: np.ndarray
    mode: str = "pure"

    @property
    def n_bits(self) -> int:
        return self.table.ndim - 1

    @property
    def n_outcomes(self) -> int:
        return self.table.shape[-1]

    def __getitem__(self, key: tuple[InputLabel, int]) -> float:
        label, j = key
        return float(self.table[label.index + (j,)])

    def outcome_marginal(self) -> np.ndarray:
        return self.table.reshape(-1, self.n_outcomes).sum(axis=0)

    def to_csv(self, fh=None) -> str | None:
        """Write ``b_ww,b_wp[,b_wm],outcome,probability`` rows; return text if ``fh`` is None."""
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([f"b_{b}" for b in BITS[:self.n_bits]] + ["outcome", "probability"])
        for bits in itertools.product(SIGNS, repeat=self.n_bits):
            idx = tuple(0 if b == 1 else 1 for b in bits)
            for j in range(self.n_outcomes):
                writer.writerow(list(bits) + [j, repr(float(self.table[idx + (j,)]))])
        return out.getvalue() if fh is None else None


@dataclass(frozen=True)
class GuessProbabilities:
    P_WW: float
    P_WP: float
    P_WM: float | None = None
    P_c: float | None = None

    def as_tuple(self) -> tuple[float, ...]:
        if self.P_WM is None:
            return (self.P_WW, self.P_WP)
        return (self.P_WW, self.P_WP, self.P_WM)


def joint_distribution(geom: EnsembleGeometry, p: Povm) -> JointDistribution:
    validate_povm(p)
    return JointDistribution(joint_table(geom, p.mu, p.R), geom.mode)


def _as_guess(success, pc) -> GuessProbabilities:
    vals = [float(v) for v in success]
    return GuessProbabilities(*vals, P_c=float(pc)) if len(vals) == 3 else \
        GuessProbabilities(vals[0], vals[1], None, float(pc))


def guess_probabilities(jd: JointDistribution, geom: EnsembleGeometry | None = None) -> GuessProbabilities:
    """Per-bit and joint success of the maximum-likelihood guess, read off the table.

    For each outcome the guess of a bit is the value with the larger
    marginal joint probability; ties go to +1, which does not change the
    success probability.
    """
    return _as_guess(bit_success(jd.table, jd.n_bits), label_success(jd.table, jd.n_bits))


def ml_guesses(jd: JointDistribution) -> np.ndarray:
    """Guessed sign of every bit per outcome, shape ``(n_bits, n)``; ties guess +1."""
    rows = []
    for b in range(jd.n_bits):
        m = bit_marginal(jd.table, jd.n_bits, b)
        rows.append(np.where(m[..., 0, :] >= m[..., 1, :], 1, -1))
    return np.array(rows)


def closed_form_probabilities(geom: EnsembleGeometry, p: Povm) -> GuessProbabilities:
    """Success probabilities from the element sums ``sum mu_j |z_j| / 2`` etc.

    Valid for any POVM in the ball: the likelihood comparison for a bit only
    depends on the sign of the matching Bloch component.
    """
    success = closed_form_success(geom, p.mu, p.R)
    pc = (1 + 2 * float(np.sum(success - 0.5))) / geom.n_inputs
    return _as_guess(success, pc)


def frontier_lhs(gp: GuessProbabilities, geom: EnsembleGeometry) -> float:
    return float(frontier_value(gp.as_tuple(), geom.distances))


def joint_correct_probability(jd: JointDistribution) -> float:
    return float(label_success(jd.table, jd.n_bits))
