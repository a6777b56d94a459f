"""Entropies and the mutual-information bookkeeping of the guessing game.

All logarithms are base 2 and ``0 log 0 = 0``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .bloch import BITS, EnsembleGeometry
from .discrimination import (JointDistribution, bit_marginal, guess_probabilities,
                             joint_distribution, ml_guesses)
from .povm import Povm

# indicator/outcome mutual information below this counts as independence
INDEPENDENCE_TOL = 1e-10


def _plogp(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    safe = np.where(p > 0, p, 1.0)
    return np.where(p > 0, -p * np.log2(safe), 0.0)


def entropy_over(p, n_axes: int) -> np.ndarray:
    """Entropy of the distribution held in the last ``n_axes`` axes (batch-friendly)."""
    h = _plogp(p)
    return h.reshape(h.shape[:h.ndim - n_axes] + (-1,)).sum(axis=-1)


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError(f"probability {p!r} not in [0, 1]")
    return float(_plogp(p) + _plogp(1 - p))


def shannon_entropy(dist: Sequence[float], tol: float = 1e-9) -> float:
    p = np.asarray(dist, dtype=float).ravel()
    if np.any(p < 0) or abs(p.sum() - 1) > tol:
        raise ValueError(f"not a probability distribution (sum = {p.sum()!r})")
    return float(_plogp(p).sum())


def total_correlation(pmf: np.ndarray) -> float:
    """``sum H(X_k) - H(X_1, ..., X_m)`` over all axes of ``pmf``."""
    pmf = np.asarray(pmf, dtype=float)
    marg = sum(float(entropy_over(pmf.sum(axis=tuple(a for a in range(pmf.ndim) if a != k)), 1))
               for k in range(pmf.ndim))
    return marg - float(entropy_over(pmf, pmf.ndim))


def _bit_indices(bits: str | Sequence[str], n_bits: int) -> tuple[int, ...]:
    if isinstance(bits, str):
        bits = (bits,)
    if not bits:
        raise ValueError("at least one input bit is needed")
    idx = []
    for b in bits:
        if b not in BITS[:n_bits]:
            raise ValueError(f"unknown bit {b!r}; choose from {BITS[:n_bits]}")
        idx.append(BITS.index(b))
    return tuple(sorted(set(idx)))


def _keep(table: np.ndarray, n_bits: int, keep: tuple[int, ...], outcome: bool) -> np.ndarray:
    drop = tuple(b - n_bits - 1 for b in range(n_bits) if b not in keep)
    if not outcome:
        drop = drop + (-1,)
    return table.sum(axis=drop) if drop else table


def mutual_information(jd: JointDistribution, bits: str | Sequence[str]) -> float:
    """``I(X : outcome)`` where ``X`` is the tuple of the named input bits."""
    keep = _bit_indices(bits, jd.n_bits)
    t, k = jd.table, jd.n_bits
    hx = entropy_over(_keep(t, k, keep, False), len(keep))
    hy = entropy_over(_keep(t, k, (), True), 1)
    hxy = entropy_over(_keep(t, k, keep, True), len(keep) + 1)
    return float(hx + hy - hxy)


def conditional_mutual_information(jd: JointDistribution, left: str, right: str) -> float:
    """``I(left : right | outcome)`` for two input bits."""
    a, b = _bit_indices(left, jd.n_bits)[0], _bit_indices(right, jd.n_bits)[0]
    if a == b:
        raise ValueError("conditional mutual information needs two distinct bits")
    t, k = jd.table, jd.n_bits
    h_a = entropy_over(_keep(t, k, (a,), True), 2)
    h_b = entropy_over(_keep(t, k, (b,), True), 2)
    h_ab = entropy_over(_keep(t, k, tuple(sorted((a, b))), True), 3)
    h_y = entropy_over(_keep(t, k, (), True), 1)
    return float(h_a + h_b - h_ab - h_y)


def decomposition_terms(table: np.ndarray, n_bits: int) -> dict[str, np.ndarray]:
    """Every information quantity of the chain-rule decomposition, batch-friendly.

    ``cross`` is the conditional total correlation of the input bits given the
    outcome; for two bits this is ``I(b_ww : b_wp | outcome)``.
    """
    h_y = entropy_over(table.sum(axis=tuple(range(-n_bits - 1, -1))), 1)
    h_x = entropy_over(table.sum(axis=-1), n_bits)
    h_all = entropy_over(table, n_bits + 1)
    h_bit = []
    h_bit_y = []
    for b in range(n_bits):
        m = bit_marginal(table, n_bits, b)
        h_bit.append(entropy_over(m.sum(axis=-1), 1))
        h_bit_y.append(entropy_over(m, 2))
    per_bit = [hb + h_y - hby for hb, hby in zip(h_bit, h_bit_y)]
    in_out = h_x + h_y - h_all
    cross = sum(h_bit_y) - (n_bits - 1) * h_y - h_all
    return {
        "bits": np.stack(per_bit, axis=-1),
        "cross": cross,
        "in_out": in_out,
        "residual": in_out - sum(per_bit) - cross,
    }


def indicator_distribution(jd: JointDistribution, which: str) -> np.ndarray:
    """Joint of the success indicator of one bit and the outcome, shape ``(2, n)``.

    Row 1 is "the maximum-likelihood guess of this bit was right".
    """
    b = _bit_indices(which, jd.n_bits)[0]
    m = bit_marginal(jd.table, jd.n_bits, b)
    guess = ml_guesses(jd)[b]
    cols = np.arange(jd.n_outcomes)
    right = np.where(guess == 1, 0, 1)
    return np.stack([m[1 - right, cols], m[right, cols]])


def indicator_joint(jd: JointDistribution) -> np.ndarray:
    """Joint of all success indicators and the outcome, shape ``(2,)*n_bits + (n,)``.

    Axis value 1 marks a correct guess of that bit.
    """
    k, n = jd.n_bits, jd.n_outcomes
    guess_idx = np.where(ml_guesses(jd) == 1, 0, 1)  # (k, n)
    out = np.zeros((2,) * k + (n,))
    for j in range(n):
        for e in np.ndindex(*(2,) * k):
            i = tuple(int(guess_idx[b, j]) if e[b] else 1 - int(guess_idx[b, j]) for b in range(k))
            out[e + (j,)] = jd.table[i + (j,)]
    return out


def holevo_bound(geom: EnsembleGeometry) -> float:
    """``S(average state) - average S(state)`` from the Bloch-vector norms."""
    r = geom.input_vectors().reshape(-1, 3)
    avg = float(np.linalg.norm(r.mean(axis=0)))

    def s(norm):
        return binary_entropy(min(1.0, (1 + norm) / 2))

    return s(avg) - float(np.mean([s(float(np.linalg.norm(v))) for v in r]))


@dataclass(frozen=True)
class InfoReport:
    I_ww: float
    I_wp: float
    I_wm: float | None
    I_cross: float
    I_in_out: float
    holevo: float
    residual: float
    via_indicator: bool
    # filled only when the indicators are independent of the outcome
    binary_forms: tuple[float, ...] | None = None
    indicator_cross: float | None = None

    def to_dict(self) -> dict:
        return {"I_ww": self.I_ww, "I_wp": self.I_wp, "I_wm": self.I_wm,
                "I_cross": self.I_cross, "I_in_out": self.I_in_out,
                "holevo": self.holevo, "residual": self.residual}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def info_report(geom: EnsembleGeometry, p: Povm) -> InfoReport:
    jd = joint_distribution(geom, p)
    terms = decomposition_terms(jd.table, jd.n_bits)
    bits = [float(v) for v in terms["bits"]]

    ind = indicator_joint(jd)
    ind_only = ind.sum(axis=-1)
    dep = (float(entropy_over(ind_only, jd.n_bits))
           + float(entropy_over(jd.outcome_marginal(), 1))
           - float(entropy_over(ind, jd.n_bits + 1)))
    independent = dep < INDEPENDENCE_TOL
    binary_forms = indicator_cross = None
    if independent:
        gp = guess_probabilities(jd)
        binary_forms = tuple(1 - binary_entropy(min(1.0, q)) for q in gp.as_tuple())
        indicator_cross = total_correlation(ind_only)

    return InfoReport(
        I_ww=bits[0],
        I_wp=bits[1],
        I_wm=bits[2] if geom.is_mixed else None,
        I_cross=float(terms["cross"]),
        I_in_out=float(terms["in_out"]),
        holevo=holevo_bound(geom),
        residual=float(terms["residual"]),
        via_indicator=independent,
        binary_forms=binary_forms,
        indicator_cross=indicator_cross,
    )


def holevo_gap_row(geom: EnsembleGeometry, z0: float) -> tuple[float, float, float]:
    """Exact frontier vs. Holevo-derived bound at ``z0``: ``(I_ww, I_wp exact, I_wp bound)``."""
    y0 = math.sqrt(max(0.0, 1 - z0 * z0))
    i_ww = 1 - binary_entropy(0.5 * (1 + z0 * geom.d_ww))
    i_wp = 1 - binary_entropy(0.5 * (1 + y0 * geom.d_wp))
    return i_ww, i_wp, holevo_bound(geom) - i_ww
