"""Qubit POVMs as weighted points in the Bloch ball.

An element ``(mu, R)`` stands for the operator ``mu * (1 + R.sigma) / 2``.
The set resolves the identity iff ``sum(mu) == 2`` and ``sum(mu * R) == 0``.
"""
from __future__ import annotations

import json
import math
from typing import NamedTuple

import numpy as np

from .bloch import DEFAULT_TOL, BlochVector

# directions closer than this are treated as the same point when merging
MERGE_TOL = 1e-12


class PovmError(ValueError):
    """A POVM violates a constraint.  ``index`` is the offending element, if any."""

    def __init__(self, constraint: str, detail: str, index: int | None = None):
        self.constraint = constraint
        self.index = index
        where = f" (element {index})" if index is not None else ""
        super().__init__(f"{constraint}{where}: {detail}")


class PovmElement(NamedTuple):
    weight: float
    direction: BlochVector


class Povm:
    """Ordered, immutable collection of weighted Bloch points.

    Parameters
    ----------
    mu : array_like, shape (n,)
        Element weights.
    R : array_like, shape (n, 3)
        Element Bloch directions.
    """

    __slots__ = ("mu", "R")

    def __init__(self, mu, R):
        mu = np.array(mu, dtype=float).reshape(-1)
        R = np.array(R, dtype=float).reshape(-1, 3)
        if mu.shape[0] != R.shape[0]:
            raise ValueError(f"{mu.shape[0]} weights for {R.shape[0]} directions")
        # -0.0 would make serialized output sign-dependent
        R = R + 0.0
        mu.flags.writeable = False
        R.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "R", R)

    def __setattr__(self, name, value):
        raise AttributeError("Povm is immutable")

    @classmethod
    def from_elements(cls, elements) -> Povm:
        elements = list(elements)
        mu = [float(w) for w, _ in elements]
        R = [d.as_array() if isinstance(d, BlochVector) else d for _, d in elements]
        return cls(mu, np.reshape(R, (-1, 3)))

    @property
    def elements(self) -> list[PovmElement]:
        return [PovmElement(float(m), BlochVector.from_array(r)) for m, r in zip(self.mu, self.R)]

    def __len__(self) -> int:
        return self.mu.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Povm):
            return NotImplemented
        return (self.mu.shape == other.mu.shape
                and np.array_equal(self.mu, other.mu)
                and np.array_equal(self.R, other.R))

    def __hash__(self):
        return hash((self.mu.tobytes(), self.R.tobytes()))

    def __repr__(self) -> str:
        parts = ", ".join(f"({m:.6g}, [{r[0]:.6g}, {r[1]:.6g}, {r[2]:.6g}])"
                          for m, r in zip(self.mu, self.R))
        return f"Povm([{parts}])"

    def operators(self) -> np.ndarray:
        """The 2x2 effect operators, shape ``(n, 2, 2)``."""
        return bloch_to_operators(self.mu, self.R)

    def to_dict(self) -> dict:
        return {"elements": [{"mu": float(m), "R": [float(v) for v in r]}
                             for m, r in zip(self.mu, self.R)]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> Povm:
        try:
            elements = data["elements"]
            mu = [float(e["mu"]) for e in elements]
            R = [[float(v) for v in e["R"]] for e in elements]
        except (KeyError, TypeError) as exc:
            raise PovmError("schema", f"malformed POVM document: {exc!r}") from exc
        if any(len(r) != 3 for r in R):
            raise PovmError("schema", "every R must have three components")
        return cls(mu, np.reshape(R, (-1, 3)))

    @classmethod
    def from_json(cls, text: str) -> Povm:
        return cls.from_dict(json.loads(text))


_PAULI = np.array([[[0, 1], [1, 0]],
                   [[0, -1j], [1j, 0]],
                   [[1, 0], [0, -1]]])


def bloch_to_operators(mu, R) -> np.ndarray:
    """``mu (1 + R.sigma) / 2`` for arrays with any leading batch shape."""
    mu = np.asarray(mu, dtype=float)
    R = np.asarray(R, dtype=float)
    ops = np.einsum("...k,kab->...ab", R, _PAULI) + np.eye(2)
    return 0.5 * mu[..., None, None] * ops


def operators_to_bloch(ops) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`bloch_to_operators`; zero operators map to ``R = 0``."""
    ops = np.asarray(ops)
    mu = np.real(np.trace(ops, axis1=-2, axis2=-1))
    s = np.real(np.einsum("...ab,kba->...k", ops, _PAULI))
    with np.errstate(invalid="ignore", divide="ignore"):
        R = np.where(mu[..., None] > 0, s / mu[..., None], 0.0)
    return mu, R


def validate_povm(p: Povm, tol: float = DEFAULT_TOL) -> None:
    """Raise :class:`PovmError` on the first violated constraint."""
    if len(p) == 0:
        raise PovmError("empty", "a POVM needs at least one element")
    if not (np.all(np.isfinite(p.mu)) and np.all(np.isfinite(p.R))):
        raise PovmError("finite", "weights and directions must be finite")
    for j, (m, r) in enumerate(zip(p.mu, p.R)):
        if m < -tol:
            raise PovmError("weight_sign", f"mu = {m!r} < 0", j)
        n = float(np.linalg.norm(r))
        if n > 1 + tol:
            raise PovmError("direction_norm", f"|R| = {n:.12g} > 1", j)
    total = float(p.mu.sum())
    if abs(total - 2) > tol:
        raise PovmError("weight_sum", f"sum(mu) = {total:.12g} != 2")
    centroid = p.mu @ p.R
    if np.abs(centroid).max() > tol:
        raise PovmError("centroid", f"sum(mu R) = {centroid.tolist()} != 0")


def is_valid_povm(p: Povm, tol: float = DEFAULT_TOL) -> bool:
    try:
        validate_povm(p, tol)
    except PovmError:
        return False
    return True


def canonical(p: Povm, merge_tol: float = MERGE_TOL) -> Povm:
    """Merge coincident directions, drop zero weights, sort by (z, y, x, mu) descending."""
    keep = p.mu > 0
    mu, R = p.mu[keep], p.R[keep]
    merged_mu: list[float] = []
    merged_R: list[np.ndarray] = []
    for m, r in zip(mu, R):
        for k, q in enumerate(merged_R):
            if np.abs(q - r).max() <= merge_tol:
                merged_mu[k] += m
                break
        else:
            merged_mu.append(float(m))
            merged_R.append(r)
    if not merged_mu:
        return Povm(np.zeros(0), np.zeros((0, 3)))
    mu = np.array(merged_mu)
    R = np.array(merged_R)
    order = np.lexsort((-mu, -R[:, 0], -R[:, 1], -R[:, 2]))
    return Povm(mu[order], R[order])


def refine_map(p: Povm, tol: float = DEFAULT_TOL) -> tuple[Povm, np.ndarray]:
    """Refinement onto the sphere plus the parent index of every output element.

    Interior elements ``(mu, R)`` become ``(mu (1 +- |R|)/2, +-R/|R|)``, in
    that order.  ``R = 0`` splits along z.  Elements already on the sphere
    pass through and zero weights are dropped.
    """
    mu_out: list[float] = []
    R_out: list[np.ndarray] = []
    parent: list[int] = []
    for j, (m, r) in enumerate(zip(p.mu, p.R)):
        if m <= 0:
            continue
        n = float(np.linalg.norm(r))
        if abs(n - 1) <= tol:
            mu_out.append(float(m))
            R_out.append(r)
            parent.append(j)
            continue
        axis = r / n if n > 0 else np.array([0.0, 0.0, 1.0])
        for sign in (1, -1):
            w = m * (1 + sign * n) / 2
            if w > 0:
                mu_out.append(w)
                R_out.append(sign * axis)
                parent.append(j)
    return Povm(mu_out, np.reshape(R_out, (-1, 3))), np.array(parent, dtype=int)


def refine(p: Povm, tol: float = DEFAULT_TOL) -> Povm:
    return refine_map(p, tol)[0]


def _check_unit(name: str, v: float, lo: float = 0.0, hi: float = 1.0) -> None:
    if not lo <= v <= hi or math.isnan(v):
        raise ValueError(f"{name} = {v!r} not in [{lo:g}, {hi:g}]")


def optimal_family(mu: float, z0: float) -> Povm:
    """Pareto-optimal rectangle on the y-z great circle.

    Directions ``(0, +-y0, +-z0)`` with ``y0 = sqrt(1 - z0^2)``; the
    same-sign corners carry weight ``mu`` and the mixed-sign corners
    ``1 - mu``.
    """
    _check_unit("mu", mu)
    _check_unit("z0", z0)
    y0 = math.sqrt(1 - z0 * z0)
    R = [(0, y0, z0), (0, -y0, -z0), (0, y0, -z0), (0, -y0, z0)]
    return canonical(Povm([mu, mu, 1 - mu, 1 - mu], R))


def ww_detector_scheme(E: float) -> Povm:
    """Interferometer with a which-way detector of efficiency ``E``."""
    _check_unit("E", E)
    return optimal_family(0.5, E)


def vn_scheme(T_out: float, orientation: int = 1) -> Povm:
    """Projective readout behind an output beam splitter of transmissivity ``T_out``.

    ``orientation=+1`` pairs same-sign (y, z) directions, ``-1`` opposite signs.
    """
    _check_unit("T_out", T_out, 0.5, 1.0)
    if orientation not in (1, -1):
        raise ValueError(f"orientation must be +1 or -1, got {orientation!r}")
    return optimal_family(1.0 if orientation == 1 else 0.0, abs(1 - 2 * T_out))


def two_detector_scheme(E1: float, E2: float) -> Povm:
    """Eight-corner measurement from two inefficient detectors.

    Weight 1/4 on each ``(+-x0, +-y0, +-z0)`` with ``z0 = E1``,
    ``y0 = sqrt(1 - E1^2) E2`` and ``x0 = sqrt((1 - E1^2)(1 - E2^2))``.
    """
    _check_unit("E1", E1)
    _check_unit("E2", E2)
    z0 = E1
    y0 = math.sqrt(1 - E1 * E1) * E2
    x0 = math.sqrt((1 - E1 * E1) * (1 - E2 * E2))
    s = (1, -1)
    R = [(a * x0, b * y0, c * z0) for a in s for b in s for c in s]
    return canonical(Povm(np.full(8, 0.25), R))


TRIVIAL = Povm([2.0], [[0.0, 0.0, 0.0]])
