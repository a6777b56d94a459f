"""Bloch-ball geometry of the input ensembles.

Alice's inputs are labelled by independent sign bits.  The which-way bit
moves the Bloch vector along z, the which-phase bit along y and (for mixed
ensembles) the which-mixedness bit along x.  Pure ensembles are four corners
of a rectangle on the sphere; mixed ensembles are eight corners of a box
inside the ball.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

DEFAULT_TOL = 1e-9

Mode = Literal["pure", "mixed"]

# canonical order of bits along the axes of every probability table
BITS = ("ww", "wp", "wm")
SIGNS = (1, -1)


class GeometryError(ValueError):
    """Raised when an ensemble geometry or its parameters are invalid.

    ``violations`` holds ``(constraint, detail)`` pairs, one per failed check.
    """

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = list(violations)
        msg = "; ".join(f"{name}: {detail}" for name, detail in self.violations)
        super().__init__(msg)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.norm > 1 + DEFAULT_TOL:
            raise GeometryError([("bloch_norm", f"|r| = {self.norm:.12g} > 1")])

    @classmethod
    def from_array(cls, a) -> BlochVector:
        x, y, z = (float(v) for v in a)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


@dataclass(frozen=True)
class InputLabel:
    b_ww: int
    b_wp: int
    b_wm: int | None = None

    def __post_init__(self):
        for name in ("b_ww", "b_wp", "b_wm"):
            v = getattr(self, name)
            if v is None and name == "b_wm":
                continue
            if v not in SIGNS:
                raise ValueError(f"{name} must be +1 or -1, got {v!r}")

    @property
    def bits(self) -> tuple[int, ...]:
        if self.b_wm is None:
            return (self.b_ww, self.b_wp)
        return (self.b_ww, self.b_wp, self.b_wm)

    @property
    def index(self) -> tuple[int, ...]:
        """Position of this label in a probability table (+1 -> 0, -1 -> 1)."""
        return tuple(0 if b == 1 else 1 for b in self.bits)


@dataclass(frozen=True)
class EnsembleGeometry:
    """Distances defining the 4-state (pure) or 8-state (mixed) input set.

    Build instances through :meth:`pure`, :meth:`mixed` or
    :func:`geometry_from_angles`, which validate.  The bare constructor does
    not, so that :func:`validate_geometry` can report on arbitrary values.
    """

    d0: float
    d_ww: float
    d_wp: float
    d_wm: float = 0.0
    mode: Mode = "pure"

    @classmethod
    def pure(cls, d_ww: float, d_wp: float, tol: float = DEFAULT_TOL) -> EnsembleGeometry:
        s = d_ww**2 + d_wp**2
        if s > 1 + tol:
            raise GeometryError([("sphere", f"d_ww^2 + d_wp^2 = {s:.12g} > 1")])
        geom = cls(math.sqrt(max(0.0, 1.0 - s)), float(d_ww), float(d_wp))
        validate_geometry(geom, tol)
        return geom

    @classmethod
    def mixed(cls, d_ww: float, d_wp: float, d_wm: float,
              tol: float = DEFAULT_TOL) -> EnsembleGeometry:
        s = d_ww**2 + d_wp**2
        if s > 1 + tol:
            raise GeometryError([("ball", f"d_ww^2 + d_wp^2 = {s:.12g} > 1")])
        d0 = math.sqrt(max(0.0, 1.0 - s)) - d_wm
        geom = cls(d0, float(d_ww), float(d_wp), float(d_wm), "mixed")
        validate_geometry(geom, tol)
        return geom

    @property
    def is_mixed(self) -> bool:
        return self.mode == "mixed"

    @property
    def n_bits(self) -> int:
        return 3 if self.is_mixed else 2

    @property
    def n_inputs(self) -> int:
        return 2**self.n_bits

    @property
    def distances(self) -> tuple[float, ...]:
        """Semi-axes of the frontier, in table bit order."""
        if self.is_mixed:
            return (self.d_ww, self.d_wp, self.d_wm)
        return (self.d_ww, self.d_wp)

    def labels(self) -> Iterator[InputLabel]:
        """All input labels in table order."""
        for bits in itertools.product(SIGNS, repeat=self.n_bits):
            yield InputLabel(*bits)

    def input_vectors(self) -> np.ndarray:
        """Bloch vectors of all inputs, shape ``(2,)*n_bits + (3,)``."""
        s = np.array(SIGNS, dtype=float)
        out = np.zeros((2,) * self.n_bits + (3,))
        out[..., 0] = self.d0
        out[..., 2] += (s * self.d_ww).reshape((2,) + (1,) * (self.n_bits - 1))
        out[..., 1] += (s * self.d_wp).reshape((1, 2) + (1,) * (self.n_bits - 2))
        if self.is_mixed:
            out[..., 0] += (s * self.d_wm).reshape((1, 1, 2))
        return out


def validate_geometry(geom: EnsembleGeometry, tol: float = DEFAULT_TOL) -> None:
    """Check every ensemble invariant; raise :class:`GeometryError` listing failures."""
    bad = []
    names = ("d_ww", "d_wp", "d_wm")
    for name in names:
        v = getattr(geom, name)
        if not (-tol <= v <= 1 + tol) or math.isnan(v):
            bad.append((f"{name}_range", f"{name} = {v!r} not in [0, 1]"))
    if geom.mode not in ("pure", "mixed"):
        bad.append(("mode", f"unknown mode {geom.mode!r}"))
    elif geom.mode == "pure":
        if geom.d_wm != 0:
            bad.append(("pure_d_wm", f"pure ensembles need d_wm = 0, got {geom.d_wm!r}"))
        s = geom.d0**2 + geom.d_ww**2 + geom.d_wp**2
        if abs(s - 1) > tol:
            bad.append(("sphere", f"d0^2 + d_ww^2 + d_wp^2 = {s:.12g} != 1"))
        if geom.d0 < -tol:
            bad.append(("d0_sign", f"d0 = {geom.d0!r} < 0"))
    else:
        s = geom.d_ww**2 + geom.d_wp**2 + geom.d_wm**2
        if s > 1 + tol:
            bad.append(("ball", f"d_ww^2 + d_wp^2 + d_wm^2 = {s:.12g} > 1"))
        expect = math.sqrt(max(0.0, 1 - geom.d_ww**2 - geom.d_wp**2)) - geom.d_wm
        if abs(geom.d0 - expect) > tol:
            bad.append(("d0_formula", f"d0 = {geom.d0!r}, expected {expect!r}"))
        if geom.d0 < -tol:
            bad.append(("d0_sign", f"d0 = {geom.d0:.12g} < 0 puts the box outside the ball"))
    if not bad:
        norms = np.linalg.norm(geom.input_vectors(), axis=-1)
        if norms.max() > 1 + tol:
            bad.append(("input_norm", f"max input |r| = {norms.max():.12g} > 1"))
    if bad:
        raise GeometryError(bad)


def geometry_from_angles(alpha: float, phi: float) -> EnsembleGeometry:
    """Pure ensemble from the preparation angles.

    ``alpha`` sets the beam-splitter bias and ``phi`` the phase delay; both
    must lie in ``[0, pi/2]`` so that every distance is nonnegative.
    """
    bad = [(name, f"{name} = {v!r} not in [0, pi/2]")
           for name, v in (("alpha", alpha), ("phi", phi))
           if not 0 <= v <= math.pi / 2]
    if bad:
        raise GeometryError(bad)
    return EnsembleGeometry(
        d0=math.cos(alpha) * math.cos(phi),
        d_ww=math.sin(alpha),
        d_wp=math.cos(alpha) * math.sin(phi),
    )


def input_bloch(geom: EnsembleGeometry, label: InputLabel) -> BlochVector:
    if (label.b_wm is not None) != geom.is_mixed:
        raise ValueError(
            f"label {label} does not match a {geom.mode} ensemble "
            "(b_wm must be given exactly for mixed ensembles)")
    x = geom.d0 + (label.b_wm * geom.d_wm if geom.is_mixed else 0.0)
    return BlochVector(x, label.b_wp * geom.d_wp, label.b_ww * geom.d_ww)


def trace_distance(r1: BlochVector, r2: BlochVector) -> float:
    """Trace distance of two qubit states: half their Bloch separation."""
    return 0.5 * math.dist((r1.x, r1.y, r1.z), (r2.x, r2.y, r2.z))
