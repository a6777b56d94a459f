"""Command-line front end: plot data as CSV, verification and simulation as JSON.

Exit codes: 0 success, 1 a verification check failed, 2 usage or I/O error.
The default seed comes from ``$PATHPHASE_SEED`` (0 when unset).
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import os
import sys

import numpy as np

from . import verify
from .bloch import EnsembleGeometry, GeometryError, geometry_from_angles, validate_geometry
from .discrimination import (closed_form_success, frontier_value, guess_probabilities,
                             joint_distribution)
from .information import holevo_gap_row, info_report
from .oracle import monte_carlo_game
from .povm import (Povm, PovmError, optimal_family, two_detector_scheme, validate_povm,
                   vn_scheme, ww_detector_scheme)

SEED_ENV = "PATHPHASE_SEED"


class UsageError(Exception):
    pass


def _num(x: float) -> str:
    return repr(float(x))


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"${SEED_ENV} must be an integer, got {raw!r}") from None


def _geometry(args, *, allow_mixed: bool = True) -> EnsembleGeometry:
    if args.alpha is not None or args.phi is not None:
        if args.alpha is None or args.phi is None:
            raise UsageError("--alpha and --phi go together")
        if args.dwm is not None:
            raise UsageError("angles describe pure ensembles; drop --dwm")
        return geometry_from_angles(args.alpha, args.phi)
    if args.dwm is not None:
        if not allow_mixed:
            raise UsageError(f"'{args.command}' needs a pure ensemble; drop --dwm")
        return EnsembleGeometry.mixed(args.dww, args.dwp, args.dwm)
    return EnsembleGeometry.pure(args.dww, args.dwp)


def _frontier_axes(args) -> EnsembleGeometry:
    """Geometry for the frontier only, which needs nothing but the three semi-axes.

    Unrealizable mixed ensembles are accepted with a warning.
    """
    if args.dwm is None:
        return _geometry(args)
    try:
        return EnsembleGeometry.mixed(args.dww, args.dwp, args.dwm)
    except GeometryError as exc:
        for name in ("dww", "dwp", "dwm"):
            v = getattr(args, name)
            if not 0 <= v <= 1:
                raise UsageError(f"--{name} = {v!r} not in [0, 1]") from None
        print(f"warning: no valid 8-state ensemble for these distances ({exc}); "
              "emitting the ellipsoid from the semi-axes alone", file=sys.stderr)
        d0 = math.sqrt(max(0.0, 1 - args.dww**2 - args.dwp**2)) - args.dwm
        return EnsembleGeometry(d0, args.dww, args.dwp, args.dwm, "mixed")


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _load_povm(path: str) -> Povm:
    try:
        with open(path) as fh:
            return Povm.from_json(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not JSON ({exc})") from None


def _unit_grid(n: int) -> np.ndarray:
    if n < 2:
        raise UsageError("--grid must be at least 2")
    return np.linspace(0, 1, n)


def cmd_frontier(args) -> int:
    geom = _frontier_axes(args)
    realizable = True
    try:
        validate_geometry(geom)
    except GeometryError:
        realizable = False
    zero = [d == 0 for d in geom.distances]
    rows = []
    if geom.is_mixed:
        for E1 in _unit_grid(args.grid):
            for E2 in _unit_grid(args.grid):
                rows.append(two_detector_scheme(float(E1), float(E2)))
        mu_col = [0.25] * len(rows)
    else:
        for z0 in _unit_grid(args.grid):
            rows.append(optimal_family(args.mu, float(z0)))
        mu_col = [args.mu] * len(rows)
    header = ["mu", "z0", "y0", "P_ww", "P_wp"] + (["P_wm"] if geom.is_mixed else []) + ["lhs"]
    with _output(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for mu, p in zip(mu_col, rows):
            comps = np.abs(p.R).max(axis=0)  # (x0, y0, z0)
            axis_comp = [comps[2], comps[1], comps[0]][:geom.n_bits]
            # a measurement spending anything on a zero-distance axis is dominated
            if any(z and c > 0 for z, c in zip(zero, axis_comp)):
                continue
            if realizable:
                success = guess_probabilities(joint_distribution(geom, p)).as_tuple()
            else:
                success = tuple(closed_form_success(geom, p.mu, p.R))
            lhs = frontier_value(success, geom.distances)
            w.writerow([_num(mu), _num(comps[2]), _num(comps[1])]
                       + [_num(s) for s in success] + [_num(lhs)])
    return 0


def cmd_tradeoff(args) -> int:
    geom = _geometry(args, allow_mixed=False)
    with _output(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["E", "I_ww", "I_wp", "I_cross", "I_in_out", "holevo"])
        for E in _unit_grid(args.grid):
            rep = info_report(geom, ww_detector_scheme(float(E)))
            w.writerow([_num(v) for v in (E, rep.I_ww, rep.I_wp, rep.I_cross, rep.I_in_out,
                                          rep.holevo)])
    return 0


def cmd_holevo_gap(args) -> int:
    geom = _geometry(args, allow_mixed=False)
    with _output(args.output) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["z0", "I_ww", "I_wp_max_exact", "I_wp_bound"])
        for z0 in _unit_grid(args.grid):
            w.writerow([_num(v) for v in (z0, *holevo_gap_row(geom, float(z0)))])
    return 0


def _scheme(args, geom: EnsembleGeometry) -> Povm:
    if args.povm is not None:
        return _load_povm(args.povm)
    s = args.scheme
    if s is None:
        raise UsageError("give --scheme or --povm")
    if s == "ww":
        return ww_detector_scheme(args.E)
    if s == "vn":
        return vn_scheme(args.Tout, args.orientation)
    if s == "family":
        return optimal_family(args.mu, args.z0)
    if not geom.is_mixed:
        raise UsageError("the two-detector scheme needs a mixed ensemble (--dwm)")
    return two_detector_scheme(args.E1, args.E2)


def cmd_simulate(args) -> int:
    if args.rounds < 1:
        raise UsageError("--rounds must be positive")
    geom = _geometry(args)
    p = _scheme(args, geom)
    try:
        validate_povm(p)
    except PovmError as exc:
        raise UsageError(f"invalid POVM: {exc}") from None
    seed = _default_seed() if args.seed is None else args.seed
    res = monte_carlo_game(geom, p, args.rounds, seed, workers=args.workers)
    with _output(args.output) as fh:
        fh.write(res.to_json() + "\n")
    return 0


def cmd_verify(args) -> int:
    geom = _geometry(args, allow_mixed=False)
    mixed = EnsembleGeometry.mixed(geom.d_ww, geom.d_wp, args.dwm_check)
    fixture = _load_povm(args.povm) if args.povm else None
    seed = _default_seed() if args.seed is None else args.seed
    report = verify.run_all(geom, mixed, samples=args.samples, rounds=args.rounds,
                            mc_seeds=args.mc_seeds, seed=seed, fixture=fixture)
    with _output(args.output) as fh:
        fh.write(json.dumps(report, indent=2, sort_keys=True, default=float) + "\n")
    for c in report["checks"]:
        if not c["passed"]:
            print(f"FAILED: {c['name']}", file=sys.stderr)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathphase",
        description="Path-phase guessing complementarity: plot data and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_geometry(p, dwm=True):
        g = p.add_argument_group("ensemble")
        g.add_argument("--dww", type=float, default=0.65, help="which-way distance (default .65)")
        g.add_argument("--dwp", type=float, default=0.6, help="which-phase distance (default .6)")
        if dwm:
            g.add_argument("--dwm", type=float, default=None,
                           help="mixing distance; switches to the 8-state ensemble")
        else:
            p.set_defaults(dwm=None)
        g.add_argument("--alpha", type=float, default=None, help="preparation angle (rad)")
        g.add_argument("--phi", type=float, default=None, help="phase angle (rad)")
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    p = sub.add_parser("frontier", help="optimal-family points on the ellipse/ellipsoid (CSV)")
    add_geometry(p)
    p.add_argument("--grid", type=int, default=51)
    p.add_argument("--mu", type=float, default=0.5, help="same-sign corner weight (pure mode)")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("tradeoff", help="information decomposition vs. detector efficiency (CSV)")
    add_geometry(p)
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("holevo-gap", help="exact information frontier vs. Holevo bound (CSV)")
    add_geometry(p)
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=cmd_holevo_gap)

    p = sub.add_parser("simulate", help="Monte Carlo guessing game (JSON)")
    add_geometry(p)
    p.add_argument("--scheme", choices=["ww", "vn", "family", "two"], default=None)
    p.add_argument("--povm", default=None, help="POVM JSON file instead of a scheme")
    p.add_argument("--E", type=float, default=0.6, help="WW detector efficiency")
    p.add_argument("--E1", type=float, default=0.6)
    p.add_argument("--E2", type=float, default=0.5)
    p.add_argument("--Tout", type=float, default=0.8, help="output BS transmissivity")
    p.add_argument("--orientation", type=int, choices=[1, -1], default=1)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--z0", type=float, default=0.6)
    p.add_argument("--rounds", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run every oracle check (JSON); exit 1 on failure")
    add_geometry(p, dwm=False)
    p.add_argument("--dwm-check", type=float, default=0.3,
                   help="mixing distance for the ellipsoid sweep (default .3)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--rounds", type=int, default=1_000_000)
    p.add_argument("--mc-seeds", type=int, default=20)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--povm", default=None, help="extra POVM fixture to validate and check")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GeometryError, PovmError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
