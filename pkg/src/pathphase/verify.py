"""Aggregated verification run behind ``pathphase verify``.

Each check returns a dict with at least ``name``, ``passed`` and the measured
worst case, so the JSON report can be read without the source.
"""
from __future__ import annotations

import math
import time

import numpy as np

from .bloch import EnsembleGeometry
from .discrimination import (closed_form_probabilities, frontier_lhs, guess_probabilities,
                             joint_distribution)
from .information import binary_entropy, indicator_distribution, info_report, mutual_information
from .oracle import maximize_joint_correct, monte_carlo_game, pareto_sweep
from .povm import (Povm, PovmError, optimal_family, two_detector_scheme, validate_povm,
                   ww_detector_scheme)

EXACT = 1e-12
FRONTIER_TOL = 1e-9
PARETO_SLACK = 1e-3
MC_SIGMA = 4.0


def _check(name: str, passed: bool, **details) -> dict:
    return {"name": name, "passed": bool(passed), **details}


def family_grid(n: int = 21):
    for m in np.linspace(0, 1, n):
        for z0 in np.linspace(0, 1, n):
            yield float(m), float(z0)


def check_frontier_equality(geom: EnsembleGeometry, grid: int = 21) -> dict:
    t = time.perf_counter()
    dev = max(abs(frontier_lhs(guess_probabilities(joint_distribution(geom, optimal_family(m, z))),
                               geom) - 1)
              for m, z in family_grid(grid))
    return _check("frontier_equality", dev <= EXACT, max_dev=dev, seconds=time.perf_counter() - t)


def check_sweep(name: str, geom: EnsembleGeometry, samples: int, seed: int) -> tuple[dict, object]:
    t = time.perf_counter()
    rep = pareto_sweep(geom, samples, seed)
    passed = rep.ok and rep.max_lhs <= 1 + FRONTIER_TOL
    return _check(name, passed, violations=rep.violations, max_lhs=rep.max_lhs,
                  invalid_samples=rep.invalid_samples, n_samples=samples,
                  seconds=time.perf_counter() - t), rep


def check_decomposition_schemes(geom: EnsembleGeometry, mixed_geom: EnsembleGeometry) -> dict:
    worst = 0.0
    for E in np.linspace(0, 1, 11):
        worst = max(worst, abs(info_report(geom, ww_detector_scheme(float(E))).residual))
    indicator_sum = 0.0
    for E1 in np.linspace(0, 1, 5):
        for E2 in np.linspace(0, 1, 5):
            rep = info_report(mixed_geom, two_detector_scheme(float(E1), float(E2)))
            worst = max(worst, abs(rep.residual))
            if rep.indicator_cross is None:
                indicator_sum = math.inf
            else:
                indicator_sum = max(indicator_sum, abs(rep.I_in_out - rep.I_ww - rep.I_wp - rep.I_wm
                                     - rep.indicator_cross))
    return _check("decomposition_schemes", worst <= EXACT and indicator_sum <= EXACT,
                  max_residual=worst, max_indicator_gap=indicator_sum, mixed_d_wm=mixed_geom.d_wm)


def check_binary_forms(geom: EnsembleGeometry, grid: int = 21) -> dict:
    gap = flat = 0.0
    for m, z in family_grid(grid):
        jd = joint_distribution(geom, optimal_family(m, z))
        gp = guess_probabilities(jd)
        gap = max(gap, abs(mutual_information(jd, "ww") - (1 - binary_entropy(gp.P_WW))))
        ind = indicator_distribution(jd, "ww")
        cond = ind[1] / ind.sum(axis=0)
        flat = max(flat, float(cond.max() - cond.min()))
    return _check("binary_forms_optimal_family", gap <= EXACT and flat <= EXACT,
                  max_gap=gap, max_conditional_spread=flat)


def check_schemes(geom: EnsembleGeometry, mixed_geom: EnsembleGeometry) -> dict:
    worst = 0.0
    for E in np.linspace(0, 1, 11) if geom.d_ww > 0 else ():
        gp = guess_probabilities(joint_distribution(geom, ww_detector_scheme(float(E))))
        worst = max(worst, abs((2 * gp.P_WW - 1) / geom.d_ww - E))
    for E1 in np.linspace(0, 1, 5):
        for E2 in np.linspace(0, 1, 5):
            gp = guess_probabilities(joint_distribution(mixed_geom, two_detector_scheme(E1, E2)))
            want = (E1, math.sqrt(1 - E1**2) * E2, math.sqrt((1 - E1**2) * (1 - E2**2)))
            gaps = [abs((2 * q - 1) / d - w)
                    for q, d, w in zip(gp.as_tuple(), mixed_geom.distances, want) if d > 0]
            worst = max(worst, *gaps,
                        abs(frontier_lhs(gp, mixed_geom) - 1))
    return _check("scheme_formulas", worst <= EXACT, max_dev=worst)


def check_monte_carlo(geom: EnsembleGeometry, p: Povm, rounds: int, seeds: int, seed: int) -> dict:
    t = time.perf_counter()
    excursions: dict[str, int] = {}
    worst = 0.0
    for s in range(seeds):
        res = monte_carlo_game(geom, p, rounds, seed + s)
        for name, sig in res.sigmas().items():
            worst = max(worst, sig)
            excursions[name] = excursions.get(name, 0) + int(sig > MC_SIGMA)
    return _check("monte_carlo", all(v <= 1 for v in excursions.values()),
                  excursions=excursions, max_sigma=worst, rounds=rounds, seeds=seeds,
                  seconds=time.perf_counter() - t)


def check_povm_fixture(geom: EnsembleGeometry, p: Povm) -> dict:
    try:
        validate_povm(p)
    except PovmError as exc:
        return _check("povm_fixture", False, error=str(exc), constraint=exc.constraint,
                      index=exc.index)
    gp = guess_probabilities(joint_distribution(geom, p))
    cf = closed_form_probabilities(geom, p)
    lhs = frontier_lhs(gp, geom)
    rep = info_report(geom, p)
    gap = max(abs(a - b) for a, b in zip(gp.as_tuple(), cf.as_tuple()))
    passed = (lhs <= 1 + FRONTIER_TOL and gap <= EXACT and abs(rep.residual) <= EXACT
              and rep.I_in_out <= rep.holevo + EXACT)
    return _check("povm_fixture", passed, lhs=lhs, closed_gap=gap, residual=rep.residual)


def run_all(geom: EnsembleGeometry, mixed_geom: EnsembleGeometry, *, samples: int = 100_000,
            rounds: int = 1_000_000, mc_seeds: int = 20, seed: int = 0,
            fixture: Povm | None = None) -> dict:
    """Run every check and return ``{"passed": bool, "checks": [...]}``."""
    checks = [check_frontier_equality(geom)]
    pure, rep = check_sweep("frontier_sweep_pure", geom, samples, seed)
    mixed, rep_m = check_sweep("frontier_sweep_mixed", mixed_geom, samples, seed + 1)
    checks += [pure, mixed]
    closed = max(rep.closed_gap, rep.refined_gap, rep_m.closed_gap, rep_m.refined_gap)
    checks.append(_check("closed_form_agreement", closed <= EXACT, max_gap=closed,
                         merge_gap=max(rep.merge_gap, rep_m.merge_gap)))

    best, pc = maximize_joint_correct(geom, min(samples, 10_000), seed)
    best_lhs = frontier_lhs(guess_probabilities(joint_distribution(geom, best)), geom)
    checks.append(_check("pc_identity", rep.pc_gap <= EXACT and best_lhs >= 1 - PARETO_SLACK,
                         max_gap=rep.pc_gap, best_pc=pc, best_lhs=best_lhs))

    resid = max(rep.max_residual, rep_m.max_residual)
    checks.append(_check("decomposition_sweep", resid <= EXACT and min(rep.min_info, rep_m.min_info) >= -EXACT,
                         max_residual=resid))
    centred = EnsembleGeometry.mixed(geom.d_ww, geom.d_wp,
                                     math.sqrt(max(0.0, 1 - geom.d_ww**2 - geom.d_wp**2)))
    checks.append(check_decomposition_schemes(geom, centred))
    checks.append(check_binary_forms(geom))
    checks.append(check_schemes(geom, mixed_geom))
    checks.append(_check("holevo_dominance", rep.holevo_excess <= EXACT,
                         holevo=rep.holevo, max_excess=rep.holevo_excess))
    checks.append(check_monte_carlo(geom, optimal_family(0.5, 0.6), rounds, mc_seeds, seed))
    if fixture is not None:
        checks.append(check_povm_fixture(geom, fixture))
    return {"passed": all(c["passed"] for c in checks), "checks": checks}
