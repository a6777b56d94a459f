"""Independent checks: random-POVM sweeps, joint-success search, Monte Carlo game.

Every stochastic routine is reproducible from an integer seed.  Work is cut
into shards whose generators are seeded from ``(seed, shard index)``, and
shard results are reduced in index order, so the answer does not depend on
how many worker threads ran them.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .bloch import EnsembleGeometry
from .discrimination import (GuessProbabilities, bit_success,
                             closed_form_success, frontier_value, guess_probabilities,
                             joint_distribution, joint_table, label_success, ml_guesses)
from .information import decomposition_terms, holevo_bound
from .povm import Povm, bloch_to_operators, canonical, operators_to_bloch, optimal_family

MIN_OUTCOMES, MAX_OUTCOMES = 2, 8
HIST_EDGES = np.round(np.arange(0, 1.05 + 1e-9, 0.01), 2)
SHARD_SIZE = 10_000
MAX_RETRIES = 100


def shard_rng(seed: int, shard: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(shard)]))


def _random_ball(rng: np.random.Generator, shape) -> np.ndarray:
    v = rng.standard_normal(tuple(shape) + (3,))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    radius = rng.random(tuple(shape)) ** (1 / 3)
    return v * radius[..., None]


def random_povm_batch(rng: np.random.Generator, n_outcomes: int, size: int,
                      cond_limit: float = 1e10) -> tuple[np.ndarray, np.ndarray]:
    """``size`` random POVMs with ``n_outcomes`` elements: weights ``(size, n)``, directions ``(size, n, 3)``.

    Random positive operators ``w (1 + r.sigma)/2`` are squeezed by
    ``S^{-1/2} A S^{-1/2}`` with ``S`` their sum, which makes them resolve
    the identity.  Draws with an ill-conditioned ``S`` are redrawn.
    """
    if n_outcomes < 2:
        raise ValueError(f"need at least 2 outcomes, got {n_outcomes}")
    mu_out = np.empty((size, n_outcomes))
    R_out = np.empty((size, n_outcomes, 3))
    todo = np.arange(size)
    for _ in range(MAX_RETRIES):
        m = todo.size
        w = 1.0 - rng.random((m, n_outcomes))  # (0, 1]
        ops = bloch_to_operators(w, _random_ball(rng, (m, n_outcomes)))
        vals, vecs = np.linalg.eigh(ops.sum(axis=1))
        ok = vals[:, 0] > vals[:, 1] / cond_limit
        inv_sqrt = np.einsum("bij,bj,bkj->bik", vecs, 1 / np.sqrt(np.abs(vals)), vecs.conj())
        squeezed = inv_sqrt[:, None] @ ops @ inv_sqrt[:, None]
        mu, R = operators_to_bloch(squeezed)
        mu_out[todo[ok]] = mu[ok]
        R_out[todo[ok]] = R[ok]
        todo = todo[~ok]
        if todo.size == 0:
            return mu_out, R_out
    raise RuntimeError("could not draw a well-conditioned POVM")


def random_povm(rng: np.random.Generator, n_outcomes: int) -> Povm:
    mu, R = random_povm_batch(rng, n_outcomes, 1)
    return canonical(Povm(mu[0], R[0]))


def refine_batch(mu: np.ndarray, R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Refinement with a fixed ``2n`` layout: element ``j`` becomes slots ``2j`` (+) and ``2j+1`` (-).

    Sphere elements put all weight on the + slot; the empty slot has weight 0.
    """
    norm = np.linalg.norm(R, axis=-1)
    on_sphere = norm >= 1 - 1e-15
    axis = np.where(norm[..., None] > 0, R / np.where(norm > 0, norm, 1)[..., None],
                    np.array([0.0, 0.0, 1.0]))
    norm = np.where(on_sphere, 1.0, norm)
    w_plus = mu * (1 + norm) / 2
    w_minus = mu * (1 - norm) / 2
    mu2 = np.stack([w_plus, w_minus], axis=-1).reshape(mu.shape[:-1] + (-1,))
    R2 = np.stack([axis, -axis], axis=-2).reshape(R.shape[:-2] + (-1, 3))
    return mu2, R2


def evaluate_batch(geom: EnsembleGeometry, mu: np.ndarray, R: np.ndarray) -> dict[str, np.ndarray]:
    """Every checked quantity for a batch of POVMs, along both routes."""
    k = geom.n_bits
    table = joint_table(geom, mu, R)
    success = bit_success(table, k)
    closed = closed_form_success(geom, mu, R)
    mu2, R2 = refine_batch(mu, R)
    table2 = joint_table(geom, mu2, R2)
    merged = table2.reshape(table2.shape[:-1] + (-1, 2)).sum(axis=-1)
    pc = label_success(table, k)
    terms = decomposition_terms(table, k)
    return {
        "lhs": frontier_value(success, geom.distances),
        "success": success,
        "pc": pc,
        "closed_gap": np.abs(success - closed).max(axis=-1),
        "refined_gap": np.abs(bit_success(table2, k) - closed_form_success(geom, mu2, R2)).max(axis=-1),
        "merge_gap": np.abs(merged - table).reshape(len(mu), -1).max(axis=-1),
        "pc_gap": np.abs(pc - (1 + 2 * (success - 0.5).sum(axis=-1)) / geom.n_inputs),
        "residual": np.abs(terms["residual"]),
        "in_out": terms["in_out"],
        "min_info": np.minimum(terms["bits"].min(axis=-1),
                               np.minimum(terms["cross"], terms["in_out"])),
        "sum_gap": np.abs(mu.sum(axis=-1) - 2),
        "centroid_gap": np.abs(np.einsum("bn,bnk->bk", mu, R)).max(axis=-1),
        "max_norm": np.linalg.norm(R, axis=-1).max(axis=-1),
    }


@dataclass
class SweepReport:
    """Outcome of a random-POVM sweep against the frontier.

    ``hist_counts`` bins the frontier values over ``[0, 1.05]`` at width
    0.01; values past the last edge go to ``hist_overflow``.  The ``*_gap``
    and ``max_*`` fields are worst cases over every sampled POVM.
    """

    n_samples: int
    tol: float
    max_lhs: float
    argmax_povm: Povm
    violations: int
    hist_counts: np.ndarray
    hist_overflow: int
    max_pc: float
    argmax_pc_povm: Povm
    closed_gap: float
    refined_gap: float
    merge_gap: float
    pc_gap: float
    max_residual: float
    holevo: float
    holevo_excess: float
    min_info: float
    invalid_samples: int
    controls_max_dev: float
    outcome_counts: dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.invalid_samples == 0

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "tol": self.tol,
            "max_lhs": self.max_lhs,
            "argmax_povm": self.argmax_povm.to_dict(),
            "violations": self.violations,
            "histogram": {"edges": HIST_EDGES.tolist(),
                          "counts": [int(c) for c in self.hist_counts],
                          "overflow": self.hist_overflow},
            "max_pc": self.max_pc,
            "argmax_pc_povm": self.argmax_pc_povm.to_dict(),
            "closed_gap": self.closed_gap,
            "refined_gap": self.refined_gap,
            "merge_gap": self.merge_gap,
            "pc_gap": self.pc_gap,
            "max_residual": self.max_residual,
            "holevo": self.holevo,
            "holevo_excess": self.holevo_excess,
            "min_info": self.min_info,
            "invalid_samples": self.invalid_samples,
            "controls_max_dev": self.controls_max_dev,
            "outcome_counts": {str(k): v for k, v in sorted(self.outcome_counts.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _sweep_shard(geom: EnsembleGeometry, seed: int, shard: int, n: int, tol: float) -> dict:
    rng = shard_rng(seed, shard)
    counts = rng.integers(MIN_OUTCOMES, MAX_OUTCOMES + 1, size=n)
    acc = {"lhs": [], "best": (-1.0, None), "best_pc": (-1.0, None), "outcomes": {},
           "hist": np.zeros(len(HIST_EDGES) - 1, dtype=int), "overflow": 0}
    worst = dict.fromkeys(["closed_gap", "refined_gap", "merge_gap", "pc_gap", "residual",
                           "holevo_excess"], 0.0)
    worst["min_info"] = math.inf
    worst["invalid"] = 0
    worst["violations"] = 0
    hol = holevo_bound(geom)
    for n_out in range(MIN_OUTCOMES, MAX_OUTCOMES + 1):
        size = int((counts == n_out).sum())
        acc["outcomes"][n_out] = size
        if size == 0:
            continue
        mu, R = random_povm_batch(rng, n_out, size)
        ev = evaluate_batch(geom, mu, R)
        lhs = ev["lhs"]
        worst["violations"] += int((lhs > 1 + tol).sum())
        worst["invalid"] += int(((ev["sum_gap"] > tol) | (ev["centroid_gap"] > tol)
                                 | (ev["max_norm"] > 1 + tol) | (mu.min(axis=-1) < -tol)).sum())
        h, _ = np.histogram(lhs, bins=HIST_EDGES)
        acc["hist"] += h
        acc["overflow"] += int((lhs > HIST_EDGES[-1]).sum())
        i = int(lhs.argmax())
        if lhs[i] > acc["best"][0]:
            acc["best"] = (float(lhs[i]), Povm(mu[i], R[i]))
        i = int(ev["pc"].argmax())
        if ev["pc"][i] > acc["best_pc"][0]:
            acc["best_pc"] = (float(ev["pc"][i]), Povm(mu[i], R[i]))
        for key in ("closed_gap", "refined_gap", "merge_gap", "pc_gap"):
            worst[key] = max(worst[key], float(ev[key].max()))
        worst["residual"] = max(worst["residual"], float(ev["residual"].max()))
        worst["holevo_excess"] = max(worst["holevo_excess"], float((ev["in_out"] - hol).max()))
        worst["min_info"] = min(worst["min_info"], float(ev["min_info"].min()))
    acc["worst"] = worst
    return acc


def _map_shards(fn, args, workers: int):
    if workers <= 1:
        return [fn(*a) for a in args]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda a: fn(*a), args))


def _shard_sizes(n: int, shard_size: int) -> list[int]:
    full, rest = divmod(n, shard_size)
    return [shard_size] * full + ([rest] if rest else [])


def family_controls(geom: EnsembleGeometry, grid: int = 21) -> float:
    """Largest ``|lhs - 1|`` of the optimal family over a ``grid x grid`` (mu, z0) mesh."""
    dev = 0.0
    for m in np.linspace(0, 1, grid):
        for z0 in np.linspace(0, 1, grid):
            p = optimal_family(float(m), float(z0))
            gp = guess_probabilities(joint_distribution(geom, p))
            dev = max(dev, abs(float(frontier_value(gp.as_tuple(), geom.distances)) - 1))
    return dev


def pareto_sweep(geom: EnsembleGeometry, n_samples: int, seed: int = 0, *,
                 tol: float = 1e-9, workers: int = 1, shard_size: int = SHARD_SIZE,
                 control_grid: int = 21) -> SweepReport:
    """Draw ``n_samples`` random POVMs (2 to 8 outcomes) and test the frontier on each."""
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    sizes = _shard_sizes(n_samples, shard_size)
    shards = _map_shards(_sweep_shard, [(geom, seed, s, n, tol) for s, n in enumerate(sizes)], workers)

    best = max((s["best"] for s in shards), key=lambda t: t[0])
    best_pc = max((s["best_pc"] for s in shards), key=lambda t: t[0])
    worst = {k: [s["worst"][k] for s in shards] for k in shards[0]["worst"]}
    outcomes: dict[int, int] = {}
    for s in shards:
        for k, v in s["outcomes"].items():
            outcomes[k] = outcomes.get(k, 0) + v
    return SweepReport(
        n_samples=n_samples,
        tol=tol,
        max_lhs=best[0],
        argmax_povm=best[1],
        violations=sum(worst["violations"]),
        hist_counts=sum(s["hist"] for s in shards),
        hist_overflow=sum(s["overflow"] for s in shards),
        max_pc=best_pc[0],
        argmax_pc_povm=best_pc[1],
        closed_gap=max(worst["closed_gap"]),
        refined_gap=max(worst["refined_gap"]),
        merge_gap=max(worst["merge_gap"]),
        pc_gap=max(worst["pc_gap"]),
        max_residual=max(worst["residual"]),
        holevo=holevo_bound(geom),
        holevo_excess=max(worst["holevo_excess"]),
        min_info=min(worst["min_info"]),
        invalid_samples=sum(worst["invalid"]),
        controls_max_dev=family_controls(geom, control_grid),
        outcome_counts=outcomes,
    )


def maximize_joint_correct(geom: EnsembleGeometry, n_samples: int, seed: int = 0, *,
                           grid: int = 201, workers: int = 1) -> tuple[Povm, float]:
    """Best joint success over a random sweep, then over the optimal family.

    The family pass scans ``z0`` on a grid for several ``mu`` and polishes the
    best grid point with a bounded scalar search.  The value returned is
    always read off the probability table of the returned POVM.
    """
    def pc_of(p: Povm) -> float:
        return float(label_success(joint_table(geom, p.mu, p.R), geom.n_bits))

    best_p, best = None, -1.0
    if n_samples > 0:
        sizes = _shard_sizes(n_samples, SHARD_SIZE)
        for s in _map_shards(_sweep_shard, [(geom, seed, i, n, 1e-9) for i, n in enumerate(sizes)],
                             workers):
            if s["best_pc"][0] > best:
                best, best_p = s["best_pc"]

    mus = np.linspace(0, 1, 11)
    z0s = np.linspace(0, 1, grid)
    top = (-1.0, 0.5, 0.0)
    for m in mus:
        for z0 in z0s:
            v = pc_of(optimal_family(float(m), float(z0)))
            if v > top[0] + 1e-15:
                top = (v, float(m), float(z0))
    _, m_star, z_star = top
    step = 1 / (grid - 1)
    res = minimize_scalar(lambda z: -pc_of(optimal_family(m_star, float(z))),
                          bounds=(max(0.0, z_star - step), min(1.0, z_star + step)),
                          method="bounded", options={"xatol": 1e-12})
    for z in (z_star, float(res.x)):
        cand = optimal_family(m_star, z)
        v = pc_of(cand)
        if v > best:
            best, best_p = v, cand
    return best_p, best


@dataclass
class GameResult:
    """Empirical success rates of the maximum-likelihood guesser.

    ``stderr`` maps each rate to ``sqrt(p (1 - p) / N)``; ``analytic`` holds
    the exact probabilities for comparison.
    """

    n_rounds: int
    P_WW: float
    P_WP: float
    P_WM: float | None
    P_c: float
    stderr: dict[str, float]
    seed: int
    analytic: GuessProbabilities

    def sigmas(self) -> dict[str, float]:
        """Distance from the analytic value in units of the standard error."""
        out = {}
        for name in ("P_WW", "P_WP", "P_WM", "P_c"):
            emp, ana = getattr(self, name), getattr(self.analytic, name)
            if emp is None:
                continue
            se = self.stderr[name]
            out[name] = abs(emp - ana) / se if se > 0 else (0.0 if emp == ana else math.inf)
        return out

    def to_dict(self) -> dict:
        emp = {k: getattr(self, k) for k in ("P_WW", "P_WP", "P_WM", "P_c")
               if getattr(self, k) is not None}
        ana = {k: getattr(self.analytic, k) for k in emp}
        return {"n_rounds": self.n_rounds, "seed": self.seed, "empirical": emp,
                "analytic": ana, "stderr": self.stderr, "sigmas": self.sigmas()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _game_shard(table: np.ndarray, guess_idx: np.ndarray, label_guess: np.ndarray,
                seed: int, shard: int, n: int) -> np.ndarray:
    rng = shard_rng(seed, shard)
    k = table.ndim - 1
    n_in, n_out = 2**k, table.shape[-1]
    cond = table.reshape(n_in, n_out) * n_in
    cum = np.cumsum(cond, axis=1)
    cum[:, -1] = 1.0
    labels = rng.integers(0, n_in, size=n)
    u = rng.random(n)
    outcome = (u[:, None] >= cum[labels]).sum(axis=1)
    outcome = np.minimum(outcome, n_out - 1)
    bits = np.stack(np.unravel_index(labels, (2,) * k))  # (k, n)
    right = bits == guess_idx[:, outcome]
    tallies = np.empty(k + 1, dtype=np.int64)
    tallies[:k] = right.sum(axis=1)
    tallies[k] = int((labels == label_guess[outcome]).sum())
    return tallies


def monte_carlo_game(geom: EnsembleGeometry, p: Povm, n_rounds: int, seed: int = 0, *,
                     workers: int = 1, shard_size: int = 250_000) -> GameResult:
    """Play ``n_rounds`` of the guessing game with the maximum-likelihood rule."""
    if n_rounds < 1:
        raise ValueError("n_rounds must be positive")
    jd = joint_distribution(geom, p)
    k = geom.n_bits
    guess_idx = np.where(ml_guesses(jd) == 1, 0, 1)
    label_guess = jd.table.reshape(-1, jd.n_outcomes).argmax(axis=0)
    sizes = _shard_sizes(n_rounds, shard_size)
    parts = _map_shards(_game_shard,
                        [(jd.table, guess_idx, label_guess, seed, i, n) for i, n in enumerate(sizes)],
                        workers)
    tallies = np.sum(parts, axis=0)
    rates = tallies / n_rounds
    names = ["P_WW", "P_WP", "P_WM"][:k] + ["P_c"]
    stderr = {name: float(math.sqrt(r * (1 - r) / n_rounds)) for name, r in zip(names, rates)}
    return GameResult(
        n_rounds=n_rounds,
        P_WW=float(rates[0]),
        P_WP=float(rates[1]),
        P_WM=float(rates[2]) if k == 3 else None,
        P_c=float(rates[-1]),
        stderr=stderr,
        seed=seed,
        analytic=guess_probabilities(jd),
    )


__all__ = [
    "GameResult", "SweepReport", "evaluate_batch", "family_controls",
    "maximize_joint_correct", "monte_carlo_game", "pareto_sweep", "random_povm",
    "random_povm_batch", "refine_batch", "shard_rng",
]
