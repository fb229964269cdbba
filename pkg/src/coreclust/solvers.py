"""Clustering solvers: exact brute force, swap local search, and the
bicriteria-project pipeline; all double as oracles for the coreset tests.

Candidate center spaces are always finite and explicit (the data, a
bicriteria output, or coreset points).  Every returned result re-computes its
cost from scratch; a mismatch with the solver's bookkeeping is a hard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .geometry import (
    InputError,
    Metric,
    check_power,
    coerce_weighted,
    pairwise_dist,
)
from .sampling import rng_for
from .bicriteria import metric_kmedian_bicriteria
from .construction import StaticCoreset, k_median_coreset

BRUTE_GUARD = 10 ** 6

# pipeline solvers switch from exact enumeration to local search above this
# combination count; exhaustive search stays available up to BRUTE_GUARD
PIPELINE_BRUTE_LIMIT = 20_000


@dataclass
class SolveResult:
    centers: np.ndarray
    cost: float
    method: str
    evaluations: int

    def to_dict(self) -> dict:
        centers = self.centers.tolist()
        return {"centers": centers, "cost": self.cost, "method": self.method,
                "evaluations": self.evaluations}


def _cost_at(metric: Metric, points, weights, centers, z: float) -> float:
    d = pairwise_dist(metric, points, centers).min(axis=1)
    return float(weights @ (d ** z))


def _finalize(metric, points, weights, centers, z, method, evals,
              booked_cost) -> SolveResult:
    actual = _cost_at(metric, points, weights, centers, z)
    if abs(actual - booked_cost) > 1e-9 * max(1.0, abs(actual)):
        raise RuntimeError(
            f"solver bookkeeping drifted: booked {booked_cost}, actual {actual}")
    return SolveResult(centers=centers, cost=actual, method=method,
                       evaluations=evals)


def brute_force_k_median(data, k: int, candidates, z: float = 1.0,
                         guard: int = BRUTE_GUARD) -> SolveResult:
    """Exact optimum over all k-subsets of the candidate list.

    Ties go to the earliest combination in index order.  Refuses when the
    number of combinations exceeds the guard.
    """
    z = check_power(z)
    points, weights, metric = coerce_weighted(data)
    cand = np.asarray(candidates)
    m = len(np.atleast_2d(cand)) if metric.is_euclidean else len(np.atleast_1d(cand))
    if k < 1 or k > m:
        raise InputError(f"need 1 <= k <= {m} candidates, got k={k}")
    n_combos = math.comb(m, k)
    if n_combos > guard:
        raise InputError(
            f"brute force refused: C({m}, {k}) = {n_combos} exceeds guard {guard}")
    D = pairwise_dist(metric, points, cand) ** z
    best_cost, best_combo = math.inf, None
    batch, combos = [], combinations(range(m), k)
    evals = 0
    while True:
        batch = [c for _, c in zip(range(20000), combos)]
        if not batch:
            break
        ixs = np.asarray(batch)                      # (b, k)
        costs = weights @ D[:, ixs].min(axis=2)      # (b,)
        evals += len(batch)
        j = int(costs.argmin())
        if costs[j] < best_cost:
            best_cost, best_combo = float(costs[j]), batch[j]
    centers = cand[list(best_combo)]
    return _finalize(metric, points, weights, centers, z, "brute", evals,
                     best_cost)


def weighted_local_search(data, k: int, candidates, z: float = 1.0,
                          seed: int = 0, max_iters: int = 200,
                          init=None) -> SolveResult:
    """Single-swap local search on the weighted powered cost.

    Swap slots and replacement candidates are scanned in a seeded random
    order; the first improving swap is accepted.  The cost strictly decreases
    at every accepted swap and the search stops at a local optimum or after
    max_iters sweeps.
    """
    z = check_power(z)
    points, weights, metric = coerce_weighted(data)
    cand = np.asarray(candidates)
    m = len(np.atleast_2d(cand)) if metric.is_euclidean else len(np.atleast_1d(cand))
    if m == 0:
        raise InputError("candidate list must be nonempty")
    k = min(k, m)
    rng = rng_for(seed, 6)
    D = pairwise_dist(metric, points, cand) ** z

    if init is None:
        chosen = list(rng.choice(m, size=k, replace=False))
    else:
        chosen = list(np.asarray(init, dtype=int))
        if len(chosen) != k:
            raise InputError("init must list exactly k candidate indices")
    cur_cost = float(weights @ D[:, chosen].min(axis=1))
    evals = len(chosen)

    for _ in range(max_iters):
        improved = False
        for slot in rng.permutation(k):
            rest = [c for i, c in enumerate(chosen) if i != slot]
            base = D[:, rest].min(axis=1) if rest else np.full(len(points), np.inf)
            trial = np.minimum(base[:, None], D)     # (n, m)
            costs = weights @ trial
            evals += m
            order = rng.permutation(m)
            better = order[costs[order] < cur_cost * (1 - 1e-12) - 1e-15]
            if better.size:
                chosen[slot] = int(better[0])
                cur_cost = float(costs[better[0]])
                improved = True
                break
        if not improved:
            break

    centers = cand[chosen]
    return _finalize(metric, points, weights, centers, z, "local_search",
                     evals, cur_cost)


def constant_factor_metric_kmedian(P, k: int, eps: float, delta: float,
                                   seed: int, c: float = 1.0,
                                   beta: int | None = None) -> SolveResult:
    """Constant-factor k centers: bicriteria, project, solve on the anchors.

    The projection of the data onto the bicriteria centers has at most |B|
    distinct weighted points; the weighted k-median on those (brute force when
    feasible, local search otherwise) is returned and re-costed on the full
    input.
    """
    points, weights, metric = coerce_weighted(P)
    bic = metric_kmedian_bicriteria((points, weights, metric), k, eps, delta,
                                    seed, z=1.0, c=c, beta=beta)
    idx = pairwise_dist(metric, points, bic.B).argmin(axis=1)
    masses = np.bincount(idx, weights=weights, minlength=len(bic.B))
    used = np.flatnonzero(masses > 0)
    proj_pts, proj_w = bic.B[used], masses[used]

    m_used = len(used)
    k_eff = min(k, m_used)
    if math.comb(m_used, k_eff) <= PIPELINE_BRUTE_LIMIT:
        inner = brute_force_k_median((proj_pts, proj_w, metric), k_eff,
                                     candidates=proj_pts)
    else:
        inner = weighted_local_search((proj_pts, proj_w, metric), k_eff,
                                      candidates=proj_pts, seed=seed)
    cost = _cost_at(metric, points, weights, inner.centers, 1.0)
    return SolveResult(centers=inner.centers, cost=cost,
                       method="bicriteria_project",
                       evaluations=inner.evaluations)


def strong_coreset_sample_size(n: int, k: int, eps: float, delta: float,
                               metric: Metric, dim: int | None = None,
                               c: float = 1.0) -> int:
    """Sample size for the static strong coreset.

    Metric spaces pay k log n for the candidate-space dimension; Euclidean
    inputs pay k min(d, 1 + log k) instead.
    """
    if metric.is_euclidean and dim is not None:
        complexity = k * min(dim, 1.0 + math.log(max(k, 2)))
    else:
        complexity = k * math.log(max(n, 2))
    t = (c / eps ** 2) * (complexity + math.log(1.0 / delta))
    return int(math.ceil(t))


def solve_on_coreset(P, k: int, eps: float, seed: int, delta: float = 0.1,
                     c: float = 1.0, z: float = 1.0,
                     t: int | None = None):
    """Build a static coreset, solve on it, re-audit on the full input.

    Returns (SolveResult, audit) where the audit carries both the coreset
    cost and the true cost at the returned centers plus the build parameters.
    """
    z = check_power(z)
    points, weights, metric = coerce_weighted(P)
    anchors = constant_factor_metric_kmedian((points, weights, metric), k,
                                             eps, delta, seed, c=c)
    n = int(round(weights.sum()))
    if t is None:
        dim = points.shape[1] if metric.is_euclidean else None
        t = strong_coreset_sample_size(n, k, eps, delta, metric, dim=dim, c=c)
    core = k_median_coreset((points, weights, metric), anchors.centers, t,
                            eps, z=z, seed=seed)

    uniq = (np.unique(core.points, axis=0) if metric.is_euclidean
            else np.unique(core.points))
    k_eff = min(k, len(uniq))
    if math.comb(len(uniq), k_eff) <= PIPELINE_BRUTE_LIMIT:
        inner = brute_force_k_median(core, k_eff, candidates=uniq, z=z)
    else:
        inner = weighted_local_search(core, k_eff, candidates=uniq, z=z,
                                      seed=seed)
    true_cost = _cost_at(metric, points, weights, inner.centers, z)
    audit = {
        "coreset_cost": core.cost(inner.centers),
        "true_cost": true_cost,
        "t": t,
        "coreset_size": len(core),
        "coreset_weight_sum": core.total_weight,
        "anchor_cost": anchors.cost,
    }
    result = SolveResult(centers=inner.centers, cost=true_cost,
                         method="coreset", evaluations=inner.evaluations)
    return result, audit
