"""Bicriteria approximation by robust-median peeling.

The engine repeatedly asks a provider for a robust median Y_i of the residual
set, removes the ceil((1 - 5 eps) * 3/4 * n_i) weight-copies served best by
Y_i, and recurses until fewer than 10/eps copies remain; the residue is
finished exhaustively.  Each round calls the provider i times and keeps the
set with the smallest trimmed cost, so the per-round failure probability
decays geometrically and the overall success probability needs no dependence
on log n.

The public entry points rescale eps to eps/100 internally, so callers see the
clean (1 + eps) * alpha cost bound; the loop guard uses the internal eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import (
    InputError,
    Metric,
    PointSet,
    check_power,
    coerce_weighted,
    pairwise_dist,
    take_smallest,
)
from .sampling import rng_for
from .robust import snap_alpha


@dataclass
class Round:
    """One peeling round: removed mass per point plus the centers used."""

    indices: np.ndarray   # points with positive removed mass
    amounts: np.ndarray   # removed mass, aligned with indices
    centers: np.ndarray


@dataclass
class BicriteriaResult:
    rounds: list[Round]
    B: np.ndarray
    total_cost: float
    beta: int
    alpha: float
    n: float
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_centers(self) -> int:
        return len(self.B)

    def center_bound(self) -> int:
        """beta * ceil(log2 n) cap on the number of centers."""
        return self.beta * max(1, math.ceil(math.log2(max(self.n, 2.0))))


@dataclass
class MedianProvider:
    """Robust-median routine with its (alpha, beta) certificate.

    draw(points, weights, metric, rng) returns a center array of at most beta
    centers that is a (3/4, eps, alpha, beta)-median of the weighted input.
    terminal(points, weights, metric, rng) must return a (1, 0, alpha, beta)-
    median of the small residue; None selects the default residue rule.
    """

    draw: Callable
    alpha: float
    beta: int
    terminal: Callable | None = None


def _distinct_rows(metric: Metric, arr: np.ndarray) -> np.ndarray:
    if len(arr) == 0:
        return arr
    if metric.is_euclidean:
        _, idx = np.unique(arr, axis=0, return_index=True)
    else:
        _, idx = np.unique(arr, return_index=True)
    return arr[np.sort(idx)]


def _default_terminal(points, weights, metric, rng, beta, z):
    """Residue finisher: the residue itself if it fits in beta, else the best
    single candidate (exhaustive, exact for a single center)."""
    distinct = _distinct_rows(metric, points)
    if len(distinct) <= beta:
        return distinct
    d = pairwise_dist(metric, points, points) ** z
    costs = weights @ d
    best = int(costs.argmin())
    return points[best:best + 1]


def peel_bicriteria(points, weights, metric: Metric, eps_internal: float,
                    provider: MedianProvider, rng: np.random.Generator,
                    z: float = 1.0) -> BicriteriaResult:
    """Run the peeling loop at the given internal eps (no rescaling)."""
    z = check_power(z)
    if not 0 < eps_internal < 0.2:
        raise InputError(
            "internal eps must lie in (0, 0.2) so every round removes a "
            "positive fraction")
    weights = np.asarray(weights, dtype=float).copy()
    n_total = float(weights.sum())
    if n_total <= 0:
        raise InputError("bicriteria needs positive total weight")

    rounds: list[Round] = []
    center_blocks: list[np.ndarray] = []
    guard = 10.0 / eps_internal
    i = 0
    while float(weights.sum()) >= guard:
        i += 1
        alive = np.flatnonzero(weights > 0)
        sub_pts, sub_w = points[alive], weights[alive]
        n_i = float(sub_w.sum())
        trim = min(n_i, math.ceil((1.0 - 5.0 * eps_internal) * 0.75 * n_i - 1e-12))
        best = None
        for _ in range(i):   # amplification: keep the best of i draws
            Y = provider.draw(sub_pts, sub_w, metric, rng)
            dY = pairwise_dist(metric, sub_pts, Y).min(axis=1) ** z
            taken = take_smallest(dY, sub_w, trim)
            c = float(taken @ dY)
            if best is None or c < best[0]:
                best = (c, Y, taken)
        _, Y, taken = best
        keep = taken > 0
        rounds.append(Round(indices=alive[keep], amounts=taken[keep], centers=Y))
        center_blocks.append(Y)
        weights[alive] -= taken

    alive = np.flatnonzero(weights > 0)
    if alive.size:
        finish = provider.terminal or (
            lambda p, w, m, r: _default_terminal(p, w, m, r, provider.beta, z))
        Y = finish(points[alive], weights[alive], metric, rng)
        rounds.append(Round(indices=alive, amounts=weights[alive].copy(), centers=Y))
        center_blocks.append(Y)

    if metric.is_euclidean:
        B = _distinct_rows(metric, np.concatenate(center_blocks, axis=0))
    else:
        B = _distinct_rows(metric, np.concatenate([np.atleast_1d(b) for b in center_blocks]))
    return BicriteriaResult(rounds=rounds, B=B, total_cost=math.nan,
                            beta=provider.beta, alpha=provider.alpha, n=n_total)


def bicriteria(P, eps: float, provider: MedianProvider, seed: int,
               z: float = 1.0) -> BicriteriaResult:
    """Peeling with the public contract: cost(P, B) <= (1+eps) alpha opt.

    eps is rescaled to eps/100 internally; the provider must produce
    (3/4, eps/100, alpha, beta)-medians of each residual set.
    """
    if not 0 < eps <= 1:
        raise InputError(f"eps must lie in (0, 1], got {eps}")
    points, weights, metric = coerce_weighted(P)
    rng = rng_for(seed, 1)
    res = peel_bicriteria(points, weights, metric, eps / 100.0, provider, rng, z)
    d = pairwise_dist(metric, points, res.B).min(axis=1) ** check_power(z)
    res.total_cost = float(weights @ d)
    res.seed = seed
    res.meta.update({"eps": eps, "z": z})
    return res


def metric_kmedian_beta(k: int, eps: float, delta: float, c: float = 1.0) -> int:
    """Sample size per round for the metric k-median provider."""
    return int(math.ceil(c * (k + math.log(2.0 / delta)) / eps ** 4))


def make_metric_provider(k: int, beta: int, z: float = 1.0) -> MedianProvider:
    """Provider that returns a whole i.i.d. sample as the round's centers.

    Snapping gives the sample an alpha = 2 certificate at z = 1 (2^z for
    powered distances).  The terminal rule keeps the residue when it fits in
    beta and otherwise brute-forces the best k-subset of the residue.
    """
    z = check_power(z)

    def draw(points, weights, metric, rng):
        n = len(points)
        t = min(beta, n)
        idx = rng.choice(n, size=t, replace=True, p=weights / weights.sum())
        return _distinct_rows(metric, points[np.sort(idx)])

    def terminal(points, weights, metric, rng):
        distinct = _distinct_rows(metric, points)
        if len(distinct) <= beta:
            return distinct
        from .solvers import (PIPELINE_BRUTE_LIMIT, brute_force_k_median,
                              weighted_local_search)
        try:
            res = brute_force_k_median((points, weights, metric), k,
                                       candidates=distinct, z=z,
                                       guard=PIPELINE_BRUTE_LIMIT)
        except InputError:
            res = weighted_local_search((points, weights, metric), k,
                                        candidates=distinct, z=z,
                                        seed=int(rng.integers(2 ** 63)))
        return res.centers

    return MedianProvider(draw=draw, alpha=snap_alpha(z), beta=beta,
                          terminal=terminal)


def metric_kmedian_bicriteria(P, k: int, eps: float, delta: float, seed: int,
                              z: float = 1.0, c: float = 1.0,
                              beta: int | None = None) -> BicriteriaResult:
    """Bicriteria for k-median over discrete candidates: B subset of the data.

    Returns O(beta log n) centers with cost(P, B) <= (2^z + eps) * opt over
    k-tuples of data points, with probability >= 1 - delta.  beta defaults to
    the ceil(c (k + ln(2/delta)) / eps^4) per-round sample size (clamped to n
    by the draw itself); pass beta explicitly for desk-scale experiments.
    """
    points, weights, metric = coerce_weighted(P)
    n = float(weights.sum())
    if k < 1 or k > n:
        raise InputError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0 < delta < 1:
        raise InputError(f"delta must lie in (0, 1), got {delta}")
    if beta is None:
        beta = metric_kmedian_beta(k, eps, delta, c)
    provider = make_metric_provider(k, beta, z)
    res = bicriteria((points, weights, metric), eps, provider, seed, z)
    res.meta.update({"k": k, "delta": delta, "c": c})
    return res
