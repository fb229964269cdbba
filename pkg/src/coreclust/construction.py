"""Coreset constructions: the generic two-part builder and its k-median forms.

Every construction here splits the input into a thresholded "projected" part
and an importance-sampled part:

* the generic builder works over an abstract indexed function family with a
  paired family, per-item thresholds and integer importance weights;
* the metric threshold coreset keeps query-dependent weights (a sampled point
  counts only while its projection stays within its threshold, the projected
  copy only once it leaves);
* the k-median coreset collapses everything to static weights by adding the
  anchor centers themselves with a correction weight per cluster.

Importance weights follow m_p = ceil(n * dist^z(p,B) / sum dist^z) + 1; the
static construction's cluster correction inflates each cluster's mass by
(1 + eps/2), which keeps corrections nonnegative once the sample is large
enough while bounding the deliberate upward cost bias by eps/2.
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
    nearest_center,
    pairwise_dist,
)
from .sampling import SampleParams, eps_approx_sample_size, rng_for

# The anchor correction inflates cluster masses by (1 + 10 * eps/INFLATION_SCALE).
# The 10x inflation constant exists only to keep corrections nonnegative; applied
# at the public eps it would add a systematic +eps*cost(proj) bias that alone
# busts the eps error budget, so it runs at eps/20 (factor 1 + eps/2, measured
# bias ~eps/2 worst case, nonnegativity restored through the sample-size bound).
INFLATION_SCALE = 20.0

# Calibrated constant for the nonnegativity sample bound (measured: 30/30 clean
# runs at n=1000, k=3, eps=0.2 need c=4 under the (1 + eps/2) inflation).
NONNEG_C = 4.0


def nonneg_sample_size(n_anchors: int, eps: float, delta: float,
                       c: float = NONNEG_C) -> int:
    """Draws above which every anchor correction stays nonnegative w.h.p.:
    ceil((2 c |B| / eps^2)(3 ln |B| + ln(1/delta)))."""
    t = (2.0 * c * n_anchors / eps ** 2) * \
        (3.0 * math.log(max(n_anchors, 2)) + math.log(1.0 / delta))
    return int(math.ceil(t))


# ---------------------------------------------------------------------------
# generic two-part construction over an abstract function family
# ---------------------------------------------------------------------------

@dataclass
class FunctionFamily:
    """Indexed nonnegative functions with a paired family and thresholds.

    evaluate(x) -> (n,) values of f(x); paired(x) -> f'(x) (defaults to f);
    threshold(x) -> s_f(x) (defaults to +inf, meaning "never project");
    m -> integer importance weight per item, all >= 1.
    """

    size: int
    evaluate: Callable[[object], np.ndarray]
    paired: Callable[[object], np.ndarray] | None = None
    threshold: Callable[[object], np.ndarray] | None = None
    m: np.ndarray | None = None

    def __post_init__(self):
        if self.m is None:
            self.m = np.ones(self.size, dtype=np.int64)
        self.m = np.asarray(self.m)
        if not np.issubdtype(self.m.dtype, np.integer):
            raise InputError("importance weights m must be integers")
        if self.m.shape != (self.size,) or np.any(self.m < 1):
            raise InputError("importance weights m must be >= 1, one per item")

    def f(self, x) -> np.ndarray:
        return np.asarray(self.evaluate(x), dtype=float)

    def f_paired(self, x) -> np.ndarray:
        if self.paired is None:
            return self.f(x)
        return np.asarray(self.paired(x), dtype=float)

    def s(self, x) -> np.ndarray:
        if self.threshold is None:
            return np.full(self.size, np.inf)
        return np.asarray(self.threshold(x), dtype=float)


@dataclass
class BCoreset:
    """Evaluable two-part coreset: thresholded pairs plus a scaled sample."""

    family: FunctionFamily
    sample: np.ndarray       # drawn item indices, repetitions allowed
    g_total: int             # sum of importance weights |G|

    def cost(self, x) -> float:
        fp = self.family.f_paired(x)
        s = self.family.s(x)
        over = fp > s
        t_part = float(fp[over].sum())
        if self.sample.size:
            f = self.family.f(x)
            idx = self.sample
            g = np.where(over[idx], 0.0, f[idx] / self.family.m[idx])
            u_part = float(g.sum()) * self.g_total / self.sample.size
        else:
            u_part = 0.0
        return t_part + u_part


def identity_approximation(family: FunctionFamily, rng=None) -> np.ndarray:
    """The exact eps-approximation S = G: every item m_f times."""
    return np.repeat(np.arange(family.size), family.m)


def b_coreset(family: FunctionFamily, eps: float,
              eps_approx: Callable | None = None,
              seed: int | None = None) -> BCoreset:
    """Split the family into thresholded pairs plus a scaled sample.

    eps_approx(family, rng) must return drawn item indices forming an
    eps-approximation of the m-weighted family; the default takes everything
    (the exact identity), under which the coreset cost reproduces cost(F, x)
    exactly for all x.
    """
    rng = None if seed is None else rng_for(seed, 2)
    routine = eps_approx or identity_approximation
    sample = np.asarray(routine(family, rng), dtype=np.intp)
    return BCoreset(family=family, sample=sample, g_total=int(family.m.sum()))


def weighted_family_sampler(t: int) -> Callable:
    """eps-approximation routine: t draws with probability m_f / sum(m)."""

    def routine(family: FunctionFamily, rng) -> np.ndarray:
        if rng is None:
            raise InputError("sampling routine needs a seed")
        p = family.m / family.m.sum()
        return rng.choice(family.size, size=t, replace=True, p=p)

    return routine


def metric_function_family(P, B, eps: float, z: float = 1.0) -> FunctionFamily:
    """Distance family with projection pairing and distance thresholds.

    f_p(x) = dist^z(p, x), f'_p(x) = dist^z(proj(p,B), x); an item projects
    once f' exceeds dist^z(p,B)/eps^z (scaled by (18 z)^z for z > 1, which is
    the slack needed for powered distances).
    """
    z = check_power(z)
    points, weights, metric = coerce_weighted(P)
    if np.any(weights != 1.0):
        raise InputError("function families require unit-multiplicity inputs")
    Bc = np.asarray(B)
    idx, dB = nearest_center(metric, points, Bc)
    dzB = dB ** z
    total = float(dzB.sum())
    if total <= 0:
        raise InputError("degenerate family: every point lies on a center of B")
    scale = 1.0 if z == 1.0 else (18.0 * z) ** z
    tau = scale * dzB / eps ** z
    m = np.ceil(len(points) * dzB / total - 1e-12).astype(np.int64) + 1
    proj_pts = Bc[idx]

    def evaluate(x):
        return pairwise_dist(metric, points, x).min(axis=1) ** z

    def paired(x):
        return pairwise_dist(metric, proj_pts, x).min(axis=1) ** z

    def threshold(_x):
        return tau

    return FunctionFamily(size=len(points), evaluate=evaluate, paired=paired,
                          threshold=threshold, m=m)


# ---------------------------------------------------------------------------
# concrete coresets over points
# ---------------------------------------------------------------------------

@dataclass
class StaticCoreset:
    """Weighted points with static (query-independent) weights."""

    points: np.ndarray
    weights: np.ndarray
    metric: Metric
    z: float = 1.0
    eps: float | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (len(self.points),):
            raise InputError("one weight per coreset point required")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def cost(self, centers) -> float:
        d = pairwise_dist(self.metric, self.points, centers).min(axis=1)
        return float(self.weights @ (d ** self.z))


@dataclass
class ThresholdCoreset:
    """Sampled points plus projected copies with query-dependent activation.

    A sampled point contributes w * dist^z(p, x) while its projection stays
    within tau_p of the query; each projected copy contributes dist^z(p', x)
    once it exceeds its tau_p.  Projected copies are compressed per distinct
    projection target as sorted thresholds with cumulative masses.
    """

    sampled_points: np.ndarray
    sampled_weights: np.ndarray
    sampled_tau: np.ndarray
    sampled_center: np.ndarray       # row into proj_points per sampled point
    proj_points: np.ndarray          # distinct projection targets
    proj_tau: list[np.ndarray]       # sorted thresholds per target
    proj_cum_mass: list[np.ndarray]  # cumulative mass, len = len(tau) + 1
    metric: Metric
    z: float = 1.0
    eps: float | None = None
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sampled_points) + sum(len(t) for t in self.proj_tau)

    def cost(self, centers) -> float:
        dzc = pairwise_dist(self.metric, self.proj_points, centers).min(axis=1) \
            ** self.z
        total = 0.0
        if len(self.sampled_points):
            active = dzc[self.sampled_center] <= self.sampled_tau
            if np.any(active):
                ds = pairwise_dist(self.metric, self.sampled_points[active],
                                   centers).min(axis=1) ** self.z
                total += float(self.sampled_weights[active] @ ds)
        for j in range(len(self.proj_points)):
            # copies with tau strictly below dist^z(p', x) are active
            pos = np.searchsorted(self.proj_tau[j], dzc[j], side="left")
            total += float(dzc[j] * self.proj_cum_mass[j][pos])
        return total


def eval_coreset_cost(coreset, centers) -> float:
    """Cost of a static or threshold coreset at a query center set."""
    return coreset.cost(centers)


def _importance_weights(weights: np.ndarray, dzB: np.ndarray):
    """Importance weights m_p = ceil(W d^z / sum w d^z) + 1 and their mass.

    Signed inputs (merge-and-reduce feeds coresets whose anchor corrections
    may be negative) contribute their absolute mass to the sampling measure;
    the sign rides along on the drawn weight.
    """
    aw = np.abs(weights)
    total = float(aw @ dzB)
    W = float(aw.sum())
    m = np.ceil(W * dzB / total - 1e-12).astype(np.int64) + 1
    mass = aw * m
    return m, mass, total


def _draw(mass: np.ndarray, t: int, rng) -> np.ndarray:
    return rng.choice(len(mass), size=t, replace=True, p=mass / mass.sum())


def k_median_coreset(P, B, t: int, eps: float, z: float = 1.0,
                     seed: int | None = None, draws=None) -> StaticCoreset:
    """Static coreset: importance sample plus anchor centers with corrections.

    Cluster the input by nearest anchor in B, importance-sample t points, give
    each draw weight sum(mass)/(m_p t), and give each anchor the inflated
    cluster mass minus the sampled weight landing in its cluster.  The weight
    total is exactly inflation * n every run (inflation = 1 + eps/2, recorded
    in the provenance).  When every point sits on an anchor the exact
    compressed coreset (anchors with cluster masses) is returned instead.
    """
    z = check_power(z)
    if t < 1:
        raise InputError("sample size t must be >= 1")
    if not 0 < eps < 1:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    points, weights, metric = coerce_weighted(P)
    Bc = np.asarray(B)
    if len(np.atleast_1d(Bc)) == 0:
        raise InputError("anchor set B must be nonempty")
    idx, dB = nearest_center(metric, points, Bc)
    dzB = dB ** z
    n_anchors = len(Bc) if not metric.is_euclidean else len(np.atleast_2d(Bc))
    cluster_mass = np.bincount(idx, weights=weights, minlength=n_anchors)

    prov = {"seed": seed, "t": t, "eps": eps, "z": z, "anchors": int(n_anchors)}
    if float(np.abs(weights) @ dzB) <= 0.0:
        prov["degenerate"] = True
        return StaticCoreset(points=Bc, weights=cluster_mass, metric=metric,
                             z=z, eps=eps, provenance=prov)

    m, mass, _ = _importance_weights(weights, dzB)
    if draws is None:
        if seed is None:
            raise InputError("seed required for the sampling path")
        draws = _draw(mass, t, rng_for(seed, 3))
    draws = np.asarray(draws, dtype=np.intp)
    w_sample = np.sign(weights[draws]) * mass.sum() / (m[draws] * len(draws))

    inflation = 1.0 + 10.0 * (eps / INFLATION_SCALE)
    w_anchor = inflation * cluster_mass - np.bincount(
        idx[draws], weights=w_sample, minlength=n_anchors)

    if metric.is_euclidean:
        pts = np.concatenate([points[draws], np.atleast_2d(Bc)], axis=0)
    else:
        pts = np.concatenate([points[draws], np.atleast_1d(Bc)])
    w = np.concatenate([w_sample, w_anchor])
    prov["inflation"] = inflation
    return StaticCoreset(points=pts, weights=w, metric=metric, z=z, eps=eps,
                         provenance=prov)


def metric_b_coreset(P, B, t: int, eps: float, z: float = 1.0,
                     seed: int | None = None, draws=None) -> ThresholdCoreset:
    """Threshold coreset: importance sample plus all projected copies.

    Thresholds are tau_p = dist^z(p, B) / eps^z with the public eps.  When
    every point sits on an anchor the construction is exact: no sample, all
    projected copies with tau = 0 (a zero threshold never miscounts because a
    copy at distance zero contributes nothing either way).
    """
    z = check_power(z)
    if t < 1:
        raise InputError("sample size t must be >= 1")
    if not 0 < eps < 1:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    points, weights, metric = coerce_weighted(P)
    Bc = np.asarray(B)
    idx, dB = nearest_center(metric, points, Bc)
    dzB = dB ** z
    prov = {"seed": seed, "t": t, "eps": eps, "z": z}

    degenerate = float(np.abs(weights) @ dzB) <= 0.0
    tau = np.zeros(len(points)) if degenerate else dzB / eps ** z
    if degenerate:
        prov["degenerate"] = True
        s_draws = np.empty(0, dtype=np.intp)
        w_sample = np.empty(0)
    else:
        m, mass, _ = _importance_weights(weights, dzB)
        if draws is None:
            if seed is None:
                raise InputError("seed required for the sampling path")
            draws = _draw(mass, t, rng_for(seed, 4))
        s_draws = np.asarray(draws, dtype=np.intp)
        w_sample = np.sign(weights[s_draws]) * mass.sum() / (m[s_draws] * len(s_draws))

    used = np.unique(idx)
    remap = np.full(
        len(Bc) if not metric.is_euclidean else len(np.atleast_2d(Bc)), -1,
        dtype=np.intp)
    remap[used] = np.arange(len(used))
    proj_points = (np.atleast_2d(Bc)[used] if metric.is_euclidean
                   else np.atleast_1d(Bc)[used])
    proj_tau, proj_cum = [], []
    for u in used:
        members = np.flatnonzero(idx == u)
        order = np.argsort(tau[members], kind="stable")
        taus = tau[members][order]
        masses = weights[members][order]
        proj_tau.append(taus)
        proj_cum.append(np.concatenate([[0.0], np.cumsum(masses)]))

    return ThresholdCoreset(
        sampled_points=points[s_draws],
        sampled_weights=np.asarray(w_sample, dtype=float),
        sampled_tau=tau[s_draws],
        sampled_center=remap[idx[s_draws]],
        proj_points=proj_points,
        proj_tau=proj_tau,
        proj_cum_mass=proj_cum,
        metric=metric, z=z, eps=eps, provenance=prov)


def sensitivity_weights(P, B, z: float = 1.0) -> np.ndarray:
    """Per-point importance floor realized through anchor distances.

    m_p = ceil(n * dist^z(p,B) / cost(P,B)) + 2; the +2 absorbs the gap
    between the anchor-based surrogate and the true worst-case ratio.
    """
    z = check_power(z)
    points, weights, metric = coerce_weighted(P)
    _, dB = nearest_center(metric, points, np.asarray(B))
    dzB = dB ** z
    total = float(weights @ dzB)
    if total <= 0:
        raise InputError("cost(P, B) is zero; use the exact compressed coreset")
    W = float(weights.sum())
    return np.ceil(W * dzB / total - 1e-12).astype(np.int64) + 2


def sensitivity_coreset(P, z: float, m, params: SampleParams,
                        seed: int | None = None, draws=None) -> StaticCoreset:
    """Importance-sampling coreset from explicit per-point weights m.

    The sample size is the eps-approximation bound evaluated at the effective
    parameter eps * n / sum(m) (never approximated: sum(m) is computed first);
    each drawn point gets weight sum(w m)/(m_p |S|).
    """
    z = check_power(z)
    points, weights, metric = coerce_weighted(P)
    m = np.asarray(m)
    if not np.issubdtype(m.dtype, np.integer) or np.any(m < 1):
        raise InputError("sensitivity weights must be positive integers")
    W = float(weights.sum())
    mass = weights * m
    eps_eff = params.eps * W / float(mass.sum())
    t = eps_approx_sample_size(params.with_eps(min(eps_eff, 0.999999)))
    if draws is None:
        if seed is None:
            raise InputError("seed required for the sampling path")
        draws = _draw(mass, t, rng_for(seed, 5))
    draws = np.asarray(draws, dtype=np.intp)
    w = mass.sum() / (m[draws] * len(draws))
    return StaticCoreset(points=points[draws], weights=w, metric=metric, z=z,
                         eps=params.eps,
                         provenance={"seed": seed, "t": int(len(draws)),
                                     "eps_effective": eps_eff, "z": z})


def build_sensitivity_coreset(P, B, z: float, params: SampleParams,
                              seed: int) -> StaticCoreset:
    """Anchor-driven sensitivity coreset with the exact degenerate path."""
    points, weights, metric = coerce_weighted(P)
    Bc = np.asarray(B)
    idx, dB = nearest_center(metric, points, Bc)
    if float(weights @ (dB ** check_power(z))) <= 0.0:
        n_anchors = len(Bc) if not metric.is_euclidean else len(np.atleast_2d(Bc))
        cluster_mass = np.bincount(idx, weights=weights, minlength=n_anchors)
        return StaticCoreset(points=Bc, weights=cluster_mass, metric=metric,
                             z=z, eps=params.eps,
                             provenance={"seed": seed, "degenerate": True})
    m = sensitivity_weights((points, weights, metric), Bc, z)
    return sensitivity_coreset((points, weights, metric), z, m, params, seed)


def power_z_sample_size(eps: float, z: float, dim: int, k: int,
                        delta: float, c: float = 1.0) -> int:
    """Sample size for powered distances: eps enters as eps^(2z)."""
    z = check_power(z)
    t = (c / eps ** (2 * z)) * (dim + k * math.log(max(k, 2)) + math.log(1 / delta))
    return int(math.ceil(t))


def power_z_coreset(P, B, t: int | None, eps: float, z: float,
                    seed: int | None = None, delta: float = 0.1,
                    c: float = 1.0, dim: int | None = None) -> StaticCoreset:
    """Static coreset for powered distances (z > 1).

    Identical structure to the z = 1 construction (anchor distances enter at
    power z everywhere); when t is omitted it comes from the powered sample
    bound, where eps is replaced by eps^(2z).
    """
    z = check_power(z)
    if z <= 1.0:
        raise InputError("power_z_coreset requires z > 1; use k_median_coreset")
    if t is None:
        points, weights, metric = coerce_weighted(P)
        n = max(int(weights.sum()), 2)
        k = len(np.atleast_2d(np.asarray(B))) if metric.is_euclidean \
            else len(np.atleast_1d(np.asarray(B)))
        d = dim if dim is not None else int(math.ceil(k * math.log2(n)))
        t = power_z_sample_size(eps, z, d, k, delta, c)
    return k_median_coreset(P, B, t, eps, z=z, seed=seed)
