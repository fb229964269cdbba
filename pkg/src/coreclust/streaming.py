"""One-pass streaming coresets via a binary merge-and-reduce counter.

Incoming points are buffered; every full block is compressed into a level-0
coreset, and two coresets at the same level merge (concatenate weighted
points) and reduce (rebuild a coreset on the merged weighted set) into the
next level, exactly like binary-counter carries.  Level ell builds use
eps_ell = eps_bar / (2 (ell+1)^2), so the compounded error over any carry
chain stays below eps_bar * pi^2 / 12.

Space: every bucket holds at most block_size points and the buffer fewer than
block_size, so storage is block_size * (levels + 1) points.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import InputError, Metric, check_power, pairwise_dist
from .sampling import SampleParams, eps_approx_sample_size, rng_for
from .construction import StaticCoreset, k_median_coreset
from .solvers import constant_factor_metric_kmedian


def level_eps(eps_bar: float, level: int) -> float:
    return eps_bar / (2.0 * (level + 1) ** 2)


def default_block_size(k: int, eps_bar: float, c: float = 1.0) -> int:
    """Blocks are never smaller than the level-0 statistical floor."""
    floor = eps_approx_sample_size(
        SampleParams(eps=level_eps(eps_bar, 0), delta=0.1, dim=max(k, 1), c=c))
    return max(64, floor)


@dataclass
class StreamState:
    k: int
    eps_bar: float
    seed: int
    metric: Metric = field(default_factory=Metric)
    z: float = 1.0
    block_size: int | None = None
    delta: float = 0.1
    c: float = 1.0
    buffer: list = field(default_factory=list)
    buckets: dict[int, StaticCoreset] = field(default_factory=dict)
    ledger: dict[int, float] = field(default_factory=dict)  # expected weights
    points_seen: int = 0
    builds: int = 0

    def __post_init__(self):
        check_power(self.z)
        if not 0 < self.eps_bar < 1:
            raise InputError(f"eps_bar must lie in (0, 1), got {self.eps_bar}")
        if self.block_size is None:
            self.block_size = default_block_size(self.k, self.eps_bar, self.c)
        if self.block_size <= self.k:
            raise InputError("block_size must exceed k")

    @property
    def stored_points(self) -> int:
        return len(self.buffer) + sum(len(b) for b in self.buckets.values())

    @property
    def levels(self) -> list[int]:
        return sorted(self.buckets)

    def clone(self) -> "StreamState":
        return copy.deepcopy(self)

    def checkpoint(self) -> dict:
        return {
            "points_seen": self.points_seen,
            "stored_points": self.stored_points,
            "bucket_levels": self.levels,
        }


def _derived_seed(state: StreamState, idx: int) -> int:
    return int(rng_for(state.seed, 9, idx).integers(2 ** 63))


def _reduce(state: StreamState, points, weights, level: int) -> StaticCoreset:
    eps = level_eps(state.eps_bar, level)
    seed = _derived_seed(state, state.builds)
    state.builds += 1
    # anchors are found on the absolute measure; merged coresets can carry
    # signed correction weights and anchor quality only affects error, not
    # the estimator's validity
    anchors = constant_factor_metric_kmedian(
        (points, np.abs(weights), state.metric), state.k, eps, state.delta,
        seed, c=state.c)
    t = state.block_size - state.k
    return k_median_coreset((points, weights, state.metric), anchors.centers,
                            t, eps, z=state.z, seed=seed)


def stream_push(state: StreamState, p) -> StreamState:
    """Buffer one point; compress and carry when the buffer fills."""
    if state.metric.is_euclidean:
        row = np.asarray(p, dtype=float).reshape(-1)
    else:
        row = int(p)
    state.buffer.append(row)
    state.points_seen += 1
    if len(state.buffer) < state.block_size:
        return state

    if state.metric.is_euclidean:
        pts = np.asarray(state.buffer, dtype=float)
    else:
        pts = np.asarray(state.buffer, dtype=np.intp)
    w = np.ones(len(pts))
    state.buffer = []
    core = _reduce(state, pts, w, level=0)
    expected = core.provenance.get("inflation", 1.0) * float(len(pts))

    level = 0
    while level in state.buckets:
        other = state.buckets.pop(level)
        expected_other = state.ledger.pop(level)
        if state.metric.is_euclidean:
            merged_pts = np.concatenate([other.points, core.points], axis=0)
        else:
            merged_pts = np.concatenate([other.points, core.points])
        merged_w = np.concatenate([other.weights, core.weights])
        level += 1
        core = _reduce(state, merged_pts, merged_w, level=level)
        expected = (core.provenance.get("inflation", 1.0)
                    * (expected + expected_other))
    state.buckets[level] = core
    state.ledger[level] = expected
    return state


def stream_query(state: StreamState, centers) -> float:
    """Approximate cost of the points seen so far at the query centers."""
    if state.points_seen == 0:
        raise InputError("no points seen yet")
    total = 0.0
    if state.buffer:
        if state.metric.is_euclidean:
            pts = np.asarray(state.buffer, dtype=float)
        else:
            pts = np.asarray(state.buffer, dtype=np.intp)
        d = pairwise_dist(state.metric, pts, centers).min(axis=1)
        total += float((d ** state.z).sum())
    for core in state.buckets.values():
        total += core.cost(centers)
    return total


def expected_total_weight(state: StreamState) -> float:
    """Ledger prediction for the stored weight (inflation-adjusted count)."""
    return sum(state.ledger.values()) + len(state.buffer)


def actual_total_weight(state: StreamState) -> float:
    return sum(b.total_weight for b in state.buckets.values()) + len(state.buffer)
