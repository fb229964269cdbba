"""Points, metrics, powered distances, costs and nearest-center assignment.

Conventions used throughout the package:

* Euclidean mode: points and centers are ``(n, d)`` / ``(m, d)`` float arrays.
* Explicit-metric mode: points and centers are 1-D integer arrays of ids into
  the metric's symmetric ``n x n`` distance matrix.
* Ties in nearest-center assignment always go to the lowest center index, so
  every randomized pipeline is exactly replayable.
* All reals are float64; verifiers compare costs at relative tolerance
  ``REL_TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

REL_TOL = 1e-9

EUCLIDEAN = "euclidean"
MATRIX = "explicit-matrix"


class InputError(ValueError):
    """Invalid argument combination (empty center set, bad parameter range, ...)."""


class LoadError(ValueError):
    """Malformed input file or distance matrix."""


def check_power(z) -> float:
    z = float(z)
    if not np.isfinite(z) or z < 1.0:
        raise InputError(f"power parameter must satisfy z >= 1, got {z}")
    return z


@dataclass(frozen=True)
class Metric:
    """Distance oracle: plain Euclidean or an explicit finite metric matrix."""

    kind: str = EUCLIDEAN
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, MATRIX):
            raise InputError(f"unknown metric kind {self.kind!r}")
        if self.kind == MATRIX:
            if self.matrix is None:
                raise InputError("explicit-matrix metric requires a matrix")
            object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
            self.matrix.setflags(write=False)

    @property
    def is_euclidean(self) -> bool:
        return self.kind == EUCLIDEAN

    @property
    def size(self) -> int | None:
        return None if self.matrix is None else self.matrix.shape[0]

    @staticmethod
    def from_matrix(matrix, validate: bool = True, full_check_limit: int = 128,
                    n_sampled_triples: int = 2000, seed: int = 0) -> "Metric":
        """Build an explicit finite metric, checking the metric axioms.

        Zero diagonal and symmetry are always checked exactly.  The triangle
        inequality is checked over all n^3 triples when n <= full_check_limit
        and over sampled triples otherwise.
        """
        D = np.asarray(matrix, dtype=float)
        if validate:
            if D.ndim != 2 or D.shape[0] != D.shape[1]:
                raise LoadError(f"distance matrix must be square, got shape {D.shape}")
            if not np.all(np.isfinite(D)):
                raise LoadError("distance matrix contains non-finite entries")
            if np.any(D < 0):
                raise LoadError("distance matrix contains negative entries")
            if np.any(np.diag(D) != 0):
                raise LoadError("distance matrix has a nonzero diagonal")
            if not np.allclose(D, D.T, rtol=0, atol=0):
                raise LoadError("distance matrix is not symmetric")
            n = D.shape[0]
            tol = REL_TOL * max(1.0, float(D.max()))
            if n <= full_check_limit:
                for j in range(n):
                    if np.any(D > D[:, [j]] + D[[j], :] + tol):
                        raise LoadError(
                            f"triangle inequality violated through point {j}")
            else:
                # spot check: sampled (i, k) pairs against every intermediate
                rng = np.random.default_rng(seed)
                i = rng.integers(0, n, size=n_sampled_triples)
                k = rng.integers(0, n, size=n_sampled_triples)
                slack = (D[i, :] + D[:, k].T).min(axis=1)
                if np.any(D[i, k] > slack + tol):
                    raise LoadError("triangle inequality violated on sampled pair")
        return Metric(kind=MATRIX, matrix=D)


def metric_from_points(coords) -> Metric:
    """Explicit metric induced by Euclidean distances of the given points."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    D = pairwise_dist(Metric(), coords, coords)
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return Metric(kind=MATRIX, matrix=D)


def as_points(metric: Metric, arr) -> np.ndarray:
    """Normalize a raw point/center array to the metric's representation."""
    if metric.is_euclidean:
        out = np.atleast_2d(np.asarray(arr, dtype=float))
        if out.ndim != 2:
            raise InputError(f"euclidean points must be (n, d), got shape {out.shape}")
        if not np.all(np.isfinite(out)):
            raise InputError("points contain non-finite coordinates")
        return out
    out = np.atleast_1d(np.asarray(arr))
    if out.ndim != 1 or not np.issubdtype(out.dtype, np.integer):
        raise InputError("explicit-metric points must be a 1-D integer id array")
    n = metric.size
    if np.any(out < 0) or np.any(out >= n):
        raise InputError(f"point ids out of range [0, {n})")
    return out.astype(np.intp)


@dataclass(frozen=True)
class PointSet:
    """Indexed points (or metric-space ids) with integer multiplicities."""

    points: np.ndarray
    metric: Metric = field(default_factory=Metric)
    multiplicity: np.ndarray | None = None

    def __post_init__(self):
        pts = as_points(self.metric, self.points)
        object.__setattr__(self, "points", pts)
        if self.multiplicity is None:
            mult = np.ones(len(pts), dtype=np.int64)
        else:
            mult = np.asarray(self.multiplicity)
            if not np.issubdtype(mult.dtype, np.integer):
                raise InputError("multiplicities must be integers")
            mult = mult.astype(np.int64)
            if mult.shape != (len(pts),) or np.any(mult < 0):
                raise InputError("multiplicities must be nonnegative, one per point")
        object.__setattr__(self, "multiplicity", mult)
        pts.setflags(write=False)
        mult.setflags(write=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int | None:
        return self.points.shape[1] if self.metric.is_euclidean else None

    @property
    def total_weight(self) -> int:
        return int(self.multiplicity.sum())


def coerce_weighted(obj):
    """Normalize inputs to (points, float weights, metric).

    Accepts a PointSet, a coreset-like object with .points/.weights/.metric,
    or a (points, weights, metric) tuple.
    """
    if isinstance(obj, PointSet):
        return obj.points, obj.multiplicity.astype(float), obj.metric
    if hasattr(obj, "points") and hasattr(obj, "weights") and hasattr(obj, "metric"):
        return obj.points, np.asarray(obj.weights, dtype=float), obj.metric
    points, weights, metric = obj
    points = as_points(metric, points)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(points),):
        raise InputError("weights must be one per point")
    return points, weights, metric


def pairwise_dist(metric: Metric, points, centers) -> np.ndarray:
    """Base (unpowered) distances, shape (n_points, n_centers)."""
    if not metric.is_euclidean:
        return metric.matrix[np.ix_(np.asarray(points), np.asarray(centers))]
    P = np.atleast_2d(np.asarray(points, dtype=float))
    C = np.atleast_2d(np.asarray(centers, dtype=float))
    if P.shape[1] != C.shape[1]:
        raise InputError(
            f"dimension mismatch: points are {P.shape[1]}-D, centers {C.shape[1]}-D")
    if P.shape[0] * C.shape[0] * P.shape[1] <= 16_000_000:
        # exact difference form; the dot expansion below cancels digits
        diff = P[:, None, :] - C[None, :, :]
        return np.sqrt((diff * diff).sum(axis=2))
    sq = (P * P).sum(axis=1)[:, None] + (C * C).sum(axis=1)[None, :] - 2.0 * (P @ C.T)
    np.maximum(sq, 0.0, out=sq)
    return np.sqrt(sq)


def _check_centers(metric: Metric, centers) -> np.ndarray:
    c = as_points(metric, centers)
    if len(c) == 0:
        raise InputError("center set must be nonempty")
    return c


def dist_pow(p, centers, z=1.0, metric: Metric | None = None) -> float:
    """Powered distance from one point to its nearest center."""
    metric = metric or Metric()
    z = check_power(z)
    c = _check_centers(metric, centers)
    p_arr = as_points(metric, [p] if not metric.is_euclidean else p)
    d = pairwise_dist(metric, p_arr, c)
    return float(d.min() ** z)


def nearest_center(metric: Metric, points, centers):
    """Index of the nearest center for every point (ties: lowest index)."""
    d = pairwise_dist(metric, points, centers)
    idx = d.argmin(axis=1)
    return idx, d[np.arange(len(d)), idx]


def cost(P: PointSet, centers, z=1.0, weights=None) -> float:
    """Sum over points of the powered distance to the nearest center."""
    z = check_power(z)
    if len(P) == 0:
        raise InputError("cost of an empty point set is undefined")
    c = _check_centers(P.metric, centers)
    w = P.multiplicity.astype(float) if weights is None else np.asarray(weights, float)
    _, d = nearest_center(P.metric, P.points, c)
    return float(w @ (d ** z))


def cost_to_set(P: PointSet, Y, z=1.0, weights=None) -> float:
    """Cost of serving every point by its best element of the center set Y."""
    return cost(P, Y, z=z, weights=weights)


def project(P: PointSet, B) -> PointSet:
    """Snap every point to its nearest center in B (ties: lowest index)."""
    c = _check_centers(P.metric, B)
    idx, _ = nearest_center(P.metric, P.points, c)
    return PointSet(points=c[idx], metric=P.metric,
                    multiplicity=P.multiplicity.copy())


def partition_by_nearest(P: PointSet, B) -> list[np.ndarray]:
    """Point indices grouped by nearest center, one array per center in B."""
    c = _check_centers(P.metric, B)
    idx, _ = nearest_center(P.metric, P.points, c)
    return [np.flatnonzero(idx == j) for j in range(len(c))]


def take_smallest(values, weights, count) -> np.ndarray:
    """Amount of each item's weight consumed by the `count` smallest copies.

    Items are ordered by value (ties: lowest index); weight mass is consumed
    in that order until exactly `count` has been taken, splitting the boundary
    item if needed.  Returns an array aligned with `values`.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    count = float(count)
    if count < 0:
        raise InputError("trim count must be nonnegative")
    order = np.argsort(values, kind="stable")
    w_sorted = weights[order]
    upper = np.cumsum(w_sorted)
    taken_sorted = np.clip(count - (upper - w_sorted), 0.0, w_sorted)
    taken = np.zeros_like(weights)
    taken[order] = taken_sorted
    return taken


def trimmed_cost(values, weights, count) -> float:
    """Sum of the `count` smallest value-copies (weighted, boundary split)."""
    taken = take_smallest(values, weights, count)
    return float(taken @ np.asarray(values, dtype=float))
