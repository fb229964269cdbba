"""File formats: point files, explicit metric matrices, coreset JSON.

Point files are CSV (one point per row, d columns) or JSON lines with a
"coords" field; the dimension is inferred from the first row and mixed widths
are a load error.  Explicit metrics are square CSV matrices.  Coresets
round-trip losslessly through a single JSON document.  All writes go through
a temp file plus atomic rename so failures never leave partial output.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .geometry import LoadError, Metric, PointSet
from .construction import StaticCoreset, ThresholdCoreset


def load_points_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            row = [c for c in row if c.strip() != ""]
            if not row:
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise LoadError(
                    f"{path}: row {lineno} has {len(row)} columns, expected {width}")
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise LoadError(f"{path}: row {lineno}: {exc}") from exc
    if not rows:
        raise LoadError(f"{path}: no points found")
    return np.asarray(rows, dtype=float)


def load_points_jsonl(path) -> np.ndarray:
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                coords = [float(c) for c in obj["coords"]]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise LoadError(f"{path}: line {lineno}: {exc}") from exc
            if width is None:
                width = len(coords)
            elif len(coords) != width:
                raise LoadError(
                    f"{path}: line {lineno} has {len(coords)} coords, expected {width}")
            rows.append(coords)
    if not rows:
        raise LoadError(f"{path}: no points found")
    return np.asarray(rows, dtype=float)


def load_points(path) -> np.ndarray:
    path = str(path)
    if path.endswith(".jsonl") or path.endswith(".ndjson"):
        return load_points_jsonl(path)
    return load_points_csv(path)


def load_metric_csv(path, validate: bool = True) -> Metric:
    mat = load_points_csv(path)
    return Metric.from_matrix(mat, validate=validate)


def load_point_set(path, metric_path=None, validate_metric: bool = True) -> PointSet:
    if metric_path is not None:
        metric = load_metric_csv(metric_path, validate=validate_metric)
        n = metric.size
        return PointSet(points=np.arange(n, dtype=np.intp), metric=metric)
    return PointSet(points=load_points(path))


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _metric_to_dict(metric: Metric) -> dict:
    if metric.is_euclidean:
        return {"kind": metric.kind}
    return {"kind": metric.kind, "matrix": metric.matrix.tolist()}


def _metric_from_dict(obj: dict) -> Metric:
    if obj["kind"] == "euclidean":
        return Metric()
    return Metric.from_matrix(np.asarray(obj["matrix"]), validate=False)


def coreset_to_dict(core) -> dict:
    if isinstance(core, StaticCoreset):
        return {
            "type": "static",
            "z": core.z,
            "eps": core.eps,
            "metric": _metric_to_dict(core.metric),
            "points": [
                {"coords": p.tolist() if core.metric.is_euclidean else int(p),
                 "weight": float(w)}
                for p, w in zip(core.points, core.weights)
            ],
            "projected": [],
            "provenance": core.provenance,
        }
    if isinstance(core, ThresholdCoreset):
        euclid = core.metric.is_euclidean
        return {
            "type": "threshold",
            "z": core.z,
            "eps": core.eps,
            "metric": _metric_to_dict(core.metric),
            "points": [
                {"coords": p.tolist() if euclid else int(p),
                 "weight": float(w), "threshold": float(t), "center": int(c)}
                for p, w, t, c in zip(core.sampled_points, core.sampled_weights,
                                      core.sampled_tau, core.sampled_center)
            ],
            "projected": [
                {"coords": p.tolist() if euclid else int(p),
                 "thresholds": core.proj_tau[j].tolist(),
                 "masses": np.diff(core.proj_cum_mass[j]).tolist()}
                for j, p in enumerate(core.proj_points)
            ],
            "provenance": core.provenance,
        }
    raise TypeError(f"not a coreset: {type(core)!r}")


def coreset_from_dict(obj: dict):
    metric = _metric_from_dict(obj["metric"])
    euclid = metric.is_euclidean

    def as_pts(items):
        if euclid:
            return np.asarray([it["coords"] for it in items], dtype=float)
        return np.asarray([it["coords"] for it in items], dtype=np.intp)

    if obj["type"] == "static":
        pts = as_pts(obj["points"])
        w = np.asarray([it["weight"] for it in obj["points"]], dtype=float)
        return StaticCoreset(points=pts, weights=w, metric=metric, z=obj["z"],
                             eps=obj["eps"], provenance=obj.get("provenance", {}))
    if obj["type"] == "threshold":
        pts = (as_pts(obj["points"]) if obj["points"] else
               (np.empty((0, len(obj["projected"][0]["coords"])))
                if euclid else np.empty(0, dtype=np.intp)))
        w = np.asarray([it["weight"] for it in obj["points"]], dtype=float)
        tau = np.asarray([it["threshold"] for it in obj["points"]], dtype=float)
        cen = np.asarray([it["center"] for it in obj["points"]], dtype=np.intp)
        proj = as_pts(obj["projected"])
        proj_tau = [np.asarray(it["thresholds"], dtype=float)
                    for it in obj["projected"]]
        proj_cum = [np.concatenate([[0.0], np.cumsum(it["masses"])])
                    for it in obj["projected"]]
        return ThresholdCoreset(
            sampled_points=pts, sampled_weights=w, sampled_tau=tau,
            sampled_center=cen, proj_points=proj, proj_tau=proj_tau,
            proj_cum_mass=proj_cum, metric=metric, z=obj["z"], eps=obj["eps"],
            provenance=obj.get("provenance", {}))
    raise LoadError(f"unknown coreset type {obj['type']!r}")


def save_coreset(path, core) -> None:
    dump_json(path, coreset_to_dict(core))


def load_coreset(path):
    with open(path) as fh:
        return coreset_from_dict(json.load(fh))


def gaussian_mixture(n: int, d: int, k: int, seed: int, spread: float = 6.0,
                     sigma: float = 1.0) -> np.ndarray:
    """Synthetic benchmark data: k spherical Gaussian clusters."""
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-spread, spread, size=(k, d))
    labels = rng.integers(0, k, size=n)
    return centers[labels] + sigma * rng.normal(size=(n, d))
