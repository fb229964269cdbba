"""Sample-size formulas, seeded sampling and epsilon-approximation verifiers.

Sample sizes follow the classic VC/PAC bound t = (c/eps^2) (dim + ln(1/delta))
with natural logarithms.  The constant c is configurable everywhere (the
theory only promises "sufficiently large"); acceptance runs calibrate it.

All randomness flows through numpy's default_rng (PCG64).  Identical inputs
and seed give bit-identical outputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import InputError, PointSet

U64_MAX = 2 ** 64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= U64_MAX:
        raise InputError("seed must fit in an unsigned 64-bit integer")
    return seed


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Deterministic child generator for a subsystem (seed plus spawn key)."""
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed), spawn_key=key))


@dataclass(frozen=True)
class SampleParams:
    """Inputs to the epsilon-approximation sample-size bound."""

    eps: float
    delta: float
    dim: int
    c: float = 1.0

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise InputError(f"eps must lie in (0, 1), got {self.eps}")
        if not 0 < self.delta < 1:
            raise InputError(f"delta must lie in (0, 1), got {self.delta}")
        if self.dim < 1 or int(self.dim) != self.dim:
            raise InputError(f"dim must be a positive integer, got {self.dim}")
        if self.c <= 0:
            raise InputError(f"c must be positive, got {self.c}")

    def with_eps(self, eps: float) -> "SampleParams":
        return SampleParams(eps=eps, delta=self.delta, dim=self.dim, c=self.c)


def eps_approx_sample_size(params: SampleParams) -> int:
    """Draws needed for an eps-approximation: ceil((c/eps^2)(dim + ln(1/delta)))."""
    t = (params.c / params.eps ** 2) * (params.dim + math.log(1.0 / params.delta))
    return int(math.ceil(t))


def iid_sample(P: PointSet, t: int, seed: int) -> PointSet:
    """t uniform draws with replacement (multiplicities act as copy counts)."""
    if len(P) == 0:
        raise InputError("cannot sample from an empty point set")
    if t < 0:
        raise InputError("sample size must be nonnegative")
    rng = rng_for(seed)
    total = P.multiplicity.sum()
    if total <= 0:
        raise InputError("point set has zero total multiplicity")
    idx = rng.choice(len(P), size=t, replace=True, p=P.multiplicity / total)
    return PointSet(points=P.points[idx], metric=P.metric)


def weighted_iid_sample(P: PointSet, m, t: int, seed: int):
    """t draws with probability m_p / sum(m); returns (sample, source indices)."""
    m = np.asarray(m)
    if not np.issubdtype(m.dtype, np.integer):
        raise InputError("importance weights m must be integers")
    if m.shape != (len(P),) or np.any(m <= 0):
        raise InputError("importance weights m must be positive, one per point")
    if t < 1:
        raise InputError("sample size must be at least 1")
    rng = rng_for(seed)
    idx = rng.choice(len(P), size=t, replace=True, p=m / m.sum())
    return PointSet(points=P.points[idx], metric=P.metric), idx


@dataclass
class VerificationReport:
    """Outcome of a brute-force guarantee check, replayable from params+seed."""

    kind: str
    passed: bool
    max_discrepancy: float | None = None
    argmax_x: int | None = None
    argmax_r: float | None = None
    params: dict = field(default_factory=dict)
    seed: int | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "max_discrepancy": self.max_discrepancy,
            "argmax_x": self.argmax_x,
            "argmax_r": self.argmax_r,
            "pass": self.passed,
            "params": self.params,
            "seed": self.seed,
            "details": self.details,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _as_value_table(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.size == 0:
        raise InputError("need a nonempty (n_items, n_queries) value table")
    return v


def verify_range_eps_approx(values, sample_idx, eps: float,
                            params: dict | None = None,
                            seed: int | None = None) -> VerificationReport:
    """Check the counting discrepancy of a subset against every range.

    `values` is an (n_items, n_queries) table of f(x); `sample_idx` indexes
    the subset S.  For every query column and every threshold r taken from the
    distinct values (counts are step functions of r, so these suffice), the
    discrepancy | |range|/n - |S∩range|/|S| | is computed; the report carries
    the maximum and whether it is <= eps.
    """
    v = _as_value_table(values)
    n, q = v.shape
    sample_idx = np.asarray(sample_idx, dtype=np.intp)
    if sample_idx.size == 0:
        raise InputError("sample must be nonempty")
    if np.any(sample_idx < 0) or np.any(sample_idx >= n):
        raise InputError("sample indices out of range")
    s = sample_idx.size
    best = (-1.0, 0, 0.0)
    for j in range(q):
        col = np.sort(v[:, j])
        sub = np.sort(v[sample_idx, j])
        thresholds = np.unique(col)
        thresholds = np.concatenate([[thresholds[0] - 1.0], thresholds])
        cf = np.searchsorted(col, thresholds, side="right") / n
        cs = np.searchsorted(sub, thresholds, side="right") / s
        disc = np.abs(cf - cs)
        i = int(disc.argmax())
        if disc[i] > best[0]:
            best = (float(disc[i]), j, float(thresholds[i]))
    return VerificationReport(
        kind="range-eps-approx",
        passed=bool(best[0] <= eps + 1e-12),
        max_discrepancy=best[0],
        argmax_x=best[1],
        argmax_r=best[2],
        params={"eps": eps, "n": n, "sample": s, **(params or {})},
        seed=seed,
    )


def verify_function_eps_approx(values, sample_idx, eps: float,
                               params: dict | None = None,
                               seed: int | None = None) -> VerificationReport:
    """Check the r-normalized cost discrepancy of a subset on every range.

    Same threshold enumeration as the counting check, but the per-range
    quantity is | cost(range)/n - cost(S∩range)/|S| | / r.  Zero-radius ranges
    only ever hold zero-valued items, so both cost sums vanish there; such
    ranges are skipped (and flagged if the invariant were ever broken).
    """
    v = _as_value_table(values)
    n, q = v.shape
    sample_idx = np.asarray(sample_idx, dtype=np.intp)
    if sample_idx.size == 0:
        raise InputError("sample must be nonempty")
    s = sample_idx.size
    best = (-1.0, 0, 0.0)
    flagged = []
    for j in range(q):
        col = np.sort(v[:, j])
        sub = np.sort(v[sample_idx, j])
        cum_f = np.concatenate([[0.0], np.cumsum(col)])
        cum_s = np.concatenate([[0.0], np.cumsum(sub)])
        thresholds = np.unique(col)
        for r in thresholds:
            costf = cum_f[np.searchsorted(col, r, side="right")] / n
            costs = cum_s[np.searchsorted(sub, r, side="right")] / s
            gap = abs(costf - costs)
            if r <= 0:
                if gap > 0:
                    flagged.append((j, float(r)))
                continue
            norm = gap / r
            if norm > best[0]:
                best = (float(norm), j, float(r))
    max_disc = max(best[0], 0.0)
    return VerificationReport(
        kind="function-eps-approx",
        passed=bool(max_disc <= eps + 1e-12) and not flagged,
        max_discrepancy=max_disc,
        argmax_x=best[1],
        argmax_r=best[2],
        params={"eps": eps, "n": n, "sample": s, **(params or {})},
        seed=seed,
        details={"flagged_zero_ranges": flagged},
    )
