"""Solvers: the exact oracle, local search, and solving on a coreset.

Brute force enumerates candidate k-subsets (the ground truth at desk scale);
single-swap local search handles weighted instances the oracle cannot; and
solve_on_coreset shows the point of the whole exercise -- solve small, answer
for the full data.
"""

import time

import numpy as np

from coreclust import (
    PointSet,
    brute_force_k_median,
    constant_factor_metric_kmedian,
    solve_on_coreset,
    weighted_local_search,
)
from coreclust.io import gaussian_mixture

pts = gaussian_mixture(18, 2, 2, seed=8, spread=8.0)
P = PointSet(pts)

exact = brute_force_k_median(P, 2, candidates=pts)
print("brute force:", round(exact.cost, 4),
      f"({exact.evaluations} candidate sets)")

local = weighted_local_search(P, 2, candidates=pts, seed=0)
print("local search:", round(local.cost, 4),
      f"({local.evaluations} evaluations)")

cf = constant_factor_metric_kmedian(P, 2, 0.3, 0.1, seed=0)
print("constant-factor pipeline:", round(cf.cost, 4))

# now a set large enough that enumeration is hopeless end to end
big = PointSet(gaussian_mixture(3000, 2, 3, seed=9))
t0 = time.time()
res, audit = solve_on_coreset(big, 3, 0.2, seed=1)
print(f"\nsolve-on-coreset for n=3000: cost {res.cost:.2f} "
      f"in {time.time() - t0:.2f}s")
print("  coreset size:", audit["coreset_size"],
      " coreset cost at solution:", round(audit["coreset_cost"], 2))
rel = abs(audit["coreset_cost"] - audit["true_cost"]) / audit["true_cost"]
print("  coreset-vs-true gap at the solution:", round(rel, 4))
