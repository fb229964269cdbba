"""Bicriteria approximation by peeling.

Each round finds a robust median of what is left, removes the ~71% of points
it serves best, and recurses; the union of round centers costs at most
(1 + eps) * alpha times the optimal k-center cost while using O(beta log n)
centers.  More centers than k, but a constant-factor cost -- the launching pad
for every coreset construction here.
"""

import numpy as np

from coreclust import PointSet, Metric, brute_force_k_median, metric_kmedian_bicriteria
from coreclust.bicriteria import make_metric_provider, peel_bicriteria
from coreclust.sampling import rng_for
from coreclust.io import gaussian_mixture

# the raw peeling engine, run at the internal eps so the loop engages on a
# desk-sized input (the public wrapper rescales eps by 1/100, which pushes
# the loop guard to 1000/eps points)
pts = gaussian_mixture(1500, 2, 3, seed=5)
provider = make_metric_provider(k=3, beta=30)
res = peel_bicriteria(pts, np.ones(len(pts)), Metric(), eps_internal=0.05,
                      provider=provider, rng=rng_for(0, 1))
print("peeling rounds:", len(res.rounds))
for i, r in enumerate(res.rounds, start=1):
    print(f"  round {i}: removed {int(r.amounts.sum()):4d} points "
          f"using {len(np.atleast_2d(r.centers))} centers")
print("total centers |B|:", res.n_centers, "(bound:", res.center_bound(), ")")

# the rounds partition the data exactly
consumed = np.zeros(len(pts))
for r in res.rounds:
    consumed[r.indices] += r.amounts
print("every point consumed exactly once:", bool(np.allclose(consumed, 1.0)))

# the public wrapper: clean (2 + eps) * optimum contract over data candidates
small = gaussian_mixture(400, 2, 3, seed=6)
P = PointSet(small)
bic = metric_kmedian_bicriteria(P, k=3, eps=0.3, delta=0.1, seed=0, beta=25)
opt = brute_force_k_median(P, 3, candidates=small[::8])  # coarse reference
print("\npublic contract on n=400: cost(P, B) =", round(bic.total_cost, 2),
      "vs coarse 3-median", round(opt.cost, 2),
      "-> ratio", round(bic.total_cost / opt.cost, 3))
