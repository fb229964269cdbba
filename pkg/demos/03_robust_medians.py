"""Robust medians: good centers for most points, verified by enumeration.

A (gamma, eps, alpha, beta)-median is a set of beta centers whose cost on the
ceil((1-eps) gamma n) best-served points is within alpha of the best
gamma-trimmed single-center cost.  Small sets are solved exhaustively; large
sets reduce to a sample, and in metric spaces the whole sample works with
alpha = 2 by the triangle inequality.
"""

import numpy as np

from coreclust import (
    PointSet,
    RobustParams,
    exhaustive_robust_median,
    metric_snap_median,
    sampled_robust_median,
    verify_robust_median,
)
from coreclust.robust import exhaustive_provider
from coreclust.sampling import SampleParams

rng = np.random.default_rng(0)

# 90% of the data is a tight cluster, 10% are far outliers: the gamma-trimmed
# objective ignores the outliers entirely
inliers = rng.normal(size=(90, 2))
outliers = rng.normal(loc=60.0, size=(10, 2))
pts = np.concatenate([inliers, outliers])
P = PointSet(pts)

params = RobustParams(gamma=0.8, eps=0.1, alpha=1.0, beta=1)
res = exhaustive_robust_median(P, params, candidates=pts)
print("exhaustive robust median:", np.round(res.centers, 3),
      "trimmed cost:", round(res.trimmed_cost, 3))

rep = verify_robust_median(P, res.centers,
                           RobustParams(0.72, 0.1, 1.0, 1), candidates=pts)
print("verification ratio:", round(rep.max_discrepancy, 4), "pass:", rep.passed)

# sampling reduction: run the exhaustive routine on a sample only
big = PointSet(rng.normal(size=(5000, 2)))
res = sampled_robust_median(big, RobustParams(0.75, 0.2, 1.0, 1), seed=1,
                            provider=exhaustive_provider,
                            sp=SampleParams(eps=0.2, delta=0.1, dim=3))
rep = verify_robust_median(big, res.centers,
                           RobustParams(0.75, 0.8, 1.0, 1),
                           candidates=big.points[:500])
print("sampled median verifies on the big set:", rep.passed)

# metric snap: the sample itself is a factor-2 robust median
sub = PointSet(pts[rng.choice(100, 20, replace=False)])
snap = metric_snap_median(sub)
print("snap certificate alpha:", snap.alpha, "centers kept:", len(snap.centers))
