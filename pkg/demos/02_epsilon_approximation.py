"""Epsilon-approximations: sample sizes and brute-force verification.

A subset S of a function family F is an eps-approximation when, for every
center x and radius r, the fraction of items with f(x) <= r is matched by S
within eps.  Random samples of size (c/eps^2)(dim + ln 1/delta) achieve this
with probability 1 - delta; the verifier checks any candidate subset by
enumerating every threshold that matters.
"""

import numpy as np

from coreclust import (
    SampleParams,
    eps_approx_sample_size,
    verify_function_eps_approx,
    verify_range_eps_approx,
)

rng = np.random.default_rng(42)

# 1-D instance: points served by a grid of centers
points = rng.uniform(0, 1, size=200)
centers = np.linspace(0, 1, 15)
values = np.abs(points[:, None] - centers[None, :])   # f_p(x) per (p, x)

eps = delta = 0.2
t = eps_approx_sample_size(SampleParams(eps=eps, delta=delta, dim=2))
print(f"sample size for eps={eps}, delta={delta}, dim=2:", t)

# draw a few samples and verify each one by brute force
fails = 0
trials = 30
for trial in range(trials):
    idx = np.random.default_rng(trial).integers(0, len(points), size=t)
    rep = verify_range_eps_approx(values, idx, eps)
    fails += not rep.passed
print(f"samples failing the counting check: {fails}/{trials} "
      f"(the theory allows a delta={delta} fraction)")

# any counting eps-approximation also approximates costs at 5x the eps,
# normalized by the range radius
idx = np.random.default_rng(7).integers(0, len(points), size=t)
counting = verify_range_eps_approx(values, idx, eps)
costly = verify_function_eps_approx(values, idx, 5 * eps)
print("counting discrepancy:", round(counting.max_discrepancy, 4))
print("cost discrepancy / r:", round(costly.max_discrepancy, 4))
print("within the 5x transfer:",
      costly.max_discrepancy <= 5 * counting.max_discrepancy + 1e-12)
