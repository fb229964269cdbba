"""One-pass streaming coresets via binary merge-and-reduce.

Every full block becomes a level-0 coreset; two coresets at the same level
merge and rebuild one level up, exactly like binary-counter carries.  Storage
stays at block_size * (levels + 1) points no matter how long the stream runs,
and any prefix can be queried at any time.
"""

import numpy as np

from coreclust import PointSet, cost
from coreclust.streaming import (
    StreamState,
    actual_total_weight,
    expected_total_weight,
    stream_push,
    stream_query,
)
from coreclust.io import gaussian_mixture

n, block = 2048, 128
pts = gaussian_mixture(n, 2, 2, seed=12)

state = StreamState(k=2, eps_bar=0.3, seed=0, block_size=block)
for i, p in enumerate(pts, start=1):
    stream_push(state, p)
    if i % (4 * block) == 0:
        cp = state.checkpoint()
        print(f"after {cp['points_seen']:5d} points: "
              f"{cp['stored_points']:4d} stored, levels {cp['bucket_levels']}")

# occupancy equals the binary representation of the block count
blocks = n // block
print("binary of block count:", bin(blocks), "-> levels", state.levels)

# the stored weight matches the inflation ledger exactly
print("ledger weight:", round(expected_total_weight(state), 6),
      "actual:", round(actual_total_weight(state), 6))

# query any prefix cost against the batch ground truth
P = PointSet(pts)
rng = np.random.default_rng(3)
worst = 0.0
for _ in range(50):
    x = pts[rng.choice(n, 2, replace=False)]
    batch = cost(P, x)
    worst = max(worst, abs(stream_query(state, x) - batch) / batch)
print(f"max stream-vs-batch relative gap over 50 queries: {worst:.3f}")
