"""
Takeover on a torus
===================

One best individual on a grid of null-fitness cells, selection only.
We watch N(t), the number of best copies, until it fills the grid.
"""

import numpy as np

from anisocga import GridShape, TakeoverConfig, aggregate_curves, run_replicates

# 64x64 torus, isotropic neighbourhood, binary tournament
cfg = TakeoverConfig(GridShape(64, 64), replicates=50, base_seed=1)
summary = aggregate_curves(run_replicates(cfg))
print(f"takeover time over {summary.replicates} runs: "
      f"avg {summary.avg:.1f}, std {summary.std:.2f}, range {summary.min}-{summary.max}")

# the mean curve is logistic-looking; print a coarse trace
for t in range(0, len(summary.mean_curve), 10):
    bar = "#" * int(60 * summary.mean_curve[t] / cfg.shape.size)
    print(f"{t:4d} {summary.mean_curve[t]:7.1f} {bar}")

# same population, thinner torus: selection pressure drops
for shape in ("32x128", "16x256", "8x512"):
    s = aggregate_curves(run_replicates(TakeoverConfig(GridShape.parse(shape), replicates=30, base_seed=1)))
    print(f"{shape:>7}: avg takeover {s.avg:.1f}")

# the middle of the growth on a rectangle is close to linear; look at the rate
s = aggregate_curves(run_replicates(TakeoverConfig(GridShape(32, 128), replicates=30, base_seed=2)))
mid = s.mean_delta[len(s.mean_delta) // 4: 3 * len(s.mean_delta) // 4]
print(f"32x128 mid-run growth rate {np.mean(mid):.1f} copies per generation")
