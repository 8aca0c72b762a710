"""
Anisotropic selection
=====================

alpha tilts the neighbour-sampling probabilities towards North/South.
"""

from anisocga import AnisotropyParams, GridShape, TakeoverConfig, neighbor_distribution
from anisocga.selection import best_selection_probability
from anisocga.takeover import mean_takeover, takeover_snapshots

for alpha in (0.0, 0.5, 1.0):
    d = neighbor_distribution(AnisotropyParams(alpha))
    print(f"alpha={alpha}: C N S E W = {d.direction_probabilities().round(3)}")

# chance that a binary tournament picks a single best North neighbour
print("p (with replacement)   =", best_selection_probability(neighbor_distribution(AnisotropyParams()), 2))
print("p (without replacement)=", best_selection_probability(neighbor_distribution(AnisotropyParams()), 2,
                                                              with_replacement=False))

# takeover slows down slowly at first, then sharply near alpha = 1
shape = GridShape(64, 64)
for alpha in (0.0, 0.3, 0.6, 0.8, 0.9, 0.95):
    mean, hw, _ = mean_takeover(shape, alpha, replicates=50, base_seed=3)
    print(f"alpha={alpha:<4}: takeover {mean:6.1f} +- {hw:.1f}")

# at alpha=1 the best copies never leave their column
snap = takeover_snapshots(TakeoverConfig(GridShape(16, 16), AnisotropyParams(1.0), max_generations=60), [60])[60]
for row in snap.cells:
    print("".join("#" if v else "." for v in row))
