"""
Shape versus anisotropy
=======================

Which alpha on a square grid gives the takeover time of a given rectangle?
The answer follows alpha ~ 1 - l/L.
"""

from anisocga import GridShape, equivalent_alpha, fit_alpha_ratio_regression
from anisocga.takeover import mean_takeover

square = GridShape(64, 64)
pairs = []
for text in ("32x128", "16x256", "8x512"):
    rect = GridShape.parse(text)
    target, _, _ = mean_takeover(rect, 0.0, replicates=40, base_seed=4)
    alpha = equivalent_alpha(target, square, replicates=40, base_seed=4)
    pairs.append((rect.ratio(), alpha))
    print(f"{text:>7}: l/L={rect.ratio():.4f} takeover {target:6.1f} -> alpha {alpha:.4f}  (1 - l/L = {1 - rect.ratio():.4f})")

pairs.append((1.0, 0.0))
fit = fit_alpha_ratio_regression(pairs)
print(f"alpha = {fit.slope:.3f} * l/L + {fit.intercept:.3f}, r = {fit.correlation:.4f}")
