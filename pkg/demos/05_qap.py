"""
A cellular GA on a QAP
======================

QAPLIB-format instance, 20x20 grid, UPMX crossover and swap mutation.
Nug30 is not bundled, so the demo builds a synthetic instance of the same
kind: locations on a 5x6 grid with rectilinear distances and random flows.
Pass a QAPLIB file path as the first argument to use real data instead.
"""

import sys

import numpy as np

from anisocga import CgaConfig, QapInstance, alpha_sweep, read_qaplib, run_cga
from anisocga.qap import manhattan_grid_distance

if len(sys.argv) > 1:
    inst = read_qaplib(sys.argv[1])
else:
    rng = np.random.default_rng(30)
    flow = np.triu(rng.integers(0, 10, (30, 30)), 1)
    inst = QapInstance(30, manhattan_grid_distance(5, 6), flow + flow.T, "synthetic30")

cfg = CgaConfig(generations=300)
stats = run_cga(inst, cfg, base_seed=6)
trace = stats.best_cost_per_generation
print(f"{inst.name}: best cost {trace[0]:.0f} at start, {trace[-1]:.0f} after {cfg.generations} generations")

# a small alpha sweep; paired seeds across alphas
for row in alpha_sweep(inst, [0.0, 0.5, 0.86, 0.99], 6, cfg, base_seed=6):
    print(f"alpha={row.alpha:<5} mean best {row.mean_best:8.1f}  std {row.std_best:6.1f}  min {row.min_best:.0f}")
