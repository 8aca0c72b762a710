"""Two equally fit optima seeded far apart in the least favoured direction.

Cells hold a lineage label: ``EMPTY`` (null fitness), ``LINEAGE_A`` or
``LINEAGE_B`` (both fitness 1). Equal-fitness contests between the two
lineages go through the ordinary 0.5 replacement coin.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Sequence

import numpy as np

from . import _kernels
from .grid import CellCoord, GridShape, TorusGrid, neighbor_table
from .seeding import MASK64
from .selection import AnisotropyParams, TournamentConfig, neighbor_distribution


class LineageCell(IntEnum):
    EMPTY = _kernels.EMPTY
    LINEAGE_A = _kernels.LINEAGE_A
    LINEAGE_B = _kernels.LINEAGE_B


PALETTE = {LineageCell.EMPTY: 255, LineageCell.LINEAGE_A: 160, LineageCell.LINEAGE_B: 64}


def seed_cells(shape: GridShape):
    """Same row, a quarter and three quarters across: maximal East-West separation."""
    y = shape.height // 2
    return CellCoord(shape.width // 4, y), CellCoord(3 * shape.width // 4, y)


def init_two_best(shape: GridShape, params: AnisotropyParams = None) -> TorusGrid:
    """``params`` is accepted for symmetry with the other initialisers; the placement is fixed."""
    if shape.width < 2:
        raise ValueError("need width >= 2 to separate the two optima horizontally")
    grid = TorusGrid.filled(shape, LineageCell.EMPTY, dtype=np.int8)
    a, b = seed_cells(shape)
    grid[a] = LineageCell.LINEAGE_A
    grid[b] = LineageCell.LINEAGE_B
    return grid


def lineage_counts(grid: TorusGrid):
    """``(count_a, count_b, count_empty)``."""
    flat = grid.flat()
    return (
        int(np.count_nonzero(flat == LineageCell.LINEAGE_A)),
        int(np.count_nonzero(flat == LineageCell.LINEAGE_B)),
        int(np.count_nonzero(flat == LineageCell.EMPTY)),
    )


def mixing_index(grid: TorusGrid) -> float:
    """Fraction of occupied cells with an opposite-lineage cell among their four neighbours."""
    labels = np.ascontiguousarray(grid.flat(), dtype=np.int8)
    return float(_kernels.mixing_index(labels, neighbor_table(grid.shape)))


@dataclass
class NichingReport:
    shape: GridShape
    alpha: float
    counts: np.ndarray  # (generations + 1, 3) columns count_a, count_b, count_empty
    mixing: np.ndarray
    snapshots: dict = field(default_factory=dict)

    @property
    def generations(self) -> int:
        return len(self.mixing) - 1

    def both_survive(self) -> bool:
        return bool(self.counts[-1, 0] > 0 and self.counts[-1, 1] > 0)


def _reorder(kernel_counts):
    # kernel columns are (empty, A, B)
    return kernel_counts[:, [1, 2, 0]]


def _setup(shape, params, k, with_replacement):
    TournamentConfig(k, with_replacement)
    init = init_two_best(shape, params).flat().copy()
    probs = neighbor_distribution(params).direction_probabilities()
    return init, neighbor_table(shape), probs


def run_niching(
    shape: GridShape,
    params: AnisotropyParams,
    k: int = 2,
    generations: int = 1000,
    snapshot_times: Sequence[int] = (),
    base_seed: int = 0,
    replicate: int = 0,
    with_replacement: bool = True,
) -> NichingReport:
    """Selection-only spreading of the two optima, recorded every generation."""
    snapshot_times = sorted(set(int(t) for t in snapshot_times))
    if snapshot_times and max(snapshot_times) > generations:
        raise ValueError("snapshot time beyond the last generation")
    init, nbr, probs = _setup(shape, params, k, with_replacement)
    counts = np.zeros((generations + 1, 3), dtype=np.int32)
    mixing = np.zeros(generations + 1)
    times = np.asarray(snapshot_times, dtype=np.int64)
    snaps = np.zeros((len(times), init.size), dtype=init.dtype)
    _kernels.run_labels(
        init, nbr, probs, k, with_replacement, np.uint64(base_seed & MASK64), replicate,
        generations, False, counts, mixing, times, snaps,
    )
    snapshots = {int(t): TorusGrid(shape, snaps[i].reshape(shape.height, shape.width)) for i, t in enumerate(times)}
    return NichingReport(shape, params.alpha, _reorder(counts), mixing, snapshots)


@dataclass
class NichingSample:
    """Final-generation outcome of many replicates."""

    alpha: float
    final_counts: np.ndarray  # (replicates, 3) columns count_a, count_b, count_empty
    final_mixing: np.ndarray

    @property
    def survival_rate(self) -> float:
        return float(np.mean((self.final_counts[:, 0] > 0) & (self.final_counts[:, 1] > 0)))


def niching_replicates(
    shape: GridShape,
    params: AnisotropyParams,
    k: int = 2,
    generations: int = 1000,
    replicates: int = 100,
    base_seed: int = 0,
    with_replacement: bool = True,
) -> NichingSample:
    """Replicate ``r`` matches ``run_niching(..., replicate=r)`` at the final generation."""
    init, nbr, probs = _setup(shape, params, k, with_replacement)
    counts = np.zeros((replicates, generations + 1, 3), dtype=np.int32)
    last = np.zeros(replicates, dtype=np.int64)
    finals = np.zeros((replicates, init.size), dtype=init.dtype)
    _kernels.run_labels_batch(
        init, nbr, probs, k, with_replacement, np.uint64(base_seed & MASK64), replicates,
        generations, False, counts, np.empty((replicates, 0)), last, finals,
    )
    mixing = np.array([_kernels.mixing_index(row, nbr) for row in finals])
    return NichingSample(params.alpha, counts[:, -1, :][:, [1, 2, 0]], mixing)
