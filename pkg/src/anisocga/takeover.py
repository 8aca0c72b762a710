"""Selection-only takeover experiments.

A single best individual (fitness 1) is placed on a grid of null-fitness
cells and selection is the only operator. ``N(t)`` counts best copies after
generation ``t`` and the takeover time is the first ``t`` with
``N(t) == width * height``.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import _kernels
from .grid import CellCoord, GridShape, TorusGrid, neighbor_table, wrap
from .seeding import MASK64
from .selection import (
    AnisotropyParams,
    NeighborDistribution,
    TournamentConfig,
    best_selection_probability,
    neighbor_distribution,
)

log = logging.getLogger(__name__)

@dataclass(frozen=True)
class TakeoverConfig:
    shape: GridShape = GridShape(64, 64)
    params: AnisotropyParams = AnisotropyParams()
    k: int = 2
    max_generations: Optional[int] = None
    replicates: int = 1
    base_seed: int = 0
    with_replacement: bool = True
    seed_cell: Optional[CellCoord] = None

    def __post_init__(self):
        TournamentConfig(self.k, self.with_replacement)
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.max_generations is not None and self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")

    @property
    def generations(self) -> int:
        if self.max_generations is not None:
            return self.max_generations
        return default_max_generations(self.shape, self.k)

    @property
    def distribution(self) -> NeighborDistribution:
        return neighbor_distribution(self.params)


@dataclass
class GrowthCurve:
    n_of_t: np.ndarray
    delta_of_t: np.ndarray = field(init=False)

    def __post_init__(self):
        self.n_of_t = np.asarray(self.n_of_t)
        self.delta_of_t = np.diff(self.n_of_t, prepend=self.n_of_t[:1])

    def __len__(self):
        return len(self.n_of_t)

    def padded(self, length: int) -> np.ndarray:
        """``N(t)`` held at its terminal value out to ``length`` entries."""
        n = self.n_of_t
        if len(n) >= length:
            return n[:length]
        return np.concatenate([n, np.full(length - len(n), n[-1], dtype=n.dtype)])


@dataclass
class TakeoverResult:
    curve: GrowthCurve
    takeover_generation: Optional[int]  # None means the run never filled the grid
    replicate: int = 0
    base_seed: int = 0

    @property
    def reached(self) -> bool:
        return self.takeover_generation is not None


@dataclass
class TakeoverSummary:
    mean_curve: np.ndarray
    avg: float
    std: float
    min: int
    max: int
    reached: int
    replicates: int

    @property
    def mean_delta(self) -> np.ndarray:
        return np.diff(self.mean_curve, prepend=self.mean_curve[:1])

    def half_width(self, confidence=0.95) -> float:
        """Half width of the t-based confidence interval on ``avg``."""
        if self.reached < 2:
            return math.inf
        q = stats.t.ppf(0.5 + confidence / 2, self.reached - 1)
        return q * self.std / math.sqrt(self.reached)


def plateau_rate(l: int, p: float) -> float:
    """Predicted constant growth rate ``2 l p`` of the middle phase."""
    if l < 1:
        raise ValueError("l must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return 2.0 * l * p


def default_max_generations(shape: GridShape, k: int = 2) -> int:
    p = 1.0 - (4.0 / 5.0) ** k
    return max(5000, math.ceil(10 * shape.size / plateau_rate(shape.shortest_side(), p)))


def init_takeover_grid(shape: GridShape, seed_cell: Optional[CellCoord] = None) -> TorusGrid:
    """Null-fitness grid holding one best individual (defaults to the centre cell)."""
    grid = TorusGrid.filled(shape, 0, dtype=np.int8)
    if seed_cell is None:
        seed_cell = CellCoord(shape.width // 2, shape.height // 2)
    grid[wrap(CellCoord(*seed_cell), shape)] = 1
    return grid


def _kernel_args(cfg: TakeoverConfig):
    init = init_takeover_grid(cfg.shape, cfg.seed_cell).flat().copy()
    probs = cfg.distribution.direction_probabilities()
    if not cfg.with_replacement and np.count_nonzero(probs) < cfg.k:
        raise ValueError(f"cannot draw {cfg.k} distinct directions at alpha={cfg.params.alpha}")
    return init, neighbor_table(cfg.shape), probs, np.uint64(cfg.base_seed & MASK64)


def _result(counts, last, generations, size, replicate, base_seed):
    n = counts[: last + 1, 1].copy()
    reached = last if n[-1] == size else None
    return TakeoverResult(GrowthCurve(n), reached, replicate, base_seed)


def run_takeover(cfg: TakeoverConfig, replicate: int = 0) -> TakeoverResult:
    """One replicate; the run stops at takeover or after ``cfg.generations``."""
    init, nbr, probs, seed = _kernel_args(cfg)
    g = cfg.generations
    counts = np.zeros((g + 1, 3), dtype=np.int32)
    last = _kernels.run_labels(
        init, nbr, probs, cfg.k, cfg.with_replacement, seed, replicate, g, True,
        counts, np.empty(0), np.empty(0, dtype=np.int64), np.empty((0, init.size), dtype=init.dtype),
    )
    return _result(counts, last, g, cfg.shape.size, replicate, cfg.base_seed)


def run_replicates(cfg: TakeoverConfig) -> list:
    """``cfg.replicates`` independent runs, replicate ``r`` identical to ``run_takeover(cfg, r)``."""
    init, nbr, probs, seed = _kernel_args(cfg)
    g, r = cfg.generations, cfg.replicates
    counts = np.zeros((r, g + 1, 3), dtype=np.int32)
    last = np.zeros(r, dtype=np.int64)
    _kernels.run_labels_batch(
        init, nbr, probs, cfg.k, cfg.with_replacement, seed, r, g, True,
        counts, np.empty((r, 0)), last, np.empty((0, init.size), dtype=init.dtype),
    )
    return [_result(counts[i], int(last[i]), g, cfg.shape.size, i, cfg.base_seed) for i in range(r)]


def aggregate_curves(results: Sequence[TakeoverResult]) -> TakeoverSummary:
    """Mean growth curve plus takeover statistics over replicates that filled the grid.

    Sample standard deviation (ddof=1), reported as 0 for a single replicate.
    """
    if not results:
        raise ValueError("no results to aggregate")
    gens = [r.takeover_generation for r in results if r.reached]
    if not gens:
        raise ValueError("no replicate reached takeover")
    length = max(len(r.curve) for r in results)
    mean_curve = np.mean([r.curve.padded(length) for r in results], axis=0)
    gens = np.asarray(gens, dtype=float)
    std = float(gens.std(ddof=1)) if len(gens) > 1 else 0.0
    return TakeoverSummary(
        mean_curve=mean_curve,
        avg=float(gens.mean()),
        std=std,
        min=int(gens.min()),
        max=int(gens.max()),
        reached=len(gens),
        replicates=len(results),
    )


def takeover_snapshots(cfg: TakeoverConfig, times: Sequence[int], replicate: int = 0) -> dict:
    """Grids of one replicate at the requested generations (those reached)."""
    init, nbr, probs, seed = _kernel_args(cfg)
    times = np.asarray(sorted(set(int(t) for t in times)), dtype=np.int64)
    g = max(int(times.max()), 0) if times.size else 0
    counts = np.zeros((g + 1, 3), dtype=np.int32)
    snaps = np.zeros((times.size, init.size), dtype=init.dtype)
    last = _kernels.run_labels(
        init, nbr, probs, cfg.k, cfg.with_replacement, seed, replicate, g, False,
        counts, np.empty(0), times, snaps,
    )
    shape = cfg.shape
    return {
        int(t): TorusGrid(shape, snaps[i].reshape(shape.height, shape.width))
        for i, t in enumerate(times)
        if t <= last
    }


def plateau_window(delta, min_length: int = 10, rel_tol: float = 0.15):
    """Longest window of ``delta`` whose values all stay within ``rel_tol`` of the window mean.

    Returns ``(start, stop, mean)`` with ``stop`` exclusive, or ``None`` if no
    window of ``min_length`` generations qualifies. Ties keep the earliest.
    """
    d = np.asarray(delta, dtype=float)
    best = None
    for start in range(len(d)):
        lo = hi = total = 0.0
        for stop in range(start, len(d)):
            v = d[stop]
            if stop == start:
                lo = hi = total = v
            else:
                lo, hi, total = min(lo, v), max(hi, v), total + v
            mean = total / (stop - start + 1)
            if mean <= 0 or hi > mean * (1 + rel_tol) or lo < mean * (1 - rel_tol):
                # the window mean can drift back, so keep extending
                continue
            length = stop - start + 1
            if length >= min_length and (best is None or length > best[1] - best[0]):
                best = (start, stop + 1, mean)
    return best


def mean_takeover(
    shape: GridShape,
    alpha: float,
    k: int = 2,
    replicates: int = 100,
    base_seed: int = 0,
    max_generations: Optional[int] = None,
    with_replacement: bool = True,
):
    """``(mean, half_width_95, fraction_reached)``; the mean is ``inf`` if any replicate stalls."""
    cfg = TakeoverConfig(shape, AnisotropyParams(alpha), k, max_generations, replicates, base_seed, with_replacement)
    results = run_replicates(cfg)
    reached = sum(r.reached for r in results)
    if reached < len(results):
        return math.inf, math.inf, reached / len(results)
    summary = aggregate_curves(results)
    return summary.avg, summary.half_width(), 1.0


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    correlation: float


def fit_alpha_ratio_regression(pairs) -> RegressionFit:
    """Least-squares fit ``alpha = slope * (l/L) + intercept`` over ``(ratio, alpha)`` pairs."""
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[0] < 2:
        raise ValueError("need at least two (ratio, alpha) pairs")
    ratio, alpha = pairs[:, 0], pairs[:, 1]
    if np.all(ratio == ratio[0]):
        raise ValueError("all ratios are equal; the regression is degenerate")
    fit = stats.linregress(ratio, alpha)
    return RegressionFit(float(fit.slope), float(fit.intercept), float(np.clip(fit.rvalue, -1.0, 1.0)))


def equivalent_alpha(
    target_takeover: float,
    shape: GridShape = GridShape(64, 64),
    k: int = 2,
    replicates: int = 100,
    tolerance: float = 0.5,
    base_seed: int = 0,
    max_iterations: int = 20,
    max_generations: Optional[int] = None,
    with_replacement: bool = True,
) -> float:
    """Anisotropy degree whose mean takeover time on ``shape`` matches ``target_takeover``.

    Bisection over ``[0, 1)`` on the noisy, non-decreasing mean takeover
    time. Every probe reuses ``base_seed`` (common random numbers) so the
    probed means stay ordered. Stops when the mean is within ``tolerance``
    of the target or the probe's 95% interval covers it, else after
    ``max_iterations`` probes, returning the closest probe.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if replicates < 2:
        raise ValueError("need at least two replicates per probe")
    generations = max_generations or default_max_generations(shape, k)
    if target_takeover >= generations:
        raise ValueError(f"target {target_takeover} is not reachable within {generations} generations")

    def probe(alpha):
        mean, hw, _ = mean_takeover(shape, alpha, k, replicates, base_seed, generations, with_replacement)
        log.debug("alpha=%.6f mean takeover=%.2f +- %.2f", alpha, mean, hw)
        return mean, hw

    mean, hw = probe(0.0)
    if abs(mean - target_takeover) <= max(tolerance, hw):
        return 0.0
    if mean > target_takeover:
        raise ValueError(f"target {target_takeover} is below the isotropic takeover time {mean:.2f}")

    lo, hi = 0.0, 1.0  # alpha = 1 never fills the grid
    best_alpha, best_err = 0.0, abs(mean - target_takeover)
    for _ in range(max_iterations):
        mid = 0.5 * (lo + hi)
        mean, hw = probe(mid)
        err = abs(mean - target_takeover)
        if err < best_err:
            best_alpha, best_err = mid, err
        if err <= max(tolerance, hw):
            return mid
        if mean < target_takeover:
            lo = mid
        else:
            hi = mid
    return best_alpha


def p_for(cfg: TakeoverConfig) -> float:
    """Best-win probability with one best North neighbour under ``cfg``."""
    return best_selection_probability(cfg.distribution, cfg.k, with_replacement=cfg.with_replacement)
