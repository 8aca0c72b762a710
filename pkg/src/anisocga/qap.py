"""Quadratic assignment with a cellular GA driven by anisotropic selection.

Permutations are 0-based numpy integer arrays: ``p[i]`` is the location of
facility ``i``. The cost is ``sum_ij distance[p[i], p[j]] * flow[i, j]``
(minimised). QAPLIB files list the flow matrix first, then distance.

The per-cell operators here are the reference route; :func:`run_cga` runs
the compiled kernel, which reproduces :func:`cga_cell_rule` draw for draw.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _qap_kernels
from .grid import GridShape, TorusGrid, neighbor_table
from .seeding import MASK64, CellStream
from .selection import (
    AnisotropyParams,
    TournamentConfig,
    anisotropic_tournament,
    neighbor_distribution,
    replace,
)


@dataclass
class QapInstance:
    n: int
    distance: np.ndarray
    flow: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.distance = np.asarray(self.distance)
        self.flow = np.asarray(self.flow)
        if self.n < 1:
            raise ValueError("n must be positive")
        for label, m in (("distance", self.distance), ("flow", self.flow)):
            if m.shape != (self.n, self.n):
                raise ValueError(f"{label} matrix has shape {m.shape}, expected ({self.n}, {self.n})")
            if np.any(m < 0):
                raise ValueError(f"{label} matrix has negative entries")

    def swapped(self) -> "QapInstance":
        return QapInstance(self.n, self.flow, self.distance, self.name)


def parse_qaplib(text: str, name: str = "") -> QapInstance:
    """Parse QAPLIB text: ``n``, then the n*n flow matrix, then the n*n distance matrix."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty instance text")
    try:
        n = int(tokens[0])
    except ValueError:
        raise ValueError(f"problem size {tokens[0]!r} is not an integer") from None
    if n <= 0:
        raise ValueError(f"problem size must be positive, got {n}")
    expected = 1 + 2 * n * n
    if len(tokens) != expected:
        raise ValueError(f"expected {expected} tokens, found {len(tokens)}")
    try:
        values = np.array([int(t) for t in tokens[1:]], dtype=np.int64)
    except ValueError as exc:
        raise ValueError(f"non-numeric token in matrix data: {exc}") from None
    flow = values[: n * n].reshape(n, n)
    distance = values[n * n :].reshape(n, n)
    return QapInstance(n, distance, flow, name)


def read_qaplib(path) -> QapInstance:
    path = Path(path)
    return parse_qaplib(path.read_text(), name=path.stem)


def parse_qaplib_solution(text: str):
    """Parse a QAPLIB ``.sln`` record: ``n cost`` then the 1-based assignment.

    Returns ``(n, cost, permutation_1based)``.
    """
    tokens = text.replace(",", " ").split()
    if len(tokens) < 2:
        raise ValueError("solution record needs a size and a cost")
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise ValueError(f"non-numeric token in solution record: {exc}") from None
    n, cost, perm = values[0], values[1], values[2:]
    if len(perm) != n:
        raise ValueError(f"expected {n} assignment entries, found {len(perm)}")
    return n, cost, perm


def read_qaplib_solution(path):
    return parse_qaplib_solution(Path(path).read_text())


def is_permutation(p, n: Optional[int] = None) -> bool:
    p = np.asarray(p)
    n = len(p) if n is None else n
    return p.shape == (n,) and np.array_equal(np.sort(p), np.arange(n))


def objective(instance: QapInstance, p) -> float:
    p = np.asarray(p)
    if p.shape != (instance.n,):
        raise ValueError(f"permutation of length {p.size} for an instance of size {instance.n}")
    return (instance.distance[np.ix_(p, p)] * instance.flow).sum().item()


def verify_best_known(instance: QapInstance, permutation_1based: Sequence[int], cost) -> QapInstance:
    """Check a published optimum against the parsed matrices.

    Returns the instance (with flow and distance exchanged if that is the
    reading under which the record evaluates correctly) or raises.
    """
    p = np.asarray(permutation_1based, dtype=np.int64) - 1
    if not is_permutation(p, instance.n):
        raise ValueError("record is not a permutation of 1..n")
    if objective(instance, p) == cost:
        return instance
    other = instance.swapped()
    if objective(other, p) == cost:
        return other
    raise ValueError(f"record evaluates to {objective(instance, p)}, expected {cost}")


def random_permutation(n: int, rng) -> np.ndarray:
    """Fisher-Yates from the identity."""
    p = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.random() * (i + 1))
        p[i], p[j] = p[j], p[i]
    return p


def upmx_crossover(p1, p2, repeats: int, rng):
    """Repeated position swaps that keep both children valid permutations.

    Each round draws a position ``i``, finds ``j`` with ``c2[j] == c1[i]``
    and ``k`` with ``c1[k] == c2[i]`` in the current working copies, then
    swaps ``c1[i], c1[j]`` and ``c2[i], c2[k]``.
    """
    c1 = np.array(p1, copy=True)
    c2 = np.array(p2, copy=True)
    n = len(c1)
    for _ in range(repeats):
        i = int(rng.random() * n)
        j = int(np.flatnonzero(c2 == c1[i])[0])
        k = int(np.flatnonzero(c1 == c2[i])[0])
        c1[i], c1[j] = c1[j], c1[i]
        c2[i], c2[k] = c2[k], c2[i]
    return c1, c2


def poisson_count(mean: float, u: float) -> int:
    """Inverse-CDF Poisson draw from one uniform."""
    if not 0.0 <= mean <= 700.0:
        raise ValueError("Poisson mean must lie in [0, 700]")
    k = 0
    p = math.exp(-mean)
    s = p
    while u >= s and p > 0.0:
        k += 1
        p *= mean / k
        s += p
    return k


def swap_mutation(p, mean: float, rng, fixed: bool = False):
    """Apply a Poisson(``mean``) number of random transpositions (exactly ``int(mean)`` if ``fixed``)."""
    child = np.array(p, copy=True)
    n = len(child)
    m = int(mean) if fixed else poisson_count(mean, rng.random())
    if n < 2:
        return child
    for _ in range(m):
        i = int(rng.random() * n)
        j = int(rng.random() * (n - 1))
        if j >= i:
            j += 1
        child[i], child[j] = child[j], child[i]
    return child


@dataclass(frozen=True)
class CgaConfig:
    grid: GridShape = GridShape(20, 20)
    params: AnisotropyParams = AnisotropyParams()
    k: int = 2
    generations: int = 1500
    crossover_rate: float = 1.0
    mutation_mean: float = 1.0
    upmx_repeats: Optional[int] = None  # None means n // 3
    fixed_mutation: bool = False
    with_replacement: bool = True

    def __post_init__(self):
        TournamentConfig(self.k, self.with_replacement)
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if not 0.0 <= self.mutation_mean <= 700.0:
            raise ValueError("mutation_mean must lie in [0, 700]")

    def repeats(self, n: int) -> int:
        return n // 3 if self.upmx_repeats is None else self.upmx_repeats


def cga_cell_rule(instance: QapInstance, cfg: CgaConfig):
    """Reference cell rule over a ``(height, width, n)`` permutation grid."""
    dist = neighbor_distribution(cfg.params)
    tcfg = TournamentConfig(cfg.k, cfg.with_replacement)
    repeats = cfg.repeats(instance.n)

    def cost(p):
        return objective(instance, p)

    def rule(snapshot, cell, rng):
        a = anisotropic_tournament(snapshot, cell, dist, tcfg, rng, fitness=cost, maximize=False)
        b = anisotropic_tournament(snapshot, cell, dist, tcfg, rng, fitness=cost, maximize=False)
        if rng.random() < cfg.crossover_rate:
            c1, c2 = upmx_crossover(a, b, repeats, rng)
        else:
            c1, c2 = a.copy(), b.copy()
        child = c1 if cost(c1) <= cost(c2) else c2
        child = swap_mutation(child, cfg.mutation_mean, rng, cfg.fixed_mutation)
        return replace(snapshot[cell], child, rng, fitness=cost, maximize=False)

    return rule


def initial_population(instance: QapInstance, shape: GridShape, base_seed: int = 0, replicate: int = 0) -> TorusGrid:
    """Uniform random permutations, cell ``c`` drawn from stream ``(seed, replicate, 0, c)``."""
    cells = np.empty((shape.size, instance.n), dtype=np.int64)
    for c in range(shape.size):
        cells[c] = random_permutation(instance.n, CellStream.for_cell(base_seed, replicate, 0, c))
    return TorusGrid(shape, cells.reshape(shape.height, shape.width, instance.n))


@dataclass
class RunStats:
    best_cost_per_generation: np.ndarray
    final_best_cost: float
    final_best_permutation: np.ndarray
    replicate: int = 0
    base_seed: int = 0


class CgaRun:
    """Compiled cGA state that can be advanced generation by generation."""

    def __init__(self, instance: QapInstance, cfg: CgaConfig, base_seed: int = 0, replicate: int = 0):
        self.instance = instance
        self.cfg = cfg
        self.base_seed = base_seed
        self.replicate = replicate
        self._d = np.ascontiguousarray(instance.distance, dtype=np.float64)
        self._f = np.ascontiguousarray(instance.flow, dtype=np.float64)
        self._nbr = neighbor_table(cfg.grid)
        self._probs = neighbor_distribution(cfg.params).direction_probabilities()
        self._seed = np.uint64(base_seed & MASK64)
        self.population = np.empty((cfg.grid.size, instance.n), dtype=np.int64)
        self.costs = np.empty(cfg.grid.size)
        _qap_kernels.init_population(self.population, self.costs, self._d, self._f, self._seed, replicate)
        self.generation = 0

    def step(self, generations: int = 1) -> np.ndarray:
        """Advance; returns the best grid cost after each new generation."""
        cfg = self.cfg
        trace = np.empty(generations)
        _qap_kernels.cga_generations(
            self.population, self.costs, self._d, self._f, self._nbr, self._probs, cfg.k,
            cfg.with_replacement, cfg.crossover_rate, cfg.mutation_mean, cfg.fixed_mutation,
            cfg.repeats(self.instance.n), self._seed, self.replicate,
            self.generation + 1, self.generation + generations, trace,
        )
        self.generation += generations
        return trace

    def grid(self) -> TorusGrid:
        shape = self.cfg.grid
        return TorusGrid(shape, self.population.reshape(shape.height, shape.width, self.instance.n).copy())


def run_cga(instance: QapInstance, cfg: CgaConfig, base_seed: int = 0, replicate: int = 0) -> RunStats:
    """Full optimisation run with global-best bookkeeping (the grid itself is not elitist)."""
    run = CgaRun(instance, cfg, base_seed, replicate)
    best_idx = int(np.argmin(run.costs))
    best_cost, best_perm = float(run.costs[best_idx]), run.population[best_idx].copy()
    trace = [best_cost]
    for _ in range(cfg.generations):
        gen_best = run.step(1)[0]
        if gen_best < best_cost:
            best_idx = int(np.argmin(run.costs))
            best_cost, best_perm = float(run.costs[best_idx]), run.population[best_idx].copy()
        trace.append(best_cost)
    return RunStats(np.asarray(trace), best_cost, best_perm, replicate, base_seed)


def run_many(instance: QapInstance, cfg: CgaConfig, runs: int, base_seed: int = 0):
    """Final best cost and trace of ``runs`` replicates, run in parallel.

    Row ``r`` matches ``run_cga(instance, cfg, base_seed, r)``.
    """
    d = np.ascontiguousarray(instance.distance, dtype=np.float64)
    f = np.ascontiguousarray(instance.flow, dtype=np.float64)
    traces = np.empty((runs, cfg.generations + 1))
    best = np.empty((runs, instance.n), dtype=np.int64)
    _qap_kernels.run_batch(
        d, f, neighbor_table(cfg.grid), neighbor_distribution(cfg.params).direction_probabilities(),
        cfg.grid.size, cfg.k, cfg.with_replacement, cfg.crossover_rate, cfg.mutation_mean,
        cfg.fixed_mutation, cfg.repeats(instance.n), np.uint64(base_seed & MASK64),
        runs, cfg.generations, traces, best,
    )
    return [RunStats(traces[r], float(traces[r, -1]), best[r], r, base_seed) for r in range(runs)]


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    mean_best: float
    std_best: float
    min_best: float
    runs: int
    finals: np.ndarray = field(repr=False, compare=False, default=None)


def alpha_sweep(
    instance: QapInstance,
    alphas: Sequence[float],
    runs_per_alpha: int,
    cfg: CgaConfig = CgaConfig(),
    base_seed: int = 0,
) -> list:
    """Per-alpha statistics of the final best cost, sorted by alpha.

    Replicate ``r`` uses the same seed at every alpha, so rows are paired.
    """
    if runs_per_alpha < 1:
        raise ValueError("runs_per_alpha must be >= 1")
    rows = []
    for alpha in sorted(alphas):
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"sweep alphas must lie in [0, 1), got {alpha}")
        acfg = CgaConfig(**{**cfg.__dict__, "params": AnisotropyParams(alpha, cfg.params.p_c)})
        finals = np.array([s.final_best_cost for s in run_many(instance, acfg, runs_per_alpha, base_seed)])
        std = float(finals.std(ddof=1)) if runs_per_alpha > 1 else 0.0
        rows.append(SweepRow(alpha, float(finals.mean()), std, float(finals.min()), runs_per_alpha, finals))
    return rows


def manhattan_grid_distance(rows: int, cols: int) -> np.ndarray:
    """Rectilinear distances between the cells of a ``rows x cols`` location grid."""
    ys, xs = np.divmod(np.arange(rows * cols), cols)
    return np.abs(ys[:, None] - ys[None, :]) + np.abs(xs[:, None] - xs[None, :])


def random_instance(n: int, rng: np.random.Generator, high: int = 10, name: str = "") -> QapInstance:
    """Symmetric integer instance with zero diagonals (for tests and demos)."""
    def sym():
        m = rng.integers(0, high, size=(n, n))
        m = np.triu(m, 1)
        return m + m.T

    return QapInstance(n, sym(), sym(), name or f"rand{n}")
