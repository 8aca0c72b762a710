"""Anisotropic selection on the Von Neumann fuzzy neighbourhood.

The anisotropy degree ``alpha`` splits the non-centre probability mass
between the vertical pair (North, South) and the horizontal pair (East,
West)::

    p_ns = (1 - p_c) / 2 * (1 + alpha)
    p_ew = (1 - p_c) / 2 * (1 - alpha)

``p_ns`` and ``p_ew`` are pair totals; each single direction gets half.

These functions are the readable reference route. The numba kernels in
:mod:`anisocga._kernels` consume random numbers in exactly the same order
and are tested for bit-identical grids against them.
"""

from dataclasses import dataclass

import numpy as np

from .grid import CellCoord, Direction, TorusGrid, von_neumann


@dataclass(frozen=True)
class AnisotropyParams:
    alpha: float = 0.0
    p_c: float = 0.2

    def __post_init__(self):
        if not -1.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [-1, 1], got {self.alpha}")
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError(f"p_c must lie in [0, 1], got {self.p_c}")


@dataclass(frozen=True)
class NeighborDistribution:
    p_c: float
    p_ns: float
    p_ew: float

    def direction_probabilities(self) -> np.ndarray:
        """Per-direction probabilities in :class:`Direction` order."""
        ns, ew = self.p_ns / 2.0, self.p_ew / 2.0
        return np.array([self.p_c, ns, ns, ew, ew])


UNIFORM = NeighborDistribution(0.2, 0.4, 0.4)


@dataclass(frozen=True)
class TournamentConfig:
    k: int = 2
    with_replacement: bool = True

    def __post_init__(self):
        if not 1 <= self.k <= 5:
            raise ValueError(f"tournament size must lie in [1, 5], got {self.k}")


def neighbor_distribution(params: AnisotropyParams) -> NeighborDistribution:
    half = (1.0 - params.p_c) / 2.0
    return NeighborDistribution(
        p_c=params.p_c,
        p_ns=half * (1.0 + params.alpha),
        p_ew=half * (1.0 - params.alpha),
    )


def _pick(weights, u):
    """Index of the bucket ``u`` falls in, skipping zero-weight buckets.

    Rounding can leave ``u`` past the last cumulative edge; the last
    positive bucket absorbs it.
    """
    acc = 0.0
    last = -1
    for d, w in enumerate(weights):
        if w > 0.0:
            acc += w
            last = d
            if u < acc:
                return d
    return last


def sample_direction(dist: NeighborDistribution, rng) -> Direction:
    return Direction(_pick(dist.direction_probabilities(), rng.random()))


def sample_directions(dist: NeighborDistribution, cfg: TournamentConfig, rng) -> list:
    """Draw the ``cfg.k`` tournament directions.

    Without replacement each draw renormalises over the directions not yet
    taken; this needs at least ``k`` directions with positive probability.
    """
    probs = dist.direction_probabilities()
    if cfg.with_replacement:
        return [Direction(_pick(probs, rng.random())) for _ in range(cfg.k)]
    if np.count_nonzero(probs) < cfg.k:
        raise ValueError(
            f"cannot draw {cfg.k} distinct directions, only {np.count_nonzero(probs)} have positive probability"
        )
    weights = probs.copy()
    out = []
    for _ in range(cfg.k):
        total = 0.0
        for w in weights:
            total += w
        d = _pick(weights, rng.random() * total)
        out.append(Direction(d))
        weights[d] = 0.0
    return out


def _score(value, fitness, maximize):
    f = value if fitness is None else fitness(value)
    return f if maximize else -f


def anisotropic_tournament(
    snapshot: TorusGrid,
    cell: CellCoord,
    dist: NeighborDistribution,
    cfg: TournamentConfig,
    rng,
    fitness=None,
    maximize=True,
):
    """Return the winner of a size-``k`` tournament in the fuzzy neighbourhood.

    ``fitness`` maps a cell value to a comparable number (identity when
    omitted). Ties among equally fit candidates are broken uniformly.
    """
    hood = von_neumann(cell, snapshot.shape)
    best = None
    best_score = None
    ties = 0
    for d in sample_directions(dist, cfg, rng):
        cand = snapshot[hood[d]]
        s = _score(cand, fitness, maximize)
        if best is None or s > best_score:
            best, best_score, ties = cand, s, 1
        elif s == best_score:
            ties += 1
            if rng.random() < 1.0 / ties:
                best = cand
    return best


def replace(current, winner, rng, fitness=None, maximize=True):
    """Keep ``winner`` if strictly fitter, flip a fair coin on equal fitness."""
    sw = _score(winner, fitness, maximize)
    sc = _score(current, fitness, maximize)
    if sw > sc:
        return winner
    if sw == sc and rng.random() < 0.5:
        return winner
    return current


def selection_rule(dist: NeighborDistribution, cfg: TournamentConfig, fitness=None, maximize=True):
    """Cell rule for :func:`anisocga.grid.synchronous_step`: tournament then replace."""

    def rule(snapshot, cell, rng):
        winner = anisotropic_tournament(snapshot, cell, dist, cfg, rng, fitness, maximize)
        return replace(snapshot[cell], winner, rng, fitness, maximize)

    return rule


def best_selection_probability(
    dist: NeighborDistribution,
    k: int,
    direction: Direction = Direction.NORTH,
    with_replacement: bool = True,
) -> float:
    """Probability that one fixed neighbour is among the ``k`` draws.

    When that neighbour holds the only best copy this is the probability it
    wins the tournament (the ``p`` of the ``2 l p`` growth-rate plateau).
    """
    probs = dist.direction_probabilities()
    q = probs[direction]
    if with_replacement:
        return 1.0 - (1.0 - q) ** k

    def miss(weights, draws):
        if draws == 0:
            return 1.0
        total = weights.sum()
        out = 0.0
        for d, w in enumerate(weights):
            if w > 0.0 and d != direction:
                nxt = weights.copy()
                nxt[d] = 0.0
                out += w / total * miss(nxt, draws - 1)
        return out

    return 1.0 - miss(probs.copy(), k)

