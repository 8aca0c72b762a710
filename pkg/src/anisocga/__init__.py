"""Cellular genetic algorithm with anisotropic selection on a toroidal grid."""

from .grid import CellCoord, Direction, GridShape, TorusGrid, synchronous_step, von_neumann, wrap
from .seeding import CellStream, derive_seed
from .selection import (
    AnisotropyParams,
    NeighborDistribution,
    TournamentConfig,
    anisotropic_tournament,
    neighbor_distribution,
    replace,
    sample_direction,
)
from .takeover import (
    GrowthCurve,
    TakeoverConfig,
    TakeoverResult,
    aggregate_curves,
    equivalent_alpha,
    fit_alpha_ratio_regression,
    init_takeover_grid,
    plateau_rate,
    run_replicates,
    run_takeover,
)
from .niching import init_two_best, mixing_index, niching_replicates, run_niching
from .qap import (
    CgaConfig,
    QapInstance,
    alpha_sweep,
    objective,
    parse_qaplib,
    parse_qaplib_solution,
    read_qaplib,
    read_qaplib_solution,
    verify_best_known,
    run_cga,
    swap_mutation,
    upmx_crossover,
)

__version__ = "0.1.0"
