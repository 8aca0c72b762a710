import math

import numpy as np
import pytest

from anisocga import _kernels
from anisocga.grid import CellCoord, GridShape, neighbor_table
from anisocga.selection import AnisotropyParams
from anisocga.takeover import (
    GrowthCurve,
    TakeoverConfig,
    TakeoverResult,
    aggregate_curves,
    default_max_generations,
    equivalent_alpha,
    fit_alpha_ratio_regression,
    init_takeover_grid,
    mean_takeover,
    p_for,
    plateau_rate,
    plateau_window,
    run_replicates,
    run_takeover,
    takeover_snapshots,
)


def test_init_places_single_best_at_centre():
    g = init_takeover_grid(GridShape(8, 4))
    assert g.cells.sum() == 1 and g[4, 2] == 1


def test_init_wraps_explicit_seed():
    g = init_takeover_grid(GridShape(8, 4), CellCoord(9, -1))
    assert g[1, 3] == 1


def test_single_cell_grid_is_taken_over_immediately():
    res = run_takeover(TakeoverConfig(GridShape(1, 1), max_generations=5))
    assert res.takeover_generation == 0
    assert list(res.curve.n_of_t) == [1]


def test_growth_is_monotone_and_takeover_is_first_full_generation():
    cfg = TakeoverConfig(GridShape(32, 32), AnisotropyParams(0.4), replicates=5, base_seed=1)
    for res in run_replicates(cfg):
        n = res.curve.n_of_t
        assert n[0] == 1
        assert np.all(np.diff(n) >= 0)
        assert n[res.takeover_generation] == 1024
        assert np.all(n[:-1] < 1024)
        assert res.curve.delta_of_t[0] == 0


def test_full_vertical_anisotropy_stays_in_seed_column():
    shape = GridShape(16, 16)
    cfg = TakeoverConfig(shape, AnisotropyParams(1.0), max_generations=200)
    res = run_takeover(cfg)
    assert not res.reached and res.curve.n_of_t[-1] == 16
    snap = takeover_snapshots(cfg, [200])[200]
    assert np.array_equal(np.nonzero(snap.cells.any(axis=0))[0], [8])


def test_shape_pressure_ordering():
    # thinner tori take longer at equal population size
    means = [
        mean_takeover(GridShape.parse(s), 0.0, replicates=20, base_seed=4)[0]
        for s in ("32x32", "16x64", "8x128", "4x256")
    ]
    assert means == sorted(means)
    assert means[-1] > 2 * means[0]


def test_anisotropy_slows_takeover():
    shape = GridShape(32, 32)
    t0 = mean_takeover(shape, 0.0, replicates=20, base_seed=2)[0]
    t9 = mean_takeover(shape, 0.9, replicates=20, base_seed=2)[0]
    assert t9 > t0 * 1.2


def _flat_front_delta(shape, wr):
    init = np.zeros(shape.size, dtype=np.int8)
    init[: shape.width] = 1  # one full row of best copies
    reps = 400
    counts = np.zeros((reps, 2, 3), dtype=np.int32)
    dist = TakeoverConfig(shape).distribution.direction_probabilities()
    _kernels.run_labels_batch(init, neighbor_table(shape), dist, 2, wr, np.uint64(8), reps, 1, False,
                              counts, np.empty((reps, 0)), np.zeros(reps, dtype=np.int64),
                              np.empty((0, shape.size), dtype=np.int8))
    return (counts[:, 1, 1] - counts[:, 0, 1]).astype(float)


@pytest.mark.parametrize("wr", [True, False])
def test_flat_front_first_step_matches_two_l_p(wr):
    shape = GridShape(32, 128)
    deltas = _flat_front_delta(shape, wr)
    cfg = TakeoverConfig(shape, with_replacement=wr)
    expected = plateau_rate(shape.shortest_side(), p_for(cfg))
    assert abs(deltas.mean() - expected) < 4 * deltas.std(ddof=1) / math.sqrt(len(deltas))


def test_plateau_rate_examples():
    assert plateau_rate(64, 0.36) == pytest.approx(46.08)
    assert plateau_rate(1, 0.5) == 1.0
    with pytest.raises(ValueError):
        plateau_rate(0, 0.3)
    with pytest.raises(ValueError):
        plateau_rate(4, 1.5)


def test_default_horizon_is_generous():
    assert default_max_generations(GridShape(64, 64)) == 5000
    assert default_max_generations(GridShape(2, 2048)) >= 10 * 4096 / (2 * 2 * 0.36) - 1


def test_p_for_binary_tournament():
    assert p_for(TakeoverConfig()) == pytest.approx(0.36)
    assert p_for(TakeoverConfig(with_replacement=False)) == pytest.approx(0.4)


def _result(n, gen):
    return TakeoverResult(GrowthCurve(np.array(n)), gen)


def test_aggregate_identical_replicates():
    res = [_result([1, 3, 4], 2)] * 3
    s = aggregate_curves(res)
    assert s.avg == 2 and s.std == 0 and s.min == s.max == 2
    assert np.array_equal(s.mean_curve, [1, 3, 4])
    assert np.array_equal(s.mean_delta, [0, 2, 1])


def test_aggregate_pads_short_curves_with_final_value():
    s = aggregate_curves([_result([1, 4], 1), _result([1, 2, 4], 2)])
    assert np.allclose(s.mean_curve, [1, 3, 4])
    assert s.avg == 1.5 and s.std == pytest.approx(math.sqrt(0.5))


def test_aggregate_single_replicate_std_zero():
    assert aggregate_curves([_result([1, 2], 1)]).std == 0.0


def test_aggregate_errors():
    with pytest.raises(ValueError):
        aggregate_curves([])
    with pytest.raises(ValueError):
        aggregate_curves([_result([1, 2], None)])


def test_plateau_window_on_synthetic_curve():
    delta = np.concatenate([np.arange(1, 11), np.full(30, 20.0), np.arange(20, 0, -2)])
    start, stop, mean = plateau_window(delta)
    assert start <= 10 and stop >= 40
    assert mean == pytest.approx(20, rel=0.05)


def test_plateau_window_none_when_too_short():
    assert plateau_window(np.array([1.0, 2.0, 4.0, 8.0, 16.0])) is None


def test_regression_exact_line():
    fit = fit_alpha_ratio_regression([(0.25, 0.5), (0.5, 0.25), (1.0, -0.25)])
    assert fit.slope == pytest.approx(-1.0)
    assert fit.intercept == pytest.approx(0.75)
    assert fit.correlation == pytest.approx(-1.0)


@pytest.mark.parametrize("pairs", [[(0.5, 0.1)], [(0.5, 0.1), (0.5, 0.2)]])
def test_regression_degenerate(pairs):
    with pytest.raises(ValueError):
        fit_alpha_ratio_regression(pairs)


def test_equivalent_alpha_of_isotropic_time_is_zero():
    shape = GridShape(16, 16)
    target = mean_takeover(shape, 0.0, replicates=10, base_seed=3)[0]
    assert equivalent_alpha(target, shape, replicates=10, base_seed=3) == 0.0


def test_equivalent_alpha_rejects_too_fast_target():
    with pytest.raises(ValueError):
        equivalent_alpha(1.0, GridShape(16, 16), replicates=10)


def test_equivalent_alpha_recovers_known_alpha():
    shape = GridShape(16, 16)
    target = mean_takeover(shape, 0.8, replicates=20, base_seed=6)[0]
    alpha = equivalent_alpha(target, shape, replicates=20, base_seed=6, tolerance=0.25)
    assert abs(mean_takeover(shape, alpha, replicates=20, base_seed=6)[0] - target) <= 1.0
    assert 0.6 < alpha < 0.95
