import numpy as np
import pytest
from hypothesis import given, strategies as st

from anisocga.grid import GridShape, TorusGrid, von_neumann, CellCoord
from anisocga.niching import (
    LineageCell,
    init_two_best,
    lineage_counts,
    mixing_index,
    niching_replicates,
    run_niching,
    seed_cells,
)
from anisocga.selection import AnisotropyParams

A, B, E = LineageCell.LINEAGE_A, LineageCell.LINEAGE_B, LineageCell.EMPTY


def test_seeds_on_same_row_half_a_grid_apart():
    a, b = seed_cells(GridShape(64, 64))
    assert a == (16, 32) and b == (48, 32)


def test_init_counts():
    g = init_two_best(GridShape(8, 6))
    assert lineage_counts(g) == (1, 1, 46)
    assert g[2, 3] == A and g[6, 3] == B


def test_init_needs_two_columns():
    with pytest.raises(ValueError):
        init_two_best(GridShape(1, 8))


def test_zero_generations_reports_initial_state():
    rep = run_niching(GridShape(8, 8), AnisotropyParams(0.5), generations=0, snapshot_times=[0])
    assert rep.generations == 0
    assert tuple(rep.counts[0]) == (1, 1, 62)
    assert rep.snapshots[0] == init_two_best(GridShape(8, 8))


def test_snapshot_beyond_run_rejected():
    with pytest.raises(ValueError):
        run_niching(GridShape(8, 8), AnisotropyParams(), generations=5, snapshot_times=[6])


@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.95])
def test_counts_conserved_and_empty_shrinks(alpha):
    shape = GridShape(24, 16)
    rep = run_niching(shape, AnisotropyParams(alpha), generations=150, base_seed=int(alpha * 100))
    assert np.all(rep.counts.sum(axis=1) == shape.size)
    assert np.all(np.diff(rep.counts[:, 2]) <= 0)
    assert rep.counts[-1, 2] == 0


def test_mixing_half_planes():
    # two clean vertical bands on a torus touch along two seams, one column each side
    shape = GridShape(8, 4)
    cells = np.full((4, 8), A)
    cells[:, 4:] = B
    assert mixing_index(TorusGrid(shape, cells)) == pytest.approx(4 * 4 / 32)


def test_mixing_single_lineage_and_empty():
    shape = GridShape(5, 5)
    assert mixing_index(TorusGrid.filled(shape, A, dtype=np.int8)) == 0.0
    assert mixing_index(TorusGrid.filled(shape, E, dtype=np.int8)) == 0.0


def test_mixing_checkerboard_is_one():
    shape = GridShape(6, 6)
    y, x = np.indices((6, 6))
    assert mixing_index(TorusGrid(shape, np.where((x + y) % 2, A, B))) == 1.0


def _mixing_oracle(grid):
    occupied = mixed = 0
    for y in range(grid.shape.height):
        for x in range(grid.shape.width):
            lab = grid[x, y]
            if lab == E:
                continue
            occupied += 1
            hood = von_neumann(CellCoord(x, y), grid.shape)
            if any(grid[c] not in (E, lab) for c in hood.values()):
                mixed += 1
    return mixed / occupied if occupied else 0.0


@given(st.integers(1, 7), st.integers(1, 7), st.data())
def test_mixing_matches_brute_force(w, h, data):
    values = data.draw(st.lists(st.sampled_from([0, 1, 2]), min_size=w * h, max_size=w * h))
    grid = TorusGrid(GridShape(w, h), np.array(values, dtype=np.int8).reshape(h, w))
    assert mixing_index(grid) == pytest.approx(_mixing_oracle(grid))


def test_strong_anisotropy_separates_lineages():
    shape = GridShape(32, 32)
    iso = niching_replicates(shape, AnisotropyParams(0.0), generations=300, replicates=8, base_seed=1)
    ani = niching_replicates(shape, AnisotropyParams(0.99), generations=300, replicates=8, base_seed=1)
    assert ani.final_mixing.mean() < iso.final_mixing.mean()
    assert ani.survival_rate == 1.0
