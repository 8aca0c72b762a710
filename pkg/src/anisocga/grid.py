"""Toroidal grid substrate shared by every experiment.

Cells are stored row-major in a ``(height, width)`` numpy array, so the cell
index of ``(x, y)`` is ``y * width + x``. North is ``y - 1``, South ``y + 1``,
East ``x + 1`` and West ``x - 1``; the vertical (North/South) axis is the one
favoured by a positive anisotropy degree.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, NamedTuple

import numpy as np

from .seeding import CellStream, derive_seed


class Direction(IntEnum):
    CENTER = 0
    NORTH = 1
    SOUTH = 2
    EAST = 3
    WEST = 4


# (dx, dy) per Direction value
OFFSETS = ((0, 0), (0, -1), (0, 1), (1, 0), (-1, 0))


@dataclass(frozen=True)
class GridShape:
    width: int
    height: int

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise ValueError(f"grid sides must be >= 1, got {self.width}x{self.height}")

    @classmethod
    def parse(cls, text: str) -> "GridShape":
        """Parse ``"WxH"`` (e.g. ``"32x128"``)."""
        try:
            w, h = text.lower().split("x")
            return cls(int(w), int(h))
        except ValueError:
            raise ValueError(f"bad grid shape {text!r}, expected WIDTHxHEIGHT") from None

    @property
    def size(self) -> int:
        return self.width * self.height

    def shortest_side(self) -> int:
        return min(self.width, self.height)

    def longest_side(self) -> int:
        return max(self.width, self.height)

    def ratio(self) -> float:
        """Shortest over longest side, ``l / L``."""
        return self.shortest_side() / self.longest_side()

    def index(self, coord: "CellCoord") -> int:
        c = wrap(coord, self)
        return c.y * self.width + c.x

    def coord(self, index: int) -> "CellCoord":
        return CellCoord(index % self.width, index // self.width)

    def __str__(self):
        return f"{self.width}x{self.height}"


class CellCoord(NamedTuple):
    x: int
    y: int


def wrap(coord: CellCoord, shape: GridShape) -> CellCoord:
    return CellCoord(coord[0] % shape.width, coord[1] % shape.height)


def von_neumann(cell: CellCoord, shape: GridShape) -> dict:
    """Map each :class:`Direction` to the wrapped coordinate it points at."""
    x, y = cell
    return {d: wrap(CellCoord(x + dx, y + dy), shape) for d, (dx, dy) in zip(Direction, OFFSETS)}


def neighbor_table(shape: GridShape) -> np.ndarray:
    """``(size, 5)`` int64 table of flat neighbour indices in Direction order."""
    ys, xs = np.divmod(np.arange(shape.size), shape.width)
    table = np.empty((shape.size, 5), dtype=np.int64)
    for d, (dx, dy) in enumerate(OFFSETS):
        table[:, d] = ((ys + dy) % shape.height) * shape.width + (xs + dx) % shape.width
    return table


class CellRuleError(RuntimeError):
    """Raised when a cell rule fails; carries the offending coordinate."""

    def __init__(self, coord, cause):
        super().__init__(f"cell rule failed at {tuple(coord)}: {cause!r}")
        self.coord = coord


class TorusGrid:
    """Dense toroidal population.

    ``cells`` is a ``(height, width)`` array; any dtype works, including
    ``object`` for arbitrary individuals.
    """

    def __init__(self, shape: GridShape, cells):
        cells = np.asarray(cells)
        if cells.shape[:2] != (shape.height, shape.width):
            raise ValueError(
                f"cells have shape {cells.shape[:2]}, grid is {shape.height}x{shape.width} (rows x cols)"
            )
        self.shape = shape
        self.cells = cells

    @classmethod
    def filled(cls, shape: GridShape, value, dtype=None) -> "TorusGrid":
        return cls(shape, np.full((shape.height, shape.width), value, dtype=dtype))

    def __getitem__(self, coord):
        c = wrap(CellCoord(*coord), self.shape)
        return self.cells[c.y, c.x]

    def __setitem__(self, coord, value):
        c = wrap(CellCoord(*coord), self.shape)
        self.cells[c.y, c.x] = value

    def flat(self) -> np.ndarray:
        return self.cells.reshape(self.shape.size, *self.cells.shape[2:])

    def copy(self) -> "TorusGrid":
        return TorusGrid(self.shape, self.cells.copy())

    def __eq__(self, other):
        return (
            isinstance(other, TorusGrid)
            and self.shape == other.shape
            and np.array_equal(self.cells, other.cells)
        )

    def __repr__(self):
        return f"TorusGrid({self.shape}, dtype={self.cells.dtype})"


CellRule = Callable[[TorusGrid, CellCoord, CellStream], object]


def synchronous_step(
    grid: TorusGrid,
    cell_rule: CellRule,
    base_seed: int = 0,
    replicate: int = 0,
    generation: int = 0,
    order=None,
) -> TorusGrid:
    """Compute the next generation from a frozen snapshot of ``grid``.

    Each cell gets its own :class:`CellStream` derived from
    ``(base_seed, replicate, generation, cell_index)``. ``order`` optionally
    permutes the visiting order of cell indices; the result must not depend
    on it.
    """
    shape = grid.shape
    snapshot = grid.copy()
    snapshot.cells.setflags(write=False)
    out = np.empty_like(grid.cells)
    indices = range(shape.size) if order is None else order
    for idx in indices:
        coord = shape.coord(int(idx))
        stream = CellStream(derive_seed(base_seed, replicate, generation, int(idx)))
        try:
            out[coord.y, coord.x] = cell_rule(snapshot, coord, stream)
        except Exception as exc:
            raise CellRuleError(coord, exc) from exc
    return TorusGrid(shape, out)
