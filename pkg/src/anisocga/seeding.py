"""Deterministic per-cell random streams.

Every random number consumed by a cell update is a pure function of
``(base_seed, replicate, generation, cell_index, draw_counter)``. Streams are
built on the SplitMix64 finalizer, so results do not depend on traversal
order, thread count or platform. The numba kernels in :mod:`anisocga._kernels`
re-implement the same arithmetic on ``np.uint64`` and are checked against
this module in the test suite.
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)


def mix64(z):
    """SplitMix64 output function applied to ``z + golden gamma``."""
    z = (z + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed, replicate_index=0, generation=0, cell_index=0):
    """Mix the four stream coordinates into one 64-bit stream seed.

    Negative inputs are reduced modulo 2**64 first.
    """
    h = mix64(base_seed & MASK64)
    h = mix64(h ^ (replicate_index & MASK64))
    h = mix64(h ^ (generation & MASK64))
    return mix64(h ^ (cell_index & MASK64))


class CellStream:
    """Counter-based uniform stream for a single cell update.

    Implements the small ``random()`` interface the selection and variation
    operators use, so a ``random.Random`` or ``numpy.random.Generator`` can
    be passed in its place where reproducibility across routes is not needed.
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed):
        self.seed = seed & MASK64
        self.counter = 0

    @classmethod
    def for_cell(cls, base_seed, replicate_index, generation, cell_index):
        return cls(derive_seed(base_seed, replicate_index, generation, cell_index))

    def next_u64(self):
        z = (self.seed + self.counter * GOLDEN_GAMMA) & MASK64
        self.counter += 1
        return mix64(z)

    def random(self):
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def below(self, n):
        """Integer in [0, n)."""
        return int(self.random() * n)
