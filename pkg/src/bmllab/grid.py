"""Two-phase synchronous BML dynamics on the N x N discrete torus.

Cells are stored in an ``int8`` array indexed ``cells[i, j]`` where ``i`` is
the vertical coordinate (red cars move to ``i + 1``) and ``j`` the horizontal
one (blue cars move to ``j + 1``).  Every time step runs the blue phase and
then the red phase.  Within a phase, cars of the moving colour resolve as
convoys: a car moves iff the first cell ahead of it that does not hold a car
of its own colour is empty.  A ring made entirely of one colour rotates.
"""

from __future__ import annotations

import enum
import struct
from typing import NamedTuple

import numpy as np

EMPTY = 0
RED = 1
BLUE = 2


class Color(enum.IntEnum):
    RED = RED
    BLUE = BLUE


class Position(NamedTuple):
    i: int
    j: int


class Configuration:
    """Immutable snapshot of the torus.

    Args:
        cells: square integer array with values in {EMPTY, RED, BLUE}.
    """

    __slots__ = ("_cells", "_red", "_blue")

    def __init__(self, cells):
        arr = np.array(cells, dtype=np.int8, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"cells must be a non-empty square array, got shape {arr.shape}")
        if not np.isin(arr, (EMPTY, RED, BLUE)).all():
            raise ValueError("cells may only hold EMPTY, RED or BLUE")
        arr.setflags(write=False)
        self._cells = arr
        self._red = int(np.count_nonzero(arr == RED))
        self._blue = int(np.count_nonzero(arr == BLUE))

    @classmethod
    def _trusted(cls, arr: np.ndarray, red: int, blue: int) -> Configuration:
        # arr must already be a valid, private int8 array
        self = cls.__new__(cls)
        arr.setflags(write=False)
        self._cells = arr
        self._red = red
        self._blue = blue
        return self

    @classmethod
    def empty(cls, n: int) -> Configuration:
        return cls(np.zeros((n, n), dtype=np.int8))

    @classmethod
    def from_cars(cls, n: int, red=(), blue=()) -> Configuration:
        """Build a configuration from iterables of ``(i, j)`` positions."""
        cells = np.zeros((n, n), dtype=np.int8)
        for color, positions in ((RED, red), (BLUE, blue)):
            for i, j in positions:
                if cells[i % n, j % n] != EMPTY:
                    raise ValueError(f"cell ({i}, {j}) is occupied twice")
                cells[i % n, j % n] = color
        return cls(cells)

    @property
    def n(self) -> int:
        return self._cells.shape[0]

    @property
    def cells(self) -> np.ndarray:
        return self._cells

    @property
    def red_count(self) -> int:
        return self._red

    @property
    def blue_count(self) -> int:
        return self._blue

    @property
    def m(self) -> int:
        return self._red + self._blue

    def __getitem__(self, pos) -> int:
        i, j = pos
        return int(self._cells[i % self.n, j % self.n])

    def positions(self, color: int) -> list[Position]:
        """Positions of cars of one colour in row-major order."""
        return [Position(int(i), int(j)) for i, j in np.argwhere(self._cells == color)]

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._cells, other._cells)

    def __hash__(self):
        return hash(canonical_key(self))

    def __repr__(self):
        return f"Configuration(n={self.n}, red={self._red}, blue={self._blue})"


class StepStats(NamedTuple):
    moved_blue: int
    blocked_blue: int
    moved_red: int
    blocked_red: int

    @property
    def moved(self) -> int:
        return self.moved_blue + self.moved_red

    @property
    def blocked(self) -> int:
        return self.blocked_blue + self.blocked_red


class StepResult(NamedTuple):
    """Full record of one step, including which cars moved.

    ``blue_moved`` is indexed by the blue cars' positions before the step;
    ``red_moved`` by the red cars' positions after the blue phase, which are
    the same as before the step since the blue phase never moves red cars.
    """

    config: Configuration
    stats: StepStats
    blue_moved: np.ndarray
    red_moved: np.ndarray


def _movers(cells: np.ndarray, color: int) -> np.ndarray:
    """Mask of cars of ``color`` that advance along axis 1 (towards j + 1).

    For each car, find the first cell strictly ahead of it (cyclically) that
    does not hold ``color``.  The car moves iff that cell is empty, or if no
    such cell exists in its ring.
    """
    n = cells.shape[1]
    own = cells == color
    doubled = np.concatenate([cells, cells], axis=1)
    idx = np.where(doubled != color, np.arange(2 * n), 2 * n)
    # next_other[:, k] = smallest index >= k in the doubled row not holding color
    next_other = np.minimum.accumulate(idx[:, ::-1], axis=1)[:, ::-1]
    ahead = next_other[:, 1 : n + 1]
    full_ring = ahead >= 2 * n
    rows = np.broadcast_to(np.arange(cells.shape[0])[:, None], ahead.shape)
    first = cells[rows, np.where(full_ring, 0, ahead) % n]
    return own & (full_ring | (first == EMPTY))


def _shift(cells: np.ndarray, moving: np.ndarray, color: int) -> np.ndarray:
    out = cells.copy()
    out[moving] = EMPTY
    out[np.roll(moving, 1, axis=1)] = color
    return out


def _blue_phase(cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    moving = _movers(cells, BLUE)
    return _shift(cells, moving, BLUE), moving


def _red_phase(cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    moving = _movers(cells.T, RED)
    return _shift(cells.T, moving, RED).T, moving.T


def blue_phase(config: Configuration) -> tuple[Configuration, int, int]:
    """Move every unblocked blue car one cell right.

    Returns:
        The new configuration and the moved / blocked blue counts.
    """
    cells, moving = _blue_phase(config.cells)
    moved = int(moving.sum())
    return Configuration._trusted(cells, config.red_count, config.blue_count), moved, config.blue_count - moved


def red_phase(config: Configuration) -> tuple[Configuration, int, int]:
    """Move every unblocked red car one cell up."""
    cells, moving = _red_phase(config.cells)
    cells = np.ascontiguousarray(cells)
    moved = int(moving.sum())
    return Configuration._trusted(cells, config.red_count, config.blue_count), moved, config.red_count - moved


def advance(config: Configuration) -> StepResult:
    """One full time step with per-car movement masks."""
    mid, blue_moving = _blue_phase(config.cells)
    after, red_moving = _red_phase(mid)
    mb = int(blue_moving.sum())
    mr = int(red_moving.sum())
    stats = StepStats(mb, config.blue_count - mb, mr, config.red_count - mr)
    after = np.ascontiguousarray(after)
    return StepResult(
        Configuration._trusted(after, config.red_count, config.blue_count), stats, blue_moving, red_moving
    )


def step(config: Configuration) -> tuple[Configuration, StepStats]:
    result = advance(config)
    return result.config, result.stats


def canonical_key(config: Configuration) -> bytes:
    """Injective byte encoding: 4-byte little-endian N, then one byte per cell row-major."""
    return struct.pack("<I", config.n) + config.cells.tobytes()
