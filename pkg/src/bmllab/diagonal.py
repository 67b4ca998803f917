"""Time-corrected diagonal projection, empty-arc decomposition and lemma checks.

A car at ``(i, j)`` at time ``t`` projects to ``(i + j - t) mod N``.  A car
that moves keeps its projected value; a blocked car's value drops by one.
The points of Z_N not hit by any car split into maximal circular arcs, and
the checkers here certify, step by step, that those arcs behave as the
dynamics demands: the occupied point left of a long arc stays occupied, the
number of long arcs never grows, and once a car has been blocked N times no
long arc is left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import BLUE, RED, Configuration, StepResult


@dataclass(frozen=True)
class Projection:
    """Projected diagonal values at time ``t``, one entry per car."""

    n: int
    t: int
    values: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.values)

    def occupied(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.values)] = True
        return mask


class Arc(NamedTuple):
    start: int
    length: int

    def points(self, n: int) -> list[int]:
        return [(self.start + k) % n for k in range(self.length)]


@dataclass(frozen=True)
class ArcDecomposition:
    n: int
    t: int
    arcs: tuple[Arc, ...]

    @property
    def r(self) -> int:
        return len(self.arcs)


@dataclass(frozen=True)
class Certificate:
    """Outcome of one check; ``witness`` names the offending datum on failure."""

    passed: bool
    witness: object = None

    def __bool__(self):
        return self.passed


def project_positions(positions: np.ndarray, n: int, t: int) -> Projection:
    """Project an ``(m, 2)`` array of car positions at time ``t``."""
    positions = np.asarray(positions, dtype=np.int64).reshape(-1, 2)
    values = (positions[:, 0] + positions[:, 1] - t) % n
    return Projection(n, t, tuple(int(v) for v in values))


def project(config: Configuration, t: int) -> Projection:
    """Projection of every occupied cell, cars taken in row-major order."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return project_positions(np.argwhere(config.cells != 0), config.n, t)


def decompose_arcs(projection: Projection) -> ArcDecomposition:
    """Split the unoccupied points of Z_N into maximal circular arcs.

    Arcs are listed in the order their first point is met when scanning
    0, 1, ..., N-1, so the first arc is the one holding the smallest empty
    point.  A run that wraps past N-1 is reported with its circular start.
    """
    n = projection.n
    occ = projection.occupied()
    if occ.all():
        return ArcDecomposition(n, projection.t, ())
    if not occ.any():
        return ArcDecomposition(n, projection.t, (Arc(0, n),))

    arcs = []
    j = 0
    while j < n:
        if occ[j]:
            j += 1
            continue
        start = j
        while j < n and not occ[j]:
            j += 1
        arcs.append([start, j - start])
    # merge a run touching N-1 with the run starting at 0
    if not occ[0] and not occ[n - 1] and len(arcs) > 1:
        tail = arcs.pop()
        arcs[0] = [tail[0], tail[1] + arcs[0][1]]
    return ArcDecomposition(n, projection.t, tuple(Arc(s, length) for s, length in arcs))


def long_arc_count(decomp: ArcDecomposition) -> int:
    return sum(1 for arc in decomp.arcs if arc.length >= 2)


def check_arc_static(decomp_t: ArcDecomposition, proj_next: Projection) -> Certificate:
    """Every long arc at ``t`` keeps its left neighbour occupied and all but its last point empty at ``t+1``."""
    if decomp_t.n != proj_next.n:
        raise ValueError(f"torus size mismatch: {decomp_t.n} != {proj_next.n}")
    n = decomp_t.n
    occ = proj_next.occupied()
    for arc in decomp_t.arcs:
        if arc.length < 2:
            continue
        if arc.length < n and not occ[(arc.start - 1) % n]:
            return Certificate(False, arc)
        if any(occ[p] for p in arc.points(n)[:-1]):
            return Certificate(False, arc)
    return Certificate(True)


def check_long_arc_monotone(count_t: int, count_next: int) -> Certificate:
    if count_next <= count_t:
        return Certificate(True)
    return Certificate(False, (count_t, count_next))


def check_projection_step(proj_t: Projection, proj_next: Projection, per_car_moves) -> Certificate:
    """Moved cars keep their projected value; blocked cars drop by one (mod N)."""
    moves = list(per_car_moves)
    if not (proj_t.m == proj_next.m == len(moves)):
        raise ValueError(f"cardinality mismatch: {proj_t.m}, {proj_next.m}, {len(moves)} moves")
    n = proj_t.n
    for car, (before, after, moved) in enumerate(zip(proj_t.values, proj_next.values, moves)):
        expected = before if moved else (before - 1) % n
        if after != expected:
            return Certificate(False, car)
    return Certificate(True)


class TrajectoryMonitor:
    """Follows individual cars along a trajectory and runs every check per step.

    Cars are numbered in row-major order of the initial configuration.  Feed
    each :class:`~bmllab.grid.StepResult` in order through :meth:`observe`;
    ``passed`` stays true only while every check has held.
    """

    def __init__(self, config: Configuration, keep_records: bool = False):
        cells = config.cells
        self.n = config.n
        self.t = 0
        self.passed = True
        self.keep_records = keep_records
        self.records: list[dict] = []
        self.positions = np.argwhere(cells != 0)
        self.colors = cells[self.positions[:, 0], self.positions[:, 1]]
        self.decrements = np.zeros(len(self.positions), dtype=np.int64)
        self.projection = project_positions(self.positions, self.n, 0)
        self.decomp = decompose_arcs(self.projection)
        self.long_arcs = long_arc_count(self.decomp)
        if self.n >= 2 and 2 * len(self.positions) < self.n and self.long_arcs < 1:
            self.passed = False

    def observe(self, result: StepResult) -> dict:
        n = self.n
        pos = self.positions
        is_blue = self.colors == BLUE
        moved = np.where(
            is_blue,
            result.blue_moved[pos[:, 0], pos[:, 1]],
            result.red_moved[pos[:, 0], pos[:, 1]],
        )
        new_pos = pos.copy()
        new_pos[moved & is_blue, 1] += 1
        new_pos[moved & (self.colors == RED), 0] += 1
        new_pos %= n

        tracked = np.zeros((n, n), dtype=np.int8)
        if len(new_pos):
            tracked[new_pos[:, 0], new_pos[:, 1]] = self.colors
        consistent = bool(np.array_equal(tracked, result.config.cells))

        proj_next = project_positions(new_pos, n, self.t + 1)
        decomp_next = decompose_arcs(proj_next)
        long_next = long_arc_count(decomp_next)
        self.decrements += ~moved

        arc_static = check_arc_static(self.decomp, proj_next).passed
        monotone = check_long_arc_monotone(self.long_arcs, long_next).passed
        proj_step = check_projection_step(self.projection, proj_next, moved).passed
        m = len(pos)
        sparse_arc = n < 2 or 2 * m >= n or long_next >= 1
        circuit = n < 2 or not (self.decrements >= n).any() or long_next == 0

        ok = consistent and arc_static and monotone and proj_step and sparse_arc and circuit
        self.passed = self.passed and ok
        record = {
            "t": self.t,
            "moved_blue": result.stats.moved_blue,
            "blocked_blue": result.stats.blocked_blue,
            "moved_red": result.stats.moved_red,
            "blocked_red": result.stats.blocked_red,
            "long_arc_count": long_next,
            "arc_static": arc_static,
            "long_arc_monotone": monotone,
            "projection_step": proj_step,
            "sparse_long_arc": sparse_arc,
            "circuit": circuit,
            "tracking": consistent,
        }
        if self.keep_records:
            self.records.append(record)

        self.positions = new_pos
        self.projection = proj_next
        self.decomp = decomp_next
        self.long_arcs = long_next
        self.t += 1
        return record
