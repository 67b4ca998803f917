"""Stuck configurations, the stuckness necessary condition, and small-N enumeration."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .classify import is_fixed_point
from .grid import BLUE, EMPTY, RED, Configuration

DEFAULT_BUDGET = 10**6


class EnumerationBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class StuckRecipe:
    n: int
    m: int
    base_diagonal: int = 0

    def __post_init__(self):
        if self.m < 2 * self.n:
            raise ValueError(
                f"no stuck configuration exists with m={self.m} < 2N={2 * self.n} cars"
            )
        if self.m > self.n**2:
            raise ValueError(f"m={self.m} exceeds the N^2={self.n**2} cells of the torus")

    def build(self) -> Configuration:
        return construct_stuck(self.n, self.m, self.base_diagonal)


def construct_stuck(n: int, m: int, base_diagonal: int = 0) -> Configuration:
    """A fixed point with ``m`` cars, for any ``2N <= m <= N^2``.

    Red cars fill the diagonal ``i - j = c`` and blue cars the diagonal just
    above it, ``i - j = c + 1``, so every car faces a car of the other colour.
    Extra cars are red, filling diagonals ``c - 1, c - 2, ...`` one at a time
    in increasing ``j``; each sits directly below an occupied cell.
    """
    StuckRecipe(n, m, base_diagonal)
    c = base_diagonal % n
    cells = np.zeros((n, n), dtype=np.int8)
    cols = np.arange(n)
    cells[(cols + c) % n, cols] = RED
    cells[(cols + c + 1) % n, cols] = BLUE
    extra = m - 2 * n
    for offset in range(1, n - 1):
        if extra == 0:
            break
        d = (c - offset) % n
        take = cols[: min(extra, n)]
        cells[(take + d) % n, take] = RED
        extra -= len(take)
    return Configuration(cells)


def stuck_necessary_condition(config: Configuration) -> bool:
    """Every column holds a blue car and every row holds a red car."""
    cells = config.cells
    return bool((cells == BLUE).any(axis=0).all() and (cells == RED).any(axis=1).all())


def count_configurations(n: int, m: int) -> int:
    return math.comb(n * n, m) * 2**m


def enumerate_configurations(n: int, m: int, budget: int = DEFAULT_BUDGET) -> Iterator[Configuration]:
    """Every configuration of exactly ``m`` cars on the ``n x n`` torus.

    Order: occupied cell sets in lexicographic order of their row-major
    indices, and for each set the colourings in lexicographic order with
    red before blue.

    Raises:
        EnumerationBudgetError: more than ``budget`` configurations, raised
            before anything is yielded.
    """
    total = count_configurations(n, m)
    if total > budget:
        raise EnumerationBudgetError(f"{total} configurations for n={n}, m={m} exceed budget {budget}")
    return _enumerate(n, m)


def _enumerate(n: int, m: int) -> Iterator[Configuration]:
    for cells in itertools.combinations(range(n * n), m):
        idx = list(cells)
        for colors in itertools.product((RED, BLUE), repeat=m):
            flat = np.full(n * n, EMPTY, dtype=np.int8)
            flat[idx] = colors
            yield Configuration(flat.reshape(n, n))


@dataclass
class ThresholdReport:
    n: int
    examined: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.examined.values())

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        lines = [f"n={self.n}: examined {self.total} configurations with m < {2 * self.n}"]
        for m, count in sorted(self.examined.items()):
            lines.append(f"  m={m}: {count}")
        lines.append(f"fixed points found: {len(self.violations)}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def verify_no_stuck_below_threshold(
    n: int,
    fixed_point: Callable[[Configuration], bool] = is_fixed_point,
    budget: int = DEFAULT_BUDGET,
) -> ThresholdReport:
    """Exhaustively confirm that no configuration with ``1 <= m < 2N`` cars is stuck."""
    report = ThresholdReport(n)
    for m in range(1, min(2 * n, n * n + 1)):
        count = 0
        for config in enumerate_configurations(n, m, budget):
            count += 1
            if fixed_point(config):
                report.violations.append(config)
        report.examined[m] = count
    return report
