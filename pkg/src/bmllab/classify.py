"""Long-run fate of a trajectory: speed one, stuck, intermediate or undetermined."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .grid import Configuration, StepResult, advance, canonical_key


class Kind(str, enum.Enum):
    SPEED_ONE = "SpeedOne"
    STUCK = "Stuck"
    INTERMEDIATE = "Intermediate"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ClassifyLimits:
    max_steps: int
    max_states: int = 10**6

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_states <= 0:
            raise ValueError("limits must be positive")

    @classmethod
    def default(cls, n: int) -> ClassifyLimits:
        return cls(max_steps=10 * n**3, max_states=10**6)


@dataclass(frozen=True)
class Verdict:
    """Terminal judgment on a trajectory.

    ``t_org`` is set for SpeedOne, ``t_stuck`` for Stuck, and
    ``cycle_entry``/``period``/``speed`` for Intermediate.  ``final`` is the
    last configuration reached (the fixed point for Stuck).
    """

    kind: Kind
    steps_spent: int
    t_org: Optional[int] = None
    t_stuck: Optional[int] = None
    cycle_entry: Optional[int] = None
    period: Optional[int] = None
    speed: Optional[Fraction] = None
    final: Optional[Configuration] = field(default=None, compare=False, repr=False)


class NotSpeedOneError(ValueError):
    def __init__(self, verdict: Verdict):
        super().__init__(f"collisions are only defined for SpeedOne trajectories, got {verdict.kind.value}")
        self.verdict = verdict


def run_classification(
    config: Configuration,
    limits: Optional[ClassifyLimits] = None,
    observer: Optional[Callable[[StepResult], object]] = None,
) -> tuple[Verdict, int]:
    """Classify ``config`` and count blocked-car events along the way.

    Rules applied after each simulated step ``t``, in order:

    * the step moved nothing: the configuration is a fixed point, Stuck at ``t``;
    * N consecutive steps without a blocked car: every car is back on its
      starting cell, so free flow repeats forever (SpeedOne);
    * the new configuration was seen before at time ``s``: the trajectory is
      periodic from ``s``.  A block-free cycle is SpeedOne, anything else is
      Intermediate;
    * otherwise continue until ``max_steps`` steps or ``max_states`` stored
      keys, then give up with Undetermined.

    ``observer`` is called with every :class:`StepResult` in order.

    Returns:
        The verdict and the total number of blocked-car events over all
        simulated steps.  For SpeedOne this equals the collision count,
        since no car is blocked from ``t_org`` on.
    """
    n, m = config.n, config.m
    limits = limits or ClassifyLimits.default(n)
    if m == 0:
        return Verdict(Kind.SPEED_ONE, 0, t_org=0, final=config), 0

    seen = {canonical_key(config): 0}
    moves: list[int] = []
    blocked: list[int] = []
    last_blocked = -1
    free_run = 0
    collisions = 0
    current = config
    t = 0
    while t < limits.max_steps:
        result = advance(current)
        if observer is not None:
            observer(result)
        stats = result.stats
        if stats.moved == 0:
            return Verdict(Kind.STUCK, t + 1, t_stuck=t, final=current), collisions + stats.blocked
        if stats.blocked:
            last_blocked = t
            free_run = 0
            collisions += stats.blocked
        else:
            free_run += 1
        moves.append(stats.moved)
        blocked.append(stats.blocked)
        t += 1
        current = result.config

        if free_run >= n:
            return Verdict(Kind.SPEED_ONE, t, t_org=last_blocked + 1, final=current), collisions

        key = canonical_key(current)
        entry = seen.get(key)
        if entry is not None:
            period = t - entry
            if not any(blocked[entry:t]):
                return Verdict(Kind.SPEED_ONE, t, t_org=last_blocked + 1, final=current), collisions
            speed = Fraction(sum(moves[entry:t]), m * period)
            verdict = Verdict(
                Kind.INTERMEDIATE, t, cycle_entry=entry, period=period, speed=speed, final=current
            )
            return verdict, collisions
        if len(seen) >= limits.max_states:
            break
        seen[key] = t
    return Verdict(Kind.UNDETERMINED, t, final=current), collisions


def classify(config: Configuration, limits: Optional[ClassifyLimits] = None) -> Verdict:
    return run_classification(config, limits)[0]


def count_collisions(config: Configuration, limits: Optional[ClassifyLimits] = None) -> int:
    """Number of blocked-car events before the organization time.

    Raises:
        NotSpeedOneError: the trajectory is not classified SpeedOne.
    """
    verdict, collisions = run_classification(config, limits)
    if verdict.kind is not Kind.SPEED_ONE:
        raise NotSpeedOneError(verdict)
    return collisions


def is_fixed_point(config: Configuration) -> bool:
    """True iff no car can move; vacuously true on the empty torus."""
    return advance(config).stats.moved == 0
