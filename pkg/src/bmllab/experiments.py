"""Seeded sampling, single trials and parameter sweeps.

Randomness comes from numpy's PCG64 bit generator.  A sweep derives the
64-bit seed of trial ``k`` at sweep point ``p`` as the first 64-bit word of
``SeedSequence(base_seed, spawn_key=(p, k))``; each trial then samples from
``Generator(PCG64(seed))``.  Results therefore do not depend on the order or
the process in which trials run.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .classify import ClassifyLimits, Kind, Verdict, run_classification
from .constructions import stuck_necessary_condition
from .diagonal import TrajectoryMonitor
from .grid import BLUE, RED, Configuration

RNG_NAME = "numpy.PCG64/SeedSequence(base_seed, spawn_key=(point, trial))"


class InvariantViolation(AssertionError):
    """A property guaranteed by the dynamics failed on a real run."""


@dataclass(frozen=True)
class UniformColored:
    m: int
    name = "uniform"

    def total(self) -> int:
        return self.m

    def sample(self, n: int, seed: int) -> Configuration:
        return sample_uniform_colored(n, self.m, seed)


@dataclass(frozen=True)
class Bicolor:
    n_red: int
    n_blue: int
    name = "bicolor"

    def total(self) -> int:
        return self.n_red + self.n_blue

    def sample(self, n: int, seed: int) -> Configuration:
        return sample_bicolor(n, self.n_red, self.n_blue, seed)


Sampler = Union[UniformColored, Bicolor]


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sample_uniform_colored(n: int, m: int, seed: int) -> Configuration:
    """``m`` distinct cells chosen uniformly, each car red or blue with probability 1/2."""
    if not 0 <= m <= n * n:
        raise ValueError(f"m={m} must lie in [0, {n * n}]")
    rng = _rng(seed)
    cells = rng.choice(n * n, size=m, replace=False)
    colors = np.where(rng.integers(0, 2, size=m) == 0, RED, BLUE)
    flat = np.zeros(n * n, dtype=np.int8)
    flat[cells] = colors
    return Configuration(flat.reshape(n, n))


def sample_bicolor(n: int, n_red: int, n_blue: int, seed: int) -> Configuration:
    """Exactly ``n_red`` red and ``n_blue`` blue cars on uniformly chosen distinct cells."""
    if n_red < 0 or n_blue < 0 or n_red + n_blue > n * n:
        raise ValueError(f"{n_red} red + {n_blue} blue cars do not fit on {n * n} cells")
    rng = _rng(seed)
    # choice without replacement returns the cells in random order
    cells = rng.choice(n * n, size=n_red + n_blue, replace=False)
    flat = np.zeros(n * n, dtype=np.int8)
    flat[cells[:n_red]] = RED
    flat[cells[n_red:]] = BLUE
    return Configuration(flat.reshape(n, n))


def nlogn_count(n: int) -> int:
    """Cars per colour for the sparse two-colour experiment: ceil(N ln N)."""
    return math.ceil(n * math.log(n))


def alpha_count(n: int, alpha: float) -> int:
    # guard against N**(1+alpha) landing a hair above an integer
    return math.ceil(n ** (1 + alpha) - 1e-9)


def derive_seed(base_seed: int, point: int, trial: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=(point, trial))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class TrialSpec:
    n: int
    sampler: Sampler
    seed: int
    limits: Optional[ClassifyLimits] = None
    monitor: bool = False

    def __post_init__(self):
        if self.sampler.total() > self.n**2:
            raise ValueError(f"sampler places {self.sampler.total()} cars on {self.n**2} cells")


@dataclass(frozen=True)
class TrialResult:
    spec: TrialSpec
    config: Configuration = field(compare=False, repr=False)
    verdict: Verdict
    collisions: Optional[int] = None
    monitor_pass: Optional[bool] = None
    monitor_log: Optional[list] = field(default=None, compare=False, repr=False)

    @property
    def m(self) -> int:
        return self.config.m


def run_trial(spec: TrialSpec, keep_log: bool = False) -> TrialResult:
    """Sample, classify, and optionally certify every step with a trajectory monitor.

    Raises:
        InvariantViolation: a Stuck fixed point lacks a blue car in some
            column or a red car in some row, or a trajectory with fewer than
            N/2 cars failed to reach speed one.
    """
    config = spec.sampler.sample(spec.n, spec.seed)
    return evaluate(config, spec, keep_log=keep_log)


def evaluate(config: Configuration, spec: TrialSpec, keep_log: bool = False) -> TrialResult:
    monitor = TrajectoryMonitor(config, keep_records=keep_log) if spec.monitor else None
    verdict, collisions = run_classification(
        config, spec.limits, observer=monitor.observe if monitor else None
    )
    if verdict.kind is Kind.STUCK and not stuck_necessary_condition(verdict.final):
        raise InvariantViolation(f"stuck configuration violates the row/column condition (spec {spec})")
    if 2 * config.m < config.n and verdict.kind is not Kind.SPEED_ONE:
        raise InvariantViolation(f"{config.m} < N/2 cars ended {verdict.kind.value} (spec {spec})")
    return TrialResult(
        spec=spec,
        config=config,
        verdict=verdict,
        collisions=collisions if verdict.kind is Kind.SPEED_ONE else None,
        monitor_pass=monitor.passed if monitor else None,
        monitor_log=monitor.records if (monitor and keep_log) else None,
    )


@dataclass(frozen=True)
class SweepSpec:
    """Grid of sweep points ``n_values x (m_values | alpha_values)``.

    With ``sampler="bicolor"`` the ``m`` cars split as ceil(m/2) red and
    floor(m/2) blue.
    """

    n_values: Sequence[int]
    trials: int
    base_seed: int
    m_values: Optional[Sequence[int]] = None
    alpha_values: Optional[Sequence[float]] = None
    sampler: str = "uniform"
    limits: Optional[ClassifyLimits] = None
    monitor: bool = False

    def __post_init__(self):
        if (self.m_values is None) == (self.alpha_values is None):
            raise ValueError("give exactly one of m_values or alpha_values")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.sampler not in ("uniform", "bicolor"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        for n, m in self.points():
            if not 0 < m < n * n:
                raise ValueError(f"m={m} outside (0, {n * n}) for n={n}")

    def points(self) -> list[tuple[int, int]]:
        out = []
        for n in self.n_values:
            if self.m_values is not None:
                out.extend((n, m) for m in self.m_values)
            else:
                out.extend((n, alpha_count(n, a)) for a in self.alpha_values)
        return out

    def make_sampler(self, m: int) -> Sampler:
        if self.sampler == "uniform":
            return UniformColored(m)
        return Bicolor((m + 1) // 2, m // 2)

    def trial_specs(self) -> Iterator[tuple[int, TrialSpec]]:
        for p, (n, m) in enumerate(self.points()):
            for k in range(self.trials):
                spec = TrialSpec(n, self.make_sampler(m), derive_seed(self.base_seed, p, k), self.limits, self.monitor)
                yield p, spec


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    from statsmodels.stats.proportion import proportion_confint

    lo, hi = proportion_confint(successes, trials, alpha=0.05, method="wilson")
    return max(0.0, float(lo)), min(1.0, float(hi))


@dataclass(frozen=True)
class Aggregate:
    n: int
    m: int
    trials: int
    fractions: dict
    collision_mean: Optional[float]
    collision_median: Optional[float]
    collision_max: Optional[int]
    stuck_interval: tuple[float, float]


def aggregate(n: int, m: int, results: Sequence[TrialResult]) -> Aggregate:
    count = len(results)
    fractions = {
        kind.value: sum(r.verdict.kind is kind for r in results) / count for kind in Kind
    }
    cols = [r.collisions for r in results if r.collisions is not None]
    stuck = sum(r.verdict.kind is Kind.STUCK for r in results)
    return Aggregate(
        n=n,
        m=m,
        trials=count,
        fractions=fractions,
        collision_mean=statistics.fmean(cols) if cols else None,
        collision_median=statistics.median(cols) if cols else None,
        collision_max=max(cols) if cols else None,
        stuck_interval=wilson_interval(stuck, count),
    )


def _strip(result: TrialResult) -> TrialResult:
    # keep worker -> parent payloads small
    return replace(result, verdict=replace(result.verdict, final=None))


def _run_stripped(spec: TrialSpec) -> TrialResult:
    return _strip(run_trial(spec))


def sweep(spec: SweepSpec, jobs: int = 1) -> Iterator[Union[TrialResult, Aggregate]]:
    """Run every trial, yielding results in (point, trial) order.

    After the last trial of each point its :class:`Aggregate` is yielded.
    ``jobs > 1`` runs trials in worker processes; output is identical.
    """
    points = spec.points()
    indexed = list(spec.trial_specs())
    specs = [s for _, s in indexed]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            yield from _collect(points, spec.trials, pool.map(_run_stripped, specs, chunksize=4))
    else:
        yield from _collect(points, spec.trials, map(_run_stripped, specs))


def _collect(points, trials, results) -> Iterator[Union[TrialResult, Aggregate]]:
    it = iter(results)
    for n, m in points:
        batch = []
        for _ in range(trials):
            result = next(it)
            batch.append(result)
            yield result
        yield aggregate(n, m, batch)
