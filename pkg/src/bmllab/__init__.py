"""Deterministic Biham-Middleton-Levine traffic model on the N x N torus."""

__version__ = "0.1.0"

from .classify import (  # noqa: E402
    ClassifyLimits,
    Kind,
    NotSpeedOneError,
    Verdict,
    classify,
    count_collisions,
    is_fixed_point,
)
from .constructions import (  # noqa: E402
    construct_stuck,
    enumerate_configurations,
    stuck_necessary_condition,
    verify_no_stuck_below_threshold,
)
from .grid import (  # noqa: E402
    BLUE,
    EMPTY,
    RED,
    Color,
    Configuration,
    Position,
    StepStats,
    advance,
    blue_phase,
    canonical_key,
    red_phase,
    step,
)
