"""Text grid, PPM and CSV record formats.

Grid text::

    N <n>
    <n lines of n characters from '.', 'R', 'B'>

Row ``i = n - 1`` is printed first so that red cars travel up the page.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Optional

import numpy as np

from .classify import Kind
from .experiments import TrialResult
from .grid import BLUE, EMPTY, RED, Configuration

_CHARS = {EMPTY: ".", RED: "R", BLUE: "B"}
_CODES = {v: k for k, v in _CHARS.items()}
_RGB = np.array([[255, 255, 255], [255, 0, 0], [0, 0, 255]], dtype=np.uint8)

CSV_COLUMNS = (
    "seed", "n", "m", "red", "blue", "sampler", "verdict", "t_org", "t_stuck",
    "period", "speed", "collisions", "steps_spent", "monitor_pass",
)


class GridParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def serialize_grid(config: Configuration) -> str:
    rows = ["".join(_CHARS[int(v)] for v in row) for row in config.cells[::-1]]
    return f"N {config.n}\n" + "".join(row + "\n" for row in rows)


def parse_grid(text: str) -> Configuration:
    """Inverse of :func:`serialize_grid`; errors carry 1-based line numbers."""
    lines = text.split("\n")
    if not text.endswith("\n"):
        raise GridParseError(len(lines), "missing final newline")
    lines = lines[:-1]
    header = lines[0].split(" ") if lines else []
    if len(header) != 2 or header[0] != "N" or not header[1].isdigit() or header[1] != str(int(header[1])):
        raise GridParseError(1, f"expected header 'N <n>', got {lines[0] if lines else ''!r}")
    n = int(header[1])
    if n < 1:
        raise GridParseError(1, "n must be at least 1")
    if len(lines) < n + 1:
        raise GridParseError(len(lines) + 1, f"expected {n} grid rows, got {len(lines) - 1}")
    if len(lines) > n + 1:
        raise GridParseError(n + 2, f"unexpected line after {n} grid rows")
    cells = np.zeros((n, n), dtype=np.int8)
    for k, row in enumerate(lines[1:]):
        lineno = k + 2
        if len(row) != n:
            raise GridParseError(lineno, f"expected {n} characters, got {len(row)}")
        for j, ch in enumerate(row):
            if ch not in _CODES:
                raise GridParseError(lineno, f"illegal character {ch!r} at column {j + 1}")
            cells[n - 1 - k, j] = _CODES[ch]
    return Configuration(cells)


def render_ppm(config: Configuration) -> bytes:
    """Binary P6 image, one pixel per cell, rows in grid-text order."""
    pixels = _RGB[config.cells[::-1]]
    return f"P6\n{config.n} {config.n}\n255\n".encode("ascii") + pixels.tobytes()


def render(config: Configuration, fmt: str = "ascii") -> bytes:
    if fmt == "ascii":
        return serialize_grid(config).encode("ascii")
    if fmt == "ppm":
        return render_ppm(config)
    raise ValueError(f"unknown format {fmt!r}")


def format_speed(speed: Fraction) -> str:
    """Six fractional digits, ties rounded to even."""
    scaled = speed * 10**6
    q, r = divmod(scaled.numerator, scaled.denominator)
    twice = 2 * r
    if twice > scaled.denominator or (twice == scaled.denominator and q % 2 == 1):
        q += 1
    whole, frac = divmod(q, 10**6)
    return f"{whole}.{frac:06d}"


def _field(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def record_row(result: TrialResult, sampler: Optional[str] = None) -> list[str]:
    """CSV fields for one trial; ``sampler="grid"`` marks a file input and blanks the seed."""
    v = result.verdict
    cfg = result.config
    return [
        "" if sampler == "grid" else str(result.spec.seed),
        str(cfg.n),
        str(cfg.m),
        str(cfg.red_count),
        str(cfg.blue_count),
        sampler or result.spec.sampler.name,
        v.kind.value,
        _field(v.t_org),
        _field(v.t_stuck),
        _field(v.period),
        format_speed(v.speed) if v.kind is Kind.INTERMEDIATE else "",
        _field(result.collisions),
        str(v.steps_spent),
        _field(result.monitor_pass),
    ]


class RecordWriter:
    """CSV writer that always emits the header row first."""

    def __init__(self, stream):
        self._writer = csv.writer(stream, lineterminator="\n")
        self._writer.writerow(CSV_COLUMNS)

    def write(self, result: TrialResult, **kwargs):
        self._writer.writerow(record_row(result, **kwargs))


def records_to_csv(results) -> str:
    buf = io.StringIO()
    writer = RecordWriter(buf)
    for r in results:
        writer.write(r)
    return buf.getvalue()
