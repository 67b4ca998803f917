"""Independent reference implementations used as test oracles.

Nothing here imports the vectorised engine: the step is a literal per-car
transcription of the movement rules on nested tuples, and the state-graph
oracle enumerates every state of a small torus.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

E, R, B = 0, 1, 2


def naive_step(grid: tuple, n: int):
    """One step on a tuple-of-tuples grid; returns (grid, (mb, bb, mr, br))."""
    cells = [list(row) for row in grid]

    def resolve(color, ahead):
        moves = {}
        for i in range(n):
            for j in range(n):
                if cells[i][j] != color:
                    continue
                verdict = True  # a ring of only this colour rotates
                for k in range(1, n + 1):
                    ci, cj = ahead(i, j, k)
                    v = cells[ci][cj]
                    if v == color:
                        continue
                    verdict = v == E
                    break
                moves[(i, j)] = verdict
        return moves

    blue = resolve(B, lambda i, j, k: (i, (j + k) % n))
    new = [row[:] for row in cells]
    for (i, j), go in blue.items():
        if go:
            new[i][j] = E
    for (i, j), go in blue.items():
        if go:
            new[i][(j + 1) % n] = B
    cells = new

    red = resolve(R, lambda i, j, k: ((i + k) % n, j))
    new = [row[:] for row in cells]
    for (i, j), go in red.items():
        if go:
            new[i][j] = E
    for (i, j), go in red.items():
        if go:
            new[(i + 1) % n][j] = R

    mb = sum(blue.values())
    mr = sum(red.values())
    stats = (mb, len(blue) - mb, mr, len(red) - mr)
    return tuple(tuple(row) for row in new), stats


def to_tuple(cells) -> tuple:
    return tuple(tuple(int(v) for v in row) for row in cells)


class StateGraph:
    """Full transition map of every state on the n x n torus (3^(n^2) states)."""

    def __init__(self, n: int):
        self.n = n
        self.succ = {}
        for flat in itertools.product((E, R, B), repeat=n * n):
            grid = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
            self.succ[grid] = naive_step(grid, n)

    def verdict(self, grid: tuple) -> dict:
        """Fate of the trajectory from ``grid`` read off its terminal cycle."""
        m = sum(v != E for row in grid for v in row)
        times = {}
        path = []
        state = grid
        while state not in times:
            times[state] = len(path)
            path.append(state)
            state = self.succ[state][0]
        entry = times[state]
        period = len(path) - entry
        stats = [self.succ[s][1] for s in path]
        cycle = stats[entry:]
        blocked = [s[1] + s[3] for s in stats]
        moved = [s[0] + s[2] for s in stats]
        if m == 0:
            return {"kind": "SpeedOne", "t_org": 0, "collisions": 0}
        if any(mv == 0 for mv in moved[entry:]):
            # a zero-move step is a fixed point, so the cycle is that single state
            assert period == 1
            return {"kind": "Stuck", "t_stuck": entry}
        if all(b == 0 for b in (c[1] + c[3] for c in cycle)):
            last = max((t for t in range(entry) if blocked[t]), default=-1)
            return {"kind": "SpeedOne", "t_org": last + 1, "collisions": sum(blocked[: last + 1])}
        speed = Fraction(sum(moved[entry:]), m * period)
        return {"kind": "Intermediate", "cycle_entry": entry, "period": period, "speed": speed}
