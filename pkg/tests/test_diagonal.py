import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmllab.diagonal import (
    Arc,
    Projection,
    TrajectoryMonitor,
    check_arc_static,
    check_long_arc_monotone,
    check_projection_step,
    decompose_arcs,
    long_arc_count,
    project,
)
from bmllab.experiments import sample_uniform_colored
from bmllab.grid import Configuration, advance


def proj(n, values, t=0):
    return Projection(n, t, tuple(values))


def brute_arcs(n, occupied):
    """Maximal empty circular runs, found by trying every start and length."""
    empty = [p for p in range(n) if p not in occupied]
    if not empty:
        return set()
    if not occupied:
        return {(None, n)}
    arcs = set()
    for s in empty:
        if (s - 1) % n not in occupied:
            continue
        length = 0
        while (s + length) % n not in occupied:
            length += 1
        arcs.add((s, length))
    return arcs


def test_project_substitution():
    c = Configuration.from_cars(5, red=[(1, 2)])
    assert project(c, 0).values == (3,)
    c1 = Configuration.from_cars(5, red=[(2, 2)])
    assert project(c1, 1).values == (3,)


def test_blocked_car_moves_left():
    c = Configuration.from_cars(5, blue=[(0, 1)])
    assert project(c, 0).values == (1,)
    assert project(c, 1).values == (0,)


def test_project_rejects_negative_time():
    with pytest.raises(ValueError):
        project(Configuration.empty(3), -1)


def test_decompose_examples():
    d = decompose_arcs(proj(5, [0, 2]))
    assert d.arcs == (Arc(1, 1), Arc(3, 2))
    assert long_arc_count(d) == 1

    d = decompose_arcs(proj(6, [2, 3]))
    assert d.arcs == (Arc(4, 4),)
    assert set(d.arcs[0].points(6)) == {4, 5, 0, 1}

    d = decompose_arcs(proj(4, [0, 1, 2, 3, 3]))
    assert d.arcs == () and d.r == 0


def test_long_arc_count_examples():
    assert long_arc_count(decompose_arcs(proj(5, [0, 2]))) == 1
    assert long_arc_count(decompose_arcs(proj(4, []))) == 1
    assert long_arc_count(decompose_arcs(proj(6, [0, 2, 4]))) == 0


def test_first_arc_holds_smallest_empty_point():
    d = decompose_arcs(proj(8, [1, 4, 6]))
    assert d.arcs[0] == Arc(7, 2)  # wraps and contains 0
    assert [a.start for a in d.arcs] == [7, 2, 5]


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(0, n - 1)))))
def test_decompose_matches_brute_force(args):
    n, occupied = args
    d = decompose_arcs(proj(n, sorted(occupied)))
    got = {(a.start, a.length) for a in d.arcs}
    expected = brute_arcs(n, occupied)
    if expected == {(None, n)}:
        assert got == {(0, n)}
    else:
        assert got == expected
    covered = [p for a in d.arcs for p in a.points(n)]
    assert len(covered) == len(set(covered))
    assert set(covered) == set(range(n)) - occupied
    # pigeonhole: all arcs short forces at least N/2 occupied points
    if long_arc_count(d) == 0 and n >= 2:
        assert 2 * len(occupied) >= n


def test_monotone_examples():
    assert check_long_arc_monotone(3, 3)
    assert check_long_arc_monotone(3, 2)
    assert not check_long_arc_monotone(2, 3)


def test_projection_step_examples():
    before = proj(5, [3, 1])
    assert check_projection_step(before, proj(5, [3, 0], 1), [True, False])
    bad = check_projection_step(before, proj(5, [1, 0], 1), [True, False])
    assert not bad and bad.witness == 0
    assert not check_projection_step(before, proj(5, [4, 0], 1), [True, False])
    with pytest.raises(ValueError):
        check_projection_step(before, proj(5, [3], 1), [True])


def test_arc_static_single_free_car():
    c = Configuration.from_cars(4, blue=[(0, 0)])
    d0 = decompose_arcs(project(c, 0))
    assert d0.arcs == (Arc(1, 3),)
    nxt = advance(c).config
    assert check_arc_static(d0, project(nxt, 1))


def test_arc_static_negative_control():
    c = Configuration.from_cars(4, blue=[(0, 0)])
    d0 = decompose_arcs(project(c, 0))
    # the boundary occupant jumps to a different point
    corrupted = proj(4, [2], 1)
    cert = check_arc_static(d0, corrupted)
    assert not cert and cert.witness == Arc(1, 3)


def test_arc_static_size_mismatch():
    with pytest.raises(ValueError):
        check_arc_static(decompose_arcs(proj(4, [0])), proj(5, [0], 1))


@pytest.mark.parametrize("seed", range(40))
def test_monitor_passes_on_random_trajectories(seed):
    n = 6 + seed % 5
    m = 1 + (seed * 7) % (n * n // 2)
    c = sample_uniform_colored(n, m, seed)
    mon = TrajectoryMonitor(c, keep_records=True)
    for _ in range(3 * n):
        res = advance(c)
        rec = mon.observe(res)
        assert all(v for k, v in rec.items() if isinstance(v, bool)), rec
        c = res.config
    assert mon.passed


def test_sparse_trajectory_keeps_a_long_arc():
    n = 20
    for seed in range(20):
        c = sample_uniform_colored(n, 9, seed)
        mon = TrajectoryMonitor(c)
        for _ in range(2 * n):
            res = advance(c)
            assert mon.observe(res)["long_arc_count"] >= 1
            c = res.config
        assert mon.passed


def test_circuit_surrogate_on_dense_trajectory():
    # blocked often enough that some car completes a full circuit
    n = 6
    c = sample_uniform_colored(n, 18, 3)
    mon = TrajectoryMonitor(c)
    for _ in range(40 * n):
        res = advance(c)
        rec = mon.observe(res)
        if (mon.decrements >= n).any():
            assert rec["long_arc_count"] == 0
        c = res.config
    assert mon.passed
    assert (mon.decrements >= n).any()
