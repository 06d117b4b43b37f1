import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epifuzz.spatial import (
    TorusWorld,
    neighbors_within,
    neighbors_within_naive,
    pairs_within,
    rebuild_index,
    torus_distance,
)

from oracles import naive_neighbors

W = TorusWorld(100.0, 100.0)


@pytest.mark.parametrize(
    "p, q, d",
    [((1, 1), (99, 99), math.sqrt(8)), ((3, 4), (3, 4), 0.0), ((0, 0), (50, 0), 50.0), ((0, 0), (3, 4), 5.0)],
)
def test_torus_distance(p, q, d):
    assert torus_distance(p, q, W) == pytest.approx(d, abs=1e-12)
    assert torus_distance(q, p, W) == torus_distance(p, q, W)


def test_torus_distance_never_exceeds_plain():
    rng = np.random.default_rng(0)
    p = rng.uniform(0, 100, (1000, 2))
    q = rng.uniform(0, 100, (1000, 2))
    assert np.all(torus_distance(p, q, W) <= np.hypot(*(p - q).T) + 1e-12)


def test_world_rejects_nonpositive():
    with pytest.raises(ValueError):
        TorusWorld(0, 10)


def test_rebuild_examples():
    assert rebuild_index(np.empty((0, 2)), 10, W).cells == {}
    assert rebuild_index([[0.5, 0.5]], 10, W).cells == {(0, 0): [0]}
    with pytest.raises(ValueError):
        rebuild_index([[0.5, 0.5]], 0, W)


def test_rebuild_counts_live_agents():
    rng = np.random.default_rng(1)
    pos = rng.uniform(0, 100, (1000, 2))
    alive = rng.random(1000) > 0.1
    idx = rebuild_index(pos, 7.0, W, alive=alive)
    cells = idx.cells
    assert sum(len(v) for v in cells.values()) == alive.sum()
    seen = sorted(i for v in cells.values() for i in v)
    assert seen == np.flatnonzero(alive).tolist()
    for (cx, cy), ids in cells.items():
        for i in ids:
            assert (int(pos[i, 0] // 7.0) % idx.ncx, int(pos[i, 1] // 7.0) % idx.ncy) == (cx, cy)


def test_empty_index_query():
    idx = rebuild_index(np.empty((0, 2)), 5, W)
    assert neighbors_within(idx, (3, 3), 5) == set()


def test_boundary_is_closed():
    pos = np.array([[10.0, 10.0], [13.0, 14.0]])  # distance exactly 5
    idx = rebuild_index(pos, 5.0, W)
    assert neighbors_within(idx, pos[0], 5.0) == {0, 1}
    assert neighbors_within_naive(pos, pos[0], 5.0, W) == {0, 1}
    assert neighbors_within_naive(pos, pos[0], 5.0 - 1e-9, W) == {0}


def test_radius_larger_than_cell_rejected():
    idx = rebuild_index([[1.0, 1.0]], 2.0, W)
    with pytest.raises(ValueError, match="exceeds"):
        neighbors_within(idx, (1, 1), 2.5)


def test_oracle_equivalence_randomised():
    rng = np.random.default_rng(11)
    for _ in range(300):
        world = TorusWorld(*rng.uniform(5, 120, 2))
        n = int(rng.integers(0, 500))
        pos = rng.uniform(0, 1, (n, 2)) * [world.width, world.height]
        cell = rng.uniform(0.5, 15)
        r = cell * rng.uniform(0.1, 1.0)
        idx = rebuild_index(pos, cell, world)
        center = rng.uniform(0, 1, 2) * [world.width, world.height]
        got = neighbors_within(idx, center, r)
        assert got == neighbors_within_naive(pos, center, r, world)
        assert got == naive_neighbors(pos.tolist(), center.tolist(), r, world.width, world.height)


def test_tiny_world_with_fewer_than_three_cells():
    world = TorusWorld(5.0, 5.0)
    rng = np.random.default_rng(3)
    pos = rng.uniform(0, 5, (50, 2))
    idx = rebuild_index(pos, 2.4, world)  # two cells per axis
    assert len(idx.query_cells((1, 1))) == 4
    for c in pos[:10]:
        assert neighbors_within(idx, c, 2.4) == neighbors_within_naive(pos, c, 2.4, world)


def test_pairs_within_matches_naive():
    rng = np.random.default_rng(5)
    pos = rng.uniform(0, 100, (800, 2))
    idx = rebuild_index(pos, 4.0, W)
    q = np.arange(0, 800, 3)
    qs, ms = pairs_within(idx, q, 3.5)
    got = {(int(a), int(b)) for a, b in zip(qs, ms)}
    want = {(int(i), j) for i in q for j in neighbors_within_naive(pos, pos[i], 3.5, W)}
    assert got == want


dyadic = st.integers(0, 64 * 8 - 1).map(lambda k: k / 8)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(dyadic, dyadic), min_size=1, max_size=60),
    st.tuples(dyadic, dyadic),
    st.integers(1, 32).map(lambda k: k / 4),
)
def test_symmetry_and_translation_invariance(points, shift, r):
    world = TorusWorld(64.0, 64.0)
    pos = np.array(points)
    idx = rebuild_index(pos, 8.0, world)
    sets = [neighbors_within(idx, p, r) for p in pos]
    for i, s in enumerate(sets):
        for j in s:
            assert i in sets[j]
    moved = world.wrap(pos + np.array(shift))
    idx2 = rebuild_index(moved, 8.0, world)
    assert [neighbors_within(idx2, p, r) for p in moved] == sets


def test_grid_scans_nine_cells_per_query():
    n = 20_000
    world = TorusWorld(200.0, 200.0)
    rng = np.random.default_rng(8)
    pos = rng.uniform(0, 200, (n, 2))
    # mean neighbourhood ~10: density 0.5, pi r^2 * 0.5 = 10
    r = math.sqrt(10 / (0.5 * math.pi))
    idx = rebuild_index(pos, r, world)
    visited = [len(set(idx.query_cells(p))) for p in pos]
    assert set(visited) == {9}
    sizes = [len(neighbors_within(idx, p, r)) - 1 for p in pos[:2000]]
    assert 9 < np.mean(sizes) < 11
