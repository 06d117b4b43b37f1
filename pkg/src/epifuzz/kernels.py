"""Per-day hot loops: movement and exposure collection.

Each kernel comes as a numba version, which works on an agent range
``[lo, hi)`` so disjoint ranges can run on separate threads, and a numpy
version over the whole population. Both consume the same keyed draws and
produce the same exposures.
"""
import numpy as np

from ._backend import njit
from .population import DEAD, NO_CARE, SUSCEPTIBLE
from .rng import uniform_from_key, uniform_nb
from .spatial import pairs_within, wrap_coord

TWO_PI = 2.0 * np.pi


@njit(cache=True, nogil=True)
def move_nb(pos, heading, state, care, key, speed, wiggle, width, height, lo, hi):
    for i in range(lo, hi):
        if state[i] == DEAD or care[i] != NO_CARE:
            continue
        u = uniform_nb(key, i, 0)
        h = heading[i] + (2.0 * u - 1.0) * wiggle
        h = h % TWO_PI
        if h >= TWO_PI:
            h -= TWO_PI
        heading[i] = h
        x = (pos[i, 0] + speed * np.cos(h)) % width
        if x >= width:
            x -= width
        y = (pos[i, 1] + speed * np.sin(h)) % height
        if y >= height:
            y -= height
        pos[i, 0] = x
        pos[i, 1] = y


def move_np(pos, heading, state, care, key, speed, wiggle, width, height):
    movers = np.flatnonzero((state != DEAD) & (care == NO_CARE))
    if movers.size == 0:
        return
    u = uniform_from_key(key, movers, 0)
    h = wrap_coord(heading[movers] + (2.0 * u - 1.0) * wiggle, TWO_PI)
    heading[movers] = h
    pos[movers, 0] = wrap_coord(pos[movers, 0] + speed * np.cos(h), width)
    pos[movers, 1] = wrap_coord(pos[movers, 1] + speed * np.sin(h), height)


@njit(cache=True, nogil=True)
def exposures_nb(
    pos, state, infectious, p_target, order, starts, ncx, ncy, cell_size,
    shifts_x, shifts_y, width, height, radius, key, lo, hi, infected_by, n_exposures,
):
    """For each susceptible in [lo, hi): lowest successful infector and exposure count."""
    for s in range(lo, hi):
        infected_by[s] = -1
        n_exposures[s] = 0
        if state[s] != SUSCEPTIBLE:
            continue
        xs = pos[s, 0]
        ys = pos[s, 1]
        cx = int(np.floor(xs / cell_size)) % ncx
        cy = int(np.floor(ys / cell_size)) % ncy
        best = -1
        hits = 0
        for sy in shifts_y:
            for sx in shifts_x:
                c = ((cy + sy) % ncy) * ncx + (cx + sx) % ncx
                for k in range(starts[c], starts[c + 1]):
                    j = order[k]
                    if not infectious[j]:
                        continue
                    dx = abs(pos[j, 0] - xs)
                    dy = abs(pos[j, 1] - ys)
                    dx = min(dx, width - dx)
                    dy = min(dy, height - dy)
                    if np.sqrt(dx * dx + dy * dy) > radius:
                        continue
                    if uniform_nb(key, j, s) < p_target[s]:
                        hits += 1
                        if best < 0 or j < best:
                            best = j
        infected_by[s] = best
        n_exposures[s] = hits


def exposures_np(index, state, infectious, p_target, radius, key):
    n = len(state)
    infected_by = np.full(n, -1, dtype=np.int64)
    n_exposures = np.zeros(n, dtype=np.int64)
    q, m = pairs_within(index, np.flatnonzero(infectious), radius)
    keep = state[m] == SUSCEPTIBLE
    q, m = q[keep], m[keep]
    if q.size == 0:
        return infected_by, n_exposures
    ok = uniform_from_key(key, q, m) < p_target[m]
    q, m = q[ok], m[ok]
    n_exposures += np.bincount(m, minlength=n)
    srt = np.lexsort((q, m))
    targets, first = np.unique(m[srt], return_index=True)
    infected_by[targets] = q[srt][first]
    return infected_by, n_exposures
