"""Torus geometry and a uniform-grid index for radius queries.

The index is stored CSR-style: agent ids sorted by (cell, id) in ``order`` and
per-cell offsets in ``starts``, which is what the compiled kernels consume.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TorusWorld:
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"world dimensions must be positive, got {self.width}x{self.height}")

    def wrap(self, pos):
        """Map positions into [0, width) x [0, height)."""
        pos = np.asarray(pos, dtype=np.float64)
        out = np.empty_like(pos)
        out[..., 0] = wrap_coord(pos[..., 0], self.width)
        out[..., 1] = wrap_coord(pos[..., 1], self.height)
        return out


def _as_world(w):
    if isinstance(w, TorusWorld):
        return w
    return TorusWorld(float(w[0]), float(w[1]))


def wrap_coord(x, size):
    x = np.mod(x, size)
    # fmod of a tiny negative can land exactly on size
    return np.where(x >= size, x - size, x)


def torus_distance(p, q, w) -> float:
    """Minimal-image Euclidean distance; broadcasts over leading axes."""
    w = _as_world(w)
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    dx = np.abs(p[..., 0] - q[..., 0])
    dy = np.abs(p[..., 1] - q[..., 1])
    dx = np.minimum(dx, w.width - dx)
    dy = np.minimum(dy, w.height - dy)
    d = np.sqrt(dx * dx + dy * dy)
    return float(d) if d.ndim == 0 else d


def _cell_shifts(n):
    # distinct wrapped offsets -1, 0, +1; fewer than three when the grid is narrow
    seen = []
    for s in (-1, 0, 1):
        if s % n not in [t % n for t in seen]:
            seen.append(s)
    return np.array(seen, dtype=np.int64)


@dataclass
class GridIndex:
    cell_size: float
    world: TorusWorld
    ncx: int
    ncy: int
    positions: np.ndarray
    cell_of: np.ndarray
    order: np.ndarray
    starts: np.ndarray
    shifts_x: np.ndarray
    shifts_y: np.ndarray
    generation: int = 0

    def cell_coords(self, pos):
        pos = np.asarray(pos, dtype=np.float64)
        cx = np.floor(pos[..., 0] / self.cell_size).astype(np.int64) % self.ncx
        cy = np.floor(pos[..., 1] / self.cell_size).astype(np.int64) % self.ncy
        return cx, cy

    def members(self, cx, cy):
        c = (cy % self.ncy) * self.ncx + (cx % self.ncx)
        return self.order[self.starts[c]:self.starts[c + 1]]

    @property
    def cells(self):
        """Non-empty cells as ``{(cx, cy): ids}``."""
        counts = np.diff(self.starts)
        return {
            (int(c % self.ncx), int(c // self.ncx)): self.order[self.starts[c]:self.starts[c + 1]].tolist()
            for c in np.flatnonzero(counts)
        }

    def query_cells(self, center):
        """Wrapped cell coordinates scanned for a query at ``center``."""
        cx, cy = self.cell_coords(center)
        return [
            (int((cx + sx) % self.ncx), int((cy + sy) % self.ncy))
            for sy in self.shifts_y
            for sx in self.shifts_x
        ]


def rebuild_index(positions, cell_size, w, alive=None, generation=0) -> GridIndex:
    """Bin every live agent by ``floor(position / cell_size)`` with wrapping.

    A world side that is not a multiple of ``cell_size`` folds the remainder
    into cell 0, so every cell is at least ``cell_size`` wide.
    """
    if not cell_size > 0:
        raise ValueError(f"cell_size must be positive, got {cell_size}")
    w = _as_world(w)
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    ncx = max(1, int(w.width // cell_size))
    ncy = max(1, int(w.height // cell_size))
    cx = np.floor(positions[:, 0] / cell_size).astype(np.int64) % ncx
    cy = np.floor(positions[:, 1] / cell_size).astype(np.int64) % ncy
    cell_of = cy * ncx + cx
    if alive is not None:
        cell_of = np.where(np.asarray(alive, dtype=bool), cell_of, -1)
    live = np.flatnonzero(cell_of >= 0)
    order = live[np.argsort(cell_of[live], kind="stable")]
    counts = np.bincount(cell_of[live], minlength=ncx * ncy)
    starts = np.zeros(ncx * ncy + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])
    return GridIndex(
        cell_size=float(cell_size),
        world=w,
        ncx=ncx,
        ncy=ncy,
        positions=positions,
        cell_of=cell_of,
        order=order.astype(np.int64),
        starts=starts,
        shifts_x=_cell_shifts(ncx),
        shifts_y=_cell_shifts(ncy),
        generation=generation,
    )


def _check_radius(idx, r):
    if r > idx.cell_size:
        raise ValueError(f"query radius {r} exceeds index cell size {idx.cell_size}; neighbours would be missed")


def neighbors_within(idx: GridIndex, center, r, w=None):
    """Ids of indexed agents within torus distance ``r`` (inclusive) of ``center``."""
    _check_radius(idx, r)
    w = idx.world if w is None else _as_world(w)
    cand = [idx.members(cx, cy) for cx, cy in idx.query_cells(center)]
    if not cand:
        return set()
    cand = np.concatenate(cand)
    d = torus_distance(idx.positions[cand], np.asarray(center, dtype=np.float64), w)
    return set(cand[np.atleast_1d(d <= r)].tolist())


def neighbors_within_naive(positions, center, r, w, alive=None):
    """Linear-scan reference for :func:`neighbors_within`."""
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    if len(positions) == 0:
        return set()
    d = torus_distance(positions, np.asarray(center, dtype=np.float64), w)
    hit = np.atleast_1d(d <= r)
    if alive is not None:
        hit &= np.asarray(alive, dtype=bool)
    return set(np.flatnonzero(hit).tolist())


def pairs_within(idx: GridIndex, query_ids, r):
    """All (query, member) id pairs with torus distance <= r, vectorised.

    Query agents are looked up in ``idx.positions``; pairs are returned
    sorted by (query, member). Self-pairs are included.
    """
    _check_radius(idx, r)
    query_ids = np.asarray(query_ids, dtype=np.int64)
    if query_ids.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    qpos = idx.positions[query_ids]
    qcx, qcy = idx.cell_coords(qpos)
    qs, ms = [], []
    for sy in idx.shifts_y:
        for sx in idx.shifts_x:
            c = ((qcy + sy) % idx.ncy) * idx.ncx + (qcx + sx) % idx.ncx
            lo = idx.starts[c]
            cnt = idx.starts[c + 1] - lo
            total = int(cnt.sum())
            if total == 0:
                continue
            rep = np.repeat(np.arange(query_ids.size), cnt)
            within = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            qs.append(rep)
            ms.append(idx.order[np.repeat(lo, cnt) + within])
    if not qs:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    q = np.concatenate(qs)
    m = np.concatenate(ms)
    d = torus_distance(qpos[q], idx.positions[m], idx.world)
    keep = d <= r
    q, m = query_ids[q[keep]], m[keep]
    srt = np.lexsort((m, q))
    return q[srt], m[srt]
