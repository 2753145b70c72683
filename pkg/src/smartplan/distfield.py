"""Obstacle-aware 2D shortest-path lower bound on a coarse grid.

Used by the search heuristic and the warm-start ordering. The grid is
deliberately *under*-inflated and the queried value is deflated by a
factor-2 hugging bound plus an endpoint slop, so the result is a certified
lower bound on the length of any continuous path of the rear-axle point,
and is 1-Lipschitz along queries (which keeps the heuristic consistent).
"""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .world import OccupancyMap

SQRT2 = math.sqrt(2.0)


class DistanceField:
    """Grid distances from a fixed goal point over the eroded free space."""

    cell = 0.5
    # grid path length <= 2 * continuous length + endpoint slop
    _hug_factor = 2.0
    _slop_cells = 8.0

    def __init__(self, occupancy: OccupancyMap, inflation: float, goal_xy):
        self.occupancy = occupancy
        self.inflation = inflation
        nx = max(2, int(math.ceil(occupancy.width / self.cell)))
        ny = max(2, int(math.ceil(occupancy.height / self.cell)))
        self.nx, self.ny = nx, ny

        xs = (np.arange(nx) + 0.5) * self.cell
        ys = (np.arange(ny) + 0.5) * self.cell
        cx, cy = np.meshgrid(xs, ys, indexing="ij")

        # under-inflate so every truly-free continuous point has a free cell
        eff = max(0.0, inflation - self.cell * SQRT2 / 2.0)
        free = (cx >= eff) & (cy >= eff) \
            & (cx <= occupancy.width - eff) & (cy <= occupancy.height - eff)
        for xmin, ymin, xmax, ymax in occupancy.obstacles:
            dx = np.maximum(np.maximum(xmin - cx, 0.0), cx - xmax)
            dy = np.maximum(np.maximum(ymin - cy, 0.0), cy - ymax)
            free &= np.hypot(dx, dy) >= eff
        self.free = free

        self._grid_dist = self._solve(goal_xy)
        self._filled = self._fill_blocked(self._grid_dist)

    def _node(self, i, j):
        return i * self.ny + j

    def _solve(self, goal_xy) -> np.ndarray:
        nx, ny = self.nx, self.ny
        free = self.free
        rows, cols, data = [], [], []
        offsets = [(1, 0, self.cell), (0, 1, self.cell),
                   (1, 1, self.cell * SQRT2), (1, -1, self.cell * SQRT2)]
        idx = np.arange(nx * ny).reshape(nx, ny)
        for di, dj, w in offsets:
            src_i = slice(max(0, -di), nx - max(0, di))
            src_j = slice(max(0, -dj), ny - max(0, dj))
            dst_i = slice(max(0, di), nx + min(0, di) or None)
            dst_j = slice(max(0, dj), ny + min(0, dj) or None)
            ok = free[src_i, src_j] & free[dst_i, dst_j]
            a = idx[src_i, src_j][ok]
            b = idx[dst_i, dst_j][ok]
            rows.append(a)
            cols.append(b)
            data.append(np.full(a.shape, w))
        if rows:
            rows = np.concatenate(rows)
            cols = np.concatenate(cols)
            data = np.concatenate(data)
        graph = csr_matrix((data, (rows, cols)), shape=(nx * ny, nx * ny))

        gi = min(self.nx - 1, max(0, int(goal_xy[0] / self.cell)))
        gj = min(self.ny - 1, max(0, int(goal_xy[1] / self.cell)))
        if not free[gi, gj]:
            # snap to the nearest free cell (goal states are always valid,
            # but their containing cell can sit on the eroded fringe)
            fi, fj = np.nonzero(free)
            if len(fi) == 0:
                return np.full((self.nx, self.ny), np.inf)
            k = np.argmin((fi - gi) ** 2 + (fj - gj) ** 2)
            gi, gj = int(fi[k]), int(fj[k])
        dist = dijkstra(graph, directed=False, indices=self._node(gi, gj))
        return dist.reshape(self.nx, self.ny)

    def _fill_blocked(self, dist: np.ndarray) -> np.ndarray:
        """Give blocked cells a Lipschitz-consistent stand-in value so
        bilinear queries next to walls stay finite."""
        filled = dist.copy()
        blocked = ~self.free | ~np.isfinite(dist)
        if not blocked.any():
            return filled
        padded = np.full((self.nx + 2, self.ny + 2), np.inf)
        padded[1:-1, 1:-1] = np.where(blocked, np.inf, dist)
        neigh = np.full(dist.shape, np.inf)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                neigh = np.minimum(
                    neigh, padded[1 + di:self.nx + 1 + di, 1 + dj:self.ny + 1 + dj])
        filled[blocked] = neigh[blocked] + SQRT2 * self.cell
        return filled

    def grid_distance(self, x: float, y: float) -> float:
        """Bilinear grid distance at a metric point (inf if unreachable)."""
        fx = x / self.cell - 0.5
        fy = y / self.cell - 0.5
        i0 = min(max(int(math.floor(fx)), 0), self.nx - 2)
        j0 = min(max(int(math.floor(fy)), 0), self.ny - 2)
        tx = min(max(fx - i0, 0.0), 1.0)
        ty = min(max(fy - j0, 0.0), 1.0)
        d = self._filled
        v00 = d[i0, j0]
        v10 = d[i0 + 1, j0]
        v01 = d[i0, j0 + 1]
        v11 = d[i0 + 1, j0 + 1]
        return ((1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10
                + (1 - tx) * ty * v01 + tx * ty * v11)

    def lower_bound(self, x: float, y: float) -> float:
        """Certified lower bound on continuous free-space path length to goal."""
        g = self.grid_distance(x, y)
        if not math.isfinite(g):
            return math.inf
        return max(0.0, (g - self._slop_cells * self.cell) / self._hug_factor)
