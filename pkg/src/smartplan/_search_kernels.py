"""Jitted inner kernels of the spatio-temporal search.

Kept separate from the planner class so they stay plain functions of
arrays and scalars; pure-python fallbacks apply when numba is absent.
"""
from __future__ import annotations

import math

import numpy as np

from .reeds_shepp import njit, rs_length_metric


@njit
def feasible_primitives(mask, lcx, lcy, x, y, cos_t, sin_t,
                        obstacles, r, width, height,
                        dyn, has_dyn, limit2):
    """In-place refinement of the primitive feasibility mask.

    lcx/lcy: body-frame circle-center coordinates (n_prim, n_sub, 2).
    dyn: constraint-vehicle centers at the sub-sample times
    (n_sub, m, 2, 2); ignored when has_dyn is False.
    """
    n_prim, n_sub, _ = lcx.shape
    n_obs = obstacles.shape[0]
    r2 = r * r
    for p in range(n_prim):
        if not mask[p]:
            continue
        ok = True
        for k in range(n_sub):
            for ci in range(2):
                cx = x + lcx[p, k, ci] * cos_t - lcy[p, k, ci] * sin_t
                cy = y + lcx[p, k, ci] * sin_t + lcy[p, k, ci] * cos_t
                if cx < r or cy < r or cx > width - r or cy > height - r:
                    ok = False
                    break
                for o in range(n_obs):
                    dx = obstacles[o, 0] - cx
                    if dx < 0.0:
                        dx = cx - obstacles[o, 2]
                        if dx < 0.0:
                            dx = 0.0
                    dy = obstacles[o, 1] - cy
                    if dy < 0.0:
                        dy = cy - obstacles[o, 3]
                        if dy < 0.0:
                            dy = 0.0
                    if dx * dx + dy * dy < r2:
                        ok = False
                        break
                if not ok:
                    break
                if has_dyn:
                    m = dyn.shape[1]
                    for v in range(m):
                        for cj in range(2):
                            ddx = cx - dyn[k, v, cj, 0]
                            ddy = cy - dyn[k, v, cj, 1]
                            if ddx * ddx + ddy * ddy <= limit2:
                                ok = False
                                break
                        if not ok:
                            break
                    if not ok:
                        break
            if not ok:
                break
        mask[p] = ok
    return mask


@njit
def rs_net_bound(x, y, theta, net, radius, net_slack):
    """Lower bound on the distance to the goal acceptance ball via a net
    of reeds-shepp targets covering the ball."""
    best = math.inf
    for i in range(net.shape[0]):
        d = rs_length_metric(x, y, theta, net[i, 0], net[i, 1], net[i, 2], radius)
        if d < best:
            best = d
    return best - net_slack


@njit
def bilinear_grid(values, cell, nx, ny, x, y):
    """Bilinear interpolation over cell-center samples."""
    fx = x / cell - 0.5
    fy = y / cell - 0.5
    i0 = int(math.floor(fx))
    if i0 < 0:
        i0 = 0
    elif i0 > nx - 2:
        i0 = nx - 2
    j0 = int(math.floor(fy))
    if j0 < 0:
        j0 = 0
    elif j0 > ny - 2:
        j0 = ny - 2
    tx = fx - i0
    if tx < 0.0:
        tx = 0.0
    elif tx > 1.0:
        tx = 1.0
    ty = fy - j0
    if ty < 0.0:
        ty = 0.0
    elif ty > 1.0:
        ty = 1.0
    return ((1 - tx) * (1 - ty) * values[i0, j0]
            + tx * (1 - ty) * values[i0 + 1, j0]
            + (1 - tx) * ty * values[i0, j0 + 1]
            + tx * ty * values[i0 + 1, j0 + 1])


_EMPTY_DYN = np.zeros((1, 1, 2, 2))


def empty_dyn() -> np.ndarray:
    return _EMPTY_DYN
