"""Chunked array-based core of the spatio-temporal A* search.

Everything here is plain functions over numpy arrays so the whole loop can
be jitted; the planner wrapper owns array growth and wall-clock budgeting
between chunks. Heap ordering replicates tuple comparison of
(f, -g, x, y, theta, tie) exactly, and the closed/open bookkeeping is an
open-addressed hash table over packed int64 keys.
"""
from __future__ import annotations

import math

import numpy as np

from .reeds_shepp import njit, rs_length_metric
from ._search_kernels import bilinear_grid

GOAL_KEY = np.int64(-1)
EMPTY_KEY = np.int64(-(2 ** 62))

STATUS_CONTINUE = 0
STATUS_FOUND = 1
STATUS_EXHAUSTED = 2
STATUS_NODE_BUDGET = 3
STATUS_NEED_SPACE = 4


@njit
def _hash_slot(key, mask):
    h = (key * np.int64(0x9E3779B97F4A7C15)) & np.int64(0x7FFFFFFFFFFFFFFF)
    return h & mask


@njit
def table_get(keys, vals, key):
    mask = np.int64(len(keys) - 1)
    slot = _hash_slot(key, mask)
    while True:
        k = keys[slot]
        if k == key:
            return vals[slot]
        if k == EMPTY_KEY:
            return math.inf
        slot = (slot + 1) & mask


@njit
def table_set(keys, vals, key, value):
    """Returns the number of newly occupied slots (0 or 1)."""
    mask = np.int64(len(keys) - 1)
    slot = _hash_slot(key, mask)
    while True:
        k = keys[slot]
        if k == key:
            vals[slot] = value
            return 0
        if k == EMPTY_KEY:
            keys[slot] = key
            vals[slot] = value
            return 1
        slot = (slot + 1) & mask


@njit
def table_rehash(keys, vals, new_keys, new_vals):
    for i in range(len(keys)):
        if keys[i] != EMPTY_KEY:
            table_set(new_keys, new_vals, keys[i], vals[i])


@njit
def _heap_less(hf, hng, hx, hy, hth, htie, a, b):
    if hf[a] != hf[b]:
        return hf[a] < hf[b]
    if hng[a] != hng[b]:
        return hng[a] < hng[b]
    if hx[a] != hx[b]:
        return hx[a] < hx[b]
    if hy[a] != hy[b]:
        return hy[a] < hy[b]
    if hth[a] != hth[b]:
        return hth[a] < hth[b]
    return htie[a] < htie[b]


@njit
def _heap_swap(hf, hng, hx, hy, hth, htie, hidx, a, b):
    hf[a], hf[b] = hf[b], hf[a]
    hng[a], hng[b] = hng[b], hng[a]
    hx[a], hx[b] = hx[b], hx[a]
    hy[a], hy[b] = hy[b], hy[a]
    hth[a], hth[b] = hth[b], hth[a]
    htie[a], htie[b] = htie[b], htie[a]
    hidx[a], hidx[b] = hidx[b], hidx[a]


@njit
def heap_push(hf, hng, hx, hy, hth, htie, hidx, size,
              f, ng, x, y, th, tie, idx):
    i = size
    hf[i] = f
    hng[i] = ng
    hx[i] = x
    hy[i] = y
    hth[i] = th
    htie[i] = tie
    hidx[i] = idx
    while i > 0:
        parent = (i - 1) >> 1
        if _heap_less(hf, hng, hx, hy, hth, htie, i, parent):
            _heap_swap(hf, hng, hx, hy, hth, htie, hidx, i, parent)
            i = parent
        else:
            break
    return size + 1


@njit
def heap_pop(hf, hng, hx, hy, hth, htie, hidx, size):
    last = size - 1
    _heap_swap(hf, hng, hx, hy, hth, htie, hidx, 0, last)
    i = 0
    while True:
        left = 2 * i + 1
        if left >= last:
            break
        right = left + 1
        child = left
        if right < last and _heap_less(hf, hng, hx, hy, hth, htie, right, left):
            child = right
        if _heap_less(hf, hng, hx, hy, hth, htie, child, i):
            _heap_swap(hf, hng, hx, hy, hth, htie, hidx, child, i)
            i = child
        else:
            break
    return last


@njit
def _in_goal_set(x, y, theta, gx, gy, gth, pos_tol2, heading_tol,
                 rs_tol, radius):
    dx = x - gx
    dy = y - gy
    if dx * dx + dy * dy > pos_tol2:
        return False
    dth = theta - gth
    if dth > math.pi:
        dth -= 2 * math.pi
    elif dth <= -math.pi:
        dth += 2 * math.pi
    if abs(dth) > heading_tol:
        return False
    return rs_length_metric(x, y, theta, gx, gy, gth, radius) <= rs_tol


@njit
def _pack_key(x, y, theta, time_index, dyn_horizon, cell, heading_bins,
              gx, gy, gth, pos_tol2, heading_tol, rs_tol, radius):
    if _in_goal_set(x, y, theta, gx, gy, gth, pos_tol2, heading_tol,
                    rs_tol, radius):
        return GOAL_KEY
    tkey = time_index if time_index <= dyn_horizon else dyn_horizon + 1
    ith = int((theta + math.pi) / (2 * math.pi) * heading_bins) % heading_bins
    return (np.int64(int(x / cell))
            | (np.int64(int(y / cell)) << 12)
            | (np.int64(ith) << 24)
            | (np.int64(tkey) << 32))


@njit
def _heuristic(x, y, theta, gx, gy, gth, pos_tol, heading_tol, rs_tol,
               net, radius, net_slack, grid, has_grid, cell_g, nx_g, ny_g,
               grid_slop, step_length, step_cost):
    dx = x - gx
    dy = y - gy
    euclid = math.hypot(dx, dy)
    if euclid <= pos_tol and _in_goal_set(x, y, theta, gx, gy, gth,
                                          pos_tol * pos_tol, heading_tol,
                                          rs_tol, radius):
        return 0.0
    best = math.inf
    for i in range(net.shape[0]):
        d = rs_length_metric(x, y, theta, net[i, 0], net[i, 1], net[i, 2], radius)
        if d < best:
            best = d
    bound = best - net_slack
    if euclid - pos_tol > bound:
        bound = euclid - pos_tol
    if has_grid:
        gval = bilinear_grid(grid, cell_g, nx_g, ny_g, x, y)
        if gval == math.inf:
            return math.inf
        gb = (gval - grid_slop) / 2.0 - pos_tol
        if gb > bound:
            bound = gb
    if bound <= 0.0:
        return step_cost
    return math.ceil(bound / step_length - 1e-12) * step_cost


@njit
def search_chunk(
        # node storage (preallocated, wrapper grows)
        xs, ys, ths, times, parents, prims, dirs, steers, gs, n_nodes,
        # heap storage
        hf, hng, hx, hy, hth, htie, hidx, heap_size, tie_counter,
        # hash table
        tab_keys, tab_vals, tab_used,
        # primitive data
        prim_end, prim_costs, prim_dirs, prim_steers, lcx, lcy, prim_steer_angle,
        # collision world
        obstacles, r_v, width, height, dyn_centers, has_dyn, dyn_horizon, n_sub,
        # goal context
        gx, gy, gth, pos_tol, heading_tol, rs_tol, net, radius, net_slack,
        grid, has_grid, cell_g, nx_g, ny_g, grid_slop,
        # config
        cell, heading_bins, switch_pen, steer_pen, step_length, step_cost,
        use_heuristic, max_nodes, expansions_done, chunk_budget,
        popped_f, n_popped):
    """Run up to chunk_budget expansions; returns a status tuple."""
    pos_tol2 = pos_tol * pos_tol
    limit2 = (2.0 * r_v) ** 2
    n_prim = len(prim_costs)
    expansions = expansions_done
    found = -1

    while heap_size > 0:
        # capacity checks: nodes, heap headroom, hash fill, popped buffer
        if (n_nodes + n_prim >= len(xs)
                or heap_size + n_prim >= len(hf)
                or 3 * tab_used >= 2 * len(tab_keys)
                or n_popped + 1 >= len(popped_f)):
            return (STATUS_NEED_SPACE, n_nodes, heap_size, tie_counter,
                    tab_used, expansions, found, n_popped)
        f = hf[0]
        g = -hng[0]
        idx = hidx[0]
        heap_size = heap_pop(hf, hng, hx, hy, hth, htie, hidx, heap_size)
        x = xs[idx]
        y = ys[idx]
        th = ths[idx]
        t_idx = times[idx]
        key = _pack_key(x, y, th, t_idx, dyn_horizon, cell, heading_bins,
                        gx, gy, gth, pos_tol2, heading_tol, rs_tol, radius)
        if g > table_get(tab_keys, tab_vals, key) + 1e-12:
            continue
        popped_f[n_popped] = f
        n_popped += 1
        if key == GOAL_KEY:
            found = idx
            return (STATUS_FOUND, n_nodes, heap_size, tie_counter,
                    tab_used, expansions, found, n_popped)

        expansions += 1
        if expansions > max_nodes:
            return (STATUS_NODE_BUDGET, n_nodes, heap_size, tie_counter,
                    tab_used, expansions, found, n_popped)

        prev_dir = dirs[idx]
        prev_steer = steers[idx]
        cos_t = math.cos(th)
        sin_t = math.sin(th)

        # dynamic-constraint window rows for this time step
        base = t_idx * n_sub
        n_fine = dyn_centers.shape[0]

        for p in range(n_prim):
            p_dir = prim_dirs[p]
            if p_dir == 0 and t_idx > dyn_horizon:
                continue
            ex = prim_end[p, 0]
            ey = prim_end[p, 1]
            eth = prim_end[p, 2]
            nx_ = x + ex * cos_t - ey * sin_t
            ny_ = y + ex * sin_t + ey * cos_t
            nth = th + eth
            if nth > math.pi:
                nth -= 2 * math.pi
            elif nth <= -math.pi:
                nth += 2 * math.pi
            cost = prim_costs[p]
            if p_dir != 0 and prev_dir != 0:
                if p_dir != prev_dir:
                    cost += switch_pen
                if prim_steers[p] != prev_steer:
                    cost += steer_pen
            ng = g + cost
            nkey = _pack_key(nx_, ny_, nth, t_idx + 1, dyn_horizon, cell,
                             heading_bins, gx, gy, gth, pos_tol2, heading_tol,
                             rs_tol, radius)
            if ng >= table_get(tab_keys, tab_vals, nkey) - 1e-12:
                continue

            # collision sweep of this primitive
            ok = True
            for k in range(n_sub):
                for ci in range(2):
                    ccx = x + lcx[p, k, ci] * cos_t - lcy[p, k, ci] * sin_t
                    ccy = y + lcx[p, k, ci] * sin_t + lcy[p, k, ci] * cos_t
                    if ccx < r_v or ccy < r_v or ccx > width - r_v \
                            or ccy > height - r_v:
                        ok = False
                        break
                    for o in range(obstacles.shape[0]):
                        dxo = obstacles[o, 0] - ccx
                        if dxo < 0.0:
                            dxo = ccx - obstacles[o, 2]
                            if dxo < 0.0:
                                dxo = 0.0
                        dyo = obstacles[o, 1] - ccy
                        if dyo < 0.0:
                            dyo = ccy - obstacles[o, 3]
                            if dyo < 0.0:
                                dyo = 0.0
                        if dxo * dxo + dyo * dyo < r_v * r_v:
                            ok = False
                            break
                    if not ok:
                        break
                    if has_dyn:
                        row = base + 1 + k
                        if row > n_fine - 1:
                            row = n_fine - 1
                        for v in range(dyn_centers.shape[1]):
                            for cj in range(2):
                                ddx = ccx - dyn_centers[row, v, cj, 0]
                                ddy = ccy - dyn_centers[row, v, cj, 1]
                                if ddx * ddx + ddy * ddy <= limit2:
                                    ok = False
                                    break
                            if not ok:
                                break
                        if not ok:
                            break
                if not ok:
                    break
            if not ok:
                continue

            tab_used += table_set(tab_keys, tab_vals, nkey, ng)
            if use_heuristic:
                nh = _heuristic(nx_, ny_, nth, gx, gy, gth, pos_tol,
                                heading_tol, rs_tol, net, radius, net_slack,
                                grid, has_grid, cell_g, nx_g, ny_g, grid_slop,
                                step_length, step_cost)
            else:
                nh = 0.0
            node = n_nodes
            xs[node] = nx_
            ys[node] = ny_
            ths[node] = nth
            times[node] = t_idx + 1
            parents[node] = idx
            prims[node] = p
            if p_dir != 0:
                dirs[node] = p_dir
                steers[node] = prim_steers[p]
            else:
                dirs[node] = prev_dir
                steers[node] = prev_steer
            gs[node] = ng
            n_nodes += 1
            tie_counter += 1
            heap_size = heap_push(hf, hng, hx, hy, hth, htie, hidx, heap_size,
                                  ng + nh, -ng, nx_, ny_, nth, tie_counter, node)

        if expansions - expansions_done >= chunk_budget:
            return (STATUS_CONTINUE, n_nodes, heap_size, tie_counter,
                    tab_used, expansions, found, n_popped)

    return (STATUS_EXHAUSTED, n_nodes, heap_size, tie_counter,
            tab_used, expansions, found, n_popped)
