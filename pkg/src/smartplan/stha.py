"""Spatio-temporal hybrid A* for a single vehicle.

Plans a minimum-arrival-time primitive trajectory through continuous pose
space augmented with a time axis, avoiding static obstacles and the
timestamped trajectories of higher-priority vehicles. All motion
primitives share one step length and duration, which downstream
interpolation and refinement rely on.
"""
from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field

import numpy as np

from ._search_kernels import bilinear_grid, empty_dyn, feasible_primitives, rs_net_bound
from ._search_loop import (
    EMPTY_KEY,
    STATUS_EXHAUSTED,
    STATUS_FOUND,
    STATUS_NEED_SPACE,
    STATUS_NODE_BUDGET,
    _heuristic,
    _pack_key,
    heap_push,
    search_chunk,
    table_rehash,
    table_set,
)
from .distfield import DistanceField
from .reeds_shepp import reeds_shepp_length
from .vehicle import ControlInput, State, Trajectory, VehicleParams, normalize_angle
from .world import OccupancyMap

_DUMMY_GRID = np.zeros((2, 2))


@dataclass(frozen=True)
class MotionPrimitive:
    kind: str          # "straight" | "arc_left" | "arc_right" | "wait"
    direction: int     # +1 forward, -1 reverse, 0 wait
    arc_length: float
    duration: float
    cost: float

    @property
    def steer_sign(self) -> int:
        return {"arc_left": 1, "arc_right": -1}.get(self.kind, 0)


@dataclass
class SearchLimits:
    max_nodes: int = 200_000
    time_budget: float = 5.0


@dataclass
class SearchConfig:
    step_length: float = 0.706
    cell: float = 0.5
    heading_bins: int = 36
    goal_pos_tol: float = 0.3
    goal_heading_tol: float = math.pi / 18
    # acceptance additionally requires reeds-shepp closeness, which keeps
    # the heuristic tight: its admissible slack equals this value exactly
    goal_rs_tol: float = 1.0
    reverse_mult: float = 2.0
    direction_switch_steps: float = 1.0
    steer_change_steps: float = 0.5
    # deterministic preference for earlier arrival among equal-cost paths
    arrival_tiebreak: float = 1e-7


@dataclass
class DynamicConstraintSet:
    """Trajectories of higher-priority vehicles, parked at goal after arrival."""

    trajectories: list[tuple[int, Trajectory]] = field(default_factory=list)
    goals: dict[int, State] = field(default_factory=dict)

    def __bool__(self):
        return bool(self.trajectories)


@dataclass
class SearchNode:
    state: State
    time_index: int
    g: float
    h: float
    parent: "SearchNode | None" = None
    via: MotionPrimitive | None = None

    @property
    def f(self) -> float:
        return self.g + self.h


@dataclass
class PlanResult:
    trajectory: Trajectory
    primitives: list[MotionPrimitive]
    cost: float
    expansions: int
    popped_f: list[float] | None = None

    @property
    def arrival_index(self) -> int:
        return len(self.primitives)


class Infeasible(Exception):
    """No trajectory found; reason is 'exhausted' or 'budget'."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"planning infeasible ({reason}){': ' + detail if detail else ''}")
        self.reason = reason


_SUB_FRACTIONS = np.array([0.2, 0.4, 0.6, 0.8, 1.0])
N_SUB = len(_SUB_FRACTIONS)

class _GoalContext:
    """Per-goal heuristic state: distance field plus the ball target net."""

    __slots__ = ("gx", "gy", "gth", "field", "net", "net_slack",
                 "grid", "nx", "ny", "cell", "grid_slop")

    def __init__(self, planner: "SingleVehiclePlanner", goal: State):
        self.gx = goal.x
        self.gy = goal.y
        self.gth = normalize_angle(goal.theta)
        self.net = np.array([[self.gx, self.gy, self.gth]])
        self.net_slack = planner.config.goal_rs_tol
        # the grid detour bound only adds information when obstacles exist
        if planner.occupancy.obstacles:
            inflation = max(0.0, planner.params.circle_radius
                            - abs(planner.params.rear_circle_offset))
            self.field = DistanceField(planner.occupancy, inflation,
                                       (goal.x, goal.y))
            self.grid = self.field._filled
            self.nx = self.field.nx
            self.ny = self.field.ny
            self.cell = self.field.cell
            self.grid_slop = self.field._slop_cells * self.field.cell
        else:
            self.field = None
            self.grid = None


class SingleVehiclePlanner:
    """Reusable planner bound to one map and one vehicle parameter set."""

    def __init__(self, occupancy: OccupancyMap, params: VehicleParams,
                 config: SearchConfig | None = None):
        self.occupancy = occupancy
        self.params = params
        self.config = config or SearchConfig()
        cfg = self.config

        self.step_dt = cfg.step_length / params.max_speed
        radius = params.min_turn_radius
        kappa = 1.0 / radius
        self.primitives: list[MotionPrimitive] = []
        sweeps = []
        base = self.step_dt
        for kind, curv in (("straight", 0.0), ("arc_left", kappa), ("arc_right", -kappa)):
            for direction in (1, -1):
                mult = cfg.reverse_mult if direction < 0 else 1.0
                self.primitives.append(MotionPrimitive(
                    kind=kind, direction=direction, arc_length=cfg.step_length,
                    duration=base, cost=base * mult))
                sweeps.append(_local_sweep(
                    direction, curv, _SUB_FRACTIONS * cfg.step_length))
        self.primitives.append(MotionPrimitive(
            kind="wait", direction=0, arc_length=0.0, duration=base, cost=base))
        sweeps.append(np.zeros((N_SUB, 3)))
        self._sweeps = np.array(sweeps)                # (7, N_SUB, 3)
        self._steer = np.array([p.steer_sign * params.max_steer
                                for p in self.primitives])

        # body-frame circle centers along every primitive sweep, so the
        # per-expansion work is a single rotate-and-translate
        n_prim = len(self.primitives)
        local_poses = self._sweeps.reshape(-1, 3)
        centers = self._circle_centers(local_poses).reshape(n_prim, N_SUB, 2, 2)
        self._local_cx = np.ascontiguousarray(centers[..., 0])
        self._local_cy = np.ascontiguousarray(centers[..., 1])
        self._local_end = [(float(p[0]), float(p[1]), float(p[2]))
                           for p in self._sweeps[:, -1, :]]

        self._obstacles = np.ascontiguousarray(
            np.array(occupancy.obstacles, dtype=float).reshape(-1, 4))
        self._contexts: dict[tuple, _GoalContext] = {}

    # -- heuristic -----------------------------------------------------------

    def _context_for(self, goal: State) -> _GoalContext:
        key = (round(goal.x, 4), round(goal.y, 4), round(goal.theta, 4))
        if key not in self._contexts:
            self._contexts[key] = _GoalContext(self, goal)
        return self._contexts[key]

    def _in_goal_ball(self, x, y, theta, ctx: _GoalContext) -> bool:
        cfg = self.config
        if math.hypot(x - ctx.gx, y - ctx.gy) > cfg.goal_pos_tol:
            return False
        if abs(normalize_angle(theta - ctx.gth)) > cfg.goal_heading_tol:
            return False
        return reeds_shepp_length((x, y, theta), (ctx.gx, ctx.gy, ctx.gth),
                                  self.params.min_turn_radius) <= cfg.goal_rs_tol

    def _h(self, x, y, theta, ctx: _GoalContext) -> float:
        cfg = self.config
        if self._in_goal_ball(x, y, theta, ctx):
            return 0.0
        euclid = math.hypot(x - ctx.gx, y - ctx.gy)
        bound = max(euclid - cfg.goal_pos_tol,
                    rs_net_bound(x, y, theta, ctx.net,
                                 self.params.min_turn_radius, ctx.net_slack))
        if ctx.grid is not None:
            grid = bilinear_grid(ctx.grid, ctx.cell, ctx.nx, ctx.ny, x, y)
            if math.isinf(grid):
                return math.inf
            grid_bound = (grid - ctx.grid_slop) / 2.0 - cfg.goal_pos_tol
            if grid_bound > bound:
                bound = grid_bound
        if bound <= 0.0:
            return self.step_dt + cfg.arrival_tiebreak
        steps = math.ceil(bound / cfg.step_length - 1e-12)
        return steps * (self.step_dt + cfg.arrival_tiebreak)

    def heuristic(self, state: State, goal: State) -> float:
        """Admissible, consistent lower bound on remaining cost (seconds).

        Maximum of euclidean, reeds-shepp and obstacle-aware grid-detour
        bounds (each net of what the goal tolerance ball can absorb),
        rounded up to whole primitive steps.
        """
        return self._h(state.x, state.y, normalize_angle(state.theta),
                       self._context_for(goal))

    def goal_distance_2d(self, state: State, goal: State) -> float:
        """Obstacle-aware 2D lower-bound distance (used for vehicle ordering)."""
        ctx = self._context_for(goal)
        euclid = math.hypot(goal.x - state.x, goal.y - state.y)
        if ctx.field is None:
            return euclid
        return max(euclid, ctx.field.lower_bound(state.x, state.y))

    # -- collision machinery -------------------------------------------------

    def _circle_centers(self, poses: np.ndarray) -> np.ndarray:
        """(N, 3) poses -> (N, 2, 2) front/rear circle centers."""
        c = np.cos(poses[:, 2])
        s = np.sin(poses[:, 2])
        out = np.empty((len(poses), 2, 2))
        fo, ro = self.params.front_circle_offset, self.params.rear_circle_offset
        out[:, 0, 0] = poses[:, 0] + fo * c
        out[:, 0, 1] = poses[:, 1] + fo * s
        out[:, 1, 0] = poses[:, 0] + ro * c
        out[:, 1, 1] = poses[:, 1] + ro * s
        return out

    def _presample_constraints(self, constraints: DynamicConstraintSet):
        """Fine-grid circle centers of all constraint vehicles.

        Returns (centers, horizon): centers (n_fine, M, 2, 2); beyond its
        trajectory's end each vehicle parks at its goal. horizon is the
        latest arrival in primitive steps.
        """
        if not constraints:
            return None, 0
        horizon = max(len(t.states) - 1 for _, t in constraints.trajectories)
        n_fine = N_SUB * (horizon + 1) + 1
        m = len(constraints.trajectories)
        centers = np.empty((n_fine, m, 2, 2))
        fine_t = np.arange(n_fine) / N_SUB
        for k, (vid, traj) in enumerate(constraints.trajectories):
            goal = constraints.goals.get(vid)
            poses = np.array([(s.x, s.y, s.theta) for s in traj.states])
            coarse = self._circle_centers(poses)    # (len, 2, 2)
            last = len(traj.states) - 1
            if goal is not None:
                gpose = np.array([[goal.x, goal.y, goal.theta]])
                coarse[last] = self._circle_centers(gpose)[0]
            idx = np.minimum(fine_t, last)
            lo = np.floor(idx).astype(int)
            hi = np.minimum(lo + 1, last)
            frac = (idx - lo)[:, None, None]
            centers[:, k] = coarse[lo] * (1.0 - frac) + coarse[hi] * frac
        return np.ascontiguousarray(centers), horizon

    def _dyn_window(self, dyn_centers, time_index):
        if dyn_centers is None:
            return empty_dyn(), False
        base = time_index * N_SUB
        last = len(dyn_centers) - 1
        if base >= last:
            rows = np.full(N_SUB, last)
        else:
            rows = np.minimum(base + 1 + np.arange(N_SUB), last)
        return np.ascontiguousarray(dyn_centers[rows]), True

    # -- search ---------------------------------------------------------------

    _GOAL_KEY = ("goal",)

    def _keys(self, x, y, theta, time_index, dyn_horizon, ctx=None):
        cfg = self.config
        if ctx is not None and self._in_goal_ball(x, y, theta, ctx):
            # states inside the acceptance ball must never be shadowed by a
            # coarser out-of-ball representative of the same grid cell
            return self._GOAL_KEY
        tkey = time_index if time_index <= dyn_horizon else dyn_horizon + 1
        ith = int((theta + math.pi) / (2 * math.pi) * cfg.heading_bins) % cfg.heading_bins
        return (int(x / cfg.cell), int(y / cfg.cell), ith, tkey)

    def plan(self, start: State, goal: State,
             constraints: DynamicConstraintSet | None = None,
             limits: SearchLimits | None = None,
             use_heuristic: bool = True,
             collect_f: bool = False) -> PlanResult:
        """Minimum-arrival-time primitive trajectory from start to goal.

        Raises Infeasible('exhausted') when the reachable space is used up
        and Infeasible('budget') when SearchLimits are hit.
        """
        constraints = constraints or DynamicConstraintSet()
        limits = limits or SearchLimits()
        cfg = self.config
        dyn_centers, dyn_horizon = self._presample_constraints(constraints)
        has_dyn = dyn_centers is not None
        if not has_dyn:
            dyn_centers = empty_dyn()
        ctx = self._context_for(goal)
        has_grid = ctx.grid is not None
        grid = ctx.grid if has_grid else _DUMMY_GRID
        cell_g = ctx.cell if has_grid else 1.0
        nx_g = ctx.nx if has_grid else 2
        ny_g = ctx.ny if has_grid else 2
        grid_slop = ctx.grid_slop if has_grid else 0.0
        step_cost = self.step_dt + cfg.arrival_tiebreak

        cap_nodes, cap_heap, cap_pop = 8192, 8192, 8192
        xs = np.empty(cap_nodes)
        ys = np.empty(cap_nodes)
        ths = np.empty(cap_nodes)
        times = np.zeros(cap_nodes, dtype=np.int32)
        parents = np.full(cap_nodes, -1, dtype=np.int32)
        prims = np.full(cap_nodes, -1, dtype=np.int16)
        dirs = np.zeros(cap_nodes, dtype=np.int8)
        steers = np.zeros(cap_nodes, dtype=np.int8)
        gs = np.zeros(cap_nodes)
        hf = np.empty(cap_heap)
        hng = np.empty(cap_heap)
        hx = np.empty(cap_heap)
        hy = np.empty(cap_heap)
        hth = np.empty(cap_heap)
        htie = np.empty(cap_heap, dtype=np.int64)
        hidx = np.empty(cap_heap, dtype=np.int32)
        popped = np.empty(cap_pop)
        tab_bits = 16
        tab_keys = np.full(1 << tab_bits, EMPTY_KEY, dtype=np.int64)
        tab_vals = np.empty(1 << tab_bits)

        xs[0] = start.x
        ys[0] = start.y
        ths[0] = normalize_angle(start.theta)
        n_nodes = 1
        pos_tol2 = cfg.goal_pos_tol ** 2
        root_key = _pack_key(xs[0], ys[0], ths[0], 0, dyn_horizon, cfg.cell,
                             cfg.heading_bins, ctx.gx, ctx.gy, ctx.gth,
                             pos_tol2, cfg.goal_heading_tol, cfg.goal_rs_tol,
                             self.params.min_turn_radius)
        tab_used = table_set(tab_keys, tab_vals, root_key, 0.0)
        h0 = _heuristic(xs[0], ys[0], ths[0], ctx.gx, ctx.gy, ctx.gth,
                        cfg.goal_pos_tol, cfg.goal_heading_tol,
                        cfg.goal_rs_tol, ctx.net,
                        self.params.min_turn_radius, ctx.net_slack,
                        grid, has_grid, cell_g, nx_g, ny_g, grid_slop,
                        cfg.step_length, step_cost) if use_heuristic else 0.0
        heap_size = heap_push(hf, hng, hx, hy, hth, htie, hidx, 0,
                              h0, 0.0, xs[0], ys[0], ths[0], 0, 0)

        tie_counter = 0
        expansions = 0
        n_popped = 0
        t_start = _time.perf_counter()
        switch_pen = cfg.direction_switch_steps * self.step_dt
        steer_pen = cfg.steer_change_steps * self.step_dt
        prim_end = np.array(self._local_end)
        prim_costs = np.array([p.cost + cfg.arrival_tiebreak
                               for p in self.primitives])
        prim_dirs = np.array([p.direction for p in self.primitives], dtype=np.int8)
        prim_steers = np.array([p.steer_sign for p in self.primitives],
                               dtype=np.int8)

        while True:
            (status, n_nodes, heap_size, tie_counter, tab_used, expansions,
             found, n_popped) = search_chunk(
                xs, ys, ths, times, parents, prims, dirs, steers, gs, n_nodes,
                hf, hng, hx, hy, hth, htie, hidx, heap_size, tie_counter,
                tab_keys, tab_vals, tab_used,
                prim_end, prim_costs, prim_dirs, prim_steers,
                self._local_cx, self._local_cy, self._steer,
                self._obstacles, self.params.circle_radius,
                self.occupancy.width, self.occupancy.height,
                dyn_centers, has_dyn, dyn_horizon, N_SUB,
                ctx.gx, ctx.gy, ctx.gth, cfg.goal_pos_tol, cfg.goal_heading_tol,
                cfg.goal_rs_tol, ctx.net, self.params.min_turn_radius, ctx.net_slack,
                grid, has_grid, cell_g, nx_g, ny_g, grid_slop,
                cfg.cell, cfg.heading_bins, switch_pen, steer_pen,
                cfg.step_length, step_cost, use_heuristic,
                limits.max_nodes, expansions, 2048, popped, n_popped)

            if status == STATUS_FOUND:
                popped_f = popped[:n_popped].tolist() if collect_f else None
                return self._reconstruct(found, parents, prims, xs, ys, ths,
                                         gs[found], expansions, popped_f)
            if status == STATUS_EXHAUSTED:
                raise Infeasible("exhausted", "open list empty")
            if status == STATUS_NODE_BUDGET:
                raise Infeasible("budget", "node budget exhausted")
            if _time.perf_counter() - t_start > limits.time_budget:
                raise Infeasible("budget", "time budget exhausted")
            if status == STATUS_NEED_SPACE:
                if n_nodes + 8 >= cap_nodes:
                    cap_nodes *= 2
                    xs = np.resize(xs, cap_nodes)
                    ys = np.resize(ys, cap_nodes)
                    ths = np.resize(ths, cap_nodes)
                    times = np.resize(times, cap_nodes)
                    parents = np.resize(parents, cap_nodes)
                    prims = np.resize(prims, cap_nodes)
                    dirs = np.resize(dirs, cap_nodes)
                    steers = np.resize(steers, cap_nodes)
                    gs = np.resize(gs, cap_nodes)
                if heap_size + 8 >= cap_heap:
                    cap_heap *= 2
                    hf = np.resize(hf, cap_heap)
                    hng = np.resize(hng, cap_heap)
                    hx = np.resize(hx, cap_heap)
                    hy = np.resize(hy, cap_heap)
                    hth = np.resize(hth, cap_heap)
                    htie = np.resize(htie, cap_heap)
                    hidx = np.resize(hidx, cap_heap)
                if 3 * tab_used >= 2 * len(tab_keys):
                    tab_bits += 1
                    new_keys = np.full(1 << tab_bits, EMPTY_KEY, dtype=np.int64)
                    new_vals = np.empty(1 << tab_bits)
                    table_rehash(tab_keys, tab_vals, new_keys, new_vals)
                    tab_keys, tab_vals = new_keys, new_vals
                if n_popped + 8 >= cap_pop:
                    cap_pop *= 2
                    popped = np.resize(popped, cap_pop)

    @staticmethod
    def _context_of(node: SearchNode) -> tuple[int, int]:
        """Direction and steer sign of the most recent moving primitive."""
        cur = node
        while cur is not None:
            if cur.via is not None and cur.via.direction != 0:
                return cur.via.direction, cur.via.steer_sign
            cur = cur.parent
        return 0, 0

    def expand(self, node: SearchNode,
               constraints: DynamicConstraintSet | None = None,
               goal: State | None = None) -> list[SearchNode]:
        """Collision-free successors of a search node (pruned ones absent).

        Edge costs match plan() exactly, including the context penalties
        for reversing, direction switches and steering changes.
        """
        constraints = constraints or DynamicConstraintSet()
        cfg = self.config
        dyn_centers, dyn_horizon = self._presample_constraints(constraints)
        x, y = node.state.x, node.state.y
        th = normalize_angle(node.state.theta)
        cos_t, sin_t = math.cos(th), math.sin(th)
        n_prim = len(self.primitives)
        mask = np.ones(n_prim, dtype=np.bool_)
        for p_idx, prim in enumerate(self.primitives):
            if prim.direction == 0 and node.time_index > dyn_horizon:
                mask[p_idx] = False
        dyn_win, has_dyn = self._dyn_window(dyn_centers, node.time_index)
        feasible_primitives(mask, self._local_cx, self._local_cy,
                            x, y, cos_t, sin_t, self._obstacles,
                            self.params.circle_radius,
                            self.occupancy.width, self.occupancy.height,
                            dyn_win, has_dyn,
                            (2.0 * self.params.circle_radius) ** 2)
        prev_dir, prev_steer = self._context_of(node)
        out = []
        for p_idx, prim in enumerate(self.primitives):
            if not mask[p_idx]:
                continue
            ex, ey, eth = self._local_end[p_idx]
            st = State(x + ex * cos_t - ey * sin_t,
                       y + ex * sin_t + ey * cos_t,
                       normalize_angle(th + eth),
                       float(self._steer[p_idx]))
            cost = prim.cost + cfg.arrival_tiebreak
            if prim.direction != 0 and prev_dir != 0:
                if prim.direction != prev_dir:
                    cost += cfg.direction_switch_steps * self.step_dt
                if prim.steer_sign != prev_steer:
                    cost += cfg.steer_change_steps * self.step_dt
            h = self.heuristic(st, goal) if goal is not None else 0.0
            out.append(SearchNode(state=st, time_index=node.time_index + 1,
                                  g=node.g + cost, h=h,
                                  parent=node, via=prim))
        return out

    def _reconstruct(self, idx, parents, prims, xs, ys, ths,
                     cost, expansions, popped_f) -> PlanResult:
        chain = []
        cur = idx
        while cur >= 0:
            chain.append(cur)
            cur = parents[cur]
        chain.reverse()
        states = []
        used: list[MotionPrimitive] = []
        for n, node_idx in enumerate(chain):
            p_idx = prims[node_idx]
            phi = 0.0
            if n + 1 < len(chain):
                nxt = prims[chain[n + 1]]
                phi = float(self._steer[nxt])
            states.append(State(xs[node_idx], ys[node_idx], ths[node_idx], phi))
            if p_idx >= 0:
                used.append(self.primitives[p_idx])
        controls = []
        for n, prim in enumerate(used):
            v = prim.direction * self.params.max_speed
            omega = (states[n + 1].phi - states[n].phi) / self.step_dt
            controls.append(ControlInput(v, omega))
        traj = Trajectory(dt=self.step_dt, states=states, controls=controls)
        return PlanResult(trajectory=traj, primitives=used, cost=cost,
                          expansions=expansions,
                          popped_f=popped_f if popped_f else None)
