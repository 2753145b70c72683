"""Maps, scenario instances, random generation and serialization.

A scenario pins down everything a planner run needs: map bounds, static
rectangular obstacles, the shared vehicle parameters and per-vehicle
start/goal states. Generation is deterministic in (family, size, n, seed).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .rng import Xoshiro256StarStar
from .vehicle import (
    State,
    VehicleParams,
    pairwise_distance,
    point_rect_distance,
    state_collides_static,
)

Rect = tuple[float, float, float, float]

FORMAT_VERSION = 1
MAX_SAMPLING_ATTEMPTS = 100_000
MIN_ENDPOINT_CLEARANCE = 0.2


class GenerationFailed(Exception):
    """Rejection sampling exhausted its attempt budget."""


class ParseError(Exception):
    """Malformed scenario document; message carries the offending field."""


class MapFamily(Enum):
    OBSTACLE_FREE = "obstacle_free"
    RANDOM_OBSTACLE = "random_obstacle"
    INDOOR = "indoor"


@dataclass
class OccupancyMap:
    width: float
    height: float
    obstacles: list[Rect] = field(default_factory=list)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("map dimensions must be positive")
        self.width = float(self.width)
        self.height = float(self.height)
        self.obstacles = [tuple(float(v) for v in r) for r in self.obstacles]
        for r in self.obstacles:
            xmin, ymin, xmax, ymax = r
            if not (0 <= xmin < xmax <= self.width and 0 <= ymin < ymax <= self.height):
                raise ValueError(f"obstacle {r} outside map or degenerate")


@dataclass
class ScenarioInstance:
    map: OccupancyMap
    vehicles: list[tuple[State, State]]
    params: VehicleParams
    seed: int
    family: str | None = None

    @property
    def n_vehicles(self) -> int:
        return len(self.vehicles)

    def starts(self) -> list[State]:
        return [s for s, _ in self.vehicles]

    def goals(self) -> list[State]:
        return [g for _, g in self.vehicles]


@dataclass(frozen=True)
class Violation:
    rule: str
    vehicles: tuple[int, ...]
    detail: str


def _rects_overlap(a: Rect, b: Rect) -> bool:
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def _rect_clear_of_state(rect: Rect, s: State, params: VehicleParams, margin: float) -> bool:
    from .vehicle import footprint_circles

    circles = footprint_circles(s, params)
    for cx, cy in (circles.front_center, circles.rear_center):
        if point_rect_distance(cx, cy, rect) < params.circle_radius + margin:
            return False
    return True


def _sample_state(rng: Xoshiro256StarStar, occupancy: OccupancyMap,
                  params: VehicleParams) -> State:
    x = rng.uniform(0.0, occupancy.width)
    y = rng.uniform(0.0, occupancy.height)
    theta = rng.uniform(-math.pi, math.pi)
    if theta <= -math.pi:
        theta = math.pi
    return State(x, y, theta, 0.0)


def _sample_endpoints(rng, occupancy, params, n_vehicles, budget):
    """Rejection-sample starts and goals satisfying clearance invariants."""
    starts: list[State] = []
    goals: list[State] = []
    attempts = 0
    for _ in range(n_vehicles):
        for placed, others in ((starts, starts), (goals, goals)):
            while True:
                attempts += 1
                if attempts > budget:
                    raise GenerationFailed(
                        f"could not place {n_vehicles} vehicles within "
                        f"{budget} attempts")
                cand = _sample_state(rng, occupancy, params)
                if state_collides_static(cand, occupancy, params):
                    continue
                if all(pairwise_distance(cand, o, params) > MIN_ENDPOINT_CLEARANCE
                       for o in others):
                    placed.append(cand)
                    break
    return list(zip(starts, goals))


def _indoor_walls(rng: Xoshiro256StarStar, size: float) -> list[Rect]:
    """Room grid with door gaps in every shared wall segment."""
    thickness = 0.4
    door = 3.0

    def split(total: float) -> list[float]:
        cuts, pos = [], 0.0
        while total - pos >= 2 * 12.0:
            pos += rng.uniform(12.0, min(20.0, total - pos - 12.0))
            cuts.append(pos)
        return cuts

    def wall_with_door(lo: float, hi: float) -> list[tuple[float, float]]:
        # Split the [lo, hi] span, leaving a door-sized gap inside it.
        if hi - lo <= door + 1.0:
            return [(lo, hi)]
        g0 = rng.uniform(lo + 0.5, hi - door - 0.5)
        return [(lo, g0), (g0 + door, hi)]

    xs, ys = split(size), split(size)
    walls: list[Rect] = []
    for cx in xs:
        bounds = [0.0] + ys + [size]
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            for a, b in wall_with_door(lo, hi):
                if b - a > 1e-9:
                    walls.append((cx - thickness / 2, a, cx + thickness / 2, b))
    for cy in ys:
        bounds = [0.0] + xs + [size]
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            for a, b in wall_with_door(lo, hi):
                if b - a > 1e-9:
                    walls.append((a, cy - thickness / 2, b, cy + thickness / 2))
    return walls


def _random_obstacles(rng, size, vehicles, params, budget):
    """Non-overlapping random rectangles targeting 5-20% area coverage."""
    map_area = size * size
    k_nominal = round(map_area / 500.0)
    min_area, max_area = 0.05 * map_area, 0.20 * map_area
    rects: list[Rect] = []
    area = 0.0
    attempts = 0
    while len(rects) < k_nominal or area < min_area:
        attempts += 1
        if attempts > budget:
            raise GenerationFailed("obstacle placement exhausted its budget")
        w = rng.uniform(2.0, 8.0)
        h = rng.uniform(2.0, 8.0)
        if w > size or h > size:
            continue
        x = rng.uniform(0.0, size - w)
        y = rng.uniform(0.0, size - h)
        cand = (x, y, x + w, y + h)
        if area + w * h > max_area:
            continue
        if any(_rects_overlap(cand, r) for r in rects):
            continue
        if not all(_rect_clear_of_state(cand, s, params, MIN_ENDPOINT_CLEARANCE)
                   for pair in vehicles for s in pair):
            continue
        rects.append(cand)
        area += w * h
    return rects


def generate_instance(family: MapFamily, size: float, n_vehicles: int, seed: int,
                      params: VehicleParams | None = None) -> ScenarioInstance:
    """Generate a random scenario, deterministic in (family, size, n, seed)."""
    if n_vehicles < 1:
        raise ValueError("n_vehicles must be >= 1")
    if size <= 0:
        raise ValueError("size must be positive")
    params = params or VehicleParams()
    rng = Xoshiro256StarStar(
        (seed & 0xFFFFFFFF) ^ (n_vehicles << 32) ^ (int(size * 16) << 44)
        ^ {MapFamily.OBSTACLE_FREE: 0, MapFamily.RANDOM_OBSTACLE: 1,
           MapFamily.INDOOR: 2}[family] << 60)

    if family is MapFamily.INDOOR:
        occupancy = OccupancyMap(size, size, _indoor_walls(rng, size))
        vehicles = _sample_endpoints(rng, occupancy, params, n_vehicles,
                                     MAX_SAMPLING_ATTEMPTS)
    else:
        occupancy = OccupancyMap(size, size, [])
        vehicles = _sample_endpoints(rng, occupancy, params, n_vehicles,
                                     MAX_SAMPLING_ATTEMPTS)
        if family is MapFamily.RANDOM_OBSTACLE:
            occupancy = OccupancyMap(
                size, size,
                _random_obstacles(rng, size, vehicles, params,
                                  MAX_SAMPLING_ATTEMPTS))

    return ScenarioInstance(map=occupancy, vehicles=vehicles, params=params,
                            seed=seed, family=family.value)


def validate_instance(inst: ScenarioInstance) -> list[Violation]:
    """Check the scenario invariants; an empty list means the instance is valid."""
    out: list[Violation] = []
    p = inst.params
    for i in range(inst.n_vehicles):
        si, gi = inst.vehicles[i]
        if state_collides_static(si, inst.map, p):
            out.append(Violation("start_static_collision", (i,),
                                 f"start of vehicle {i} intersects obstacles or boundary"))
        if state_collides_static(gi, inst.map, p):
            out.append(Violation("goal_static_collision", (i,),
                                 f"goal of vehicle {i} intersects obstacles or boundary"))
        for j in range(i + 1, inst.n_vehicles):
            sj, gj = inst.vehicles[j]
            d = pairwise_distance(si, sj, p)
            if d <= 0:
                out.append(Violation("start_overlap", (i, j),
                                     f"start footprints overlap (clearance {d:.4f} m)"))
            d = pairwise_distance(gi, gj, p)
            if d <= 0:
                out.append(Violation("goal_overlap", (i, j),
                                     f"goal footprints overlap (clearance {d:.4f} m)"))
    return out


def _state_list(s: State) -> list[float]:
    return [s.x, s.y, s.theta, s.phi]


def save_scenario(inst: ScenarioInstance) -> bytes:
    doc = {
        "format_version": FORMAT_VERSION,
        "seed": inst.seed,
        "family": inst.family,
        "map": {
            "width": inst.map.width,
            "height": inst.map.height,
            "obstacles": [list(r) for r in inst.map.obstacles],
        },
        "params": {
            "wheelbase": inst.params.wheelbase,
            "width": inst.params.width,
            "front_overhang": inst.params.front_overhang,
            "rear_overhang": inst.params.rear_overhang,
            "max_steer": inst.params.max_steer,
            "max_speed": inst.params.max_speed,
            "max_steer_rate": inst.params.max_steer_rate,
        },
        "vehicles": [
            {"start": _state_list(s), "goal": _state_list(g)}
            for s, g in inst.vehicles
        ],
    }
    return (json.dumps(doc, indent=1) + "\n").encode()


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ParseError(f"missing field '{key}' in {where}")
    return doc[key]


def _parse_state(values, where: str) -> State:
    if not isinstance(values, list) or len(values) != 4:
        raise ParseError(f"{where} must be a list [x, y, theta, phi]")
    try:
        return State(*(float(v) for v in values))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"non-numeric value in {where}: {exc}") from exc


def load_scenario(data: bytes | str) -> ScenarioInstance:
    if isinstance(data, bytes):
        data = data.decode()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a JSON object")
    version = _require(doc, "format_version", "document")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version}")
    map_doc = _require(doc, "map", "document")
    params_doc = _require(doc, "params", "document")
    vehicle_docs = _require(doc, "vehicles", "document")
    if not isinstance(vehicle_docs, list) or not vehicle_docs:
        raise ParseError("'vehicles' must be a non-empty list")
    try:
        occupancy = OccupancyMap(
            width=float(_require(map_doc, "width", "map")),
            height=float(_require(map_doc, "height", "map")),
            obstacles=[tuple(r) for r in map_doc.get("obstacles", [])],
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad map definition: {exc}") from exc
    try:
        params = VehicleParams(
            wheelbase=float(_require(params_doc, "wheelbase", "params")),
            width=float(_require(params_doc, "width", "params")),
            front_overhang=float(_require(params_doc, "front_overhang", "params")),
            rear_overhang=float(_require(params_doc, "rear_overhang", "params")),
            max_steer=float(_require(params_doc, "max_steer", "params")),
            max_speed=float(_require(params_doc, "max_speed", "params")),
            max_steer_rate=float(_require(params_doc, "max_steer_rate", "params")),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad params definition: {exc}") from exc
    vehicles = []
    for i, v in enumerate(vehicle_docs):
        start = _parse_state(_require(v, "start", f"vehicles[{i}]"), f"vehicles[{i}].start")
        goal = _parse_state(_require(v, "goal", f"vehicles[{i}]"), f"vehicles[{i}].goal")
        vehicles.append((start, goal))
    return ScenarioInstance(map=occupancy, vehicles=vehicles, params=params,
                            seed=int(doc.get("seed", 0)), family=doc.get("family"))
