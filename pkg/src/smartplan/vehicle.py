"""Vehicle kinematics, footprint geometry and trajectory containers.

All other modules build on the primitives here: the front-wheel-steering
(bicycle) state, the dual-circle body approximation and the signed
pairwise distance derived from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class VehicleParams:
    """Geometric and kinematic limits of a front-wheel-steering vehicle.

    Lengths in meters, angles in radians, speeds in m/s.
    """

    wheelbase: float = 2.0
    width: float = 1.0
    front_overhang: float = 1.0
    rear_overhang: float = 1.0
    max_steer: float = 0.3218
    max_speed: float = 2.0
    max_steer_rate: float = 0.07

    def __post_init__(self):
        if min(self.wheelbase, self.width, self.front_overhang, self.rear_overhang) <= 0:
            raise ValueError("vehicle dimensions must be positive")
        if self.max_speed <= 0:
            raise ValueError("max_speed must be positive")
        if not 0 < self.max_steer < math.pi / 2:
            raise ValueError("max_steer must lie in (0, pi/2)")

    @property
    def body_length(self) -> float:
        return self.wheelbase + self.front_overhang + self.rear_overhang

    @property
    def min_turn_radius(self) -> float:
        return self.wheelbase / math.tan(self.max_steer)

    @property
    def circle_radius(self) -> float:
        """Radius r_v of the two body-covering discs.

        Each disc covers one half of the body rectangle, so the radius is
        the half-diagonal of a (body_length/2) x width rectangle.
        """
        return math.hypot(self.body_length / 4.0, self.width / 2.0)

    @property
    def rear_circle_offset(self) -> float:
        """Signed distance from the rear axle to the rear disc center."""
        return self.body_length / 4.0 - self.rear_overhang

    @property
    def front_circle_offset(self) -> float:
        """Signed distance from the rear axle to the front disc center."""
        return 3.0 * self.body_length / 4.0 - self.rear_overhang


@dataclass
class State:
    """Vehicle state: rear-axle position, yaw and steering angle."""

    x: float
    y: float
    theta: float
    phi: float = 0.0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.theta, self.phi)


@dataclass
class ControlInput:
    """Signed longitudinal speed (negative = reverse) and steering rate."""

    v: float
    omega: float


@dataclass
class Trajectory:
    """Uniformly sampled state sequence with the controls between samples."""

    dt: float
    states: list[State]
    controls: list[ControlInput] = field(default_factory=list)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not self.states:
            raise ValueError("trajectory must contain at least one state")
        if len(self.controls) != len(self.states) - 1:
            raise ValueError("controls must be one shorter than states")

    @property
    def duration(self) -> float:
        return (len(self.states) - 1) * self.dt

    def state_at(self, index: int) -> State:
        """State at a time index, parked at the final state afterwards."""
        if index >= len(self.states):
            return self.states[-1]
        return self.states[max(index, 0)]


@dataclass(frozen=True)
class CirclePair:
    """Centers of the two discs approximating the vehicle body."""

    front_center: tuple[float, float]
    rear_center: tuple[float, float]


def footprint_circles(s: State, p: VehicleParams) -> CirclePair:
    """Disc centers at the quarter points of the body rectangle."""
    c, si = math.cos(s.theta), math.sin(s.theta)
    ro, fo = p.rear_circle_offset, p.front_circle_offset
    return CirclePair(
        front_center=(s.x + fo * c, s.y + fo * si),
        rear_center=(s.x + ro * c, s.y + ro * si),
    )


def pairwise_distance(si: State, sj: State, p: VehicleParams) -> float:
    """Signed clearance between two vehicles (<= 0 means collision).

    Minimum Euclidean distance over the four disc-center pairs, minus the
    two disc radii.
    """
    ci = footprint_circles(si, p)
    cj = footprint_circles(sj, p)
    best = math.inf
    for ax, ay in (ci.front_center, ci.rear_center):
        for bx, by in (cj.front_center, cj.rear_center):
            d = math.hypot(ax - bx, ay - by)
            if d < best:
                best = d
    return best - 2.0 * p.circle_radius


def kinematic_step(s: State, u: ControlInput, dt: float, p: VehicleParams) -> State:
    """Forward-Euler bicycle-model update.

    This discrete map is the single source of truth for the refinement
    stage's linearization; steering is clamped to the actuator limit and
    yaw renormalized to (-pi, pi].
    """
    x = s.x + u.v * math.cos(s.theta) * dt
    y = s.y + u.v * math.sin(s.theta) * dt
    theta = normalize_angle(s.theta + u.v * math.tan(s.phi) / p.wheelbase * dt)
    phi = s.phi + u.omega * dt
    if phi > p.max_steer:
        phi = p.max_steer
    elif phi < -p.max_steer:
        phi = -p.max_steer
    return State(x, y, theta, phi)


def point_rect_distance(px: float, py: float, rect: tuple[float, float, float, float]) -> float:
    """Distance from a point to an axis-aligned rectangle (0 inside)."""
    xmin, ymin, xmax, ymax = rect
    dx = max(xmin - px, 0.0, px - xmax)
    dy = max(ymin - py, 0.0, py - ymax)
    return math.hypot(dx, dy)


def state_collides_static(s: State, occupancy, p: VehicleParams) -> bool:
    """True iff either footprint disc hits an obstacle or the eroded boundary."""
    r = p.circle_radius
    circles = footprint_circles(s, p)
    for cx, cy in (circles.front_center, circles.rear_center):
        if cx < r or cy < r or cx > occupancy.width - r or cy > occupancy.height - r:
            return True
        for rect in occupancy.obstacles:
            if point_rect_distance(cx, cy, rect) < r:
                return True
    return False
