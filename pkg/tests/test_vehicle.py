import math

import numpy as np
import pytest

from smartplan.vehicle import (
    ControlInput,
    State,
    Trajectory,
    VehicleParams,
    footprint_circles,
    kinematic_step,
    normalize_angle,
    pairwise_distance,
    state_collides_static,
)
from smartplan.world import OccupancyMap

from helpers.geometry import arc_endpoint, body_rectangle_corners, rectangles_overlap

PARAMS = VehicleParams()
R_V = math.sqrt(1.0 + 0.25)  # sqrt((4/4)^2 + (1/2)^2) for the default geometry


def test_default_params_derived_quantities():
    assert PARAMS.body_length == pytest.approx(4.0)
    assert PARAMS.circle_radius == pytest.approx(R_V, rel=1e-12)
    assert PARAMS.min_turn_radius == pytest.approx(
        PARAMS.wheelbase / math.tan(PARAMS.max_steer), rel=1e-6)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        VehicleParams(wheelbase=-1.0)
    with pytest.raises(ValueError):
        VehicleParams(max_steer=2.0)
    with pytest.raises(ValueError):
        VehicleParams(max_speed=0.0)


def test_footprint_circles_axis_aligned():
    circles = footprint_circles(State(0, 0, 0, 0), PARAMS)
    assert circles.rear_center == pytest.approx((0.0, 0.0), abs=1e-12)
    assert circles.front_center == pytest.approx((2.0, 0.0), abs=1e-12)


def test_footprint_circles_rotated():
    circles = footprint_circles(State(0, 0, math.pi / 2, 0), PARAMS)
    assert circles.rear_center == pytest.approx((0.0, 0.0), abs=1e-12)
    assert circles.front_center == pytest.approx((0.0, 2.0), abs=1e-12)


def test_footprint_circles_reversed_heading():
    circles = footprint_circles(State(5, 5, math.pi, 0), PARAMS)
    assert circles.rear_center == pytest.approx((5.0, 5.0), abs=1e-12)
    assert circles.front_center == pytest.approx((3.0, 5.0), abs=1e-12)


def test_circle_pair_spacing_matches_half_body():
    rng = np.random.default_rng(0)
    for _ in range(100):
        s = State(rng.uniform(-10, 10), rng.uniform(-10, 10),
                  rng.uniform(-math.pi, math.pi), 0.0)
        c = footprint_circles(s, PARAMS)
        gap = math.hypot(c.front_center[0] - c.rear_center[0],
                         c.front_center[1] - c.rear_center[1])
        assert gap == pytest.approx(PARAMS.body_length / 2, abs=1e-9)


def test_footprint_circles_cover_body_corners():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        s = State(rng.uniform(-20, 20), rng.uniform(-20, 20),
                  rng.uniform(-math.pi, math.pi), 0.0)
        c = footprint_circles(s, PARAMS)
        for px, py in body_rectangle_corners(s, PARAMS):
            d = min(math.hypot(px - cx, py - cy)
                    for cx, cy in (c.front_center, c.rear_center))
            assert d <= PARAMS.circle_radius + 1e-9


def test_pairwise_distance_identical_states():
    s = State(3, 4, 0.7, 0)
    assert pairwise_distance(s, s, PARAMS) == pytest.approx(-2 * R_V, abs=1e-12)
    assert pairwise_distance(s, s, PARAMS) == pytest.approx(-2.2361, abs=1e-4)


def test_pairwise_distance_longitudinal_offset():
    d = pairwise_distance(State(0, 0, 0, 0), State(10, 0, 0, 0), PARAMS)
    assert d == pytest.approx(8.0 - 2 * R_V, abs=1e-12)
    assert d == pytest.approx(5.7639, abs=1e-4)


def test_pairwise_distance_lateral_offset():
    d = pairwise_distance(State(0, 0, 0, 0), State(0, 4, 0, 0), PARAMS)
    assert d == pytest.approx(4.0 - 2 * R_V, abs=1e-12)
    assert d == pytest.approx(1.7639, abs=1e-4)


def test_pairwise_distance_symmetric():
    rng = np.random.default_rng(2)
    for _ in range(200):
        a = State(*rng.uniform(-10, 10, 2), rng.uniform(-math.pi, math.pi), 0)
        b = State(*rng.uniform(-10, 10, 2), rng.uniform(-math.pi, math.pi), 0)
        assert pairwise_distance(a, b, PARAMS) == pairwise_distance(b, a, PARAMS)


def test_positive_distance_implies_disjoint_rectangles():
    # Conservative direction only: clearance > 0 must imply the exact body
    # rectangles are disjoint. The converse may fail (the discs overhang).
    rng = np.random.default_rng(3)
    checked_positive = 0
    for _ in range(10_000):
        a = State(*rng.uniform(0, 12, 2), rng.uniform(-math.pi, math.pi), 0)
        b = State(*rng.uniform(0, 12, 2), rng.uniform(-math.pi, math.pi), 0)
        if pairwise_distance(a, b, PARAMS) > 0:
            checked_positive += 1
            assert not rectangles_overlap(a, b, PARAMS)
    assert checked_positive > 1000


def test_kinematic_step_zero_input_is_identity():
    s = State(1, 2, 0.5, 0.1)
    out = kinematic_step(s, ControlInput(0, 0), 0.77, PARAMS)
    assert out == s


def test_kinematic_step_straight():
    out = kinematic_step(State(0, 0, 0, 0), ControlInput(2.0, 0.0), 0.353, PARAMS)
    assert out.x == pytest.approx(0.706, abs=1e-12)
    assert out.y == 0.0
    assert out.theta == 0.0
    assert out.phi == 0.0


def test_kinematic_step_heading_rate():
    out = kinematic_step(State(0, 0, 0, 0.3218), ControlInput(2.0, 0.0), 0.1, PARAMS)
    expected = 2.0 * math.tan(0.3218) / 2.0 * 0.1
    assert out.theta == pytest.approx(expected, abs=1e-12)
    assert out.theta == pytest.approx(0.0333, abs=1e-3)


def test_kinematic_step_clamps_steering():
    out = kinematic_step(State(0, 0, 0, 0.3), ControlInput(0.0, 1.0), 1.0, PARAMS)
    assert out.phi == PARAMS.max_steer


def test_kinematic_step_traces_arc_within_euler_error():
    # Constant steering with zero steering rate must follow the circle of
    # radius wheelbase/tan(phi) up to the O(dt^2) local truncation error.
    rng = np.random.default_rng(4)
    for _ in range(10_000):
        phi = rng.uniform(0.05, PARAMS.max_steer)
        if rng.random() < 0.5:
            phi = -phi
        s = State(rng.uniform(-5, 5), rng.uniform(-5, 5),
                  rng.uniform(-math.pi, math.pi), phi)
        v = rng.uniform(0.2, PARAMS.max_speed)
        dt = rng.uniform(0.01, 0.353)
        radius = PARAMS.wheelbase / math.tan(abs(phi))
        stepped = kinematic_step(s, ControlInput(v, 0.0), dt, PARAMS)
        ex, ey, _ = arc_endpoint(s, v * dt, radius, left=phi > 0)
        err = math.hypot(stepped.x - ex, stepped.y - ey)
        assert err <= 2.0 * (v * dt) ** 2 / radius


def test_normalize_angle_range():
    for a in np.linspace(-20, 20, 500):
        w = normalize_angle(float(a))
        assert -math.pi < w <= math.pi
    assert normalize_angle(math.pi) == math.pi
    assert normalize_angle(-math.pi) == math.pi


def test_state_collides_static_interior_empty_map():
    empty = OccupancyMap(50, 50)
    assert not state_collides_static(State(25, 25, 0, 0), empty, PARAMS)


def test_state_collides_static_eroded_boundary():
    empty = OccupancyMap(50, 50)
    assert state_collides_static(State(0.5, 25, 0, 0), empty, PARAMS)


def test_state_collides_static_obstacle_containment():
    occ = OccupancyMap(50, 50, [(19, 19, 21, 21)])
    # front circle center at (22, 20) is outside, rear at (20, 20) inside
    assert state_collides_static(State(20, 20, 0, 0), occ, PARAMS)
    assert not state_collides_static(State(20, 25, 0, 0), occ, PARAMS)


def test_trajectory_invariants():
    states = [State(0, 0, 0, 0), State(1, 0, 0, 0)]
    traj = Trajectory(dt=0.5, states=states, controls=[ControlInput(2, 0)])
    assert traj.duration == pytest.approx(0.5)
    assert traj.state_at(5) == states[-1]
    with pytest.raises(ValueError):
        Trajectory(dt=0.5, states=states, controls=[])
    with pytest.raises(ValueError):
        Trajectory(dt=0.0, states=states, controls=[ControlInput(2, 0)])
    with pytest.raises(ValueError):
        Trajectory(dt=0.5, states=[], controls=[])
