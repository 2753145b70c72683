import math

import pytest

from smartplan.vehicle import State, VehicleParams, pairwise_distance
from smartplan.world import (
    GenerationFailed,
    MapFamily,
    OccupancyMap,
    ParseError,
    ScenarioInstance,
    generate_instance,
    load_scenario,
    save_scenario,
    validate_instance,
)

FIXTURE_DIR = __file__.rsplit("/", 1)[0] + "/fixtures"


def test_single_vehicle_obstacle_free():
    inst = generate_instance(MapFamily.OBSTACLE_FREE, 50, 1, seed=3)
    assert inst.n_vehicles == 1
    assert inst.map.obstacles == []
    assert validate_instance(inst) == []


def test_obstacle_free_25_vehicles_clearances():
    inst = generate_instance(MapFamily.OBSTACLE_FREE, 50, 25, seed=7)
    assert inst.n_vehicles == 25
    assert validate_instance(inst) == []
    starts = inst.starts()
    goals = inst.goals()
    for i in range(25):
        for j in range(i + 1, 25):
            assert pairwise_distance(starts[i], starts[j], inst.params) > 0
            assert pairwise_distance(goals[i], goals[j], inst.params) > 0


def test_random_obstacle_area_ratio():
    inst = generate_instance(MapFamily.RANDOM_OBSTACLE, 100, 40, seed=1)
    area = sum((x2 - x1) * (y2 - y1) for x1, y1, x2, y2 in inst.map.obstacles)
    ratio = area / (100.0 * 100.0)
    assert 0.05 <= ratio <= 0.20
    assert validate_instance(inst) == []


def test_generation_is_deterministic():
    a = generate_instance(MapFamily.RANDOM_OBSTACLE, 50, 10, seed=42)
    b = generate_instance(MapFamily.RANDOM_OBSTACLE, 50, 10, seed=42)
    assert save_scenario(a) == save_scenario(b)
    c = generate_instance(MapFamily.RANDOM_OBSTACLE, 50, 10, seed=43)
    assert save_scenario(a) != save_scenario(c)


def test_generation_failure_on_overdense_request():
    with pytest.raises(GenerationFailed):
        generate_instance(MapFamily.OBSTACLE_FREE, 8, 60, seed=0)


@pytest.mark.parametrize("family", list(MapFamily))
def test_generated_instances_always_valid(family):
    # Fuzz over seeds: every generated instance must pass validation.
    size = 50
    for seed in range(500):
        inst = generate_instance(family, size, 4, seed=seed)
        assert validate_instance(inst) == [], (family, seed)


@pytest.mark.parametrize("family", list(MapFamily))
def test_serialization_round_trip(family):
    for seed in (0, 11, 97):
        inst = generate_instance(family, 50, 6, seed=seed)
        again = load_scenario(save_scenario(inst))
        assert again == inst
        assert save_scenario(again) == save_scenario(inst)


def test_indoor_has_walls_with_doors():
    inst = generate_instance(MapFamily.INDOOR, 50, 2, seed=5)
    assert len(inst.map.obstacles) >= 2


def test_load_rejects_missing_vehicles():
    inst = generate_instance(MapFamily.OBSTACLE_FREE, 50, 2, seed=1)
    import json

    doc = json.loads(save_scenario(inst))
    del doc["vehicles"]
    with pytest.raises(ParseError, match="vehicles"):
        load_scenario(json.dumps(doc))


def test_load_rejects_bad_json_and_bad_fields():
    with pytest.raises(ParseError, match="line"):
        load_scenario(b"{not json")
    with pytest.raises(ParseError, match="format_version"):
        load_scenario("{}")
    with pytest.raises(ParseError, match="start"):
        load_scenario(
            '{"format_version": 1, "map": {"width": 10, "height": 10}, '
            '"params": {"wheelbase": 2, "width": 1, "front_overhang": 1, '
            '"rear_overhang": 1, "max_steer": 0.3218, "max_speed": 2, '
            '"max_steer_rate": 0.07}, "vehicles": [{"goal": [1, 1, 0, 0]}]}'
        )


def test_hand_written_head_on_fixture_loads_and_validates():
    with open(f"{FIXTURE_DIR}/head_on_2v.scn.json", "rb") as fh:
        inst = load_scenario(fh.read())
    assert inst.n_vehicles == 2
    assert validate_instance(inst) == []


def test_validate_reports_start_overlap():
    params = VehicleParams()
    s = State(10, 10, 0, 0)
    inst = ScenarioInstance(
        map=OccupancyMap(50, 50),
        vehicles=[(s, State(40, 10, 0, 0)), (State(10, 10, 0, 0), State(40, 20, 0, 0))],
        params=params,
        seed=0,
    )
    rules = {(v.rule, v.vehicles) for v in validate_instance(inst)}
    assert ("start_overlap", (0, 1)) in rules


def test_validate_reports_goal_in_obstacle():
    params = VehicleParams()
    inst = ScenarioInstance(
        map=OccupancyMap(50, 50, [(18, 18, 22, 22)]),
        vehicles=[(State(5, 5, 0, 0), State(20, 20, 0, 0))],
        params=params,
        seed=0,
    )
    rules = {v.rule for v in validate_instance(inst)}
    assert "goal_static_collision" in rules


def test_map_invariants_enforced():
    with pytest.raises(ValueError):
        OccupancyMap(-5, 10)
    with pytest.raises(ValueError):
        OccupancyMap(10, 10, [(5, 5, 4, 6)])
    with pytest.raises(ValueError):
        OccupancyMap(10, 10, [(5, 5, 12, 6)])
