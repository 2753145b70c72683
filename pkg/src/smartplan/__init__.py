"""Multi-vehicle trajectory planning toolkit.

Pipeline: priority-based search over a spatio-temporal hybrid A* front end
produces a conflict-free joint initial guess, which a distributed
corridor-constrained SQP back end refines into smooth, kinematically
feasible trajectories. Ships with scenario generation, an independent
validator, a prioritized-planning baseline and a benchmark CLI.
"""

from .vehicle import (
    CirclePair,
    ControlInput,
    State,
    Trajectory,
    VehicleParams,
    footprint_circles,
    kinematic_step,
    pairwise_distance,
    state_collides_static,
)
from .world import (
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

__version__ = "0.1.0"

__all__ = [
    "CirclePair",
    "ControlInput",
    "State",
    "Trajectory",
    "VehicleParams",
    "footprint_circles",
    "kinematic_step",
    "pairwise_distance",
    "state_collides_static",
    "GenerationFailed",
    "MapFamily",
    "OccupancyMap",
    "ParseError",
    "ScenarioInstance",
    "generate_instance",
    "load_scenario",
    "save_scenario",
    "validate_instance",
    "__version__",
]
