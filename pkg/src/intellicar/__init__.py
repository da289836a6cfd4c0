# intellicar - seeded simulator of cooperative intelligent cars

"""
intellicar simulates cars that sense the road in four directions, read traffic lights
with a camera, exchange V2V beacons and pick one collision-avoidance decision per step.
"""

__version__ = "0.1.0"

from intellicar.config import Settings, WorldConfig
from intellicar.harness import MetricsReport, run_scenario
from intellicar.scenario import ScenarioSpec, load_scenario, parse_scenario
from intellicar.world import World

__all__ = [
    "MetricsReport",
    "ScenarioSpec",
    "Settings",
    "World",
    "WorldConfig",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
]
