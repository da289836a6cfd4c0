"""Value types shared across the simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum


class EngineState(IntEnum):
    """Engine states. The integer values are the beacon wire bytes."""

    STOP = 0  # turned off, not moving
    ACTIVE = 1  # on, must come to rest
    MOVING = 2  # on, free to move


class Direction(IntEnum):
    FORWARD = 0
    LATERAL_LEFT = 1
    LATERAL_RIGHT = 2
    STOPPED = 3


class Decision(IntEnum):
    """Per-car decision taken once per step by the avoidance cascade."""

    KEEP_LANE = 0
    ACCELERATE = 1
    BRAKE = 2
    EMERGENCY_BRAKE = 3
    MOVE_LEFT = 4
    MOVE_RIGHT = 5
    HOLD = 6

    @property
    def is_lateral(self) -> bool:
        return self in (Decision.MOVE_LEFT, Decision.MOVE_RIGHT)


class LightColor(str, Enum):
    """Traffic-light phase, which is also the color the camera reports."""

    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"

    @property
    def next(self) -> LightColor:
        return _CYCLE[self]


_CYCLE = {
    LightColor.GREEN: LightColor.YELLOW,
    LightColor.YELLOW: LightColor.RED,
    LightColor.RED: LightColor.GREEN,
}


class EngineCommand(str, Enum):
    STOP_ENGINE = "stop_engine"
    ACTIVATE_ENGINE = "activate_engine"
    MOVE_ENGINE = "move_engine"


@dataclass(frozen=True, slots=True)
class CarState:
    """Present state and direction of one car."""

    car_id: int
    lane: int
    position: float
    speed: float
    engine: EngineState
    direction: Direction
    destination: float


@dataclass(frozen=True, slots=True)
class Gap:
    """One range-sensor channel. ``saturated`` means nothing was detected within range."""

    distance: float
    saturated: bool = False

    @property
    def effective(self) -> float:
        """Distance usable by the controllers: a saturated channel is open road."""
        return math.inf if self.saturated else self.distance


@dataclass(frozen=True, slots=True)
class SensorReading:
    front: Gap
    back: Gap
    left: Gap
    right: Gap

    @property
    def front_gap(self) -> float:
        return self.front.distance

    @property
    def back_gap(self) -> float:
        return self.back.distance

    @property
    def left_gap(self) -> float:
        return self.left.distance

    @property
    def right_gap(self) -> float:
        return self.right.distance


@dataclass(frozen=True, slots=True, order=True)
class CollisionEvent:
    step_index: int
    car_a: int
    car_b: int
    lane: int


@dataclass(slots=True)
class StepReport:
    """Everything one call to ``World.step`` produced."""

    step_index: int
    time: float
    rounds: int
    decisions: dict[int, Decision] = field(default_factory=dict)
    oracle_decisions: dict[int, Decision] | None = None
    deliveries: dict[int, int] = field(default_factory=dict)
    collisions: list[CollisionEvent] = field(default_factory=list)
    near_misses: int = 0

    @property
    def active_decisions(self) -> int:
        """Decisions other than Hold, the unit counted by the decision timeline."""
        return sum(1 for decision in self.decisions.values() if decision is not Decision.HOLD)
