"""Engine state machine and longitudinal speed control."""

import math

from intellicar.config import WorldConfig
from intellicar.headway import required_gap
from intellicar.models import CarState, Decision, EngineCommand, EngineState, SensorReading

# Full transition table. Stop never goes straight to Moving: a MoveEngine command while
# stopped only ignites the engine (Active), the next MoveEngine sets it moving.
TRANSITIONS: dict[tuple[EngineState, EngineCommand], EngineState] = {
    (EngineState.STOP, EngineCommand.STOP_ENGINE): EngineState.STOP,
    (EngineState.STOP, EngineCommand.ACTIVATE_ENGINE): EngineState.ACTIVE,
    (EngineState.STOP, EngineCommand.MOVE_ENGINE): EngineState.ACTIVE,
    (EngineState.ACTIVE, EngineCommand.STOP_ENGINE): EngineState.STOP,
    (EngineState.ACTIVE, EngineCommand.ACTIVATE_ENGINE): EngineState.ACTIVE,
    (EngineState.ACTIVE, EngineCommand.MOVE_ENGINE): EngineState.MOVING,
    (EngineState.MOVING, EngineCommand.STOP_ENGINE): EngineState.STOP,
    (EngineState.MOVING, EngineCommand.ACTIVATE_ENGINE): EngineState.ACTIVE,
    (EngineState.MOVING, EngineCommand.MOVE_ENGINE): EngineState.MOVING,
}

INITIAL_COMMAND = {
    EngineState.STOP: EngineCommand.STOP_ENGINE,
    EngineState.ACTIVE: EngineCommand.ACTIVATE_ENGINE,
    EngineState.MOVING: EngineCommand.MOVE_ENGINE,
}


def engine_transition(state: EngineState, cmd: EngineCommand) -> EngineState:
    return TRANSITIONS[(state, cmd)]


def target_speed(speed: float, front_gap: float, cfg: WorldConfig) -> float:
    """Speed the controller aims for given the free distance ahead.

    More front distance gives a higher target, saturating at v_max once the gap reaches
    the required gap.
    """
    if math.isinf(front_gap):
        return cfg.v_max
    span = required_gap(speed, cfg) - cfg.d_min
    if span <= 0:
        return cfg.v_max if front_gap > cfg.d_min else 0.0
    ratio = min(max((front_gap - cfg.d_min) / span, 0.0), 1.0)
    return cfg.v_max * ratio


def speed_update(
    car: CarState,
    decision: Decision,
    gaps: SensorReading,
    cfg: WorldConfig,
    dt: float,
) -> float:
    """New speed after one step of ``dt`` seconds for a car whose engine is ``car.engine``."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    step = cfg.a_max * dt
    if car.engine is not EngineState.MOVING:
        return max(car.speed - step, 0.0)

    if decision is Decision.EMERGENCY_BRAKE:
        return max(car.speed - 2.0 * step, 0.0)
    if decision is Decision.BRAKE:
        return max(car.speed - step, 0.0)

    target = target_speed(car.speed, gaps.front.effective, cfg)
    if decision.is_lateral or decision is Decision.HOLD:
        target = min(target, car.speed)
    if target >= car.speed:
        return min(car.speed + step, target, cfg.v_max)
    return max(car.speed - step, target, 0.0)
