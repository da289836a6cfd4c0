"""Shared fixtures and builders."""

import pytest

from intellicar.config import WorldConfig
from intellicar.models import CarState, Decision, Direction, EngineState
from intellicar.scenario import CarSpec, LightSpec, ScenarioSpec
from intellicar.snapshot import Snapshot


@pytest.fixture
def cfg() -> WorldConfig:
    return WorldConfig()


def car(
    car_id: int,
    lane: int,
    position: float,
    speed: float = 0.0,
    engine: EngineState = EngineState.MOVING,
    destination: float = 1000.0,
) -> CarState:
    return CarState(
        car_id=car_id,
        lane=lane,
        position=position,
        speed=speed,
        engine=engine,
        direction=Direction.STOPPED if speed == 0 else Direction.FORWARD,
        destination=destination,
    )


def snapshot_of(config: WorldConfig, *states: CarState, step_index: int = 0) -> Snapshot:
    return Snapshot(
        config=config,
        clock=step_index * config.time_step,
        step_index=step_index,
        states={state.car_id: state for state in states},
        intents={state.car_id: Decision.KEEP_LANE for state in states},
    )


def scenario_of(*cars: CarSpec, lights: tuple[LightSpec, ...] = ()) -> ScenarioSpec:
    return ScenarioSpec(cars=tuple(cars), lights=lights)
