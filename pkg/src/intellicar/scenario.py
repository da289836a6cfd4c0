"""Scenario files and generated scenarios.

A scenario file has one record per line::

    # comment
    car <id> <lane> <pos> <speed> <dest> [stop|active|moving]
    light <id> <lane> <pos> <green|yellow|red>
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from intellicar.config import WorldConfig
from intellicar.errors import ScenarioError
from intellicar.headway import speed_for_gap
from intellicar.models import EngineState, LightColor
from intellicar.utils.streams import Channel, substream

# Extra clearance on top of the standstill gap between generated cars.
PLACEMENT_CLEARANCE = 0.01


@dataclass(frozen=True, slots=True)
class CarSpec:
    car_id: int
    lane: int
    position: float
    speed: float
    destination: float
    engine: EngineState = EngineState.MOVING


@dataclass(frozen=True, slots=True)
class LightSpec:
    light_id: int
    lane: int
    position: float
    phase: LightColor


@dataclass(frozen=True)
class ScenarioSpec:
    cars: tuple[CarSpec, ...] = field(default_factory=tuple)
    lights: tuple[LightSpec, ...] = field(default_factory=tuple)

    def to_text(self) -> str:
        lines = [
            f"car {c.car_id} {c.lane} {c.position!r} {c.speed!r} {c.destination!r} "
            f"{c.engine.name.lower()}"
            for c in self.cars
        ]
        lines += [
            f"light {light.light_id} {light.lane} {light.position!r} {light.phase.value}"
            for light in self.lights
        ]
        return "\n".join(lines) + "\n"


def _number(token: str, kind: type, line_no: int, name: str) -> float:
    try:
        value = kind(token)
    except ValueError:
        raise ScenarioError(f"line {line_no}: {name} '{token}' is not a valid number") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ScenarioError(f"line {line_no}: {name} must be finite")
    return value


def _parse_car(tokens: list[str], line_no: int) -> CarSpec:
    if len(tokens) not in (6, 7):
        raise ScenarioError(
            f"line {line_no}: expected 'car <id> <lane> <pos> <speed> <dest> [engine]'"
        )
    engine = EngineState.MOVING
    if len(tokens) == 7:
        try:
            engine = EngineState[tokens[6].upper()]
        except KeyError:
            raise ScenarioError(f"line {line_no}: unknown engine state '{tokens[6]}'") from None
    return CarSpec(
        car_id=int(_number(tokens[1], int, line_no, "car id")),
        lane=int(_number(tokens[2], int, line_no, "lane")),
        position=_number(tokens[3], float, line_no, "position"),
        speed=_number(tokens[4], float, line_no, "speed"),
        destination=_number(tokens[5], float, line_no, "destination"),
        engine=engine,
    )


def _parse_light(tokens: list[str], line_no: int) -> LightSpec:
    if len(tokens) != 5:
        raise ScenarioError(f"line {line_no}: expected 'light <id> <lane> <pos> <phase>'")
    try:
        phase = LightColor(tokens[4].lower())
    except ValueError:
        raise ScenarioError(f"line {line_no}: unknown light phase '{tokens[4]}'") from None
    return LightSpec(
        light_id=int(_number(tokens[1], int, line_no, "light id")),
        lane=int(_number(tokens[2], int, line_no, "lane")),
        position=_number(tokens[3], float, line_no, "position"),
        phase=phase,
    )


def parse_scenario(text: str) -> ScenarioSpec:
    cars: list[CarSpec] = []
    lights: list[LightSpec] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kind = tokens[0].lower()
        if kind == "car":
            cars.append(_parse_car(tokens, line_no))
        elif kind == "light":
            lights.append(_parse_light(tokens, line_no))
        else:
            raise ScenarioError(f"line {line_no}: unknown record type '{tokens[0]}'")

    for label, ids in (
        ("car", [car.car_id for car in cars]),
        ("light", [light.light_id for light in lights]),
    ):
        if any(identifier < 0 for identifier in ids):
            raise ScenarioError(f"{label} ids must be >= 0")
        duplicates = sorted({identifier for identifier in ids if ids.count(identifier) > 1})
        if duplicates:
            raise ScenarioError(f"duplicate {label} id(s): {duplicates}")
    return ScenarioSpec(cars=tuple(cars), lights=tuple(lights))


def load_scenario(path: Path) -> ScenarioSpec:
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        return parse_scenario(path.read_text(encoding="utf-8"))
    except ScenarioError as e:
        raise ScenarioError(f"{path}: {e}", e.pair) from e


def validate_scenario(config: WorldConfig, scenario: ScenarioSpec) -> None:
    """Check placements against the world: lanes, bounds, speeds and overlaps."""
    for car in scenario.cars:
        if not 0 <= car.lane < config.lane_count:
            raise ScenarioError(f"car {car.car_id}: lane {car.lane} out of range")
        if not 0 <= car.position <= config.lane_length:
            raise ScenarioError(f"car {car.car_id}: position {car.position} outside the lane")
        if not 0 <= car.destination <= config.lane_length:
            raise ScenarioError(
                f"car {car.car_id}: destination {car.destination} outside the lane"
            )
        if not 0 <= car.speed <= config.v_max:
            raise ScenarioError(f"car {car.car_id}: speed {car.speed} outside [0, v_max]")
        if car.engine is EngineState.STOP and car.speed > 0:
            raise ScenarioError(f"car {car.car_id}: a stopped engine needs speed 0")
    for light in scenario.lights:
        if not 0 <= light.lane < config.lane_count:
            raise ScenarioError(f"light {light.light_id}: lane {light.lane} out of range")
        if not 0 <= light.position <= config.lane_length:
            raise ScenarioError(f"light {light.light_id}: position outside the lane")

    by_lane: dict[int, list[CarSpec]] = {}
    for car in scenario.cars:
        by_lane.setdefault(car.lane, []).append(car)
    for cars in by_lane.values():
        cars.sort(key=lambda car: (car.position, car.car_id))
        for rear, front in zip(cars, cars[1:]):
            if front.position - rear.position <= config.car_length:
                pair = (min(rear.car_id, front.car_id), max(rear.car_id, front.car_id))
                raise ScenarioError(
                    f"cars {pair[0]} and {pair[1]} overlap in lane {rear.lane}", pair
                )


def random_scenario(
    config: WorldConfig,
    car_count: int,
    seed: int,
    span: float | None = None,
    lanes: int | None = None,
) -> ScenarioSpec:
    """Uniform random placement in the first ``span`` meters, every gap safe at start.

    Each car's initial speed is drawn from [0.5, 1) of the highest speed its front gap
    allows, so every initial gap is at least the required gap.
    """
    span = min(config.lane_length if span is None else span, config.lane_length)
    lanes = config.lane_count if lanes is None else min(lanes, config.lane_count)
    rng = substream(seed, Channel.SCENARIO, car_count)
    lane_of = rng.integers(0, lanes, size=car_count) if car_count else []
    slot = config.car_length + config.d_min + PLACEMENT_CLEARANCE

    cars: list[CarSpec] = []
    for lane in range(lanes):
        count = int(sum(1 for assigned in lane_of if assigned == lane))
        if not count:
            continue
        free = span - count * slot
        if free < 0:
            raise ScenarioError(f"{count} cars do not fit in {span:g} m of lane {lane}")
        offsets = sorted(rng.uniform(0.0, free, size=count))
        positions = [float(offset) + index * slot for index, offset in enumerate(offsets)]
        factors = rng.uniform(0.5, 1.0, size=count)
        for index, position in enumerate(positions):
            if index + 1 < count:
                gap = positions[index + 1] - position - config.car_length
                ceiling = speed_for_gap(gap, config)
            else:
                ceiling = config.v_max
            cars.append(
                CarSpec(
                    car_id=len(cars),
                    lane=lane,
                    position=position,
                    speed=float(factors[index]) * ceiling,
                    destination=config.lane_length,
                )
            )
    return ScenarioSpec(cars=tuple(cars))
