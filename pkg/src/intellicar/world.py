"""The world: cars, lights and the fixed-order step loop."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, replace
from typing import Literal

from intellicar.avoidance import decide, oracle_decide
from intellicar.comms.radio import broadcast, comms_round
from intellicar.comms.tables import (
    Beacon,
    DecisionRecord,
    NetworkTable,
    PresentRecord,
    build_decision_record,
)
from intellicar.config import WorldConfig
from intellicar.engine import INITIAL_COMMAND, engine_transition, speed_update
from intellicar.errors import UnknownCarError
from intellicar.headway import required_gap
from intellicar.models import (
    CarState,
    CollisionEvent,
    Decision,
    Direction,
    EngineCommand,
    EngineState,
    SensorReading,
    StepReport,
)
from intellicar.scenario import ScenarioSpec, validate_scenario
from intellicar.sensing import sense, true_reading
from intellicar.signals import TrafficLight, light_step, render_patch
from intellicar.snapshot import Snapshot
from intellicar.utils.streams import Channel
from intellicar.vision import perceive

logger = logging.getLogger(__name__)

DriverMode = Literal["onboard", "oracle"]


@dataclass(slots=True)
class Car:
    """Live per-car record: state plus the three tables and the last engine command.

    ``gate`` is the light whose lamp last set ``command``, kept until that light no longer
    faces the car.
    """

    state: CarState
    command: EngineCommand
    table: NetworkTable
    present: PresentRecord
    record: DecisionRecord
    gate: int | None = None


def _idle_record(state: CarState) -> DecisionRecord:
    decision = Decision.KEEP_LANE if state.engine is EngineState.MOVING else Decision.HOLD
    direction = Direction.STOPPED if state.speed == 0 else Direction.FORWARD
    return DecisionRecord(next_decision=decision, next_direction=direction, basis=frozenset())


class World:
    """Deterministic simulation of one scenario under one configuration.

    All behavior is a pure function of ``(config, scenario)``: every random draw comes from
    a substream keyed by ``config.rng_seed`` and the step index.
    """

    def __init__(
        self,
        config: WorldConfig,
        scenario: ScenarioSpec,
        driver: DriverMode = "onboard",
        score: bool = False,
    ):
        if driver not in ("onboard", "oracle"):
            raise ValueError(f"unknown driver mode: {driver}")
        validate_scenario(config, scenario)
        self.config = config
        self.driver = driver
        self.score = score
        self.step_index = 0
        self._cars: dict[int, Car] = {}
        for spec in sorted(scenario.cars, key=lambda c: c.car_id):
            state = CarState(
                car_id=spec.car_id,
                lane=spec.lane,
                position=spec.position,
                speed=spec.speed,
                engine=spec.engine,
                direction=Direction.STOPPED if spec.speed == 0 else Direction.FORWARD,
                destination=spec.destination,
            )
            self._cars[spec.car_id] = Car(
                state=state,
                command=INITIAL_COMMAND[spec.engine],
                table=NetworkTable(spec.car_id),
                present=PresentRecord(state, 0.0),
                record=_idle_record(state),
            )
        self._lights: dict[int, TrafficLight] = {
            spec.light_id: TrafficLight(
                light_id=spec.light_id,
                lane=spec.lane,
                position=spec.position,
                phase=spec.phase,
                remaining=config.light_duration(spec.phase),
                durations=config.light_durations,
            )
            for spec in sorted(scenario.lights, key=lambda light: light.light_id)
        }

    # ---- queries ---------------------------------------------------------------------

    @property
    def clock(self) -> float:
        return self.step_index * self.config.time_step

    @property
    def cars(self) -> dict[int, CarState]:
        return {car_id: car.state for car_id, car in self._cars.items()}

    @property
    def lights(self) -> dict[int, TrafficLight]:
        return dict(self._lights)

    def _car(self, car_id: int) -> Car:
        try:
            return self._cars[car_id]
        except KeyError:
            raise UnknownCarError(car_id) from None

    def snapshot(self) -> Snapshot:
        return Snapshot(
            config=self.config,
            clock=self.clock,
            step_index=self.step_index,
            states={car_id: car.state for car_id, car in self._cars.items()},
            intents={car_id: car.record.next_decision for car_id, car in self._cars.items()},
        )

    def sense(self, car_id: int) -> SensorReading:
        self._car(car_id)
        return sense(self.snapshot(), car_id)

    def route_hint(self, car_id: int) -> tuple[float, float]:
        """Satellite input: exact position and the destination the scenario assigned."""
        state = self._car(car_id).state
        return state.position, state.destination

    def table(self, car_id: int) -> NetworkTable:
        return self._car(car_id).table

    def present(self, car_id: int) -> PresentRecord:
        return self._car(car_id).present

    def decision_record(self, car_id: int) -> DecisionRecord:
        return self._car(car_id).record

    def command(self, car_id: int) -> EngineCommand:
        return self._car(car_id).command

    def broadcast(self, sender_id: int) -> list[tuple[int, Beacon]]:
        self._car(sender_id)
        return broadcast(self.snapshot(), sender_id)

    def comms_round(self, round_index: int = 0) -> dict[int, NetworkTable]:
        """Run one comms round outside ``step`` and keep the updated tables."""
        tables = {car_id: car.table for car_id, car in self._cars.items()}
        outcome = comms_round(self.snapshot(), tables, round_index)
        for car_id, table in outcome.tables.items():
            self._cars[car_id].table = table
        return outcome.tables

    def oracle_decide(self, car_id: int) -> Decision:
        self._car(car_id)
        return oracle_decide(self.snapshot(), car_id)

    def detect_collisions(self) -> list[CollisionEvent]:
        return find_collisions(self.snapshot(), self.step_index)

    def facing_light(self, state: CarState) -> TrafficLight | None:
        """Nearest light ahead in the car's lane within camera (sensor) range."""
        ahead = [
            light
            for light in self._lights.values()
            if light.lane == state.lane
            and 0 <= light.position - state.position <= self.config.sensor_range
        ]
        if not ahead:
            return None
        return min(ahead, key=lambda light: (light.position, light.light_id))

    # ---- the step loop -----------------------------------------------------------------

    def step(self) -> StepReport:
        cfg = self.config
        dt = cfg.time_step
        index = self.step_index

        # (1) lights
        self._lights = {
            light_id: light_step(light, dt) for light_id, light in self._lights.items()
        }

        snapshot = self.snapshot()
        car_ids = snapshot.car_ids

        # (2) sensing; the oracle driver reads the truth instead
        if self.driver == "onboard":
            readings = {car_id: sense(snapshot, car_id) for car_id in car_ids}
        else:
            readings = {
                car_id: true_reading(snapshot, snapshot.states[car_id]) for car_id in car_ids
            }

        # (3) vision
        for car_id in car_ids:
            car = self._cars[car_id]
            light = self.facing_light(car.state)
            if light is not None:
                patch = render_patch(
                    light,
                    cfg.camera_noise_sigma,
                    [cfg.rng_seed, int(Channel.CAMERA), index, car_id],
                )
                car.command = perceive(patch, car.command)
                car.gate = light.light_id
            elif car.gate is not None:
                # the gating light is behind the car or out of camera range
                car.command = EngineCommand.MOVE_ENGINE
                car.gate = None

        # (4) comms rounds; the oracle driver needs no tables
        rounds = cfg.decision_rounds if self.driver == "onboard" else 0
        deliveries = {car_id: 0 for car_id in car_ids}
        tables = {car_id: self._cars[car_id].table for car_id in car_ids}
        for round_index in range(rounds):
            outcome = comms_round(snapshot, tables, round_index)
            tables = outcome.tables
            for car_id, count in outcome.delivered.items():
                deliveries[car_id] += count

        # (5) decisions
        decisions: dict[int, Decision] = {}
        oracle: dict[int, Decision] | None = {} if self.score else None
        for car_id in car_ids:
            state = snapshot.states[car_id]
            if self.driver == "onboard":
                decisions[car_id] = decide(
                    readings[car_id], tables[car_id], state, cfg, snapshot.clock
                )
            if oracle is not None or self.driver == "oracle":
                truth = readings[car_id] if self.driver == "oracle" else None
                best = oracle_decide(snapshot, car_id, truth)
                if oracle is not None:
                    oracle[car_id] = best
                if self.driver == "oracle":
                    decisions[car_id] = best

        for car_id in car_ids:
            car = self._cars[car_id]
            car.table = tables[car_id]
            car.present = PresentRecord(snapshot.states[car_id], snapshot.clock)
            car.record = build_decision_record(
                car.present, car.table, car.state.destination, decisions[car_id], cfg
            )

        # (6) engines, lane-change arbitration, speeds
        engines = {
            car_id: engine_transition(snapshot.states[car_id].engine, self._cars[car_id].command)
            for car_id in car_ids
        }
        target_lanes = arbitrate_lane_changes(snapshot, decisions, engines)

        # (7) integrate
        for car_id in car_ids:
            before = snapshot.states[car_id]
            decision = decisions[car_id]
            rejected = engines[car_id] is EngineState.MOVING and car_id not in target_lanes
            if decision.is_lateral and rejected:
                decision = Decision.EMERGENCY_BRAKE
            moving = replace(before, engine=engines[car_id])
            speed = speed_update(moving, decision, readings[car_id], cfg, dt)
            if engines[car_id] is EngineState.STOP:
                speed = 0.0
            position = before.position + before.speed * dt
            if position >= cfg.lane_length:
                position, speed = cfg.lane_length, 0.0
            lane = target_lanes.get(car_id, before.lane)
            if speed == 0:
                direction = Direction.STOPPED
            elif lane > before.lane:
                direction = Direction.LATERAL_LEFT
            elif lane < before.lane:
                direction = Direction.LATERAL_RIGHT
            else:
                direction = Direction.FORWARD
            self._cars[car_id].state = replace(
                moving, lane=lane, position=position, speed=speed, direction=direction
            )

        # (8) collisions
        after = self.snapshot()
        collisions = find_collisions(after, index)
        for event in collisions:
            logger.debug(
                "step %d: cars %d and %d collided in lane %d",
                index,
                event.car_a,
                event.car_b,
                event.lane,
            )

        self.step_index += 1
        return StepReport(
            step_index=index,
            time=self.clock,
            rounds=rounds,
            decisions=decisions,
            oracle_decisions=oracle,
            deliveries=deliveries,
            collisions=collisions,
            near_misses=count_near_misses(after),
        )


def arbitrate_lane_changes(
    snapshot: Snapshot,
    decisions: Mapping[int, Decision],
    engines: Mapping[int, EngineState],
) -> dict[int, int]:
    """Accepted lane changes as car id -> target lane, granted in car-id order."""
    cfg = snapshot.config
    accepted: dict[int, int] = {}
    merged: dict[int, list[CarState]] = {}
    for car_id in snapshot.car_ids:
        decision = decisions[car_id]
        if not decision.is_lateral or engines[car_id] is not EngineState.MOVING:
            continue
        me = snapshot.states[car_id]
        target = me.lane + 1 if decision is Decision.MOVE_LEFT else me.lane - 1
        if not 0 <= target < cfg.lane_count:
            continue
        occupants = [
            other for other in snapshot.lanes[target] if other.car_id not in accepted
        ] + merged.get(target, [])
        clear = True
        for other in occupants:
            offset = other.position - me.position
            if offset >= 0:
                clear = offset - cfg.car_length >= required_gap(me.speed, cfg)
            else:
                clear = -offset - cfg.car_length >= required_gap(other.speed, cfg)
            if not clear:
                break
        if clear:
            accepted[car_id] = target
            merged.setdefault(target, []).append(replace(me, lane=target))
    return accepted


def find_collisions(snapshot: Snapshot, step_index: int) -> list[CollisionEvent]:
    length = snapshot.config.car_length
    events = []
    for lane, members in snapshot.lanes.items():
        for i, rear in enumerate(members):
            for front in members[i + 1 :]:
                if front.position - rear.position >= length:
                    break
                a, b = sorted((rear.car_id, front.car_id))
                events.append(CollisionEvent(step_index, a, b, lane))
    return sorted(events, key=lambda event: (event.car_a, event.car_b))


def count_near_misses(snapshot: Snapshot) -> int:
    cfg = snapshot.config
    count = 0
    for members in snapshot.lanes.values():
        for rear, front in zip(members, members[1:]):
            if 0 <= front.position - rear.position - cfg.car_length < cfg.d_min:
                count += 1
    return count
