"""Decision support: fuse what a car senses with what it heard, then pick one decision.

The cascade (first match wins):

1. engine not Moving: Hold
2. enough room ahead: Accelerate when the room is twice what is needed, else KeepLane
3. room behind for the follower to stop: Brake
4. a side with room to merge (left first): MoveLeft / MoveRight
5. otherwise EmergencyBrake
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from intellicar.comms.tables import NetworkTable
from intellicar.config import WorldConfig
from intellicar.errors import UnknownCarError
from intellicar.headway import required_gap
from intellicar.models import CarState, Decision, EngineState, SensorReading
from intellicar.sensing import true_reading
from intellicar.snapshot import Snapshot

__all__ = [
    "FusedGaps",
    "decide",
    "fuse_gaps",
    "lateral_threshold",
    "oracle_decide",
    "oracle_table",
]


@dataclass(frozen=True, slots=True)
class FusedGaps:
    """Free distance in each direction; ``math.inf`` means nothing known there."""

    front: float
    back: float
    left: float
    right: float
    follower_speed: float | None = None


def lateral_threshold(cfg: WorldConfig) -> float:
    return cfg.car_length + cfg.d_min


def fuse_gaps(
    reading: SensorReading,
    table: NetworkTable,
    car: CarState,
    cfg: WorldConfig,
    now: float,
) -> FusedGaps:
    """Minimum of the sensed gap and every gap implied by a dead-reckoned table row.

    The follower speed is the beaconed speed of the nearest row behind, provided that row
    can be the car the rear sensor sees (no more than a car length beyond the sensed gap).
    """
    front = reading.front.effective
    back = reading.back.effective
    sides = {car.lane + 1: reading.left.effective, car.lane - 1: reading.right.effective}
    follower: tuple[float, int] | None = None
    follower_gap = math.inf
    follower_speed = None
    own_need = required_gap(car.speed, cfg)
    threshold = lateral_threshold(cfg)

    for sender_id in sorted(table.rows):
        if sender_id == car.car_id:
            continue
        beacon = table.rows[sender_id].beacon
        position = beacon.position_at(now)
        offset = position - car.position
        if beacon.lane == car.lane:
            if (position, sender_id) > (car.position, car.car_id):
                front = min(front, max(offset - cfg.car_length, 0.0))
            else:
                gap = max(-offset - cfg.car_length, 0.0)
                back = min(back, gap)
                if follower is None or (position, sender_id) > follower:
                    follower = (position, sender_id)
                    follower_gap, follower_speed = gap, beacon.speed
        elif beacon.lane in sides:
            # Slack the merge would leave, shifted so that zero slack sits at the threshold.
            if offset >= 0:
                slack = offset - cfg.car_length - own_need
            else:
                slack = -offset - cfg.car_length - required_gap(beacon.speed, cfg)
            sides[beacon.lane] = min(sides[beacon.lane], max(slack + threshold, 0.0))

    if follower_gap > reading.back.effective + cfg.car_length:
        follower_speed = None

    return FusedGaps(
        front=front,
        back=back,
        left=sides[car.lane + 1],
        right=sides[car.lane - 1],
        follower_speed=follower_speed,
    )


def decide(
    reading: SensorReading,
    table: NetworkTable,
    car: CarState,
    cfg: WorldConfig,
    now: float,
) -> Decision:
    if car.engine is not EngineState.MOVING:
        return Decision.HOLD

    gaps = fuse_gaps(reading, table, car, cfg, now)
    need = required_gap(car.speed, cfg)
    if gaps.front >= need:
        return Decision.ACCELERATE if gaps.front >= 2.0 * need else Decision.KEEP_LANE

    follower_speed = car.speed if gaps.follower_speed is None else gaps.follower_speed
    if gaps.back >= required_gap(follower_speed, cfg):
        return Decision.BRAKE

    threshold = lateral_threshold(cfg)
    if gaps.left >= threshold:
        return Decision.MOVE_LEFT
    if gaps.right >= threshold:
        return Decision.MOVE_RIGHT
    return Decision.EMERGENCY_BRAKE


def oracle_table(snapshot: Snapshot, car_id: int) -> NetworkTable:
    """A table holding every other car in the world, heard this instant."""
    rows = snapshot.beacon_rows
    return NetworkTable(car_id, {other: row for other, row in rows.items() if other != car_id})


def _relevant_table(snapshot: Snapshot, state: CarState) -> NetworkTable:
    """The rows of the oracle table that can change the cascade's outcome for ``state``.

    Same lane: the nearest leader and follower. Adjacent lanes: the nearest car level or
    ahead, plus every car behind close enough that a merge could cut into its stopping
    distance. Any other row only adds slack, so the decision equals the full table's.
    """
    cfg = snapshot.config
    reach = cfg.car_length + required_gap(cfg.v_max, cfg)
    chosen = [other for other in snapshot.neighbours(state) if other is not None]
    for lane in (state.lane - 1, state.lane + 1):
        if not 0 <= lane < cfg.lane_count:
            continue
        chosen.extend(snapshot.window(lane, state.position - reach, state.position))
        ahead = snapshot.first_at_or_ahead(lane, state.position)
        if ahead is not None:
            chosen.append(ahead)
    rows = snapshot.beacon_rows
    return NetworkTable(state.car_id, {other.car_id: rows[other.car_id] for other in chosen})


def oracle_decide(
    snapshot: Snapshot, car_id: int, truth: SensorReading | None = None
) -> Decision:
    """The cascade run on perfect inputs: noise-free gaps and complete, fresh knowledge.

    ``truth`` may carry an already computed ``true_reading`` for the car.
    """
    if car_id not in snapshot.states:
        raise UnknownCarError(car_id)
    state = snapshot.states[car_id]
    return decide(
        truth if truth is not None else true_reading(snapshot, state),
        _relevant_table(snapshot, state),
        state,
        snapshot.config,
        snapshot.clock,
    )
