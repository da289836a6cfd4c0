"""The three per-car tables: network, present state/direction, decision state/direction."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from intellicar.config import WorldConfig
from intellicar.headway import required_gap
from intellicar.models import CarState, Decision, Direction, EngineState


@dataclass(frozen=True, slots=True)
class Beacon:
    """What a car tells its neighbours: present state plus its committed next decision."""

    sender_id: int
    sent_at: float
    lane: int
    position: float
    speed: float
    engine: EngineState
    direction: Direction
    intended_decision: Decision

    @classmethod
    def from_state(cls, state: CarState, intent: Decision, now: float) -> Beacon:
        return cls(
            sender_id=state.car_id,
            sent_at=now,
            lane=state.lane,
            position=state.position,
            speed=state.speed,
            engine=state.engine,
            direction=state.direction,
            intended_decision=intent,
        )

    def position_at(self, now: float) -> float:
        """Dead-reckoned position assuming constant speed since the beacon was sent."""
        return self.position + self.speed * max(now - self.sent_at, 0.0)


@dataclass(frozen=True, slots=True)
class TableRow:
    beacon: Beacon
    received_at: float


@dataclass(frozen=True)
class NetworkTable:
    """Latest beacon heard from each neighbour, keyed by sender id."""

    owner_id: int
    rows: Mapping[int, TableRow] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[TableRow]:
        return iter(self.rows.values())

    def __contains__(self, sender_id: object) -> bool:
        return sender_id in self.rows

    def keys(self) -> frozenset[int]:
        return frozenset(self.rows)

    def beacons(self) -> list[Beacon]:
        return [row.beacon for row in self.rows.values()]


def update_network_table(
    table: NetworkTable,
    incoming: Iterable[Beacon],
    now: float,
    ttl: float,
) -> NetworkTable:
    """Merge beacons (newer sent_at wins, ties keep the existing row), then expire rows."""
    rows = dict(table.rows)
    for beacon in incoming:
        if beacon.sender_id == table.owner_id:
            continue
        existing = rows.get(beacon.sender_id)
        if existing is None or beacon.sent_at > existing.beacon.sent_at:
            rows[beacon.sender_id] = TableRow(beacon, now)
    fresh = {sender: row for sender, row in rows.items() if now - row.received_at <= ttl}
    return NetworkTable(table.owner_id, fresh)


@dataclass(frozen=True, slots=True)
class PresentRecord:
    state: CarState
    time: float


@dataclass(frozen=True, slots=True)
class DecisionRecord:
    next_decision: Decision
    next_direction: Direction
    basis: frozenset[int]


_DIRECTIONS = {
    Decision.KEEP_LANE: Direction.FORWARD,
    Decision.ACCELERATE: Direction.FORWARD,
    Decision.BRAKE: Direction.FORWARD,
    Decision.EMERGENCY_BRAKE: Direction.FORWARD,
    Decision.MOVE_LEFT: Direction.LATERAL_LEFT,
    Decision.MOVE_RIGHT: Direction.LATERAL_RIGHT,
    Decision.HOLD: Direction.STOPPED,
}


def build_decision_record(
    present: PresentRecord,
    table: NetworkTable,
    destination: float,
    decision: Decision,
    cfg: WorldConfig,
) -> DecisionRecord:
    """Commit this step's decision, the direction it implies and the rows it relied on."""
    state = present.state
    direction = _DIRECTIONS[decision]
    if state.position >= destination and not decision.is_lateral:
        direction = Direction.STOPPED
    reach = 2.0 * required_gap(state.speed, cfg)
    basis = frozenset(
        row.beacon.sender_id
        for row in table
        if abs(row.beacon.position - state.position) <= reach
    )
    return DecisionRecord(next_decision=decision, next_direction=direction, basis=basis)
