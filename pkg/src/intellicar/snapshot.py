"""Read-only view of the world at the start of a step."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property

from intellicar.comms.tables import Beacon, TableRow
from intellicar.config import WorldConfig
from intellicar.models import CarState, Decision


@dataclass(frozen=True)
class Snapshot:
    """Car states and beaconed intents frozen at one instant.

    Every per-car computation inside a step (sensing, broadcasting, deciding) reads a
    snapshot, never the live world, so results do not depend on the order cars are
    visited in.
    """

    config: WorldConfig
    clock: float
    step_index: int
    states: Mapping[int, CarState]
    intents: Mapping[int, Decision]

    @cached_property
    def car_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.states))

    @cached_property
    def lanes(self) -> dict[int, list[CarState]]:
        """Cars per lane ordered by (position, car_id), rear first."""
        lanes: dict[int, list[CarState]] = {lane: [] for lane in range(self.config.lane_count)}
        for state in self.states.values():
            lanes[state.lane].append(state)
        for members in lanes.values():
            members.sort(key=lambda state: (state.position, state.car_id))
        return lanes

    @cached_property
    def _positions(self) -> dict[int, list[float]]:
        return {lane: [s.position for s in members] for lane, members in self.lanes.items()}

    @cached_property
    def _slots(self) -> dict[int, int]:
        return {
            state.car_id: index
            for members in self.lanes.values()
            for index, state in enumerate(members)
        }

    @cached_property
    def beacon_rows(self) -> dict[int, TableRow]:
        """Every car's beacon as heard at this instant, keyed by sender."""
        return {
            car_id: TableRow(Beacon.from_state(state, self.intents[car_id], self.clock), self.clock)
            for car_id, state in self.states.items()
        }

    def neighbours(self, state: CarState) -> tuple[CarState | None, CarState | None]:
        """Nearest same-lane follower and leader of ``state``."""
        members = self.lanes[state.lane]
        index = self._slots[state.car_id]
        follower = members[index - 1] if index > 0 else None
        leader = members[index + 1] if index + 1 < len(members) else None
        return follower, leader

    def window(self, lane: int, low: float, high: float) -> list[CarState]:
        """Cars in ``lane`` with ``low <= position <= high``, rear first."""
        positions = self._positions[lane]
        return self.lanes[lane][bisect_left(positions, low) : bisect_right(positions, high)]

    def first_at_or_ahead(self, lane: int, position: float) -> CarState | None:
        positions = self._positions[lane]
        index = bisect_left(positions, position)
        return self.lanes[lane][index] if index < len(positions) else None
