"""Single-hop beacon broadcast inside the radio radius."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import TYPE_CHECKING

from intellicar.comms.tables import Beacon, NetworkTable, update_network_table
from intellicar.errors import UnknownCarError
from intellicar.utils.streams import Channel, substream

if TYPE_CHECKING:
    from intellicar.snapshot import Snapshot


def radio_distance(snapshot: Snapshot, a: int, b: int) -> float:
    """Straight-line distance between two cars: lane offset laterally, position along."""
    first, second = snapshot.states[a], snapshot.states[b]
    lateral = (first.lane - second.lane) * snapshot.config.lane_width
    return math.hypot(lateral, first.position - second.position)


def broadcast(snapshot: Snapshot, sender_id: int, round_index: int = 0) -> list[tuple[int, Beacon]]:
    """Deliveries of one beacon from ``sender_id``, as (receiver_id, beacon) pairs."""
    if sender_id not in snapshot.states:
        raise UnknownCarError(sender_id)
    cfg = snapshot.config
    beacon = Beacon.from_state(
        snapshot.states[sender_id], snapshot.intents[sender_id], snapshot.clock
    )
    draws = None
    if cfg.p_loss > 0:
        rng = substream(cfg.rng_seed, Channel.LOSS, snapshot.step_index, round_index, sender_id)
        draws = rng.random(len(snapshot.car_ids))

    deliveries = []
    for index, receiver_id in enumerate(snapshot.car_ids):
        if receiver_id == sender_id:
            continue
        if radio_distance(snapshot, sender_id, receiver_id) > cfg.comms_radius:
            continue
        if draws is not None and draws[index] < cfg.p_loss:
            continue
        deliveries.append((receiver_id, beacon))
    return deliveries


@dataclass(frozen=True)
class RoundOutcome:
    tables: dict[int, NetworkTable]
    delivered: dict[int, int]


def comms_round(
    snapshot: Snapshot,
    tables: Mapping[int, NetworkTable],
    round_index: int = 0,
) -> RoundOutcome:
    """Every car broadcasts once; all tables merge afterwards."""
    inbox: dict[int, list[Beacon]] = {car_id: [] for car_id in snapshot.car_ids}
    for sender_id in snapshot.car_ids:
        for receiver_id, beacon in broadcast(snapshot, sender_id, round_index):
            inbox[receiver_id].append(beacon)

    cfg = snapshot.config
    updated = {
        car_id: update_network_table(
            tables.get(car_id, NetworkTable(car_id)), inbox[car_id], snapshot.clock, cfg.beacon_ttl
        )
        for car_id in snapshot.car_ids
    }
    return RoundOutcome(
        tables=updated,
        delivered={car_id: len(inbox[car_id]) for car_id in snapshot.car_ids},
    )
