"""Fixed little-endian wire format for beacons.

Layout (37 bytes): sender_id u64, sent_at f64, lane u16, position f64, speed f64,
engine u8, direction u8, decision u8.
"""

import struct

from intellicar.comms.tables import Beacon
from intellicar.errors import CodecError
from intellicar.models import Decision, Direction, EngineState

BEACON_FORMAT = struct.Struct("<QdHddBBB")
BEACON_SIZE = BEACON_FORMAT.size


def encode_beacon(beacon: Beacon) -> bytes:
    try:
        return BEACON_FORMAT.pack(
            beacon.sender_id,
            beacon.sent_at,
            beacon.lane,
            beacon.position,
            beacon.speed,
            int(beacon.engine),
            int(beacon.direction),
            int(beacon.intended_decision),
        )
    except struct.error as e:
        raise CodecError(f"cannot encode beacon from car {beacon.sender_id}: {e}") from e


def decode_beacon(data: bytes) -> Beacon:
    if len(data) != BEACON_SIZE:
        raise CodecError(f"beacon must be {BEACON_SIZE} bytes, got {len(data)}")
    sender_id, sent_at, lane, position, speed, engine, direction, decision = (
        BEACON_FORMAT.unpack(data)
    )
    try:
        return Beacon(
            sender_id=sender_id,
            sent_at=sent_at,
            lane=lane,
            position=position,
            speed=speed,
            engine=EngineState(engine),
            direction=Direction(direction),
            intended_decision=Decision(decision),
        )
    except ValueError as e:
        raise CodecError(f"invalid enum byte in beacon from car {sender_id}: {e}") from e


def encode_trace(beacons: list[Beacon]) -> bytes:
    """Concatenate encoded beacons, as written to a trace dump."""
    return b"".join(encode_beacon(beacon) for beacon in beacons)


def decode_trace(data: bytes) -> list[Beacon]:
    if len(data) % BEACON_SIZE:
        raise CodecError(f"trace length {len(data)} is not a multiple of {BEACON_SIZE}")
    return [
        decode_beacon(data[offset : offset + BEACON_SIZE])
        for offset in range(0, len(data), BEACON_SIZE)
    ]
