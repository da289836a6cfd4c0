# Communication module: beacons, radio rounds and the per-car tables

from intellicar.comms.codec import decode_beacon, encode_beacon
from intellicar.comms.radio import broadcast, comms_round
from intellicar.comms.tables import (
    Beacon,
    DecisionRecord,
    NetworkTable,
    PresentRecord,
    build_decision_record,
    update_network_table,
)

__all__ = [
    "Beacon",
    "DecisionRecord",
    "NetworkTable",
    "PresentRecord",
    "broadcast",
    "build_decision_record",
    "comms_round",
    "decode_beacon",
    "encode_beacon",
    "update_network_table",
]
