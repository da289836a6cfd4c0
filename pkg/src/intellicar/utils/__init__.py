# Seeded random substreams shared by sensing, radio, camera and scenario generation

from intellicar.utils.streams import Channel, substream

__all__ = ["Channel", "substream"]
