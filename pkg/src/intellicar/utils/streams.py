"""Keyed random substreams.

Every random draw in the simulator comes from a generator seeded with the run seed plus
a key naming what the draw is for. Draws therefore never depend on iteration order or on
how many other draws happened before them.
"""

from enum import IntEnum

import numpy as np


class Channel(IntEnum):
    """Namespaces for keyed substreams."""

    SENSOR = 1
    CAMERA = 2
    LOSS = 3
    SCENARIO = 4


def substream(seed: int, channel: Channel, *key: int) -> np.random.Generator:
    """Return a generator determined only by ``(seed, channel, *key)``."""
    return np.random.default_rng([seed, int(channel), *key])
