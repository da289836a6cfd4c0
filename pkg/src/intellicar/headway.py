"""How much distance is "enough" at a given speed."""

import math

from intellicar.config import WorldConfig


def required_gap(speed: float, cfg: WorldConfig) -> float:
    """Standstill gap plus reaction distance plus braking distance at ``a_max``."""
    if speed < 0:
        raise ValueError("speed must be >= 0")
    return cfg.d_min + speed * cfg.t_react + speed * speed / (2.0 * cfg.a_max)


def speed_for_gap(gap: float, cfg: WorldConfig) -> float:
    """Largest speed whose required gap fits in ``gap``, capped at v_max."""
    if gap <= cfg.d_min:
        return 0.0
    a, t = cfg.a_max, cfg.t_react
    speed = a * (-t + math.sqrt(t * t + 2.0 * (gap - cfg.d_min) / a))
    return min(speed, cfg.v_max)
