"""Four-direction range sensing against a snapshot."""

from intellicar.errors import UnknownCarError
from intellicar.models import CarState, Gap, SensorReading
from intellicar.snapshot import Snapshot
from intellicar.utils.streams import Channel, substream

WALL = Gap(0.0)


def _longitudinal(gap: float, sensor_range: float) -> Gap:
    if gap > sensor_range:
        return Gap(sensor_range, saturated=True)
    return Gap(gap)


def _side(snapshot: Snapshot, state: CarState, lane: int) -> Gap:
    cfg = snapshot.config
    if not 0 <= lane < cfg.lane_count:
        return WALL
    low, high = state.position - cfg.car_length, state.position + cfg.car_length
    offsets = [abs(other.position - state.position) for other in snapshot.window(lane, low, high)]
    if not offsets:
        return Gap(cfg.sensor_range, saturated=True)
    return Gap(min(min(offsets), cfg.sensor_range))


def true_reading(snapshot: Snapshot, state: CarState) -> SensorReading:
    """Noise-free reading: bumper gaps ahead/behind, occupancy alongside."""
    cfg = snapshot.config
    follower, leader = snapshot.neighbours(state)
    if leader is None:
        front = Gap(cfg.sensor_range, saturated=True)
    else:
        gap = max(leader.position - state.position - cfg.car_length, 0.0)
        front = _longitudinal(gap, cfg.sensor_range)
    if follower is None:
        back = Gap(cfg.sensor_range, saturated=True)
    else:
        gap = max(state.position - follower.position - cfg.car_length, 0.0)
        back = _longitudinal(gap, cfg.sensor_range)
    return SensorReading(
        front=front,
        back=back,
        left=_side(snapshot, state, state.lane + 1),
        right=_side(snapshot, state, state.lane - 1),
    )


def sense(snapshot: Snapshot, car_id: int) -> SensorReading:
    """Reading with Gaussian noise on every return; saturated channels stay at full range."""
    if car_id not in snapshot.states:
        raise UnknownCarError(car_id)
    cfg = snapshot.config
    reading = true_reading(snapshot, snapshot.states[car_id])
    if cfg.sensor_noise_sigma == 0:
        return reading

    noise = substream(cfg.rng_seed, Channel.SENSOR, snapshot.step_index, car_id).normal(
        0.0, cfg.sensor_noise_sigma, size=4
    )

    def perturb(gap: Gap, n: float) -> Gap:
        if gap.saturated:
            return gap
        return Gap(min(max(gap.distance + float(n), 0.0), cfg.sensor_range))

    return SensorReading(
        front=perturb(reading.front, noise[0]),
        back=perturb(reading.back, noise[1]),
        left=perturb(reading.left, noise[2]),
        right=perturb(reading.right, noise[3]),
    )
