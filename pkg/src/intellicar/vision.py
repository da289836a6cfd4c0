"""Vision algorithm: find the glowing lamp in a patch and turn it into an engine command."""

import numpy as np

from intellicar.errors import NoGlowingLamp
from intellicar.models import EngineCommand, LightColor
from intellicar.signals import ImagePatch, TrafficLight, render_patch

MARGIN = 10.0
FLOOR = 60.0

_COMMANDS = {
    LightColor.RED: EngineCommand.STOP_ENGINE,
    LightColor.YELLOW: EngineCommand.ACTIVATE_ENGINE,
    LightColor.GREEN: EngineCommand.MOVE_ENGINE,
}


def lamp_scores(patch: ImagePatch) -> dict[LightColor, float]:
    """Mean intensity of each lamp region in the channel(s) that lamp emits."""
    red = patch.region(LightColor.RED)
    yellow = patch.region(LightColor.YELLOW)
    green = patch.region(LightColor.GREEN)
    return {
        LightColor.RED: float(red[..., 0].mean()),
        LightColor.YELLOW: float(yellow[..., :2].astype(np.float64).mean()),
        LightColor.GREEN: float(green[..., 1].mean()),
    }


def classify(patch: ImagePatch, margin: float = MARGIN, floor: float = FLOOR) -> LightColor:
    """Return the color of the glowing lamp.

    Raises:
        NoGlowingLamp: the best region is not bright enough or not clearly brighter than
            the runner-up.
    """
    scores = lamp_scores(patch)
    ranked = sorted(scores.items(), key=lambda item: item[1], reverse=True)
    (best, best_score), (_, runner_up) = ranked[0], ranked[1]
    if best_score < floor:
        raise NoGlowingLamp(f"brightest lamp {best.value} scores {best_score:.1f} < {floor}")
    if best_score - runner_up < margin:
        raise NoGlowingLamp(
            f"lamp {best.value} leads by {best_score - runner_up:.1f} < margin {margin}"
        )
    return best


def color_to_command(color: LightColor) -> EngineCommand:
    return _COMMANDS[color]


def perceive(patch: ImagePatch, previous: EngineCommand) -> EngineCommand:
    """Full camera-to-engine pipeline; keeps the previous command when no lamp glows."""
    try:
        return color_to_command(classify(patch))
    except NoGlowingLamp:
        return previous


def vision_accuracy(light: TrafficLight, sigma: float, seeds: range) -> float:
    """Fraction of noisy renders of ``light`` classified as its phase."""
    correct = 0
    for seed in seeds:
        try:
            correct += classify(render_patch(light, sigma, seed)) is light.phase
        except NoGlowingLamp:
            pass
    return correct / len(seeds) if len(seeds) else 1.0
