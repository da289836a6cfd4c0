"""Tests for the lamp classifier and the camera-to-engine pipeline."""

import numpy as np
import pytest

from intellicar.engine import engine_transition
from intellicar.errors import NoGlowingLamp
from intellicar.models import EngineCommand, EngineState, LightColor
from intellicar.signals import (
    DARK,
    PATCH_HEIGHT,
    PATCH_WIDTH,
    ImagePatch,
    TrafficLight,
    render_patch,
)
from intellicar.vision import classify, color_to_command, lamp_scores, perceive, vision_accuracy

E = EngineState

# Engine state after a car in ``state`` reads a light of ``phase``.
EXPECTED = {
    (LightColor.RED, E.STOP): E.STOP,
    (LightColor.RED, E.ACTIVE): E.STOP,
    (LightColor.RED, E.MOVING): E.STOP,
    (LightColor.YELLOW, E.STOP): E.ACTIVE,
    (LightColor.YELLOW, E.ACTIVE): E.ACTIVE,
    (LightColor.YELLOW, E.MOVING): E.ACTIVE,
    (LightColor.GREEN, E.STOP): E.ACTIVE,
    (LightColor.GREEN, E.ACTIVE): E.MOVING,
    (LightColor.GREEN, E.MOVING): E.MOVING,
}


def light(phase: LightColor) -> TrafficLight:
    return TrafficLight(0, 0, 0.0, phase, 1.0, (20.0, 3.0, 15.0))


@pytest.mark.parametrize(("phase", "state"), list(EXPECTED))
def test_light_to_engine_pipeline(phase, state):
    patch = render_patch(light(phase), 0.0, 0)
    command = color_to_command(classify(patch))
    assert engine_transition(state, command) is EXPECTED[(phase, state)]


@pytest.mark.parametrize("phase", list(LightColor))
def test_noise_free_patch_classifies_as_its_phase(phase):
    assert classify(render_patch(light(phase), 0.0, 0)) is phase


def test_color_to_command():
    assert color_to_command(LightColor.RED) is EngineCommand.STOP_ENGINE
    assert color_to_command(LightColor.YELLOW) is EngineCommand.ACTIVATE_ENGINE
    assert color_to_command(LightColor.GREEN) is EngineCommand.MOVE_ENGINE


def test_dark_patch_has_no_glowing_lamp():
    dark = ImagePatch(np.full((PATCH_HEIGHT, PATCH_WIDTH, 3), DARK, dtype=np.uint8))
    with pytest.raises(NoGlowingLamp):
        classify(dark)


def test_ambiguous_patch_has_no_glowing_lamp():
    pixels = render_patch(light(LightColor.RED), 0.0, 0).pixels.copy()
    pixels[PATCH_HEIGHT // 3 * 2 :, :, 1] = 230  # green lamp lit as well
    with pytest.raises(NoGlowingLamp):
        classify(ImagePatch(pixels))


def test_perceive_keeps_previous_command_without_lamp():
    dark = ImagePatch(np.full((PATCH_HEIGHT, PATCH_WIDTH, 3), DARK, dtype=np.uint8))
    assert perceive(dark, EngineCommand.MOVE_ENGINE) is EngineCommand.MOVE_ENGINE
    red = render_patch(light(LightColor.RED), 0.0, 0)
    assert perceive(red, EngineCommand.MOVE_ENGINE) is EngineCommand.STOP_ENGINE


def test_classification_ignores_pixel_order_within_regions():
    patch = render_patch(light(LightColor.YELLOW), 0.2, 9)
    rng = np.random.default_rng(0)
    third = PATCH_HEIGHT // 3
    shuffled = patch.pixels.copy()
    for index in range(3):
        region = shuffled[index * third : (index + 1) * third].reshape(-1, 3)
        shuffled[index * third : (index + 1) * third] = rng.permutation(region).reshape(
            third, PATCH_WIDTH, 3
        )
    assert lamp_scores(ImagePatch(shuffled)) == pytest.approx(lamp_scores(patch))
    assert classify(ImagePatch(shuffled)) is classify(patch)


@pytest.mark.parametrize("phase", list(LightColor))
def test_accuracy_under_light_noise(phase):
    assert vision_accuracy(light(phase), 0.05, range(100)) >= 0.99


@pytest.mark.slow
@pytest.mark.parametrize("phase", list(LightColor))
def test_accuracy_under_noise_acceptance(phase):
    seeds = range(1000)
    accuracies = [vision_accuracy(light(phase), sigma, seeds) for sigma in (0.0, 0.05, 0.2, 0.5)]
    assert accuracies[1] >= 0.99
    assert all(a >= b for a, b in zip(accuracies, accuracies[1:]))
