"""Traffic-light phase cycle and the synthetic camera that photographs a light."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from intellicar.models import LightColor

LIT = 230
DARK = 20
PATCH_WIDTH = 24
PATCH_HEIGHT = 72

# Lamp order from the top of the housing.
LAMP_ORDER = (LightColor.RED, LightColor.YELLOW, LightColor.GREEN)

_LIT_RGB = {
    LightColor.RED: (LIT, DARK, DARK),
    LightColor.YELLOW: (LIT, LIT, DARK),
    LightColor.GREEN: (DARK, LIT, DARK),
}


@dataclass(frozen=True, slots=True)
class TrafficLight:
    light_id: int
    lane: int
    position: float
    phase: LightColor
    remaining: float
    durations: tuple[float, float, float]

    def duration(self, phase: LightColor) -> float:
        green, yellow, red = self.durations
        return {LightColor.GREEN: green, LightColor.YELLOW: yellow, LightColor.RED: red}[phase]

    @property
    def cycle_length(self) -> float:
        return float(sum(self.durations))


def light_step(light: TrafficLight, dt: float) -> TrafficLight:
    """Advance a light by ``dt`` seconds, rolling over as many phases as needed."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    phase = light.phase
    remaining = light.remaining - dt
    while remaining <= 0:
        phase = phase.next
        remaining += light.duration(phase)
    return replace(light, phase=phase, remaining=remaining)


@dataclass(frozen=True, eq=False)
class ImagePatch:
    """Pre-cropped camera view of one light: three stacked lamp regions, RGB uint8."""

    pixels: np.ndarray  # shape (height, width, 3)

    def __post_init__(self) -> None:
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError("pixels must have shape (height, width, 3)")
        if self.pixels.shape[0] % 3:
            raise ValueError("patch height must be divisible by 3")
        if self.pixels.dtype != np.uint8:
            raise ValueError("pixels must be uint8")

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def region(self, lamp: LightColor) -> np.ndarray:
        """Pixels of the region housing ``lamp``."""
        third = self.height // 3
        index = LAMP_ORDER.index(lamp)
        return self.pixels[index * third : (index + 1) * third]

    def to_ppm(self) -> bytes:
        header = f"P6\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + self.pixels.tobytes()

    @classmethod
    def from_ppm(cls, data: bytes) -> ImagePatch:
        tokens: list[bytes] = []
        offset = 0
        while len(tokens) < 4:
            while data[offset : offset + 1].isspace():
                offset += 1
            end = offset
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[offset:end])
            offset = end
        if tokens[0] != b"P6" or tokens[3] != b"255":
            raise ValueError("not a binary 8-bit PPM image")
        width, height = int(tokens[1]), int(tokens[2])
        body = data[offset + 1 : offset + 1 + width * height * 3]
        pixels = np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3).copy()
        return cls(pixels)


def render_patch(
    light: TrafficLight,
    sigma: float,
    noise_key: Sequence[int] | int,
    width: int = PATCH_WIDTH,
    height: int = PATCH_HEIGHT,
) -> ImagePatch:
    """Photograph ``light``: its current lamp lit, the others dark, plus pixel noise."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    image = np.full((height, width, 3), DARK, dtype=np.float64)
    third = height // 3
    index = LAMP_ORDER.index(light.phase)
    image[index * third : (index + 1) * third] = _LIT_RGB[light.phase]
    if sigma > 0:
        rng = np.random.default_rng(noise_key)
        image += rng.normal(0.0, sigma * 255.0, size=image.shape)
    pixels = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    return ImagePatch(pixels)


def write_ppm(path: Path, patch: ImagePatch) -> None:
    path.write_bytes(patch.to_ppm())


def read_ppm(path: Path) -> ImagePatch:
    return ImagePatch.from_ppm(path.read_bytes())
