"""Configuration management for intellicar."""

import hashlib
import os
from pathlib import Path
from typing import Any

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from intellicar.errors import ConfigError
from intellicar.models import LightColor


class WorldConfig(BaseModel):
    """World tunables. Field names are the keys of a key=value config file."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lane_count: int = Field(default=3, gt=0, description="Number of parallel lanes")
    lane_length: float = Field(default=1000.0, gt=0, description="Lane length in meters")
    time_step: float = Field(default=0.1, gt=0, description="Simulation step in seconds")
    sensor_range: float = Field(default=50.0, gt=0, description="Range-sensor reach in meters")
    sensor_noise_sigma: float = Field(
        default=0.0, ge=0, description="Range-sensor Gaussian noise std in meters"
    )
    comms_radius: float = Field(default=200.0, gt=0, description="Radio reach in meters")
    car_length: float = Field(default=5.0, gt=0, description="Car length in meters")
    v_max: float = Field(default=25.0, gt=0, description="Maximum speed in m/s")
    a_max: float = Field(default=4.0, gt=0, description="Braking/acceleration magnitude in m/s^2")
    t_react: float = Field(default=1.0, ge=0, description="Reaction time in seconds")
    d_min: float = Field(default=2.0, gt=0, description="Standstill gap in meters")
    light_durations: tuple[float, float, float] = Field(
        default=(20.0, 3.0, 15.0), description="Green, yellow and red durations in seconds"
    )
    beacon_ttl: float = Field(default=1.0, gt=0, description="Network-table row lifetime")
    decision_rounds: int = Field(default=1, gt=0, description="Comms rounds per step")
    rng_seed: int = Field(default=42, ge=0, lt=2**64, description="Seed of every random stream")
    lane_width: float = Field(default=3.5, gt=0, description="Lateral lane spacing in meters")
    p_loss: float = Field(default=0.0, ge=0, lt=1, description="Per-delivery beacon drop chance")
    camera_noise_sigma: float = Field(
        default=0.0, ge=0, description="Camera noise std as a fraction of full intensity"
    )

    @field_validator("light_durations", mode="before")
    @classmethod
    def _split_durations(cls, value: Any) -> Any:
        if isinstance(value, str):
            return tuple(float(part) for part in value.split(","))
        return value

    @field_validator("light_durations")
    @classmethod
    def _positive_durations(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        if any(duration <= 0 for duration in value):
            raise ValueError("all light durations must be > 0")
        return value

    def light_duration(self, phase: LightColor) -> float:
        green, yellow, red = self.light_durations
        return {LightColor.GREEN: green, LightColor.YELLOW: yellow, LightColor.RED: red}[phase]

    @property
    def world_diameter(self) -> float:
        """Largest distance between two points of the road."""
        width = (self.lane_count - 1) * self.lane_width
        return float((self.lane_length**2 + width**2) ** 0.5)

    @classmethod
    def preset(cls, name: str, **overrides: Any) -> "WorldConfig":
        """Build a named preset, optionally overriding individual fields."""
        try:
            values = dict(PRESETS[name])
        except KeyError:
            raise ConfigError(
                f"unknown preset '{name}' (choose from {', '.join(sorted(PRESETS))})"
            ) from None
        values.update(overrides)
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"invalid preset override: {_first_error(e)}") from e

    def to_file_text(self) -> str:
        """Render as key=value lines accepted by ``load_world_config``."""
        lines = []
        for name, value in self.model_dump().items():
            if name == "light_durations":
                value = ",".join(f"{duration:g}" for duration in value)
            lines.append(f"{name}={value}")
        return "\n".join(lines) + "\n"


# Degraded sensing: short noisy range sensors, a heavily lossy channel and no row retention
# across steps (ttl below one step), so tables hold only the current step's deliveries.
PRESETS: dict[str, dict[str, Any]] = {
    "default": {},
    "degraded": {
        "lane_count": 1,
        "lane_length": 2000.0,
        "sensor_range": 30.0,
        "sensor_noise_sigma": 0.2,
        "comms_radius": 150.0,
        "v_max": 20.0,
        "p_loss": 0.8,
        "beacon_ttl": 0.05,
    },
}


def _first_error(error: ValidationError) -> str:
    detail = error.errors()[0]
    location = ".".join(str(part) for part in detail["loc"]) or "config"
    return f"{location}: {detail['msg']}"


def load_world_config(path: Path, **overrides: Any) -> WorldConfig:
    """Load a flat key=value world config file."""
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, Any] = {
        key: value for key, value in dotenv_values(path).items() if value is not None
    }
    values.update(overrides)
    try:
        return WorldConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"{path}: {_first_error(e)}") from e


def config_hash(config: WorldConfig) -> str:
    """Short stable digest of a configuration, recorded in CSV metadata."""
    canonical = config.model_dump_json()
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


class Settings(BaseModel):
    """Harness and CLI settings."""

    seeds: int = Field(default=10, ge=1, description="Seeds per sweep grid point")
    workers: int = Field(default=1, ge=1, description="Parallel runs in sweeps")
    output_dir: Path = Field(default=Path("results"), description="Default CSV directory")
    debug: bool = Field(default=False, description="Enable debug logging")

    @classmethod
    def from_env(cls, env_file: Path | None = None) -> "Settings":
        """Load settings from environment variables."""
        if env_file:
            load_dotenv(env_file)
        else:
            load_dotenv()

        return cls(
            seeds=int(os.getenv("INTELLICAR_SEEDS", "10")),
            workers=int(os.getenv("INTELLICAR_WORKERS", "1")),
            output_dir=Path(os.getenv("INTELLICAR_OUTPUT_DIR", "results")),
            debug=os.getenv("INTELLICAR_DEBUG", "").lower() in ("true", "1", "yes"),
        )
