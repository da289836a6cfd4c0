"""Exception types raised by intellicar."""


class IntellicarError(Exception):
    """Base class for every error the CLI reports as an input error."""


class ConfigError(IntellicarError):
    """A world configuration file or value is invalid."""


class ScenarioError(IntellicarError):
    """A scenario is malformed or places cars illegally."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class UnknownCarError(IntellicarError, KeyError):
    """A query named a car id that is not in the world."""

    def __init__(self, car_id: int):
        super().__init__(car_id)
        self.car_id = car_id

    def __str__(self) -> str:
        return f"unknown car id {self.car_id}"


class NoGlowingLamp(IntellicarError):
    """The vision classifier could not find a single glowing lamp."""


class CodecError(IntellicarError):
    """A beacon buffer could not be decoded."""
