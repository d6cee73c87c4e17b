"""Process-wide numeric settings.

The settings are meant to be chosen once at startup (the CLI does this from
its flags) and only read afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

PRECISIONS = ("double", "extended")


@dataclass(frozen=True)
class Settings:
    precision: str = "double"
    # Seed for the root finder's initial perturbations only.
    seed: int = 0
    # Digits used by mpmath when precision == "extended".
    extended_digits: int = 40


_settings = Settings()


def get_settings() -> Settings:
    return _settings


def configure(**changes) -> Settings:
    """Replace selected fields of the global settings and return the result."""
    global _settings
    new = replace(_settings, **changes)
    if new.precision not in PRECISIONS:
        raise ValueError(f"precision must be one of {PRECISIONS}, got {new.precision!r}")
    if new.extended_digits < 16:
        raise ValueError("extended_digits must be at least 16")
    _settings = new
    return new
