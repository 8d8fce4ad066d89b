"""Persisted user defaults for rlift runs.

Stored as JSON under the rlift config directory. Out-of-range values are clamped rather
than rejected, and an unreadable file falls back to the defaults with a warning.
"""

import json
import logging
from dataclasses import asdict, dataclass, fields
from typing import Any

from rlift.core.config import (
    DEFAULT_DEGREE,
    MAX_CROSS_CHECK_DEGREE,
    MAX_DEGREE,
    MIN_DEGREE,
    RLIFT_CONFIG_DIR,
)

logger = logging.getLogger(__name__)

SETTINGS_FILE = RLIFT_CONFIG_DIR / "settings.json"

OUTPUT_FORMATS = ("json", "yaml")


@dataclass
class Settings:
    """Defaults applied when a run does not override them."""

    default_degree: int = DEFAULT_DEGREE  # truncation N when -n is omitted
    cross_check_degree: int = MAX_CROSS_CHECK_DEGREE  # duality oracle cap at context build
    keep_audit: bool = True  # record per-degree defects and sections
    verify_steps: bool = True  # check extend postconditions at every degree
    output_format: str = "json"

    def __post_init__(self) -> None:
        self.default_degree = max(MIN_DEGREE, min(MAX_DEGREE, int(self.default_degree)))
        self.cross_check_degree = max(0, min(MAX_CROSS_CHECK_DEGREE, int(self.cross_check_degree)))
        self.keep_audit = bool(self.keep_audit)
        self.verify_steps = bool(self.verify_steps)
        if self.output_format not in OUTPUT_FORMATS:
            self.output_format = "json"

    def to_dict(self) -> dict[str, Any]:
        """Serialize settings to a JSON-ready dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Settings":
        """Build from a mapping; missing keys take their defaults and unknown keys are ignored."""
        return cls(**_known(data))


def _known(data: dict[str, Any]) -> dict[str, Any]:
    names = {f.name for f in fields(Settings)}
    return {key: value for key, value in data.items() if key in names}


def load_settings() -> Settings:
    """Read the settings file, or the defaults when it is missing or unreadable."""
    if not SETTINGS_FILE.exists():
        return Settings()

    try:
        data = json.loads(SETTINGS_FILE.read_text())
    except (OSError, json.JSONDecodeError) as e:
        logger.warning(f"Ignoring settings file {SETTINGS_FILE}: {e}")
        return Settings()
    if not isinstance(data, dict):
        logger.warning(f"Ignoring settings file {SETTINGS_FILE}: expected a JSON object")
        return Settings()

    try:
        return Settings.from_dict(data)
    except (TypeError, ValueError) as e:
        logger.warning(f"Ignoring settings file {SETTINGS_FILE}: {e}")
        return Settings()


def save_settings(settings: Settings) -> None:
    """Write the settings file through a temporary sibling and rename it into place."""
    SETTINGS_FILE.parent.mkdir(parents=True, exist_ok=True)
    staging = SETTINGS_FILE.with_name(SETTINGS_FILE.name + ".partial")
    try:
        staging.write_text(json.dumps(settings.to_dict(), indent=2, sort_keys=True) + "\n")
        staging.replace(SETTINGS_FILE)
    except OSError:
        staging.unlink(missing_ok=True)
        raise
    logger.debug(f"Saved settings to {SETTINGS_FILE}")


_settings: Settings | None = None


def get_settings() -> Settings:
    """Process-wide settings, loaded on first use."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def update_settings(**changes: Any) -> Settings:
    """Apply known keys, clamp, and persist. Unknown keys are dropped."""
    merged = {**get_settings().to_dict(), **_known(changes)}
    return _install(Settings(**merged))


def reset_settings() -> Settings:
    """Restore defaults and persist them."""
    return _install(Settings())


def reload_settings() -> Settings:
    """Drop the cached instance and read the settings file again."""
    global _settings
    _settings = load_settings()
    return _settings


def _install(settings: Settings) -> Settings:
    global _settings
    save_settings(settings)
    _settings = settings
    return settings
