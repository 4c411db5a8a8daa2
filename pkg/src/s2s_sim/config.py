"""Flat key=value scenario configuration files.

Every key is optional and defaults to the base-case value; unknown keys
are rejected so typos cannot silently fall back to defaults. Units are
fixed by the key suffix (``_min`` minutes, ``_s`` seconds) and converted
to seconds internally.
"""

from __future__ import annotations

from pathlib import Path

from .pipeline import ConstellationConfig
from .stochastic import DistributionSpec

__all__ = ["CONFIG_KEYS", "ConfigError", "default_config", "load_config", "parse_config_text"]


class ConfigError(Exception):
    """Malformed or invalid configuration content (file was readable)."""


# key -> (default value, integer-valued?, lower bound, strict bound?)
CONFIG_KEYS: dict[str, tuple[float, bool, float, bool]] = {
    "img_request_interval_min": (30.0, False, 0.0, True),
    "mean_num_images": (20.0, False, 0.0, False),
    "std_num_images": (5.0, False, 0.0, False),
    "mean_data_transfer_to_sat_s": (30.0, False, 0.0, False),
    "std_data_transfer_to_sat_s": (6.0, False, 0.0, False),
    "mean_downlink_to_shooter_s": (6.0, False, 0.0, False),
    "std_downlink_to_shooter_s": (0.6, False, 0.0, False),
    "num_sats": (3.0, True, 1.0, False),
    "sat_time_to_picture_min": (4.0, False, 0.0, True),
    "num_ground_stations": (5.0, True, 1.0, False),
    "time_to_ground_station_link_min": (3.0, False, 0.0, True),
    "ground_station_processing_s": (3.0, False, 0.0, False),
    "onboard_sat_to_shooter_s": (6.0, False, 0.0, False),
    "onboard_sat_processing_s": (6.0, False, 0.0, False),
    "onboard_sat_sr_s": (6.0, False, 0.0, False),
}


def default_config() -> ConstellationConfig:
    """The base-case configuration (all defaults)."""
    return ConstellationConfig()


def parse_config_text(text: str, source: str = "<config>") -> ConstellationConfig:
    """Parse ``key = value`` lines into a ConstellationConfig."""
    values: dict[str, float] = {}
    seen_lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}, line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}, line {lineno}: unknown key {key!r}")
        if key in seen_lines:
            raise ConfigError(
                f"{source}, line {lineno}: duplicate key {key!r} (first set on line {seen_lines[key]})"
            )
        seen_lines[key] = lineno
        _, integer, lower, strict = CONFIG_KEYS[key]
        try:
            value = int(value_text) if integer else float(value_text)
        except ValueError:
            kind = "an integer" if integer else "a number"
            raise ConfigError(
                f"{source}, line {lineno}: {key} must be {kind}, got {value_text!r}"
            ) from None
        if value < lower or (strict and value <= lower):
            op = ">" if strict else ">="
            raise ConfigError(f"{source}, line {lineno}: {key} must be {op} {lower:g}, got {value:g}")
        values[key] = value

    def get(key: str) -> float:
        return values.get(key, CONFIG_KEYS[key][0])

    return ConstellationConfig(
        num_satellites=int(get("num_sats")),
        num_ground_stations=int(get("num_ground_stations")),
        request_interval_s=get("img_request_interval_min") * 60.0,
        batch_size_mean=get("mean_num_images"),
        batch_size_std=get("std_num_images"),
        data_transfer_to_sat=DistributionSpec.normal_truncated(
            get("mean_data_transfer_to_sat_s"), get("std_data_transfer_to_sat_s")
        ),
        time_to_picture=DistributionSpec.exponential(get("sat_time_to_picture_min") * 60.0),
        gs_link=DistributionSpec.exponential(get("time_to_ground_station_link_min") * 60.0),
        gs_processing=DistributionSpec.deterministic(get("ground_station_processing_s")),
        downlink_to_shooter=DistributionSpec.normal_truncated(
            get("mean_downlink_to_shooter_s"), get("std_downlink_to_shooter_s")
        ),
        onboard_to_shooter=DistributionSpec.deterministic(get("onboard_sat_to_shooter_s")),
        onboard_processing=DistributionSpec.deterministic(get("onboard_sat_processing_s")),
        onboard_sr=DistributionSpec.deterministic(get("onboard_sat_sr_s")),
    )


def load_config(path: str | Path) -> ConstellationConfig:
    """Load a configuration file; a missing file raises FileNotFoundError."""
    path = Path(path)
    text = path.read_text()
    return parse_config_text(text, source=str(path))
