"""Config file parsing: defaults, overrides, units, strict validation."""

import pytest

from s2s_sim.config import ConfigError, default_config, load_config, parse_config_text
from s2s_sim.stochastic import DistKind


def test_empty_file_yields_full_defaults(tmp_path):
    path = tmp_path / "empty.conf"
    path.write_text("")
    config = load_config(path)
    assert config == default_config()
    assert config.num_satellites == 3
    assert config.num_ground_stations == 5
    assert config.batch_size_mean == 20.0
    assert config.batch_size_std == 5.0
    assert config.request_interval_s == 1800.0
    assert config.time_to_picture.mean == 240.0
    assert config.time_to_picture.kind is DistKind.EXPONENTIAL
    assert config.gs_link.mean == 180.0
    assert config.gs_processing.mean == 3.0
    assert config.data_transfer_to_sat.std == 6.0
    assert config.downlink_to_shooter.std == 0.6
    assert config.onboard_processing.mean == 6.0


def test_single_override_keeps_other_defaults():
    config = parse_config_text("num_sats = 6\n")
    assert config.num_satellites == 6
    assert config.num_ground_stations == 5
    assert config.batch_size_mean == 20.0


def test_minute_keys_convert_to_seconds():
    config = parse_config_text(
        "img_request_interval_min = 1\nsat_time_to_picture_min = 2\ntime_to_ground_station_link_min = 0.5\n"
    )
    assert config.request_interval_s == 60.0
    assert config.time_to_picture.mean == 120.0
    assert config.gs_link.mean == 30.0


def test_comments_and_blank_lines_are_ignored():
    text = """
# full-line comment
num_sats = 4   # trailing comment

mean_num_images = 12
"""
    config = parse_config_text(text)
    assert config.num_satellites == 4
    assert config.batch_size_mean == 12.0


def test_unknown_key_rejected_with_line_number():
    with pytest.raises(ConfigError, match=r"line 2.*num_stas"):
        parse_config_text("num_sats = 3\nnum_stas = 4\n")


def test_negative_count_rejected_naming_key_and_constraint():
    with pytest.raises(ConfigError, match=r"num_sats must be >= 1"):
        parse_config_text("num_sats = -1\n")


def test_negative_duration_rejected():
    with pytest.raises(ConfigError, match=r"std_num_images must be >= 0"):
        parse_config_text("std_num_images = -2\n")


def test_exponential_stage_means_must_be_positive():
    with pytest.raises(ConfigError, match=r"sat_time_to_picture_min must be > 0"):
        parse_config_text("sat_time_to_picture_min = 0\n")


def test_malformed_line_rejected_with_line_number():
    with pytest.raises(ConfigError, match=r"line 1.*key = value"):
        parse_config_text("this is not a config line\n")


def test_non_numeric_value_rejected():
    with pytest.raises(ConfigError, match=r"mean_num_images must be a number"):
        parse_config_text("mean_num_images = lots\n")


def test_integer_keys_reject_fractions():
    with pytest.raises(ConfigError, match=r"num_sats must be an integer"):
        parse_config_text("num_sats = 2.5\n")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match=r"duplicate key"):
        parse_config_text("num_sats = 3\nnum_sats = 4\n")


def test_zero_std_is_allowed():
    config = parse_config_text("std_num_images = 0\nstd_data_transfer_to_sat_s = 0\n")
    assert config.batch_size_std == 0.0
    assert config.data_transfer_to_sat.std == 0.0


def test_missing_file_is_a_distinct_error(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "nope.conf")
