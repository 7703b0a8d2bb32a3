"""Tests for the bergman-defaults.yaml loader."""

from unittest import mock

import pytest

from bergman_probe import defaults
from bergman_probe.defaults import load_defaults


def test_load_defaults_returns_dict_with_expected_top_level_keys():
    d = load_defaults()
    expected = {"geometry", "quadrature", "numeric", "harness", "cli"}
    assert expected.issubset(d.keys())


def test_degree_caps_cover_supported_dimensions():
    assert defaults.degree_cap(1) == 30
    assert defaults.degree_cap(2) == 14
    assert defaults.degree_cap(3) == 8


def test_degree_cap_unknown_dimension_raises():
    with pytest.raises(KeyError, match="no degree cap"):
        defaults.degree_cap(4)


def test_cli_seed_is_fixed():
    assert defaults.cli("seed") == 42


def test_harness_thresholds_match_classification_rule():
    assert defaults.harness("blowup_slope") == -0.5
    assert defaults.harness("fit_residual") == 0.1
    assert defaults.harness("bounded_slope") == 0.1
    assert defaults.harness("bounded_ratio") == 1.5
    assert defaults.harness("fit_window") == 8


def test_unknown_key_names_known_keys():
    with pytest.raises(KeyError, match="unknown numeric key.*kernel_rtol"):
        defaults.numeric("no-such-key")


def test_load_defaults_raises_on_empty_file(tmp_path):
    """An empty defaults file would silently surface as TypeError downstream."""
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    with mock.patch.object(defaults, "_DEFAULTS_PATH", str(empty)):
        with pytest.raises(ValueError, match="expected a YAML mapping"):
            load_defaults()


def test_load_defaults_raises_on_non_mapping_yaml(tmp_path):
    """A scalar or list at the top level is not a usable defaults file."""
    bad = tmp_path / "bad.yaml"
    bad.write_text("- one\n- two\n")
    with mock.patch.object(defaults, "_DEFAULTS_PATH", str(bad)):
        with pytest.raises(ValueError, match="expected a YAML mapping"):
            load_defaults()


def test_settings_is_cached_until_cleared(tmp_path):
    custom = tmp_path / "custom.yaml"
    custom.write_text("cli:\n  seed: 7\n")
    defaults.settings.cache_clear()
    try:
        with mock.patch.object(defaults, "_DEFAULTS_PATH", str(custom)):
            defaults.settings.cache_clear()
            assert defaults.cli("seed") == 7
        assert defaults.cli("seed") == 7
    finally:
        defaults.settings.cache_clear()
    assert defaults.cli("seed") == 42
