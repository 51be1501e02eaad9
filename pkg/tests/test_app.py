import logging

import pytest

from app import Config, configure_logging, load_config
from errors import ConfigError, UsageError


def test_defaults():
    cfg = load_config(environ={})
    assert cfg == Config()
    assert cfg.output_mode == "text"
    assert cfg.catalog_path == "catalog.jsonl"


def test_environment_overrides():
    cfg = load_config(environ={"PARTITION_LAB_MAX_TABLE": "50", "PARTITION_LAB_OUTPUT": "machine",
                               "DATABASE_URL": "sqlite://", "PARTITION_LAB_WORKERS": ""})
    assert cfg.max_table_size == 50
    assert cfg.output_mode == "machine"
    assert cfg.database_url == "sqlite://"
    assert cfg.mining_workers == 4


def test_explicit_overrides_win():
    cfg = load_config(environ={"PARTITION_LAB_OUTPUT": "machine"}, output_mode="text", catalog_path=None)
    assert cfg.output_mode == "text"
    assert cfg.catalog_path == "catalog.jsonl"
    assert cfg.with_overrides(max_fractal_n=10).max_fractal_n == 10


@pytest.mark.parametrize("environ", [
    {"PARTITION_LAB_MAX_TABLE": "many"},
    {"PARTITION_LAB_MAX_TABLE": "0"},
    {"PARTITION_LAB_OUTPUT": "xml"},
])
def test_invalid_configuration(environ):
    with pytest.raises(ConfigError):
        load_config(environ=environ)


def test_config_error_is_a_usage_error():
    assert issubclass(ConfigError, UsageError)
    assert ConfigError.exit_code == 2


def test_verbosity_levels():
    configure_logging("WARNING", verbosity=2)
    assert logging.getLogger().level == logging.DEBUG
    configure_logging("ERROR")
    assert logging.getLogger().level == logging.ERROR
    configure_logging("WARNING")
