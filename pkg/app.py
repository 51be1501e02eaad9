import logging
import os
from dataclasses import dataclass, replace

from errors import ConfigError

OUTPUT_MODES = ("text", "machine")


@dataclass(frozen=True)
class Config:
    """Limits and output settings shared by the library and the command line"""
    max_table_size: int = 100000  # largest n for the oracle tables
    max_fractal_n: int = 2000  # largest n for fractal evaluation
    max_trace_nodes: int = 1_000_000  # node budget for materialized traces
    max_symbolic_cap: int = 120  # largest expansion bound for symbolic forms
    mining_scan_limit: int = 200  # largest n a mining run may scan to
    mining_workers: int = 4
    output_mode: str = "text"
    catalog_path: str = "catalog.jsonl"
    database_url: str | None = None  # SQLAlchemy URL for the catalog database
    log_level: str = "WARNING"

    def __post_init__(self):
        for name in ("max_table_size", "max_fractal_n", "max_trace_nodes",
                     "max_symbolic_cap", "mining_scan_limit", "mining_workers"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.output_mode not in OUTPUT_MODES:
            raise ConfigError(f"output mode must be one of {', '.join(OUTPUT_MODES)}, got {self.output_mode!r}")

    def with_overrides(self, **overrides):
        """Return a copy with the given non-None fields replaced"""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **changes) if changes else self


# Environment variable -> (config field, converter)
ENV_OVERRIDES = {
    "PARTITION_LAB_MAX_TABLE": ("max_table_size", int),
    "PARTITION_LAB_MAX_FRACTAL_N": ("max_fractal_n", int),
    "PARTITION_LAB_MAX_TRACE_NODES": ("max_trace_nodes", int),
    "PARTITION_LAB_MAX_SYMBOLIC_CAP": ("max_symbolic_cap", int),
    "PARTITION_LAB_SCAN_LIMIT": ("mining_scan_limit", int),
    "PARTITION_LAB_WORKERS": ("mining_workers", int),
    "PARTITION_LAB_OUTPUT": ("output_mode", str),
    "PARTITION_LAB_CATALOG": ("catalog_path", str),
    "DATABASE_URL": ("database_url", str),
    "PARTITION_LAB_LOG_LEVEL": ("log_level", str),
}


def load_config(environ=None, **overrides):
    """
    Build a Config from environment variables and explicit overrides

    Args:
        environ (Mapping): Environment to read, defaults to os.environ
        **overrides: Field values that take precedence over the environment

    Returns:
        Config: The resolved configuration
    """
    environ = os.environ if environ is None else environ
    values = {}
    for variable, (field_name, convert) in ENV_OVERRIDES.items():
        raw = environ.get(variable)
        if raw is None or raw == "":
            continue
        try:
            values[field_name] = convert(raw)
        except ValueError:
            raise ConfigError(f"{variable} must be {convert.__name__}, got {raw!r}")
    values.update({key: value for key, value in overrides.items() if value is not None})
    return Config(**values)


def configure_logging(level=None, verbosity=0):
    """Set up root logging the same way for every entry point"""
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    elif isinstance(level, str):
        level = getattr(logging, level.upper(), logging.WARNING)
    logging.basicConfig(level=level or logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level or logging.WARNING)


# Module-level configuration, read once at import
try:
    config = load_config()
except ConfigError as e:
    logging.error(f"Invalid environment configuration, using defaults: {str(e)}")
    config = Config()
