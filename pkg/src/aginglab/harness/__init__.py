"""Experiment harness: configs, runner, CSV emission, comparison, CLI."""

from .config import ConfigError, ExperimentConfig, load_config
from .csvio import HEADER, ResultRow, canonical_bytes, read_rows, write_rows
from .runner import run, run_to_rows

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "HEADER",
    "ResultRow",
    "canonical_bytes",
    "read_rows",
    "write_rows",
    "run",
    "run_to_rows",
]
