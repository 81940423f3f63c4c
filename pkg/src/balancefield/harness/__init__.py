"""Experiment configuration, file formats, reproduction runs and the command line."""

from .config import ConfigError, ExperimentConfig, build_config, load_config, parse_config_text
from .experiments import ExperimentResult, Verdict, run_experiment
from .io import MetricsRow, read_metrics_csv, read_snapshot, write_metrics_csv, write_snapshot

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "MetricsRow",
    "Verdict",
    "build_config",
    "load_config",
    "parse_config_text",
    "read_metrics_csv",
    "read_snapshot",
    "run_experiment",
    "write_metrics_csv",
    "write_snapshot",
]
