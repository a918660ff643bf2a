"""Experiment configs and opponent specs; training runs live in :mod:`mars_rl.harness.runner`."""

from .config import (ConfigFileError, ExperimentConfig, ablation_variants, dump_config, load_config,
                     parse_config)
from .specs import OpponentSpecError, make_opponent

__all__ = [
    "ConfigFileError",
    "ExperimentConfig",
    "OpponentSpecError",
    "ablation_variants",
    "dump_config",
    "load_config",
    "make_opponent",
    "parse_config",
]
