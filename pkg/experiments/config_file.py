"""
experiments/config_file.py — Read and describe experiment files.

An experiment file is dotenv-style key=value text:

    # advection, FES with 10 low modes
    problem=advection
    sampler=fes
    M=10
    L=20
    iterations=50000
    tracked=c,eta_1,eta_10

Comments (#) and blank lines are ignored. Keys match ExperimentConfig field names.
"""

from __future__ import annotations

import logging
from pathlib import Path

from dotenv import dotenv_values

from core.errors import ConfigurationError
from experiments.schema import ExperimentConfig

logger = logging.getLogger(__name__)


def parse_config(path: Path | str) -> ExperimentConfig:
    """Parse + validate an experiment file. Raises ConfigurationError."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"experiment file not found: {path}")
    values = dotenv_values(path, interpolate=False)
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise ConfigurationError("key without a value", field=missing[0])
    config = ExperimentConfig.from_mapping(values)
    logger.debug("Experiment file parsed", extra={"path": str(path), "keys": sorted(values)})
    return config


def describe_config(config: ExperimentConfig) -> str:
    """Resolved configuration as key=value lines, defaults included, in field order."""
    lines = []
    for name, value in config.model_dump().items():
        if name == "tracked":
            value = ",".join(config.tracked_names)
        elif name == "conditional_c":
            value = ",".join(str(c) for c in config.conditional_speeds)
        elif isinstance(value, bool):
            value = str(value).lower()
        elif value is None:
            value = ""
        lines.append(f"{name}={value}")
    return "\n".join(lines) + "\n"
