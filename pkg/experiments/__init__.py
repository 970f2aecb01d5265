from experiments.chains import (
    ChainFile,
    chain_digest,
    read_chain_file,
    write_acceptance_log,
    write_chain_file,
    write_histogram,
)
from experiments.config_file import describe_config, parse_config
from experiments.runner import RunResult, analyze, run_experiment
from experiments.schema import ExperimentConfig

__all__ = [
    "ChainFile",
    "ExperimentConfig",
    "RunResult",
    "analyze",
    "chain_digest",
    "describe_config",
    "parse_config",
    "read_chain_file",
    "run_experiment",
    "write_acceptance_log",
    "write_chain_file",
    "write_histogram",
]
