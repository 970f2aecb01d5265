"""
experiments/runner.py — run_experiment() and analyze(): the CLI's two workhorses.

A run directory holds:
    chain.tsv        observables per iteration and walker (experiments/chains.py)
    acceptance.tsv   accepted counts per stage and the omega used, per iteration
    summary.txt      IAT / N_eff / SE table after burn-in, acceptance rates, final omega
    data.tsv         the synthetic dataset the run was conditioned on
    adapt.tsv        hybrid only: walker-averaged running variances of the affine block
    paths.tsv        langevin only: pointwise mean and quantiles of X_t over post-burn-in walkers
    conditional_fields.tsv
                     advection only: exact rho0 draws given c, for each configured c
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from config import Config
from core.constants import ProblemName, Stage
from core.errors import ChainFileError, DegenerateSeriesError, InvalidArgumentError
from diagnostics.autocorr import autocorrelation
from diagnostics.record import ChainRecord
from diagnostics.summary import SummaryRow, count_modes, discard_burn_in, format_table, histogram, summarize
from experiments.chains import (
    ChainFile,
    load_center,
    read_chain_file,
    write_acceptance_log,
    write_acf,
    write_adapt_trace,
    write_chain_file,
    write_conditional_fields,
    write_histogram,
    write_path_quantiles,
)
from experiments.schema import TRUTH_CENTER, ExperimentConfig
from problems import Problem, conditional_field_samples, make_problem, path_quantiles, write_dataset
from problems.langevin import PATH_LEVELS
from samplers.config import SamplerConfig
from samplers.ensemble import Ensemble
from samplers.runner import run_sampler
from samplers.streams import StreamFactory
from target.problem import ParameterState

logger = logging.getLogger(__name__)

CHAIN_FILE = "chain.tsv"
ACCEPTANCE_FILE = "acceptance.tsv"
SUMMARY_FILE = "summary.txt"
DATA_FILE = "data.tsv"
ADAPT_FILE = "adapt.tsv"
PATHS_FILE = "paths.tsv"
CONDITIONAL_FILE = "conditional_fields.tsv"


class EnsembleSnapshots:
    """Run callback keeping every walker at up to `count` evenly spaced post-burn-in iterations."""

    def __init__(self, config: SamplerConfig, count: int) -> None:
        start = config.burn_in_iterations() + 1
        if count <= 0 or start > config.iterations:
            self.iterations: frozenset[int] = frozenset()
        else:
            picks = np.linspace(start, config.iterations, count)
            self.iterations = frozenset(int(t) for t in np.round(picks))
        self.states: list[ParameterState] = []

    def __call__(self, t: int, ensemble: Ensemble) -> None:
        if t in self.iterations:
            self.states.extend(ensemble.walker(i) for i in range(ensemble.size))


@dataclass
class RunResult:
    output_dir: Path
    record: ChainRecord
    rows: list[SummaryRow]

    @property
    def chain_path(self) -> Path:
        return self.output_dir / CHAIN_FILE


def build_problem(config: ExperimentConfig) -> Problem:
    return make_problem(config.problem, config.seed, config.grid_size, config.n_modes)


def resolve_center(config: ExperimentConfig, problem: Problem) -> Optional[tuple[float, ...]]:
    """center_file = 'truth' uses the problem's data-generating state."""
    if config.center_file is None:
        return None
    if config.center_file == TRUTH_CENTER:
        return tuple(np.concatenate([problem.truth.scalars, problem.truth.coefs]).tolist())
    return load_center(config.center_file)


def build_sampler_config(
    config: ExperimentConfig,
    problem: Problem,
    settings: Optional[Config] = None,
) -> SamplerConfig:
    settings = settings or Config()
    return config.sampler_config(
        center=resolve_center(config, problem),
        workers=settings.WORKERS,
        progress=settings.PROGRESS,
    )


def run_experiment(config: ExperimentConfig, settings: Optional[Config] = None) -> RunResult:
    """Run one experiment and write its output directory. Identical configs give identical files."""
    settings = settings or Config()
    out = config.output_dir(settings.OUTPUT_DIR)
    problem = build_problem(config)
    sampler_config = build_sampler_config(config, problem, settings)
    target = problem.target()

    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ChainFileError(f"could not create output directory: {e}", out) from e

    logger.info(
        "Experiment started",
        extra={"problem": config.problem, "sampler": config.sampler, "seed": config.seed, "path": str(out)},
    )
    write_dataset(problem, out / DATA_FILE)
    snapshots = EnsembleSnapshots(
        sampler_config, config.path_snapshots if config.problem == ProblemName.LANGEVIN else 0
    )
    record = run_sampler(target, sampler_config, list(config.tracked_names), callback=snapshots)

    # Header holds the settings that change the chain; side outputs and process settings stay out.
    header_config = config.model_dump(
        mode="json", exclude={"workers", "progress", "output", "path_snapshots", "conditional_c", "conditional_samples"},
    )
    header_config["n_coefs"] = target.n_coefs
    write_chain_file(out / CHAIN_FILE, record, header_config)
    write_acceptance_log(out / ACCEPTANCE_FILE, record)
    if record.adapt_trace is not None:
        write_adapt_trace(out / ADAPT_FILE, record)
    if snapshots.states:
        mean, quantiles = path_quantiles(problem, snapshots.states)
        write_path_quantiles(
            out / PATHS_FILE, problem.basis.grid, mean, quantiles, PATH_LEVELS, len(snapshots.states)
        )
    if config.conditional_speeds and config.conditional_samples > 0:
        streams = StreamFactory(config.seed)
        fields = {
            c: conditional_field_samples(problem, c, config.conditional_samples, streams.stream(0, k, Stage.POSTERIOR))
            for k, c in enumerate(config.conditional_speeds)
        }
        write_conditional_fields(out / CONDITIONAL_FILE, problem.basis.grid, fields)

    rows = summarize(record)
    table = format_table(rows, record.acceptance_rates(), record.omega)
    try:
        (out / SUMMARY_FILE).write_text(table, encoding="utf-8")
    except OSError as e:
        raise ChainFileError(f"could not write summary: {e}", out / SUMMARY_FILE) from e

    logger.info(
        "Experiment finished",
        extra={
            "problem": config.problem, "sampler": config.sampler, "seed": config.seed,
            "omega": record.omega, "acceptance": record.acceptance_rates(), "path": str(out),
        },
    )
    return RunResult(output_dir=out, record=record, rows=rows)


def analyze_file(
    chain: ChainFile,
    observables: Optional[Sequence[str]] = None,
    burn_in_fraction: Optional[float] = None,
) -> str:
    rows = summarize(chain, observables, burn_in_fraction)
    return format_table(rows, chain.acceptance, chain.omega)


def analyze(
    paths: Sequence[Path | str],
    observables: Optional[Sequence[str]] = None,
    burn_in_fraction: Optional[float] = None,
    histogram_name: Optional[str] = None,
    bins: int = 50,
    acf_max_lag: Optional[int] = None,
) -> str:
    """
    Diagnostics table for each chain file (after burn-in). With histogram_name, also
    writes <chain>.<name>.hist.tsv next to each file and reports its mode count.
    With acf_max_lag, writes <chain>.<name>.acf.tsv for every analysed observable;
    the lag is counted in recorded rows and capped at the kept length.
    """
    if acf_max_lag is not None and acf_max_lag < 0:
        raise InvalidArgumentError(f"ACF max lag must be nonnegative, got {acf_max_lag}")
    if not paths:
        raise InvalidArgumentError("analyze needs at least one chain file")
    sections = []
    for path in paths:
        chain = read_chain_file(path)
        text = f"== {chain.path}\n" + analyze_file(chain, observables, burn_in_fraction)
        fraction = chain.burn_in_fraction if burn_in_fraction is None else burn_in_fraction
        if histogram_name is not None:
            if histogram_name not in chain.observables:
                raise InvalidArgumentError(f"'{histogram_name}' is not a column of {chain.path}")
            counts, edges = histogram(discard_burn_in(chain.observables[histogram_name], fraction), bins)
            hist_path = write_histogram(
                chain.path.parent / f"{chain.path.stem}.{histogram_name}.hist.tsv", counts, edges
            )
            text += f"histogram[{histogram_name}] -> {hist_path} ({count_modes(counts)} modes)\n"
        if acf_max_lag is not None:
            for name in observables or list(chain.observables):
                if name not in chain.observables:
                    raise InvalidArgumentError(f"'{name}' is not a column of {chain.path}")
                kept = discard_burn_in(chain.observables[name], fraction)
                try:
                    rho = autocorrelation(kept, min(acf_max_lag, kept.shape[0] - 1))
                except DegenerateSeriesError as e:
                    text += f"acf[{name}] skipped: {e}\n"
                    continue
                acf_path = write_acf(chain.path.parent / f"{chain.path.stem}.{name}.acf.tsv", rho, chain.thin)
                text += f"acf[{name}] -> {acf_path}\n"
        sections.append(text)
    return "\n".join(sections)
