"""
samplers/runner.py — run_sampler(): initialize, iterate, tune, record.

Iteration t (1-based) of walker i in stage s draws only from stream(i, t, s);
initialization uses stream(i, 0, "init"). Identical config + seed therefore give
bit-identical records whatever the worker count.

omega autotuning runs on batches of config.tune_batch iterations, during burn-in only,
driven by the acceptance of the sampler's tuned stage (TUNED_STAGE). The omega
actually used at each iteration is recorded.
"""

from __future__ import annotations

import logging
import time
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np
from tqdm import tqdm

from core.constants import TUNED_STAGE, SamplerName
from diagnostics.record import ChainRecord
from samplers.config import SamplerConfig
from samplers.ensemble import Ensemble, initialize_ensemble
from samplers.fes import fes_iteration, fes_joint_iteration, pcn_iteration
from samplers.hybrid import AdaptState, hybrid_sweep
from samplers.streams import StreamFactory
from samplers.tuning import autotune_omega
from target.problem import Observable, TargetProblem, resolve_observable

logger = logging.getLogger(__name__)

IterationCallback = Callable[[int, Ensemble], None]


def _resolve(
    problem: TargetProblem,
    observables: Union[Mapping[str, Observable], Sequence[str]],
) -> dict[str, Observable]:
    if isinstance(observables, Mapping):
        return dict(observables)
    return {name: resolve_observable(problem, name) for name in observables}


def _step_fn(
    problem: TargetProblem,
    config: SamplerConfig,
    ensemble: Ensemble,
    streams: StreamFactory,
    adapt_states: list[AdaptState],
):
    if config.kind == SamplerName.FES:
        return lambda t, omega: fes_iteration(ensemble, problem, config, streams, t, omega)
    if config.kind == SamplerName.FES_JOINT:
        return lambda t, omega: fes_joint_iteration(ensemble, problem, config, streams, t, omega)
    if config.kind == SamplerName.PCN:
        return lambda t, omega: pcn_iteration(ensemble, problem, config, streams, t, omega)
    workers = config.workers if config.parallel else 1
    return lambda t, omega: hybrid_sweep(ensemble, problem, adapt_states, omega, streams, t, workers)


def run_sampler(
    problem: TargetProblem,
    config: SamplerConfig,
    observables: Union[Mapping[str, Observable], Sequence[str]],
    streams: Optional[StreamFactory] = None,
    callback: Optional[IterationCallback] = None,
) -> ChainRecord:
    """
    Run config.iterations iterations of config.kind on problem.

    observables: names resolvable on the problem, or a name -> function mapping.
    callback(t, ensemble) runs after every iteration (t = 0 after initialization).
    Raises InvalidArgumentError for config/problem mismatches, InitializationError
    when a walker starts at non-finite log-density.
    """
    config.check_against(problem.scalar_dim, problem.n_coefs)
    tracked = _resolve(problem, observables)
    streams = streams if streams is not None else StreamFactory(config.seed)
    mask = problem.mask(config.effective_M)

    ensemble = initialize_ensemble(problem, mask, config, streams)
    adapt_states: list[AdaptState] = []
    if config.kind == SamplerName.HYBRID:
        adapt_states = [
            AdaptState(
                dim=ensemble.affine_dim,
                initial_scale=config.hybrid_initial_scale,
                warmup=config.hybrid_warmup,
            )
            for _ in range(ensemble.size)
        ]
    step = _step_fn(problem, config, ensemble, streams, adapt_states)

    n, L, thin = config.iterations, config.L, config.thin
    rows = n // thin + 1
    series = {name: np.empty((rows, L)) for name in tracked}
    accepted: dict[str, np.ndarray] = {}
    omega_history = np.empty(n)
    adapt_trace = np.empty((rows, ensemble.affine_dim)) if adapt_states else None

    def record_row(t: int) -> None:
        if t % thin:
            return
        row = t // thin
        for i in range(L):
            walker = ensemble.walker(i)
            for name, fn in tracked.items():
                series[name][row, i] = fn(walker)
        if adapt_trace is not None:
            adapt_trace[row] = np.mean([np.diag(a.covariance) for a in adapt_states], axis=0)

    record_row(0)
    if callback is not None:
        callback(0, ensemble)

    omega = config.omega
    tuned_stage = TUNED_STAGE[config.kind]
    burn_in = config.burn_in_iterations()
    batch: list[np.ndarray] = []

    logger.info(
        "Sampler started",
        extra={
            "problem": problem.label, "sampler": config.kind, "seed": config.seed,
            "walkers": L, "M": mask.M, "iterations": n, "omega": omega,
        },
    )
    started = time.monotonic()

    for t in tqdm(range(1, n + 1), desc=f"{config.kind}:{problem.label}", disable=not config.progress):
        flags = step(t, omega)
        omega_history[t - 1] = omega
        for stage, stage_flags in flags.items():
            if stage not in accepted:
                accepted[stage] = np.zeros(n, dtype=np.int64)
            accepted[stage][t - 1] = int(stage_flags.sum())
        record_row(t)
        if callback is not None:
            callback(t, ensemble)

        if config.autotune and t <= burn_in and tuned_stage in flags:
            batch.append(flags[tuned_stage])
            if len(batch) == config.tune_batch:
                omega = autotune_omega(np.stack(batch), omega, config.target_rate)
                batch = []
                logger.debug("omega tuned", extra={"iteration": t, "omega": omega})

    record = ChainRecord(
        observables=series,
        accepted=accepted,
        omega_history=omega_history,
        walkers=L,
        burn_in_fraction=config.burn_in_fraction,
        meta={"problem": problem.label, **config.model_dump()},
        thin=thin,
        adapt_trace=adapt_trace,
        adapt_names=problem.affine_names(mask) if adapt_trace is not None else (),
    )
    logger.info(
        "Sampler finished",
        extra={
            "problem": problem.label, "sampler": config.kind, "seed": config.seed,
            "omega": record.omega, "acceptance": record.acceptance_rates(),
            "elapsed_s": round(time.monotonic() - started, 2),
        },
    )
    return record
