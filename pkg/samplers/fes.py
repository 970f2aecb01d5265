"""
samplers/fes.py — One iteration of each ensemble sampler.

  fes_iteration()        AIES sweep on the affine block, then PCN sweep on the rest
  fes_joint_iteration()  one combined stretch+PCN accept/reject per walker
  pcn_iteration()        PCN baseline, every walker independent

Each returns a dict stage -> (L,) bool flags. A stage with no proposals (empty affine
block, empty complement) is left out of the dict.

Walker i at iteration t in stage s draws only from streams.stream(i, t, s). With
config.parallel the stretch stages use the two-group scheme: the first ceil(L/2)
walkers move against the frozen second half, then the second half against the
updated first half. The sequential scheme updates walkers in index order and sees
every earlier update.
"""

from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np

from core.constants import Stage
from samplers.config import SamplerConfig
from samplers.ensemble import Ensemble
from samplers.moves import aies_block_update, joint_update, pcn_baseline_update, pcn_walker_update
from samplers.streams import StreamFactory
from target.problem import TargetProblem
from utils.pool import ordered_map

logger = logging.getLogger(__name__)

StageFlags = dict[str, np.ndarray]


def walker_halves(L: int) -> tuple[np.ndarray, np.ndarray]:
    """First ceil(L/2) walkers and the rest."""
    split = (L + 1) // 2
    return np.arange(split), np.arange(split, L)


def _stretch_sweep(
    ensemble: Ensemble,
    move: Callable[[int, Optional[np.ndarray]], bool],
    parallel: bool,
    workers: int,
) -> np.ndarray:
    L = ensemble.size
    flags = np.zeros(L, dtype=bool)
    if not parallel:
        for i in range(L):
            flags[i] = move(i, None)
        return flags
    first, second = walker_halves(L)
    for group, other in ((first, second), (second, first)):
        flags[group] = ordered_map(lambda i: move(int(i), other), group, workers)
    return flags


def aies_sweep(
    ensemble: Ensemble,
    problem: TargetProblem,
    a: float,
    streams: StreamFactory,
    iteration: int,
    parallel: bool = False,
    workers: int = 1,
) -> Optional[np.ndarray]:
    """Stretch moves on the affine block for every walker. None when the block is empty."""
    if ensemble.affine_dim == 0:
        return None

    def move(i: int, companions: Optional[np.ndarray]) -> bool:
        rng = streams.stream(i, iteration, Stage.AIES)
        return aies_block_update(ensemble, i, problem, a, rng, companions)[1]

    return _stretch_sweep(ensemble, move, parallel, workers)


def pcn_sweep(
    ensemble: Ensemble,
    problem: TargetProblem,
    omega: float,
    streams: StreamFactory,
    iteration: int,
    workers: int = 1,
) -> Optional[np.ndarray]:
    """PCN on the complement for every walker. Walkers are independent, so order is free."""
    if ensemble.mask.n_high == 0:
        return None

    def move(i: int) -> bool:
        return pcn_walker_update(ensemble, i, problem, omega, streams.stream(i, iteration, Stage.PCN))

    return np.array(ordered_map(move, range(ensemble.size), workers), dtype=bool)


def fes_iteration(
    ensemble: Ensemble,
    problem: TargetProblem,
    config: SamplerConfig,
    streams: StreamFactory,
    iteration: int,
    omega: Optional[float] = None,
) -> StageFlags:
    omega = config.omega if omega is None else omega
    workers = config.workers if config.parallel else 1
    flags: StageFlags = {}
    aies = aies_sweep(ensemble, problem, config.a, streams, iteration, config.parallel, workers)
    if aies is not None:
        flags[Stage.AIES] = aies
    pcn = pcn_sweep(ensemble, problem, omega, streams, iteration, workers)
    if pcn is not None:
        flags[Stage.PCN] = pcn
    return flags


def fes_joint_iteration(
    ensemble: Ensemble,
    problem: TargetProblem,
    config: SamplerConfig,
    streams: StreamFactory,
    iteration: int,
    omega: Optional[float] = None,
) -> StageFlags:
    omega = config.omega if omega is None else omega
    workers = config.workers if config.parallel else 1

    def move(i: int, companions: Optional[np.ndarray]) -> bool:
        rng = streams.stream(i, iteration, Stage.JOINT)
        return joint_update(ensemble, i, problem, config.a, omega, rng, companions)

    return {Stage.JOINT: _stretch_sweep(ensemble, move, config.parallel, workers)}


def pcn_iteration(
    ensemble: Ensemble,
    problem: TargetProblem,
    config: SamplerConfig,
    streams: StreamFactory,
    iteration: int,
    omega: Optional[float] = None,
) -> StageFlags:
    omega = config.omega if omega is None else omega
    workers = config.workers if config.parallel else 1

    def move(i: int) -> bool:
        rng = streams.stream(i, iteration, Stage.PCN)
        return pcn_baseline_update(ensemble, i, problem, omega, config.scalar_step, rng)

    return {Stage.PCN: np.array(ordered_map(move, range(ensemble.size), workers), dtype=bool)}
