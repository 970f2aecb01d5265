"""
samplers/hybrid.py — Adaptive hybrid baseline: random-walk Metropolis on the affine
block with a learned proposal covariance, PCN on the complement.

Every walker is an independent chain with its own AdaptState. Per iteration and walker:
  1. Gaussian random walk on scalars ⊕ low coefs, covariance
       (initial_scale^2 / d) I                  while count < warmup
       (2.38^2 / d) Σ̂ + ridge I                 afterwards
  2. PCN on the high coefs (same rule as FES)
  3. running mean / covariance of the affine block updated with the new state

Draw order within the walker's stream: eps (d), u, xi (n_high), u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from core.constants import Stage
from core.errors import InvalidArgumentError
from prior.kl import CoefficientMask
from samplers.ensemble import Ensemble
from samplers.moves import metropolis_accept, pcn_complement_update
from samplers.streams import StreamFactory
from target.problem import ParameterState, TargetProblem, block_terms, merge_state, split_state
from utils.pool import ordered_map

OPTIMAL_SCALE = 2.38


@dataclass
class AdaptState:
    """Welford running mean / covariance of the affine block."""
    dim: int
    initial_scale: float = 0.1
    warmup: int = 1000
    ridge: float = 1e-8
    count: int = 0
    mean: np.ndarray = field(default=None)  # type: ignore[assignment]
    m2: np.ndarray = field(default=None)    # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise InvalidArgumentError("dim must be nonnegative")
        if self.mean is None:
            self.mean = np.zeros(self.dim)
        if self.m2 is None:
            self.m2 = np.zeros((self.dim, self.dim))

    def update(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        self.count += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.count
        self.m2 = self.m2 + np.outer(delta, x - self.mean)

    @property
    def covariance(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros((self.dim, self.dim))
        return self.m2 / (self.count - 1)

    @property
    def adapted(self) -> bool:
        return self.count >= self.warmup

    def proposal_covariance(self) -> np.ndarray:
        d = self.dim
        if not self.adapted:
            return (self.initial_scale**2 / d) * np.eye(d)
        return (OPTIMAL_SCALE**2 / d) * self.covariance + self.ridge * np.eye(d)


class HybridStep(NamedTuple):
    state: ParameterState
    rw_accepted: bool
    pcn_accepted: bool
    loglik: float
    block_logdensity: float


def hybrid_iteration(
    state: ParameterState,
    problem: TargetProblem,
    mask: CoefficientMask,
    adapt: AdaptState,
    rng: np.random.Generator,
    omega: float,
    current: Optional[tuple[float, float]] = None,
) -> HybridStep:
    """One hybrid step for a single chain. adapt is updated in place."""
    phi, block = current if current is not None else block_terms(problem, state, mask)
    rw_accepted = False

    if adapt.dim > 0:
        eps = rng.standard_normal(adapt.dim)
        u = float(rng.random())
        affine, complement = split_state(state, mask)
        chol = np.linalg.cholesky(adapt.proposal_covariance())
        proposal = merge_state(affine + chol @ eps, complement, problem.scalar_dim)
        phi_new, block_new = block_terms(problem, proposal, mask)
        log_ratio = block_new - block if block_new != -math.inf else -math.inf
        if metropolis_accept(log_ratio, u):
            state, phi, block, rw_accepted = proposal, phi_new, block_new, True

    pcn_accepted = False
    if mask.n_high > 0:
        result = pcn_complement_update(state, problem, mask, omega, rng, current=(phi, block))
        state, pcn_accepted, phi, block = result.state, result.accepted, result.loglik, result.block_logdensity

    adapt.update(split_state(state, mask)[0])
    return HybridStep(state, rw_accepted, pcn_accepted, phi, block)


def hybrid_sweep(
    ensemble: Ensemble,
    problem: TargetProblem,
    adapt_states: list[AdaptState],
    omega: float,
    streams: StreamFactory,
    iteration: int,
    workers: int = 1,
) -> dict[str, np.ndarray]:
    """Advance every chain by one hybrid step. Each walker reads stream(i, iteration, "rw")."""

    def move(i: int) -> tuple[bool, bool]:
        step = hybrid_iteration(
            ensemble.walker(i), problem, ensemble.mask, adapt_states[i],
            streams.stream(i, iteration, Stage.RW), omega,
            current=(ensemble.loglik[i], ensemble.block_logdensity[i]),
        )
        ensemble.scalars[i] = step.state.scalars
        ensemble.coefs[i] = step.state.coefs
        ensemble.loglik[i] = step.loglik
        ensemble.block_logdensity[i] = step.block_logdensity
        return step.rw_accepted, step.pcn_accepted

    results = ordered_map(move, range(ensemble.size), workers)
    flags: dict[str, np.ndarray] = {}
    if ensemble.affine_dim > 0:
        flags[Stage.RW] = np.array([r[0] for r in results], dtype=bool)
    if ensemble.mask.n_high > 0:
        flags[Stage.PCN] = np.array([r[1] for r in results], dtype=bool)
    return flags
