"""
samplers/ensemble.py — Walker ensemble with cached log-likelihood / block log-density.

Walkers are stored row-wise in two arrays (scalars, coefs) so moves can update one
row in place. Caches must equal fresh recomputation after every move; check_caches()
asserts it and the tests call it after every iteration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.constants import InitMode, Stage
from core.errors import InitializationError, InvalidArgumentError
from prior.kl import CoefficientMask, sample_prior_coefficients
from samplers.config import SamplerConfig
from samplers.streams import StreamFactory
from target.problem import ParameterState, TargetProblem, block_terms

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class Ensemble:
    scalars: np.ndarray          # (L, scalar_dim)
    coefs: np.ndarray            # (L, n_coefs)
    loglik: np.ndarray           # (L,)  phi
    block_logdensity: np.ndarray  # (L,)  phi + scalar prior - 1/2 ||low||^2
    mask: CoefficientMask

    def __post_init__(self) -> None:
        L = self.scalars.shape[0]
        if L < 2:
            raise InvalidArgumentError(f"an ensemble needs at least 2 walkers, got {L}")
        if self.coefs.shape[0] != L or self.loglik.shape != (L,) or self.block_logdensity.shape != (L,):
            raise InvalidArgumentError("walker arrays disagree on L")
        if self.coefs.shape[1] != self.mask.total:
            raise InvalidArgumentError("mask does not cover the coefficient block")

    @property
    def size(self) -> int:
        return int(self.scalars.shape[0])

    @property
    def scalar_dim(self) -> int:
        return int(self.scalars.shape[1])

    @property
    def affine_dim(self) -> int:
        return self.scalar_dim + self.mask.M

    def walker(self, i: int) -> ParameterState:
        return ParameterState(scalars=self.scalars[i].copy(), coefs=self.coefs[i].copy())

    def affine(self, i: int) -> np.ndarray:
        """Scalars ⊕ low coefficients of walker i."""
        return np.concatenate([self.scalars[i], self.coefs[i, self.mask.low]])

    def set_affine(self, i: int, affine: np.ndarray) -> None:
        s = self.scalar_dim
        self.scalars[i] = affine[:s]
        self.coefs[i, self.mask.low] = affine[s:]

    def copy(self) -> "Ensemble":
        return Ensemble(
            scalars=self.scalars.copy(),
            coefs=self.coefs.copy(),
            loglik=self.loglik.copy(),
            block_logdensity=self.block_logdensity.copy(),
            mask=self.mask,
        )

    def check_caches(self, problem: TargetProblem, rtol: float = 1e-10) -> None:
        """AssertionError if any cached value disagrees with recomputation."""
        for i in range(self.size):
            phi, block = block_terms(problem, self.walker(i), self.mask)
            for cached, fresh, what in ((self.loglik[i], phi, "loglik"),
                                        (self.block_logdensity[i], block, "block log-density")):
                assert math.isclose(cached, fresh, rel_tol=rtol, abs_tol=rtol), (
                    f"walker {i}: cached {what} {cached} != recomputed {fresh}"
                )

    @classmethod
    def from_states(
        cls,
        problem: TargetProblem,
        states: list[ParameterState],
        mask: CoefficientMask,
    ) -> "Ensemble":
        """Build an ensemble and fill its caches. Non-finite entries or block log-density → InitializationError."""
        for state in states:
            problem.check_state(state)
        bad = [i for i, state in enumerate(states) if not state.is_finite()]
        if bad:
            raise InitializationError(f"walkers {bad} have non-finite entries")
        scalars = np.array([s.scalars for s in states], dtype=float).reshape(len(states), problem.scalar_dim)
        coefs = np.array([s.coefs for s in states], dtype=float).reshape(len(states), problem.n_coefs)
        terms = [block_terms(problem, s, mask) for s in states]
        loglik = np.array([t[0] for t in terms], dtype=float)
        block = np.array([t[1] for t in terms], dtype=float)
        bad = np.flatnonzero(~np.isfinite(block))
        if bad.size:
            raise InitializationError(
                f"walkers {bad.tolist()} start at non-finite log-density on '{problem.label}'"
            )
        return cls(scalars=scalars, coefs=coefs, loglik=loglik, block_logdensity=block, mask=mask)


def initialize_ensemble(
    problem: TargetProblem,
    mask: CoefficientMask,
    config: SamplerConfig,
    streams: StreamFactory,
) -> Ensemble:
    """
    "prior": every walker is an independent prior draw.
    "ball":  center + radius * N(0, I) on every coordinate; a short center is
             padded with zero coefficients.
    """
    states = []
    for i in range(config.L):
        rng = streams.stream(i, 0, Stage.INIT)
        if config.init == InitMode.PRIOR:
            scalars = problem.sample_scalars(rng)
            coefs = sample_prior_coefficients(problem.n_coefs, rng)
        else:
            center = np.zeros(problem.scalar_dim + problem.n_coefs)
            center[: len(config.center)] = config.center
            point = center + config.radius * rng.standard_normal(center.shape[0])
            scalars, coefs = point[: problem.scalar_dim], point[problem.scalar_dim:]
        states.append(ParameterState(scalars=scalars, coefs=coefs))

    ensemble = Ensemble.from_states(problem, states, mask)
    logger.debug(
        "Ensemble initialized",
        extra={"problem": problem.label, "init": config.init, "walkers": config.L, "M": mask.M},
    )
    return ensemble
