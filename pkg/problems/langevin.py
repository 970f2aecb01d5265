"""
problems/langevin.py — Path reconstruction for the Langevin equation

    dX = P dt,   dP = -alpha X dt + sigma dW,   X_0 = P_0 = 0   on [0, 10]

Unknowns: (log alpha, log sigma) with alpha ~ Exp(12), sigma ~ Exp(4), and the driving
Brownian path W (analytic Brownian-motion KL basis). Data: sin(4t) + N(0, 0.09) at
t = 1, 3, 5, 7, 9, all of them grid nodes.

Euler steps X_{k+1} = X_k + P_k dt, P_{k+1} = P_k - alpha X_k dt + sigma dW_k collapse to
the second-order recurrence
    X_{k+2} = 2 X_{k+1} - (1 + alpha dt^2) X_k + sigma dt dW_k
which is run as an IIR filter.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.signal import lfilter, lfiltic

from core.constants import ProblemName, Stage
from core.errors import InvalidArgumentError
from prior.kl import KLBasis, bm_kl_basis, grid_values, sample_prior_coefficients
from samplers.streams import StreamFactory
from target.problem import ParameterState, TargetProblem, gaussian_log_likelihood

logger = logging.getLogger(__name__)

HORIZON = 10.0
DEFAULT_GRID = 201          # 200 Euler steps, dt = 0.05
DEFAULT_MODES = 200
OBS_TIMES = (1.0, 3.0, 5.0, 7.0, 9.0)
NOISE_VAR = 0.09
ALPHA_RATE = 12.0
SIGMA_RATE = 4.0
SIGNAL_FREQUENCY = 4.0
PATH_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)


def langevin_forward(
    alpha: float,
    sigma: float,
    bm_coefs: np.ndarray,
    basis: KLBasis,
    x0: float = 0.0,
    p0: float = 0.0,
) -> np.ndarray:
    """Euler position path on the basis grid (uniform spacing assumed)."""
    if alpha < 0 or sigma < 0:
        raise InvalidArgumentError(f"alpha and sigma must be nonnegative, got {alpha}, {sigma}")
    n = basis.n_grid
    dt = float(basis.grid[1] - basis.grid[0])
    x = np.empty(n)
    x[0] = x0
    if n == 1:
        return x
    x[1] = x0 + p0 * dt
    if n == 2:
        return x

    dW = np.diff(grid_values(basis, bm_coefs))[: n - 2]
    b = [sigma * dt]
    a = [1.0, -2.0, 1.0 + alpha * dt * dt]
    zi = lfiltic(b, a, y=[x[1], x[0]])
    x[2:], _ = lfilter(b, a, dW, zi=zi)
    return x


def exponential_log_prior(log_value: float, rate: float) -> float:
    """Log density of log(V) when V ~ Exp(rate): log rate + l - rate e^l."""
    return math.log(rate) + log_value - rate * math.exp(log_value)


def langevin_log_prior(scalars: np.ndarray) -> float:
    log_alpha, log_sigma = float(scalars[0]), float(scalars[1])
    if log_alpha > 700 or log_sigma > 700:
        return -math.inf
    return exponential_log_prior(log_alpha, ALPHA_RATE) + exponential_log_prior(log_sigma, SIGMA_RATE)


def _sample_log_scalars(rng: np.random.Generator) -> np.ndarray:
    return np.log([rng.exponential(1.0 / ALPHA_RATE), rng.exponential(1.0 / SIGMA_RATE)])


def observation_indices(basis: KLBasis, times=OBS_TIMES) -> np.ndarray:
    dt = float(basis.grid[1] - basis.grid[0])
    idx = np.rint(np.asarray(times, dtype=float) / dt).astype(int)
    if np.any(idx < 0) or np.any(idx >= basis.n_grid):
        raise InvalidArgumentError(f"observation times {list(times)} fall outside the grid")
    return idx


@dataclass(frozen=True, eq=False)
class LangevinProblem:
    basis: KLBasis
    observations: np.ndarray
    truth: ParameterState
    seed: int
    noise_var: float = NOISE_VAR
    obs_times: tuple[float, ...] = OBS_TIMES
    _obs_idx: np.ndarray = field(init=False, repr=False)
    _target: TargetProblem = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.observations.shape != (len(self.obs_times),):
            raise InvalidArgumentError("one observation per observation time")
        if self.noise_var <= 0:
            raise InvalidArgumentError("noise_var must be positive")
        object.__setattr__(self, "_obs_idx", observation_indices(self.basis, self.obs_times))
        object.__setattr__(self, "_target", TargetProblem(
            basis=self.basis,
            scalar_dim=2,
            likelihood=self.log_likelihood,
            scalar_prior=langevin_log_prior,
            label=ProblemName.LANGEVIN,
            scalar_names=("log_alpha", "log_sigma"),
            scalar_sampler=_sample_log_scalars,
            derived={
                "alpha": lambda s: math.exp(s.scalars[0]),
                "sigma": lambda s: math.exp(s.scalars[1]),
            },
        ))

    @property
    def dt(self) -> float:
        return float(self.basis.grid[1] - self.basis.grid[0])

    def path(self, state: ParameterState) -> np.ndarray:
        alpha, sigma = np.exp(state.scalars)
        return langevin_forward(float(alpha), float(sigma), state.coefs, self.basis)

    def log_likelihood(self, state: ParameterState) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            predicted = self.path(state)[self._obs_idx]
        return gaussian_log_likelihood(self.observations, predicted, self.noise_var)

    def target(self) -> TargetProblem:
        return self._target

    def dataset(self) -> tuple[list[str], np.ndarray]:
        """Columns and rows for export: t, observed, noiseless."""
        t = np.asarray(self.obs_times, dtype=float)
        return ["t", "observed", "noiseless"], np.column_stack([t, self.observations, np.sin(SIGNAL_FREQUENCY * t)])


def path_quantiles(
    problem: LangevinProblem,
    states: Sequence[ParameterState],
    levels: Sequence[float] = PATH_LEVELS,
) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise posterior summary of X_t: (mean, quantiles) with shapes (n_grid,) and (n_grid, len(levels))."""
    if not states:
        raise InvalidArgumentError("path quantiles need at least one state")
    levels = np.asarray(levels, dtype=float)
    if np.any((levels < 0) | (levels > 1)):
        raise InvalidArgumentError(f"quantile levels must lie in [0, 1], got {levels.tolist()}")
    with np.errstate(over="ignore", invalid="ignore"):
        paths = np.array([problem.path(state) for state in states])
    return paths.mean(axis=0), np.quantile(paths, levels, axis=0).T


def make_langevin_problem(
    seed: int,
    grid_size: int = DEFAULT_GRID,
    n_modes: int = DEFAULT_MODES,
) -> LangevinProblem:
    """
    Synthetic data sin(4t) + N(0, 0.09). The signal is not a path of the model, so
    `truth` only holds a prior draw used as a reference point (e.g. a ball centre).
    """
    basis = bm_kl_basis(min(n_modes, grid_size), HORIZON, grid_size)
    rng = StreamFactory(seed).stream(0, 0, Stage.DATA)
    t = np.asarray(OBS_TIMES)
    observations = np.sin(SIGNAL_FREQUENCY * t) + rng.normal(0.0, math.sqrt(NOISE_VAR), t.shape[0])
    truth = ParameterState(
        scalars=np.log([SIGNAL_FREQUENCY**2, 1.0 / SIGMA_RATE]),
        coefs=sample_prior_coefficients(basis.n_modes, rng),
    )
    logger.debug("Langevin problem built", extra={"seed": seed, "grid_size": grid_size, "modes": basis.n_modes})
    return LangevinProblem(basis=basis, observations=observations, truth=truth, seed=seed)
