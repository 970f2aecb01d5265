"""
problems/advection.py — Flow inversion for the linear advection equation.

    rho(x, t) = rho0(x - c t),   q(x, t) = c rho(x, t)

Unknowns: wave speed c (scalar, Unif(0, 1.4) prior) and the initial density rho0
(Gaussian prior, mean 100, kernel 130 exp(-(x - x')^2 / 2), numerical KL basis).
Data: q at x in {2, 6, 10}, t in {1, 1.5, 2} plus N(0, 0.04) noise, ordered x-major.

The KL basis is computed on [0, 10] and continued by the kernel to the left edge of the
characteristics, x - c t >= min(x) - max(c) max(t) = -0.8, so every shifted evaluation
stays on the grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from core.constants import ProblemName, Stage
from core.errors import InvalidArgumentError, NumericalError, OutOfDomainError
from prior.kl import KLBasis, extend_basis, numerical_kl_basis, reconstruct, sample_prior_coefficients
from samplers.streams import StreamFactory
from target.problem import ParameterState, TargetProblem, gaussian_log_likelihood

logger = logging.getLogger(__name__)

LOCATIONS = (2.0, 6.0, 10.0)
TIMES = (1.0, 1.5, 2.0)
NOISE_VAR = 0.04
C_BOUNDS = (0.0, 1.4)
C_TRUE = 0.5
FIELD_MEAN = 100.0
KERNEL_SCALE = 130.0
DOMAIN = (0.0, 10.0)
DEFAULT_GRID = 200
DEFAULT_MODES = 100


def squared_exponential(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return KERNEL_SCALE * np.exp(-0.5 * (x - y) ** 2)


def observation_points(locations=LOCATIONS, times=TIMES) -> tuple[np.ndarray, np.ndarray]:
    """(x, t) pairs, x-major."""
    xs, ts = np.meshgrid(np.asarray(locations, float), np.asarray(times, float), indexing="ij")
    return xs.ravel(), ts.ravel()


def advection_forward(
    c: float,
    field_coefs: np.ndarray,
    basis: KLBasis,
    locations=LOCATIONS,
    times=TIMES,
) -> np.ndarray:
    """q(x, t) = c rho0(x - c t) at every observation point. OutOfDomainError off the grid."""
    xs, ts = observation_points(locations, times)
    rho = reconstruct(basis, field_coefs, xs - c * ts)
    return c * rho


def advection_log_prior(scalars: np.ndarray) -> float:
    c = float(scalars[0])
    lo, hi = C_BOUNDS
    return -math.log(hi - lo) if lo <= c <= hi else -math.inf


def advection_grid(grid_size: int = DEFAULT_GRID) -> np.ndarray:
    """grid_size uniform points over [0, 10]."""
    if grid_size < 2:
        raise InvalidArgumentError(f"grid_size must be at least 2, got {grid_size}")
    return np.linspace(*DOMAIN, grid_size)


def characteristic_reach(locations=LOCATIONS, times=TIMES, c_bounds=C_BOUNDS) -> float:
    """Leftmost foot x - c t over the observation points and the c prior support."""
    return min(locations) - max(c_bounds[1], 0.0) * max(times)


@dataclass(frozen=True, eq=False)
class AdvectionProblem:
    basis: KLBasis
    observations: np.ndarray
    truth: ParameterState
    seed: int
    noise_var: float = NOISE_VAR
    obs_locations: tuple[float, ...] = LOCATIONS
    obs_times: tuple[float, ...] = TIMES
    c_bounds: tuple[float, float] = C_BOUNDS
    _target: TargetProblem = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.observations.shape != (len(self.obs_locations) * len(self.obs_times),):
            raise InvalidArgumentError("one observation per (location, time) pair")
        if self.noise_var <= 0:
            raise InvalidArgumentError("noise_var must be positive")
        object.__setattr__(self, "_target", TargetProblem(
            basis=self.basis,
            scalar_dim=1,
            likelihood=self.log_likelihood,
            scalar_prior=advection_log_prior,
            label=ProblemName.ADVECTION,
            scalar_names=("c",),
            scalar_sampler=lambda rng: np.array([rng.uniform(*self.c_bounds)]),
        ))

    def forward(self, c: float, coefs: np.ndarray) -> np.ndarray:
        return advection_forward(c, coefs, self.basis, self.obs_locations, self.obs_times)

    def log_likelihood(self, state: ParameterState) -> float:
        try:
            predicted = self.forward(float(state.scalars[0]), state.coefs)
        except OutOfDomainError:
            return -math.inf
        return gaussian_log_likelihood(self.observations, predicted, self.noise_var)

    def target(self) -> TargetProblem:
        return self._target

    def dataset(self) -> tuple[list[str], np.ndarray]:
        """Columns and rows for export: x, t, observed, noiseless."""
        xs, ts = observation_points(self.obs_locations, self.obs_times)
        clean = self.forward(float(self.truth.scalars[0]), self.truth.coefs)
        return ["x", "t", "observed", "noiseless"], np.column_stack([xs, ts, self.observations, clean])


def conditional_field_samples(
    problem: AdvectionProblem,
    c: float,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    n exact draws of rho0 on the basis grid from p(rho0 | c, data), shape (n, n_grid).

    For fixed c the flow is affine in the whitened coefficients, q = c (m + A u), so the
    N(0, I) prior gives a Gaussian conditional with precision I + c^2 A^T A / noise_var.
    """
    lo, hi = problem.c_bounds
    if not lo <= c <= hi:
        raise InvalidArgumentError(f"c={c} outside the prior support [{lo}, {hi}]")
    if n < 0:
        raise InvalidArgumentError(f"n must be nonnegative, got {n}")

    basis = problem.basis
    xs, ts = observation_points(problem.obs_locations, problem.obs_times)
    feet = xs - c * ts
    m = reconstruct(basis, np.zeros(0), feet)
    A = np.array([np.interp(feet, basis.grid, mode) for mode in basis.scaled_modes]).reshape(basis.n_modes, feet.size).T

    precision = np.eye(basis.n_modes) + (c**2 / problem.noise_var) * (A.T @ A)
    try:
        chol = scipy.linalg.cholesky(precision, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"conditional precision is not positive definite: {exc}") from exc
    rhs = (c / problem.noise_var) * (A.T @ (problem.observations - c * m))
    mean = scipy.linalg.cho_solve((chol, True), rhs)
    z = rng.standard_normal((basis.n_modes, n))
    coefs = mean[:, None] + scipy.linalg.solve_triangular(chol.T, z, lower=False)
    return basis.mean + coefs.T @ basis.scaled_modes


def make_advection_problem(
    seed: int,
    grid_size: int = DEFAULT_GRID,
    n_modes: int = DEFAULT_MODES,
    extend: bool = True,
) -> AdvectionProblem:
    """
    Synthetic advection problem: c = 0.5, rho0 drawn from the prior, N(0, 0.04) noise.
    All randomness comes from stream(0, 0, "data") of the seed.
    """
    grid = advection_grid(grid_size)
    basis = numerical_kl_basis(squared_exponential, grid, FIELD_MEAN, min(n_modes, grid.size))
    if extend:
        basis = extend_basis(basis, squared_exponential, characteristic_reach())

    rng = StreamFactory(seed).stream(0, 0, Stage.DATA)
    truth = ParameterState(scalars=np.array([C_TRUE]), coefs=sample_prior_coefficients(basis.n_modes, rng))
    clean = advection_forward(C_TRUE, truth.coefs, basis)
    observations = clean + rng.normal(0.0, math.sqrt(NOISE_VAR), clean.shape[0])

    logger.debug(
        "Advection problem built",
        extra={"seed": seed, "grid_size": basis.n_grid, "modes": basis.n_modes},
    )
    return AdvectionProblem(basis=basis, observations=observations, truth=truth, seed=seed)
