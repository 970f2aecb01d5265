"""
Shared fixtures: small targets with known posteriors and cheap benchmark problems.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np
import pytest

from prior.kl import bm_kl_basis
from problems import make_advection_problem, make_langevin_problem
from target.problem import ParameterState, TargetProblem


def make_flat_problem(scalar_dim: int = 1, n_modes: int = 8) -> TargetProblem:
    """phi == 0 and a flat scalar prior: every proposal with a symmetric kernel is accepted."""
    return TargetProblem(
        basis=bm_kl_basis(n_modes, 1.0, max(n_modes + 1, 16)),
        scalar_dim=scalar_dim,
        likelihood=lambda state: 0.0,
        label="flat",
        scalar_sampler=lambda rng: rng.standard_normal(scalar_dim),
    )


def make_gaussian_problem(
    coef_precision: Sequence[float] = (3.0, 1.0, 0.0, 0.0, 0.0, 0.0),
    scalar_sd: Sequence[float] = (2.0,),
) -> TargetProblem:
    """
    Product Gaussian posterior. Coefficient k has variance 1 / (1 + coef_precision[k]);
    scalar s has variance scalar_sd[s]^2 (flat prior, Gaussian likelihood).
    """
    b = np.asarray(coef_precision, dtype=float)
    sd = np.asarray(scalar_sd, dtype=float)

    def likelihood(state: ParameterState) -> float:
        return float(-0.5 * np.dot(b, state.coefs**2) - 0.5 * np.sum((state.scalars / sd) ** 2))

    return TargetProblem(
        basis=bm_kl_basis(len(b), 1.0, max(len(b) + 1, 16)),
        scalar_dim=len(sd),
        likelihood=likelihood,
        label="gaussian",
        scalar_sampler=lambda rng: rng.normal(0.0, sd),
    )


def gaussian_variances(problem_precision: Sequence[float]) -> np.ndarray:
    return 1.0 / (1.0 + np.asarray(problem_precision, dtype=float))


@pytest.fixture
def flat_problem() -> Callable[..., TargetProblem]:
    return make_flat_problem


@pytest.fixture
def gaussian_problem() -> Callable[..., TargetProblem]:
    return make_gaussian_problem


@pytest.fixture(scope="session")
def advection_small():
    return make_advection_problem(seed=0, grid_size=50)


@pytest.fixture(scope="session")
def langevin_small():
    return make_langevin_problem(seed=0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def states_from_rng(problem: TargetProblem, L: int, seed: int = 0, scale: float = 1.0) -> list[ParameterState]:
    gen = np.random.default_rng(seed)
    return [
        ParameterState(
            scalars=scale * gen.standard_normal(problem.scalar_dim),
            coefs=gen.standard_normal(problem.n_coefs),
        )
        for _ in range(L)
    ]


def write_experiment(path, **values: Optional[object]) -> str:
    lines = [f"{k}={v}" for k, v in values.items() if v is not None]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)
