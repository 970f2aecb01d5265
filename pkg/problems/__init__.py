"""
problems — Benchmark inverse problems and their registry.

Usage:
    from problems import make_problem

    problem = make_problem("advection", seed=1, grid_size=100)
    target = problem.target()
"""

from __future__ import annotations

from typing import Optional, Union

from core.constants import ProblemName
from core.errors import InvalidArgumentError
from problems.advection import AdvectionProblem, advection_forward, conditional_field_samples, make_advection_problem
from problems.export import write_dataset
from problems.langevin import LangevinProblem, langevin_forward, make_langevin_problem, path_quantiles

Problem = Union[AdvectionProblem, LangevinProblem]

SCALAR_DIM: dict[str, int] = {
    ProblemName.ADVECTION: 1,
    ProblemName.LANGEVIN: 2,
}


def make_problem(
    name: str,
    seed: int,
    grid_size: Optional[int] = None,
    n_modes: Optional[int] = None,
) -> Problem:
    """Build a registered problem; None keeps the problem's own default."""
    kwargs = {k: v for k, v in (("grid_size", grid_size), ("n_modes", n_modes)) if v is not None}
    if name == ProblemName.ADVECTION:
        return make_advection_problem(seed, **kwargs)
    if name == ProblemName.LANGEVIN:
        return make_langevin_problem(seed, **kwargs)
    raise InvalidArgumentError(f"unknown problem '{name}' (expected one of {ProblemName.ALL})")


__all__ = [
    "SCALAR_DIM",
    "AdvectionProblem",
    "LangevinProblem",
    "Problem",
    "advection_forward",
    "conditional_field_samples",
    "langevin_forward",
    "make_advection_problem",
    "make_langevin_problem",
    "make_problem",
    "path_quantiles",
    "write_dataset",
]
