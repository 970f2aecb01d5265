"""
samplers/config.py — SamplerConfig: validated sampler settings.

Pydantic model so bad values fail at construction with the field name attached,
the same way experiment files are validated (experiments/schema.py).
Problem-dependent constraints (walker count vs affine-block dimension) need the problem
and are checked by check_against().
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.constants import InitMode, SamplerName
from core.errors import InvalidArgumentError

# Defaults: M = 5 low modes, stretch bound a = 2, 20% PCN acceptance, 10% burn-in.
DEFAULT_M = 5
DEFAULT_A = 2.0
DEFAULT_TARGET_RATE = 0.2
DEFAULT_BURN_IN = 0.10


class SamplerConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["pcn", "fes", "fes-joint", "hybrid"] = SamplerName.FES
    a: float = Field(DEFAULT_A, ge=1.0)
    omega: float = Field(0.2, gt=0.0, le=1.0)
    M: int = Field(DEFAULT_M, ge=0)
    L: int = Field(100, ge=2)
    iterations: int = Field(1000, ge=0)
    seed: int = Field(0, ge=0)
    # record every thin-th iteration
    thin: int = Field(1, ge=1)

    # omega autotuning: multiplicative rule on batches during burn-in only
    autotune: bool = True
    target_rate: float = Field(DEFAULT_TARGET_RATE, gt=0.0, lt=1.0)
    tune_batch: int = Field(100, ge=1)
    burn_in_fraction: float = Field(DEFAULT_BURN_IN, ge=0.0, lt=1.0)

    # two-group AIES (walkers of one half move against the frozen other half)
    parallel: bool = False
    workers: int = Field(1, ge=1)

    init: Literal["prior", "ball"] = InitMode.PRIOR
    center: Optional[tuple[float, ...]] = None
    radius: float = Field(1e-2, gt=0.0)

    # random-walk scale for scalars in the PCN baseline: step = omega * scalar_step
    scalar_step: float = Field(1.0, gt=0.0)

    # adaptive hybrid baseline
    hybrid_initial_scale: float = Field(0.1, gt=0.0)
    hybrid_warmup: int = Field(1000, ge=2)

    progress: bool = False

    @model_validator(mode="after")
    def _ball_needs_center(self) -> "SamplerConfig":
        if self.init == InitMode.BALL and self.center is None:
            raise ValueError("init='ball' needs a center")
        return self

    @property
    def effective_M(self) -> int:
        """The PCN baseline has no affine coefficient block."""
        return 0 if self.kind == SamplerName.PCN else self.M

    def affine_dim(self, scalar_dim: int) -> int:
        return scalar_dim + self.effective_M

    def burn_in_iterations(self) -> int:
        return int(self.burn_in_fraction * self.iterations)

    def check_against(self, scalar_dim: int, n_coefs: int) -> None:
        """Problem-dependent constraints. Raises InvalidArgumentError."""
        if self.effective_M > n_coefs:
            raise InvalidArgumentError(f"M={self.M} exceeds the {n_coefs} available KL modes")
        d = self.affine_dim(scalar_dim)
        if self.kind in SamplerName.ENSEMBLE and self.L <= d:
            raise InvalidArgumentError(
                f"L={self.L} walkers must exceed the affine-block dimension "
                f"scalar_dim + M = {d}"
            )
        if self.center is not None and len(self.center) > scalar_dim + n_coefs:
            raise InvalidArgumentError(
                f"center has {len(self.center)} entries, state dimension is {scalar_dim + n_coefs}"
            )
        if self.center is not None and len(self.center) < scalar_dim:
            raise InvalidArgumentError(f"center must hold at least the {scalar_dim} scalars")
