"""
experiments/schema.py — ExperimentConfig: one validated experiment file.

Experiment files are flat key=value text (see experiments/config_file.py), so every
value arrives as a string; pydantic coerces it. Unknown keys are rejected.

DESIGN RULE: every check that can name a key raises ConfigurationError(field=key).
Nothing downstream re-validates experiment settings.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from core.constants import InitMode, ProblemName, SamplerName
from core.errors import ConfigurationError
from problems import SCALAR_DIM
from problems.advection import C_BOUNDS
from samplers.config import DEFAULT_A, DEFAULT_BURN_IN, DEFAULT_M, DEFAULT_TARGET_RATE, SamplerConfig

TRUTH_CENTER = "truth"

# Speeds for the exact rho0 | c draws when the file names none
DEFAULT_CONDITIONAL_C = (0.4, 0.5, 0.6)

# Tracked when the file names none
DEFAULT_TRACKED: dict[str, tuple[str, ...]] = {
    ProblemName.ADVECTION: ("c", "eta_1", "eta_2", "eta_10"),
    ProblemName.LANGEVIN: ("log_alpha", "log_sigma", "alpha", "eta_1", "eta_10", "eta_100"),
}


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    problem: Literal["advection", "langevin"]
    sampler: Literal["pcn", "fes", "fes-joint", "hybrid"] = SamplerName.FES
    seed: int = Field(0, ge=0)

    M: int = Field(DEFAULT_M, ge=0)
    L: int = Field(100, ge=2)
    a: float = Field(DEFAULT_A, ge=1.0)
    omega: float = Field(0.2, gt=0.0, le=1.0)
    iterations: int = Field(1000, ge=0)
    thin: int = Field(1, ge=1)
    burn_in_fraction: float = Field(DEFAULT_BURN_IN, ge=0.0, lt=1.0)

    autotune: bool = True
    target_rate: float = Field(DEFAULT_TARGET_RATE, gt=0.0, lt=1.0)
    scalar_step: float = Field(1.0, gt=0.0)

    init: Literal["prior", "ball"] = InitMode.PRIOR
    center_file: Optional[str] = None
    radius: float = Field(1e-2, gt=0.0)

    grid_size: Optional[int] = Field(None, ge=2)
    n_modes: Optional[int] = Field(None, ge=1)

    tracked: tuple[str, ...] = ()
    output: Optional[str] = None

    path_snapshots: int = Field(50, ge=0)
    conditional_c: tuple[float, ...] = ()
    conditional_samples: int = Field(5, ge=0)

    parallel: bool = False
    workers: Optional[int] = Field(None, ge=1)
    progress: Optional[bool] = None

    @model_validator(mode="before")
    @classmethod
    def _blank_is_unset(cls, values: Any) -> Any:
        if isinstance(values, Mapping):
            return {k: v for k, v in values.items() if not (isinstance(v, str) and not v.strip())}
        return values

    @field_validator("tracked", "conditional_c", mode="before")
    @classmethod
    def _split_lists(cls, value: Any) -> Any:
        if isinstance(value, str):
            return tuple(name.strip() for name in value.split(",") if name.strip())
        return value

    # ── Derived values ────────────────────────────────────────────────────────

    @property
    def tracked_names(self) -> tuple[str, ...]:
        return self.tracked or DEFAULT_TRACKED[self.problem]

    @property
    def conditional_speeds(self) -> tuple[float, ...]:
        """Speeds c for the rho0 | c draws; advection only."""
        if self.problem != ProblemName.ADVECTION:
            return ()
        return self.conditional_c or DEFAULT_CONDITIONAL_C

    def output_dir(self, base: Path) -> Path:
        """Relative outputs resolve against base; default <problem>-<sampler>-seed<seed>."""
        name = self.output or f"{self.problem}-{self.sampler}-seed{self.seed}"
        path = Path(name)
        return path if path.is_absolute() else base / path

    def sampler_config(
        self,
        center: Optional[tuple[float, ...]] = None,
        workers: int = 1,
        progress: bool = False,
    ) -> SamplerConfig:
        """SamplerConfig for this experiment; file values override the process defaults."""
        return SamplerConfig(
            kind=self.sampler,
            a=self.a,
            omega=self.omega,
            M=self.M,
            L=self.L,
            iterations=self.iterations,
            thin=self.thin,
            seed=self.seed,
            autotune=self.autotune,
            target_rate=self.target_rate,
            burn_in_fraction=self.burn_in_fraction,
            parallel=self.parallel,
            workers=self.workers if self.workers is not None else workers,
            init=self.init,
            center=center,
            radius=self.radius,
            scalar_step=self.scalar_step,
            progress=self.progress if self.progress is not None else progress,
        )

    # ── Construction ──────────────────────────────────────────────────────────

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "ExperimentConfig":
        """Validate raw key/value pairs. Raises ConfigurationError naming the key."""
        try:
            config = cls.model_validate(dict(values))
        except ValidationError as e:
            error = e.errors()[0]
            loc = error.get("loc") or ()
            field = str(loc[0]) if loc else None
            raise ConfigurationError(error.get("msg", str(e)), field=field) from e
        config.check_constraints()
        return config

    def check_constraints(self) -> None:
        """Cross-field rules that need the problem's scalar dimension."""
        d = SCALAR_DIM[self.problem] + self.M
        if self.sampler in SamplerName.ENSEMBLE and self.L <= d:
            raise ConfigurationError(
                f"L={self.L} walkers must exceed scalar_dim + M = {d} for sampler '{self.sampler}'",
                field="L",
            )
        if self.init == InitMode.BALL and not self.center_file:
            raise ConfigurationError("init=ball needs a center_file (a path or 'truth')", field="center_file")
        if self.conditional_c and self.problem != ProblemName.ADVECTION:
            raise ConfigurationError("conditional_c applies to the advection problem only", field="conditional_c")
        lo, hi = C_BOUNDS
        outside = [c for c in self.conditional_c if not lo <= c <= hi]
        if outside:
            raise ConfigurationError(f"conditional_c values {outside} lie outside [{lo}, {hi}]", field="conditional_c")
