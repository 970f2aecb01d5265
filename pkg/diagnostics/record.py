"""
diagnostics/record.py — ChainRecord: everything a run produces, in memory.

observables[name] has shape (iterations // thin + 1, L): row r holds the walkers after
iteration r * thin, so row 0 is the initial ensemble.
accepted[stage] has shape (iterations,) and counts accepted proposals per iteration.
omega_history[t] is the PCN step used at iteration t + 1.
adapt_trace (hybrid runs only) has one row per recorded iteration: the running
variance estimate of each affine coordinate, averaged over walkers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Protocol

import numpy as np

from core.errors import InvalidArgumentError


class SeriesSource(Protocol):
    """Anything summarize() can read: in-memory records and chain files read back."""
    observables: dict[str, np.ndarray]
    burn_in_fraction: float
    thin: int

    @property
    def names(self) -> list[str]: ...


@dataclass(eq=False)
class ChainRecord:
    observables: dict[str, np.ndarray]
    accepted: dict[str, np.ndarray]
    omega_history: np.ndarray
    walkers: int
    burn_in_fraction: float = 0.10
    meta: dict[str, Any] = field(default_factory=dict)
    thin: int = 1
    adapt_trace: Optional[np.ndarray] = None
    adapt_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise InvalidArgumentError(f"burn_in_fraction must be in [0, 1), got {self.burn_in_fraction}")
        if self.thin < 1:
            raise InvalidArgumentError(f"thin must be at least 1, got {self.thin}")
        lengths = {series.shape for series in self.observables.values()}
        if len(lengths) > 1:
            raise InvalidArgumentError(f"observable series disagree in shape: {sorted(lengths)}")
        for name, series in self.observables.items():
            if series.ndim != 2 or series.shape != (self.rows, self.walkers):
                raise InvalidArgumentError(f"'{name}' must have shape ({self.rows}, {self.walkers})")
        for stage, counts in self.accepted.items():
            if counts.shape != (self.iterations,):
                raise InvalidArgumentError(f"acceptance counts for '{stage}' must have {self.iterations} entries")
        if self.adapt_trace is not None and self.adapt_trace.shape != (self.rows, len(self.adapt_names)):
            raise InvalidArgumentError(
                f"adapt_trace must have shape ({self.rows}, {len(self.adapt_names)}), got {self.adapt_trace.shape}"
            )

    @property
    def iterations(self) -> int:
        return int(self.omega_history.shape[0])

    @property
    def rows(self) -> int:
        """Recorded rows, the initial ensemble included."""
        return self.iterations // self.thin + 1

    def recorded_iterations(self) -> np.ndarray:
        return np.arange(self.rows) * self.thin

    @property
    def omega(self) -> float:
        """Final (frozen) PCN step; the configured value when nothing ran."""
        if self.iterations:
            return float(self.omega_history[-1])
        return float(self.meta.get("omega", float("nan")))

    @property
    def names(self) -> list[str]:
        return list(self.observables)

    def burn_in_iterations(self) -> int:
        return int(self.burn_in_fraction * self.iterations)

    def acceptance_rates(self, after_burn_in: bool = True) -> dict[str, float]:
        """Per-stage acceptance rate; by default over iterations with omega frozen."""
        start = self.burn_in_iterations() if after_burn_in else 0
        rates = {}
        for stage, counts in self.accepted.items():
            window = counts[start:]
            rates[stage] = float(window.sum() / (window.size * self.walkers)) if window.size else float("nan")
        return rates
