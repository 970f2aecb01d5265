"""
samplers/tuning.py — PCN step-size autotuning.

Multiplicative rule applied once per batch of iterations during burn-in:
    omega <- clamp(omega * exp(kappa * (rate - target)), 1e-4, 1)
omega is frozen once burn-in ends.
"""

from __future__ import annotations

import math

import numpy as np

from core.errors import InvalidArgumentError

OMEGA_MIN = 1e-4
OMEGA_MAX = 1.0


def autotune_omega(
    history: np.ndarray,
    omega: float,
    target: float,
    kappa: float = 1.0,
) -> float:
    """history: accept flags of the batch (any shape). Empty history leaves omega unchanged."""
    if not 0.0 < target < 1.0:
        raise InvalidArgumentError(f"target acceptance rate must be in (0, 1), got {target}")
    flags = np.asarray(history, dtype=bool)
    if flags.size == 0:
        return omega
    rate = float(flags.mean())
    return min(max(omega * math.exp(kappa * (rate - target)), OMEGA_MIN), OMEGA_MAX)
