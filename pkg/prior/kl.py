"""
prior/kl.py — Karhunen–Loève bases for Gaussian priors on grid-discretized fields.

Constructions:
  - bm_kl_basis():        analytic eigenpairs of Brownian motion on [0, T]
  - numerical_kl_basis(): eigendecomposition of a kernel matrix on a grid
  - extend_basis():       kernel continuation of a numerical basis past its left edge

Coefficients are always WHITENED: a state stores u_i / sqrt(lambda_i), so under the
prior every coefficient is an independent standard normal. A field is rebuilt as

    U(x) = mean(x) + sum_i coef_i * sqrt(lambda_i) * eta_i(x)

and the low/high split of the sampler becomes a plain coordinate mask (CoefficientMask).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.linalg

from core.errors import InvalidArgumentError, NumericalError, OutOfDomainError

logger = logging.getLogger(__name__)

# Modes with eigenvalue below this fraction of the leading one are dropped
_RELATIVE_CUTOFF = 1e-12

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]


# ── Types ─────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class KLBasis:
    """
    Truncated KL expansion sampled on a grid. Immutable; safe to share across threads.

    modes has shape (n_modes, n_grid). Orthonormality holds in the inner product
    <f, g> = sum_k weights_k f_k g_k: unit weights for numerical bases (discrete l2),
    trapezoid weights for the analytic Brownian basis.
    """
    grid: np.ndarray
    mean: np.ndarray
    eigenvalues: np.ndarray
    modes: np.ndarray
    domain_length: float
    weights: np.ndarray
    total_variance: float

    def __post_init__(self) -> None:
        for name in ("grid", "mean", "eigenvalues", "modes", "weights"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n_grid = self.grid.shape[0]
        if self.mean.shape != (n_grid,) or self.weights.shape != (n_grid,):
            raise InvalidArgumentError("mean and weights must match the grid")
        if self.modes.ndim != 2 or self.modes.shape != (self.eigenvalues.shape[0], n_grid):
            raise InvalidArgumentError(
                f"modes must have shape (n_modes, {n_grid}), got {self.modes.shape}"
            )
        if self.n_modes > n_grid:
            raise InvalidArgumentError("more modes than grid points")
        if np.any(self.eigenvalues < 0) or np.any(np.diff(self.eigenvalues) > 0):
            raise InvalidArgumentError("eigenvalues must be nonnegative and descending")

    @property
    def n_modes(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def n_grid(self) -> int:
        return int(self.grid.shape[0])

    @cached_property
    def scaled_modes(self) -> np.ndarray:
        """sqrt(lambda_i) * eta_i, shape (n_modes, n_grid). Whitened coefs map through this."""
        scaled = np.sqrt(self.eigenvalues)[:, None] * self.modes
        scaled.setflags(write=False)
        return scaled

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """<f, g> in the basis inner product."""
        return float(np.sum(self.weights * f * g))

    def gram(self) -> np.ndarray:
        """Matrix of <eta_i, eta_j>; the identity up to round-off."""
        return (self.modes * self.weights) @ self.modes.T


@dataclass(frozen=True)
class CoefficientMask:
    """
    Low/high wavenumber split of the whitened coefficients.
    Low = first M (sampled by AIES together with the scalars), high = the rest (PCN).
    """
    M: int
    total: int

    def __post_init__(self) -> None:
        if not 0 <= self.M <= self.total:
            raise InvalidArgumentError(f"mask needs 0 <= M <= total, got M={self.M}, total={self.total}")

    @property
    def low(self) -> slice:
        return slice(0, self.M)

    @property
    def high(self) -> slice:
        return slice(self.M, self.total)

    @property
    def n_high(self) -> int:
        return self.total - self.M


# ── Construction ──────────────────────────────────────────────────────────────

def bm_eigenvalues(n_modes: int, T: float) -> np.ndarray:
    """lambda_i = T^2 / ((i - 1/2)^2 pi^2), i = 1..n_modes."""
    i = np.arange(1, n_modes + 1, dtype=float)
    return T**2 / ((i - 0.5) ** 2 * np.pi**2)


def bm_kl_basis(n_modes: int, T: float, grid_size: int) -> KLBasis:
    """
    Analytic KL basis of Brownian motion on [0, T]:
    eta_i(t) = sqrt(2/T) sin((i - 1/2) pi t / T), mean zero.

    Sampled on grid_size uniform points including both endpoints. The sampled sines
    are exactly orthonormal under trapezoid weights for i <= grid_size - 1.
    """
    if T <= 0:
        raise InvalidArgumentError(f"T must be positive, got {T}")
    if grid_size < 2:
        raise InvalidArgumentError(f"grid_size must be at least 2, got {grid_size}")
    if n_modes < 0 or n_modes > grid_size:
        raise InvalidArgumentError(f"n_modes={n_modes} exceeds grid_size={grid_size}")

    grid = np.linspace(0.0, T, grid_size)
    i = np.arange(1, n_modes + 1, dtype=float)
    modes = np.sqrt(2.0 / T) * np.sin(np.outer(i - 0.5, grid) * np.pi / T)

    h = T / (grid_size - 1)
    weights = np.full(grid_size, h)
    weights[[0, -1]] = h / 2

    return KLBasis(
        grid=grid,
        mean=np.zeros(grid_size),
        eigenvalues=bm_eigenvalues(n_modes, T),
        modes=modes,
        domain_length=T,
        weights=weights,
        total_variance=T**2 / 2,
    )


def numerical_kl_basis(
    kernel: Kernel,
    grid: np.ndarray,
    mean: np.ndarray | float,
    n_modes: int,
) -> KLBasis:
    """
    KL basis from the kernel matrix K_jk = kernel(x_j, x_k).

    The kernel must broadcast over numpy arrays. Round-off negative eigenvalues are
    clipped to 0 and modes below 1e-12 of the leading eigenvalue are dropped, so the
    result may carry fewer than n_modes modes. Modes are orthonormal in discrete l2;
    each is signed so its largest-magnitude entry is positive.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidArgumentError("grid must be a nonempty 1-D array")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise InvalidArgumentError("grid must be strictly increasing")
    if n_modes < 0 or n_modes > grid.size:
        raise InvalidArgumentError(f"n_modes={n_modes} exceeds grid size {grid.size}")

    K = np.asarray(kernel(grid[:, None], grid[None, :]), dtype=float)
    K = np.broadcast_to(K, (grid.size, grid.size))
    if not np.all(np.isfinite(K)):
        raise NumericalError("kernel matrix has non-finite entries")
    if not np.allclose(K, K.T, rtol=1e-12, atol=1e-12 * max(np.abs(K).max(), 1e-300)):
        raise NumericalError("kernel matrix is not symmetric")

    try:
        vals, vecs = scipy.linalg.eigh(K)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc

    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, None)
    vecs = vecs[:, order].T

    if vals.size and vals[0] > 0:
        keep = int(np.count_nonzero(vals >= _RELATIVE_CUTOFF * vals[0]))
    else:
        keep = 0
    keep = min(keep, n_modes)
    vals, vecs = vals[:keep], vecs[:keep]

    # Deterministic sign convention
    if keep:
        pivots = np.argmax(np.abs(vecs), axis=1)
        vecs = vecs * np.sign(vecs[np.arange(keep), pivots])[:, None]

    logger.debug(
        "Numerical KL basis built",
        extra={"grid_size": grid.size, "requested": n_modes, "kept": keep},
    )

    return KLBasis(
        grid=grid,
        mean=np.broadcast_to(np.asarray(mean, dtype=float), grid.shape).copy(),
        eigenvalues=vals,
        modes=vecs,
        domain_length=float(grid[-1] - grid[0]),
        weights=np.ones(grid.size),
        total_variance=float(np.trace(K)),
    )


def extend_basis(basis: KLBasis, kernel: Kernel, left: float) -> KLBasis:
    """
    Continue a numerical basis to the left of its grid down to `left`.

    New points keep the grid spacing. Each mode is continued by the kernel formula
    eta_i(x) = sum_j kernel(x, x_j) eta_i(x_j) / lambda_i, which reproduces eta_i on the
    original points. The new points get zero weight, so orthonormality, eigenvalues and
    total_variance stay those of the original grid. The mean is continued as a constant.
    """
    if basis.n_grid < 2:
        raise InvalidArgumentError("extension needs at least two grid points")
    if left >= basis.grid[0]:
        return basis
    if np.any(basis.eigenvalues <= 0):
        raise InvalidArgumentError("extension needs strictly positive eigenvalues")

    h = float(basis.grid[1] - basis.grid[0])
    n_new = int(math.ceil((basis.grid[0] - left) / h))
    if basis.grid[0] - h * n_new > left:
        n_new += 1
    new = basis.grid[0] - h * np.arange(n_new, 0, -1)

    K = np.asarray(kernel(new[:, None], basis.grid[None, :]), dtype=float)
    K = np.broadcast_to(K, (n_new, basis.n_grid))
    continued = (basis.modes @ K.T) / basis.eigenvalues[:, None]
    if not np.all(np.isfinite(continued)):
        raise NumericalError("continued modes have non-finite entries")

    logger.debug("KL basis extended", extra={"added": n_new, "left": float(new[0])})

    return KLBasis(
        grid=np.concatenate([new, basis.grid]),
        mean=np.concatenate([np.full(n_new, basis.mean[0]), basis.mean]),
        eigenvalues=basis.eigenvalues,
        modes=np.hstack([continued, basis.modes]),
        domain_length=basis.domain_length,
        weights=np.concatenate([np.zeros(n_new), basis.weights]),
        total_variance=basis.total_variance,
    )


# ── Sampling and reconstruction ───────────────────────────────────────────────

def sample_prior_coefficients(n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent standard normals: a whitened prior draw."""
    if n < 0:
        raise InvalidArgumentError(f"n must be nonnegative, got {n}")
    return rng.standard_normal(n)


def grid_values(basis: KLBasis, coefs: np.ndarray) -> np.ndarray:
    """Field on the basis grid for whitened coefs (leading modes if coefs is short)."""
    coefs = np.asarray(coefs, dtype=float)
    k = coefs.shape[0]
    if k > basis.n_modes:
        raise InvalidArgumentError(f"{k} coefficients for a basis of {basis.n_modes} modes")
    if k == 0:
        return basis.mean.copy()
    return basis.mean + coefs @ basis.scaled_modes[:k]


def reconstruct(
    basis: KLBasis,
    coefs: np.ndarray,
    query: np.ndarray | None = None,
) -> np.ndarray:
    """
    U = mean + sum_i coef_i sqrt(lambda_i) eta_i, evaluated at query points by
    linear interpolation (grid values when query is None).
    """
    values = grid_values(basis, coefs)
    if query is None:
        return values

    query = np.asarray(query, dtype=float)
    lo, hi = basis.grid[0], basis.grid[-1]
    if np.any(query < lo) or np.any(query > hi):
        bad = query[(query < lo) | (query > hi)]
        raise OutOfDomainError(f"query {bad.tolist()} outside grid span [{lo}, {hi}]")
    return np.interp(query, basis.grid, values)


def variance_fraction(basis: KLBasis, M: int) -> float:
    """Share of total prior variance carried by the first M modes."""
    if M < 0 or M > basis.n_modes:
        raise InvalidArgumentError(f"M={M} outside [0, {basis.n_modes}]")
    if basis.total_variance <= 0:
        return 0.0
    return float(np.sum(basis.eigenvalues[:M]) / basis.total_variance)


def truncation_error(basis: KLBasis, coefs: np.ndarray, M: int) -> float:
    """Squared norm of the part of the field carried by modes beyond M."""
    coefs = np.asarray(coefs, dtype=float)
    tail = coefs[M:] @ basis.scaled_modes[M:coefs.shape[0]]
    return basis.inner(tail, tail)
