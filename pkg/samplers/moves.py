"""
samplers/moves.py — Single-walker Metropolis moves.

  aies_block_update()     stretch move on scalars ⊕ low coefs (high block untouched)
  pcn_complement_update() PCN on the high coefs (scalars and low block untouched)
  joint_update()          stretch + PCN proposed together, one accept/reject
  pcn_baseline_update()   PCN on all coefs + random walk on scalars, one accept/reject

Random draws happen in a fixed order per move (companion, Z, xi, uniform) so a given
stream always produces the same proposal. Ensemble moves update the walker's row and
caches in place and return the acceptance flag.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from core.errors import InvalidArgumentError
from prior.kl import CoefficientMask
from samplers.ensemble import Ensemble
from target.problem import ParameterState, TargetProblem, block_terms


class MoveResult(NamedTuple):
    state: ParameterState
    accepted: bool
    loglik: float
    block_logdensity: float


# ── Stretch move primitives ───────────────────────────────────────────────────

def stretch_from_uniform(u: float, a: float) -> float:
    """Inverse CDF of g(z) ∝ z^(-1/2) on [1/a, a]."""
    sqrt_a = math.sqrt(a)
    return (u * (sqrt_a - 1.0 / sqrt_a) + 1.0 / sqrt_a) ** 2


def sample_stretch(a: float, rng: np.random.Generator) -> float:
    if a < 1.0:
        raise InvalidArgumentError(f"stretch bound a must be >= 1, got {a}")
    return stretch_from_uniform(float(rng.random()), a)


def stretch_proposal(x_i: np.ndarray, x_j: np.ndarray, z: float) -> np.ndarray:
    """X_i + (1 - Z)(X_j - X_i), written as X_j + Z (X_i - X_j)."""
    return x_j + z * (x_i - x_j)


def log_stretch_acceptance(d: int, z: float, lp_new: float, lp_old: float) -> float:
    """log of Z^(d-1) pi(new) / pi(old)."""
    if lp_new == -math.inf:
        return -math.inf
    return (d - 1) * math.log(z) + lp_new - lp_old


def metropolis_accept(log_ratio: float, u: float) -> bool:
    """u < min(1, exp(log_ratio)); -inf never accepts, >= 0 always does."""
    return u < math.exp(min(log_ratio, 0.0))


def _draw_companion(
    i: int,
    L: int,
    rng: np.random.Generator,
    companions: Optional[Sequence[int]],
) -> int:
    if companions is None:
        r = int(rng.integers(L - 1))
        return r + (r >= i)
    return int(companions[int(rng.integers(len(companions)))])


def _with_high(state_coefs: np.ndarray, mask: CoefficientMask, high: np.ndarray) -> np.ndarray:
    coefs = state_coefs.copy()
    coefs[mask.high] = high
    return coefs


def _pcn_high(high: np.ndarray, omega: float, xi: np.ndarray) -> np.ndarray:
    return math.sqrt(1.0 - omega**2) * high + omega * xi


# ── Ensemble moves ────────────────────────────────────────────────────────────

def aies_block_update(
    ensemble: Ensemble,
    i: int,
    problem: TargetProblem,
    a: float,
    rng: np.random.Generator,
    companions: Optional[Sequence[int]] = None,
) -> tuple[Ensemble, bool]:
    """
    Stretch move of walker i's affine block toward/away from a companion j != i.
    companions restricts j (the frozen half in the two-group variant); default is
    uniform over the other L - 1 walkers. Acceptance uses Z^(d-1), d = scalar_dim + M.
    """
    mask = ensemble.mask
    j = _draw_companion(i, ensemble.size, rng, companions)
    z = sample_stretch(a, rng)
    u = float(rng.random())

    x_i = ensemble.affine(i)
    proposal = stretch_proposal(x_i, ensemble.affine(j), z)
    s = ensemble.scalar_dim
    coefs = ensemble.coefs[i].copy()
    coefs[mask.low] = proposal[s:]
    state = ParameterState(scalars=proposal[:s], coefs=coefs)

    phi, block = block_terms(problem, state, mask)
    log_ratio = log_stretch_acceptance(ensemble.affine_dim, z, block, ensemble.block_logdensity[i])
    accepted = metropolis_accept(log_ratio, u)
    if accepted:
        ensemble.set_affine(i, proposal)
        ensemble.loglik[i] = phi
        ensemble.block_logdensity[i] = block
    return ensemble, accepted


def pcn_complement_update(
    state: ParameterState,
    problem: TargetProblem,
    mask: CoefficientMask,
    omega: float,
    rng: np.random.Generator,
    current: Optional[tuple[float, float]] = None,
) -> MoveResult:
    """
    PCN on the high block: high <- sqrt(1 - omega^2) high + omega xi, accepted with
    min{1, exp(phi(new) - phi(old))}. current = cached (phi, block) of state if known.
    """
    if not 0.0 < omega <= 1.0:
        raise InvalidArgumentError(f"omega must be in (0, 1], got {omega}")
    phi_old, block_old = current if current is not None else block_terms(problem, state, mask)

    xi = rng.standard_normal(mask.n_high)
    u = float(rng.random())

    coefs = _with_high(state.coefs, mask, _pcn_high(state.coefs[mask.high], omega, xi))
    proposal = ParameterState(scalars=state.scalars, coefs=coefs)
    phi, block = block_terms(problem, proposal, mask)
    log_ratio = phi - phi_old if phi != -math.inf else -math.inf
    if metropolis_accept(log_ratio, u):
        return MoveResult(proposal, True, phi, block)
    return MoveResult(state, False, phi_old, block_old)


def pcn_walker_update(
    ensemble: Ensemble,
    i: int,
    problem: TargetProblem,
    omega: float,
    rng: np.random.Generator,
) -> bool:
    result = pcn_complement_update(
        ensemble.walker(i), problem, ensemble.mask, omega, rng,
        current=(ensemble.loglik[i], ensemble.block_logdensity[i]),
    )
    if result.accepted:
        ensemble.coefs[i] = result.state.coefs
        ensemble.loglik[i] = result.loglik
        ensemble.block_logdensity[i] = result.block_logdensity
    return result.accepted


def joint_update(
    ensemble: Ensemble,
    i: int,
    problem: TargetProblem,
    a: float,
    omega: float,
    rng: np.random.Generator,
    companions: Optional[Sequence[int]] = None,
) -> bool:
    """
    One Metropolis step moving everything: stretch on the affine block, PCN on the rest.
    Acceptance min{1, Z^(d-1) exp(Δphi + Δscalar prior - 1/2 Δ||low||^2)}; the
    high-block prior term cancels against the PCN proposal.
    """
    mask = ensemble.mask
    j = _draw_companion(i, ensemble.size, rng, companions)
    z = sample_stretch(a, rng)
    xi = rng.standard_normal(mask.n_high)
    u = float(rng.random())

    s = ensemble.scalar_dim
    affine = stretch_proposal(ensemble.affine(i), ensemble.affine(j), z)
    coefs = np.empty(mask.total)
    coefs[mask.low] = affine[s:]
    coefs[mask.high] = _pcn_high(ensemble.coefs[i, mask.high], omega, xi)
    state = ParameterState(scalars=affine[:s], coefs=coefs)

    phi, block = block_terms(problem, state, mask)
    d = ensemble.affine_dim
    if d > 0:
        log_ratio = log_stretch_acceptance(d, z, block, ensemble.block_logdensity[i])
    else:
        log_ratio = block - ensemble.block_logdensity[i] if block != -math.inf else -math.inf
    accepted = metropolis_accept(log_ratio, u)
    if accepted:
        ensemble.scalars[i] = state.scalars
        ensemble.coefs[i] = state.coefs
        ensemble.loglik[i] = phi
        ensemble.block_logdensity[i] = block
    return accepted


def pcn_baseline_update(
    ensemble: Ensemble,
    i: int,
    problem: TargetProblem,
    omega: float,
    scalar_step: float,
    rng: np.random.Generator,
) -> bool:
    """
    PCN baseline: PCN on every coefficient and a Gaussian random walk of size
    omega * scalar_step on the scalars, accepted jointly with min{1, exp(Δphi + Δprior)}.
    Expects an ensemble with M = 0.
    """
    mask = ensemble.mask
    eps = rng.standard_normal(ensemble.scalar_dim)
    xi = rng.standard_normal(mask.n_high)
    u = float(rng.random())

    coefs = ensemble.coefs[i].copy()
    coefs[mask.high] = _pcn_high(coefs[mask.high], omega, xi)
    state = ParameterState(scalars=ensemble.scalars[i] + omega * scalar_step * eps, coefs=coefs)

    phi, block = block_terms(problem, state, mask)
    log_ratio = block - ensemble.block_logdensity[i] if block != -math.inf else -math.inf
    accepted = metropolis_accept(log_ratio, u)
    if accepted:
        ensemble.scalars[i] = state.scalars
        ensemble.coefs[i] = state.coefs
        ensemble.loglik[i] = phi
        ensemble.block_logdensity[i] = block
    return accepted
