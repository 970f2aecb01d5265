"""
Ensemble iterations: stage bookkeeping, block separation, cache consistency,
worker-count invariance, exchangeability, equivariance and stationary moments.
"""

import math

import numpy as np
import pytest

from core.constants import SamplerName, Stage
from diagnostics.autocorr import corrected_standard_error
from diagnostics.summary import discard_burn_in
from prior.kl import bm_kl_basis
from samplers.config import SamplerConfig
from samplers.ensemble import Ensemble, initialize_ensemble
from samplers.fes import aies_sweep, fes_iteration, fes_joint_iteration, pcn_iteration, pcn_sweep, walker_halves
from samplers.runner import run_sampler
from samplers.streams import PermutedStreams, StreamFactory
from target.problem import ParameterState, TargetProblem
from tests.conftest import gaussian_variances, make_flat_problem, make_gaussian_problem, states_from_rng


def _config(**overrides):
    values = dict(L=8, M=2, iterations=10, seed=1, autotune=False)
    values.update(overrides)
    return SamplerConfig(**values)


def test_walker_halves():
    first, second = walker_halves(7)
    assert first.tolist() == [0, 1, 2, 3]
    assert second.tolist() == [4, 5, 6]


# ── Stage bookkeeping ─────────────────────────────────────────────────────────

def test_flat_target_accepts_everything():
    problem = make_flat_problem(scalar_dim=1, n_modes=6)
    config = _config(M=0)
    streams = StreamFactory(config.seed)
    ensemble = initialize_ensemble(problem, problem.mask(0), config, streams)
    for t in range(1, 6):
        flags = fes_iteration(ensemble, problem, config, streams, t)
        assert set(flags) == {Stage.AIES, Stage.PCN}
        assert flags[Stage.AIES].all() and flags[Stage.PCN].all()


def test_empty_stages_are_left_out():
    problem = make_flat_problem(scalar_dim=0, n_modes=4)
    streams = StreamFactory(0)

    config = _config(M=0)
    ensemble = initialize_ensemble(problem, problem.mask(0), config, streams)
    assert set(fes_iteration(ensemble, problem, config, streams, 1)) == {Stage.PCN}

    config = _config(M=4)
    ensemble = initialize_ensemble(problem, problem.mask(4), config, streams)
    assert set(fes_iteration(ensemble, problem, config, streams, 1)) == {Stage.AIES}


def test_block_separation(advection_small):
    target = advection_small.target()
    config = _config(L=10, M=3)
    streams = StreamFactory(2)
    mask = target.mask(3)
    ensemble = initialize_ensemble(target, mask, config, streams)
    for t in range(1, 6):
        before = ensemble.copy()
        aies_sweep(ensemble, target, config.a, streams, t)
        np.testing.assert_array_equal(ensemble.coefs[:, mask.high], before.coefs[:, mask.high])

        before = ensemble.copy()
        pcn_sweep(ensemble, target, config.omega, streams, t)
        np.testing.assert_array_equal(ensemble.scalars, before.scalars)
        np.testing.assert_array_equal(ensemble.coefs[:, mask.low], before.coefs[:, mask.low])
        ensemble.check_caches(target)


@pytest.mark.parametrize("step", [fes_iteration, fes_joint_iteration, pcn_iteration])
def test_caches_stay_consistent(step, langevin_small):
    target = langevin_small.target()
    M = 0 if step is pcn_iteration else 3
    config = _config(L=8, M=M, omega=0.3)
    streams = StreamFactory(5)
    ensemble = initialize_ensemble(target, target.mask(M), config, streams)
    for t in range(1, 11):
        flags = step(ensemble, target, config, streams, t)
        for stage_flags in flags.values():
            assert stage_flags.dtype == bool and stage_flags.shape == (8,)
        ensemble.check_caches(target)


# ── Parallel variant ──────────────────────────────────────────────────────────

@pytest.mark.parametrize("kind", [SamplerName.FES, SamplerName.FES_JOINT, SamplerName.PCN])
def test_results_do_not_depend_on_worker_count(kind, advection_small):
    target = advection_small.target()
    M = 0 if kind == SamplerName.PCN else 2
    records = [
        run_sampler(target, _config(kind=kind, M=M, iterations=15, parallel=True, workers=w), ["c", "eta_1", "eta_5"])
        for w in (1, 3, 8)
    ]
    for other in records[1:]:
        for name in ("c", "eta_1", "eta_5"):
            np.testing.assert_array_equal(records[0].observables[name], other.observables[name])


def test_parallel_and_sequential_agree_on_independent_stages():
    problem = make_flat_problem(scalar_dim=0, n_modes=5)
    runs = [
        run_sampler(problem, _config(M=0, parallel=parallel, workers=4), ["eta_1", "eta_5"])
        for parallel in (False, True)
    ]
    np.testing.assert_array_equal(runs[0].observables["eta_5"], runs[1].observables["eta_5"])


# ── Exchangeability ───────────────────────────────────────────────────────────

@pytest.mark.parametrize("sweep", ["pcn", "baseline"])
def test_permuted_walkers_follow_permuted_streams(sweep, advection_small):
    target = advection_small.target()
    M = 0 if sweep == "baseline" else 2
    mask = target.mask(M)
    states = states_from_rng(target, 7, seed=4, scale=0.0)
    states = [ParameterState(scalars=[0.5], coefs=s.coefs) for s in states]
    perm = np.random.default_rng(1).permutation(7)

    original = Ensemble.from_states(target, states, mask)
    permuted = Ensemble.from_states(target, [states[k] for k in perm], mask)
    config = _config(L=7, M=M, omega=0.3)
    for t in range(1, 6):
        if sweep == "pcn":
            pcn_sweep(original, target, 0.3, StreamFactory(9), t)
            pcn_sweep(permuted, target, 0.3, PermutedStreams(9, perm), t)
        else:
            pcn_iteration(original, target, config, StreamFactory(9), t)
            pcn_iteration(permuted, target, config, PermutedStreams(9, perm), t)
    np.testing.assert_array_equal(permuted.coefs, original.coefs[perm])
    np.testing.assert_array_equal(permuted.scalars, original.scalars[perm])


# ── Affine equivariance ───────────────────────────────────────────────────────

def _gaussian_2d(transform: np.ndarray, shift: np.ndarray) -> TargetProblem:
    precision = np.array([[2.0, 0.6], [0.6, 1.0]])
    inverse = np.linalg.inv(transform)

    def likelihood(state: ParameterState) -> float:
        x = inverse @ (state.scalars - shift)
        return float(-0.5 * x @ precision @ x)

    return TargetProblem(basis=bm_kl_basis(0, 1.0, 4), scalar_dim=2, likelihood=likelihood)


def test_aies_stage_is_affine_equivariant():
    transform = np.array([[2.0, 0.5], [0.3, 1.5]])
    shift = np.array([1.0, -2.0])
    base = _gaussian_2d(np.eye(2), np.zeros(2))
    image = _gaussian_2d(transform, shift)

    start = np.random.default_rng(0).standard_normal((6, 2))
    mask = base.mask(0)
    x = Ensemble.from_states(base, [ParameterState(scalars=s, coefs=[]) for s in start], mask)
    y = Ensemble.from_states(image, [ParameterState(scalars=transform @ s + shift, coefs=[]) for s in start], mask)

    streams = StreamFactory(17)
    for t in range(1, 10_001):
        flags_x = aies_sweep(x, base, 2.0, streams, t)
        flags_y = aies_sweep(y, image, 2.0, streams, t)
        np.testing.assert_array_equal(flags_x, flags_y)
        np.testing.assert_allclose(y.scalars, x.scalars @ transform.T + shift, rtol=1e-8, atol=1e-8)


# ── Stationary distributions ──────────────────────────────────────────────────

def _second_moment_within(series: np.ndarray, expected: float, bands: float = 4.0) -> None:
    kept = discard_burn_in(series, 0.1) ** 2
    se = corrected_standard_error(kept)
    assert abs(kept.mean() - expected) <= bands * se, (kept.mean(), expected, se)


@pytest.mark.parametrize("M", [0, 5])
def test_prior_invariance_with_flat_likelihood(M, advection_small):
    basis = advection_small.basis
    problem = TargetProblem(basis=basis, scalar_dim=0, likelihood=lambda s: 0.0, label="prior")
    config = SamplerConfig(M=M, L=20, iterations=5000, seed=3, omega=0.5, autotune=False)
    record = run_sampler(problem, config, ["eta_1", "eta_2", "eta_10"])

    assert (record.accepted[Stage.PCN] == 20).all()
    if M == 0:
        assert Stage.AIES not in record.accepted
    for name in ("eta_1", "eta_2", "eta_10"):
        _second_moment_within(record.observables[name], 1.0)


def test_flat_scalar_and_zero_likelihood_accept_every_proposal(advection_small):
    basis = advection_small.basis
    problem = TargetProblem(
        basis=basis, scalar_dim=1, likelihood=lambda s: 0.0, scalar_names=("c",),
        scalar_sampler=lambda rng: rng.uniform(0.0, 1.4, 1),
    )
    record = run_sampler(problem, SamplerConfig(M=0, L=20, iterations=300, seed=1, autotune=False), ["eta_1"])
    assert (record.accepted[Stage.AIES] == 20).all()
    assert (record.accepted[Stage.PCN] == 20).all()


@pytest.mark.parametrize("kind", [SamplerName.FES, SamplerName.FES_JOINT])
def test_product_gaussian_moments(kind):
    precision = (3.0, 1.0, 0.0, 0.0, 0.0, 0.0)
    problem = make_gaussian_problem(precision, scalar_sd=(2.0,))
    config = SamplerConfig(kind=kind, M=2, L=10, iterations=6000, seed=7, omega=0.5, autotune=False)
    record = run_sampler(problem, config, ["theta_1", "eta_1", "eta_2", "eta_4"])

    variances = gaussian_variances(precision)
    _second_moment_within(record.observables["theta_1"], 4.0)
    _second_moment_within(record.observables["eta_1"], variances[0])
    _second_moment_within(record.observables["eta_2"], variances[1])
    _second_moment_within(record.observables["eta_4"], variances[3])


def test_ball_initialization_stays_near_center():
    problem = make_flat_problem(scalar_dim=1, n_modes=4)
    config = _config(L=6, M=1, init="ball", center=(3.0, 1.0), radius=1e-3)
    ensemble = initialize_ensemble(problem, problem.mask(1), config, StreamFactory(0))
    assert np.abs(ensemble.scalars - 3.0).max() < 0.01
    assert np.abs(ensemble.coefs[:, 0] - 1.0).max() < 0.01
    assert np.abs(ensemble.coefs[:, 1:]).max() < 0.01
    assert math.isfinite(ensemble.block_logdensity.sum())
