import math

import numpy as np
import pytest

from core.errors import InvalidArgumentError
from prior.kl import bm_kl_basis, grid_values
from problems import make_problem
from problems.langevin import (
    ALPHA_RATE,
    SIGMA_RATE,
    exponential_log_prior,
    langevin_forward,
    langevin_log_prior,
    make_langevin_problem,
    path_quantiles,
)
from target.problem import ParameterState

BASIS = bm_kl_basis(200, 10.0, 201)


def test_no_noise_no_motion(rng):
    np.testing.assert_array_equal(langevin_forward(3.0, 0.0, rng.standard_normal(200), BASIS), 0.0)


def test_free_particle_matches_cumulative_sums(rng):
    coefs = rng.standard_normal(200)
    dt = 0.05
    dW = np.diff(grid_values(BASIS, coefs))
    momentum = np.concatenate([[0.0], np.cumsum(dW)])
    expected = np.concatenate([[0.0], np.cumsum(momentum[:-1] * dt)])
    np.testing.assert_allclose(langevin_forward(0.0, 1.0, coefs, BASIS), expected, rtol=1e-10, atol=1e-10)


def test_deterministic_oscillator_matches_recurrence():
    dt = 0.05
    x, p = 1.0, 0.0
    expected = [x]
    for _ in range(200):
        x, p = x + p * dt, p - x * dt
        expected.append(x)
    path = langevin_forward(1.0, 0.0, np.zeros(200), BASIS, x0=1.0, p0=0.0)
    np.testing.assert_allclose(path, expected, rtol=1e-11, atol=1e-11)


def test_stochastic_part_scales_with_sigma(rng):
    coefs = rng.standard_normal(200)
    drift = langevin_forward(2.0, 0.0, coefs, BASIS, x0=0.5)
    one = langevin_forward(2.0, 0.7, coefs, BASIS, x0=0.5) - drift
    two = langevin_forward(2.0, 1.4, coefs, BASIS, x0=0.5) - drift
    np.testing.assert_allclose(two, 2 * one, rtol=1e-10, atol=1e-10)


def test_negative_rates_raise():
    with pytest.raises(InvalidArgumentError):
        langevin_forward(-1.0, 1.0, np.zeros(200), BASIS)


def test_scalar_prior():
    assert exponential_log_prior(0.0, ALPHA_RATE) == pytest.approx(math.log(12) - 12)
    expected = math.log(12) - 12 + exponential_log_prior(-1.0, SIGMA_RATE)
    assert langevin_log_prior(np.array([0.0, -1.0])) == pytest.approx(expected)
    assert langevin_log_prior(np.array([800.0, 0.0])) == -math.inf


def test_problem_layout(langevin_small):
    assert langevin_small.observations.shape == (5,)
    assert langevin_small.dt == pytest.approx(0.05)
    assert langevin_small.basis.n_modes == 200
    assert langevin_small._obs_idx.tolist() == [20, 60, 100, 140, 180]
    columns, rows = langevin_small.dataset()
    assert columns == ["t", "observed", "noiseless"]
    assert rows[0, 2] == pytest.approx(-0.7568, abs=1e-4)
    target = langevin_small.target()
    assert target.scalar_names == ("log_alpha", "log_sigma")
    assert make_problem("langevin", seed=0).observations.tolist() == langevin_small.observations.tolist()


def test_likelihood_uses_path_at_observation_times(langevin_small, rng):
    coefs = rng.standard_normal(200)
    state = ParameterState(scalars=np.log([4.0, 0.5]), coefs=coefs)
    path = langevin_forward(4.0, 0.5, coefs, langevin_small.basis)
    residual = langevin_small.observations - path[[20, 60, 100, 140, 180]]
    assert langevin_small.log_likelihood(state) == pytest.approx(-0.5 * np.sum(residual**2) / 0.09)


def test_exploding_path_has_minus_infinite_likelihood(langevin_small):
    state = ParameterState(scalars=[600.0, 0.0], coefs=np.ones(200))
    assert langevin_small.log_likelihood(state) == -math.inf


def test_noise_over_seeds():
    residuals = np.concatenate([
        make_langevin_problem(seed).observations - np.sin(4 * np.array([1.0, 3, 5, 7, 9]))
        for seed in range(200)
    ])
    se_var = 0.09 * math.sqrt(2.0 / residuals.size)
    assert residuals.var() == pytest.approx(0.09, abs=4 * se_var)


def test_path_quantiles_are_ordered(langevin_small):
    target = langevin_small.target()
    gen = np.random.default_rng(3)
    states = [
        ParameterState(scalars=target.sample_scalars(gen), coefs=gen.standard_normal(200)) for _ in range(400)
    ]
    mean, quantiles = path_quantiles(langevin_small, states)
    assert mean.shape == (201,)
    assert quantiles.shape == (201, 5)
    assert np.all(np.diff(quantiles, axis=1) >= 0)
    # every path starts at X_0 = 0
    np.testing.assert_array_equal(quantiles[0], 0.0)
    paths = np.array([langevin_small.path(s) for s in states])
    np.testing.assert_allclose(mean, paths.mean(axis=0))
    np.testing.assert_allclose(quantiles[:, 2], np.median(paths, axis=0))


def test_path_quantiles_of_one_state_collapse(langevin_small):
    state = ParameterState(scalars=np.log([4.0, 0.5]), coefs=np.ones(200))
    mean, quantiles = path_quantiles(langevin_small, [state], levels=(0.1, 0.9))
    np.testing.assert_allclose(quantiles, np.column_stack([mean, mean]))
    with pytest.raises(InvalidArgumentError):
        path_quantiles(langevin_small, [])
    with pytest.raises(InvalidArgumentError):
        path_quantiles(langevin_small, [state], levels=(0.5, 1.5))
