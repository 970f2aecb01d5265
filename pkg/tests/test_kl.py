"""
KL bases: analytic Brownian eigenpairs, numerical kernel bases, reconstruction and
variance bookkeeping.
"""

import math

import numpy as np
import pytest

from core.errors import InvalidArgumentError, NumericalError, OutOfDomainError
from prior.kl import (
    CoefficientMask,
    KLBasis,
    bm_eigenvalues,
    bm_kl_basis,
    extend_basis,
    numerical_kl_basis,
    reconstruct,
    sample_prior_coefficients,
    truncation_error,
    variance_fraction,
)
from problems.advection import squared_exponential


# ── Brownian motion ───────────────────────────────────────────────────────────

def test_bm_leading_eigenvalues():
    assert bm_eigenvalues(2, 1.0) == pytest.approx([4 / math.pi**2, 4 / (9 * math.pi**2)], rel=1e-14)
    assert bm_eigenvalues(1, 10.0)[0] == pytest.approx(400 / math.pi**2, rel=1e-14)
    assert bm_eigenvalues(1, 1.0)[0] == pytest.approx(0.40528, abs=1e-5)


def test_bm_first_mode_matches_closed_form():
    basis = bm_kl_basis(3, 1.0, 101)
    np.testing.assert_allclose(basis.modes[0], math.sqrt(2) * np.sin(math.pi * basis.grid / 2), atol=1e-14)
    assert np.all(basis.mean == 0)


def test_bm_eigen_equation_by_quadrature():
    T = 10.0
    basis = bm_kl_basis(3, T, 2001)
    s, t = np.meshgrid(basis.grid, basis.grid, indexing="ij")
    cov = np.minimum(s, t)
    for k in range(3):
        eta = basis.modes[k]
        lhs = cov @ (basis.weights * eta)
        scale = basis.eigenvalues[k] * np.abs(eta).max()
        np.testing.assert_allclose(lhs, basis.eigenvalues[k] * eta, atol=1e-3 * scale)


def test_bm_modes_orthonormal_under_trapezoid_weights():
    basis = bm_kl_basis(100, 2.0, 101)
    np.testing.assert_allclose(basis.gram(), np.eye(100), atol=1e-8)


def test_bm_rejects_more_modes_than_grid_points():
    with pytest.raises(InvalidArgumentError):
        bm_kl_basis(11, 1.0, 10)
    with pytest.raises(InvalidArgumentError):
        bm_kl_basis(3, 0.0, 10)


# ── Numerical bases ───────────────────────────────────────────────────────────

def test_identity_kernel_gives_unit_spectrum():
    grid = np.linspace(0.0, 1.0, 12)
    basis = numerical_kl_basis(lambda x, y: (x == y).astype(float), grid, 0.0, 12)
    np.testing.assert_allclose(basis.eigenvalues, 1.0)
    np.testing.assert_allclose(np.abs(basis.modes).max(axis=1), 1.0)
    np.testing.assert_allclose(basis.gram(), np.eye(12), atol=1e-12)


def test_constant_kernel_is_rank_one():
    n, var = 30, 2.5
    basis = numerical_kl_basis(lambda x, y: var + 0.0 * x * y, np.linspace(0, 3, n), 1.0, 10)
    assert basis.n_modes == 1
    assert basis.eigenvalues[0] == pytest.approx(var * n, rel=1e-12)
    np.testing.assert_allclose(basis.modes[0], 1 / math.sqrt(n), rtol=1e-10)


def test_squared_exponential_matches_dense_solver():
    grid = np.linspace(0.0, 10.0, 200)
    basis = numerical_kl_basis(squared_exponential, grid, 100.0, 20)
    oracle = np.sort(np.linalg.eigvalsh(squared_exponential(grid[:, None], grid[None, :])))[::-1][:20]
    np.testing.assert_allclose(basis.eigenvalues, oracle, rtol=1e-8, atol=1e-10 * oracle[0])
    np.testing.assert_allclose(basis.gram(), np.eye(basis.n_modes), atol=1e-8)
    assert np.all(np.diff(basis.eigenvalues) <= 0)


def test_non_symmetric_kernel_raises():
    with pytest.raises(NumericalError):
        numerical_kl_basis(lambda x, y: x - 2 * y, np.linspace(0, 1, 5), 0.0, 3)


def test_non_finite_kernel_raises():
    with pytest.raises(NumericalError):
        numerical_kl_basis(lambda x, y: 1.0 / (x - y), np.linspace(0, 1, 5), 0.0, 3)


def test_numerical_basis_rejects_unsorted_grid():
    with pytest.raises(InvalidArgumentError):
        numerical_kl_basis(squared_exponential, np.array([0.0, 2.0, 1.0]), 0.0, 2)


# ── Sampling and reconstruction ───────────────────────────────────────────────


def test_extension_keeps_spectrum_and_original_values():
    grid = np.linspace(0.0, 10.0, 101)
    basis = numerical_kl_basis(squared_exponential, grid, 100.0, 40)
    wide = extend_basis(basis, squared_exponential, -0.75)
    added = wide.n_grid - basis.n_grid
    assert added == 8
    assert wide.grid[0] <= -0.75 < wide.grid[1]
    np.testing.assert_allclose(np.diff(wide.grid), 0.1, rtol=1e-9)
    np.testing.assert_array_equal(wide.modes[:, added:], basis.modes)
    np.testing.assert_array_equal(wide.eigenvalues, basis.eigenvalues)
    assert wide.total_variance == basis.total_variance
    assert np.all(wide.weights[:added] == 0)
    np.testing.assert_allclose(wide.gram(), np.eye(wide.n_modes), atol=1e-9)
    assert np.all(wide.mean == 100.0)


def test_continued_field_has_kernel_variance_near_the_edge():
    grid = np.linspace(0.0, 10.0, 101)
    wide = extend_basis(numerical_kl_basis(squared_exponential, grid, 0.0, 101), squared_exponential, -0.5)
    added = wide.n_grid - 101
    variance = np.sum(wide.scaled_modes**2, axis=0)
    assert np.all(variance <= 130.0 * (1 + 1e-6))
    assert variance[added - 1] == pytest.approx(130.0, rel=0.05)
    # no kink at the old edge
    steps = np.abs(np.diff(wide.scaled_modes[:5], axis=1))
    assert np.all(steps[:, added - 1] <= 2 * steps[:, added:].max(axis=1))


def test_extension_is_a_no_op_inside_the_grid():
    basis = numerical_kl_basis(squared_exponential, np.linspace(0.0, 1.0, 11), 0.0, 5)
    assert extend_basis(basis, squared_exponential, 0.0) is basis


def test_sample_prior_coefficients(rng):
    assert sample_prior_coefficients(0, rng).shape == (0,)
    draws = sample_prior_coefficients(100_000, rng)
    assert abs(draws.mean()) < 4 / math.sqrt(draws.size)


def test_reconstruct_cases():
    basis = bm_kl_basis(4, 1.0, 11)
    np.testing.assert_array_equal(reconstruct(basis, np.zeros(4)), basis.mean)
    np.testing.assert_allclose(
        reconstruct(basis, np.array([1.0, 0.0])),
        basis.mean + math.sqrt(basis.eigenvalues[0]) * basis.modes[0],
    )
    coefs = np.array([0.3, -1.2, 0.5, 2.0])
    values = reconstruct(basis, coefs)
    midpoint = 0.5 * (basis.grid[3] + basis.grid[4])
    assert reconstruct(basis, coefs, np.array([midpoint]))[0] == pytest.approx(0.5 * (values[3] + values[4]))


def test_reconstruct_errors():
    basis = bm_kl_basis(4, 1.0, 11)
    with pytest.raises(OutOfDomainError):
        reconstruct(basis, np.zeros(4), np.array([1.5]))
    with pytest.raises(InvalidArgumentError):
        reconstruct(basis, np.zeros(5))


def test_reconstructed_variance_matches_truncated_kernel(rng):
    basis = bm_kl_basis(40, 1.0, 41)
    n = 10_000
    fields = np.array([reconstruct(basis, sample_prior_coefficients(40, rng)) for _ in range(n)])
    expected = np.sum(basis.eigenvalues[:, None] * basis.modes**2, axis=0)
    empirical = fields.var(axis=0)
    se = expected * math.sqrt(2.0 / n)
    inside = np.abs(empirical - expected) <= 4 * se + 1e-14
    assert inside.all()


# ── Variance bookkeeping ──────────────────────────────────────────────────────

def test_variance_fraction_of_brownian_motion():
    basis = bm_kl_basis(5, 1.0, 16)
    assert variance_fraction(basis, 5) == pytest.approx(0.9595, abs=5e-4)
    assert variance_fraction(basis, 0) == 0.0
    assert bm_eigenvalues(5000, 1.0).sum() / 0.5 >= 0.9998
    with pytest.raises(InvalidArgumentError):
        variance_fraction(basis, 6)


@pytest.mark.parametrize("M", [1, 5, 20])
def test_truncation_error_matches_tail_eigenvalues(M, rng):
    basis = bm_kl_basis(100, 1.0, 101)
    errors = np.array([truncation_error(basis, rng.standard_normal(100), M) for _ in range(4000)])
    expected = basis.eigenvalues[M:].sum()
    se = errors.std(ddof=1) / math.sqrt(errors.size)
    assert abs(errors.mean() - expected) <= 4 * se


def test_coefficient_mask_partitions_indices():
    mask = CoefficientMask(M=3, total=10)
    idx = np.arange(10)
    assert idx[mask.low].tolist() == [0, 1, 2]
    assert idx[mask.high].tolist() == list(range(3, 10))
    assert mask.n_high == 7
    assert CoefficientMask(M=10, total=10).n_high == 0
    with pytest.raises(InvalidArgumentError):
        CoefficientMask(M=11, total=10)


def test_basis_validates_shapes():
    grid = np.linspace(0, 1, 5)
    with pytest.raises(InvalidArgumentError):
        KLBasis(
            grid=grid, mean=np.zeros(5), eigenvalues=np.array([1.0, 2.0]),
            modes=np.zeros((2, 5)), domain_length=1.0, weights=np.ones(5), total_variance=3.0,
        )
