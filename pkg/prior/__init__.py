from prior.kl import (
    CoefficientMask,
    KLBasis,
    bm_eigenvalues,
    bm_kl_basis,
    grid_values,
    numerical_kl_basis,
    reconstruct,
    sample_prior_coefficients,
    truncation_error,
    variance_fraction,
)

__all__ = [
    "CoefficientMask",
    "KLBasis",
    "bm_eigenvalues",
    "bm_kl_basis",
    "grid_values",
    "numerical_kl_basis",
    "reconstruct",
    "sample_prior_coefficients",
    "truncation_error",
    "variance_fraction",
]
