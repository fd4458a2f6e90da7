"""Penalized panel quantile regression: l1 on coefficients, nuclear norm on a latent matrix."""

from ._lpqr import (
    RNG_ALGORITHM,
    LpqrError,
    QuantileFit,
    cli,
    extract_factors,
    fit,
    grid_search,
    procrustes_distance,
    prox_pinball,
    quantile_error,
    simulate,
    singular_value_threshold,
    soft_threshold,
    solve_zw_joint,
    theta_error_scaled,
    variance_explained,
)

__all__ = [
    "RNG_ALGORITHM",
    "LpqrError",
    "QuantileFit",
    "cli",
    "extract_factors",
    "fit",
    "grid_search",
    "procrustes_distance",
    "prox_pinball",
    "quantile_error",
    "simulate",
    "singular_value_threshold",
    "soft_threshold",
    "solve_zw_joint",
    "theta_error_scaled",
    "variance_explained",
]
