"""Python bindings for the lapmm C++ library."""

from ._lapmm import (
    Laplacian,
    LapmmError,
    cov_block_update,
    diagonal_majorizer,
    grid_laplacian,
    laplacian,
    regularization_path,
    solve_covariance,
    solve_portfolio,
    spectral_majorizer,
    symmetric_eigen,
)

__all__ = [
    "Laplacian",
    "LapmmError",
    "cov_block_update",
    "diagonal_majorizer",
    "grid_laplacian",
    "laplacian",
    "regularization_path",
    "solve_covariance",
    "solve_portfolio",
    "spectral_majorizer",
    "symmetric_eigen",
]
