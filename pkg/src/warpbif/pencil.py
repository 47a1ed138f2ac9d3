"""Solvers for the symmetric-definite pencils produced by form assembly.

Matrices are tridiagonal; full spectra go through the LAPACK generalized
symmetric-definite driver (Cholesky reduction to a standard problem), and
repeated linear solves against a fixed SPD matrix use its banded Cholesky
factor.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import SolverFailure


def eigvals_pencil(stiffness: np.ndarray, mass: np.ndarray) -> np.ndarray:
    """All eigenvalues of stiffness v = mu mass v, ascending."""
    try:
        return scipy.linalg.eigh(
            np.asarray(stiffness), np.asarray(mass), eigvals_only=True, check_finite=False
        )
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError, ValueError) as exc:
        raise SolverFailure(f"generalized eigensolve failed: {exc}") from exc


def _upper_bands(matrix: np.ndarray) -> np.ndarray:
    """Tridiagonal symmetric matrix in LAPACK upper banded storage."""
    n = matrix.shape[0]
    bands = np.zeros((2, n))
    bands[1] = np.diagonal(matrix)
    bands[0, 1:] = np.diagonal(matrix, 1)
    return bands

def banded_cholesky(matrix: np.ndarray) -> np.ndarray:
    """Banded Cholesky factor of an SPD tridiagonal matrix."""
    try:
        return scipy.linalg.cholesky_banded(_upper_bands(matrix), check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(f"banded Cholesky failed: {exc}") from exc


def banded_solve(factor: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return scipy.linalg.cho_solve_banded((factor, False), rhs, check_finite=False)


def smallest_eigenpair(
    stiff: np.ndarray,
    mass: np.ndarray,
    rel_tol: float = 1e-12,
    max_iter: int = 500,
) -> tuple[float, np.ndarray]:
    """Smallest eigenpair of an SPD pencil by zero-shift inverse iteration.

    Iterates y <- stiff^-1 (mass x) with mass-norm normalization until the
    Rayleigh quotient settles to ``rel_tol`` (relative), then returns the
    quotient and the mass-normalized eigenvector.
    """
    factor = banded_cholesky(stiff)
    x = np.ones(stiff.shape[0])
    x /= np.sqrt(x @ (mass @ x))
    rho_prev = float(x @ (stiff @ x))
    for _ in range(max_iter):
        y = banded_solve(factor, mass @ x)
        y /= np.sqrt(y @ (mass @ y))
        rho = float(y @ (stiff @ y))
        x = y
        if abs(rho - rho_prev) <= rel_tol * abs(rho):
            return rho, x
        rho_prev = rho
    raise SolverFailure(
        f"inverse iteration did not converge within {max_iter} iterations "
        f"(last Rayleigh quotient {rho_prev:.17g})"
    )
