from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from ._constants import JACOBI_MAX_SWEEPS
from ._constants import JACOBI_OFFDIAG_TOL
from ._errors import ConvergenceError
from ._errors import DomainError

__all__ = ["jacobi_eigh"]

logger = logging.getLogger(__name__)

_SYMMETRY_RTOL = 1e-12


def _off_norm(a: NDArray[np.float64]) -> float:
    off = a - np.diag(np.diag(a))
    return math.sqrt(float(np.sum(off * off)))


def _rotate(a: NDArray[np.float64], v: NDArray[np.float64], p: int, q: int) -> None:
    """Zero a[p, q] with one Jacobi rotation, in place."""
    apq = a[p, q]
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q

    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q

    a[p, q] = a[q, p] = 0.0

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def jacobi_eigh(
    matrix: ArrayLike,
    *,
    tol: float = JACOBI_OFFDIAG_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Eigen-decompose a small real symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit every (p, q) pair in row order until the off-diagonal Frobenius
    norm is at most tol times the matrix norm.

    Returns:
        (eigenvalues ascending, eigenvectors as matching columns)

    Raises:
        DomainError: When the matrix is not square, finite and symmetric
        ConvergenceError: When max_sweeps pass without convergence
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"Expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("Matrix has non-finite entries")

    n = a.shape[0]
    scale = float(np.linalg.norm(a))
    if float(np.max(np.abs(a - a.T), initial=0.0)) > _SYMMETRY_RTOL * max(scale, 1.0):
        raise DomainError("Matrix is not symmetric")

    a = 0.5 * (a + a.T)
    v = np.eye(n)

    for sweep in range(max_sweeps):
        if _off_norm(a) <= tol * scale:
            logger.debug("Jacobi converged after %d sweeps", sweep)
            break

        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] != 0.0:
                    _rotate(a, v, p, q)
    else:
        if _off_norm(a) > tol * scale:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")

    return eigenvalues[order], v[:, order]
