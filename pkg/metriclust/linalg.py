"""
Dense linear algebra for the small dimensions used in clustering
(d up to about 20): means, covariances, inverses and symmetric
decompositions. Every function is pure and returns new arrays.
"""

# pylint: disable=C0103:invalid-name

import logging
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg as sla

from metriclust.errors import DataError, NumericalError, SingularMatrixError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
# Cholesky pivots (squared) at or below this fraction of the largest diagonal
# entry mark a matrix as singular.
PIVOT_RTOL = 1e-10


def as_matrix(points: ArrayLike) -> NDArray[np.float64]:
    """Return `points` as a 2-D float64 array, one row per observation."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise DataError(f"expected a 2-D point set, got {arr.ndim} dimensions")
    if not np.all(np.isfinite(arr)):
        raise DataError("point set contains non-finite values")
    return arr


def _square(m: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DataError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalError("matrix contains non-finite entries")
    return arr


def is_symmetric(m: ArrayLike, tol: float = SYMMETRY_TOL) -> bool:
    """|A_ij - A_ji| <= tol * max|A| for every entry."""
    arr = _square(m)
    scale = np.max(np.abs(arr)) if arr.size else 0.0
    return bool(np.all(np.abs(arr - arr.T) <= tol * scale))


def _symmetric(m: ArrayLike) -> NDArray[np.float64]:
    arr = _square(m)
    if not is_symmetric(arr):
        raise NumericalError("matrix is not symmetric")
    return arr


def mean(points: ArrayLike) -> NDArray[np.float64]:
    """
    Column means of a point set.

    Raises
    ------
    DataError
        If the point set is empty.
    """
    arr = as_matrix(points)
    if arr.shape[0] == 0:
        raise DataError("empty point set")
    return arr.mean(axis=0)


def covariance(points: ArrayLike) -> NDArray[np.float64]:
    """
    Unbiased sample covariance (divisor n-1) of a point set, symmetrised so
    that round-off never breaks exact symmetry.

    Raises
    ------
    DataError
        If fewer than two points are given.
    """
    arr = as_matrix(points)
    n = arr.shape[0]
    if n < 2:
        raise DataError("insufficient points for covariance")
    centered = arr - arr.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return (cov + cov.T) / 2.0


def invert_spd(m: ArrayLike) -> NDArray[np.float64]:
    """
    Inverse of a symmetric positive-definite matrix through its Cholesky
    factor.

    Raises
    ------
    SingularMatrixError
        When a squared pivot falls to PIVOT_RTOL * max(diag) or below, i.e.
        the matrix is singular or not positive definite to working precision.
    """
    arr = _symmetric(m)
    d = arr.shape[0]
    if d == 0:
        return arr.copy()
    try:
        factor, lower = sla.cho_factor(arr, lower=True)
    except sla.LinAlgError as exc:
        raise SingularMatrixError("singular matrix") from exc

    pivots = np.diag(factor) ** 2
    threshold = PIVOT_RTOL * np.max(np.abs(np.diag(arr)))
    if np.min(pivots) <= threshold:
        raise SingularMatrixError("singular matrix")

    inv = sla.cho_solve((factor, lower), np.eye(d))
    return (inv + inv.T) / 2.0


def symmetric_eigen(m: ArrayLike) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Eigen-decomposition of a symmetric matrix.

    Eigenvalues are returned in descending order (ties keep the original
    order of `numpy.linalg.eigh`), and each eigenvector column is signed so
    that its largest-magnitude entry is positive.

    Returns
    -------
    eigenvalues: ndarray of shape (d,)
    eigenvectors: ndarray of shape (d, d), orthonormal columns
    """
    arr = _symmetric(m)
    values, vectors = np.linalg.eigh(arr)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]

    for j in range(vectors.shape[1]):
        pivot = np.argmax(np.abs(vectors[:, j]))
        if vectors[pivot, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return values, vectors


def _cutoff(values: NDArray[np.float64], tol: float = None) -> float:
    d = values.shape[0]
    lam_max = np.max(np.abs(values)) if d else 0.0
    if tol is None:
        tol = d * np.finfo(np.float64).eps
    return tol * lam_max


def numerical_rank(m: ArrayLike, tol: float = None) -> int:
    """Number of eigenvalues above `tol * lambda_max`."""
    values, _ = symmetric_eigen(m)
    return int(np.sum(values > _cutoff(values, tol)))


def pseudo_inverse(m: ArrayLike, tol: float = None) -> NDArray[np.float64]:
    """
    Moore-Penrose pseudo-inverse of a symmetric matrix.

    Parameters
    ----------
    m: array-like, shape (d, d)
        Symmetric matrix.
    tol: float
        Relative threshold. Eigenvalues not above `tol * lambda_max` are
        treated as zero. Defaults to d * machine epsilon.

    Raises
    ------
    NumericalError
        If the input is not symmetric.
    """
    values, vectors = symmetric_eigen(m)
    cutoff = _cutoff(values, tol)
    keep = values > cutoff
    inv_values = np.zeros_like(values)
    inv_values[keep] = 1.0 / values[keep]
    pinv = (vectors * inv_values) @ vectors.T
    return (pinv + pinv.T) / 2.0


def cholesky(m: ArrayLike) -> NDArray[np.float64]:
    """
    Lower-triangular L with L @ L.T == m, with a positive diagonal.

    Raises
    ------
    NumericalError
        If the matrix is not positive definite.
    """
    arr = _symmetric(m)
    try:
        return np.linalg.cholesky(arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("matrix not positive definite") from exc


def eigen_factor(m: ArrayLike, tol: float = 1e-10) -> NDArray[np.float64]:
    """
    A factor F with F @ F.T == m for symmetric positive semi-definite
    matrices, including singular ones where Cholesky fails.

    Raises
    ------
    NumericalError
        If an eigenvalue is below -tol (the matrix is not PSD).
    """
    values, vectors = symmetric_eigen(m)
    if values.size and values[-1] < -tol:
        raise NumericalError(
            f"matrix is not positive semi-definite (eigenvalue {values[-1]:.3g})")
    # eigenvalues at round-off level are exact zeros of a singular matrix
    values = np.where(values > _cutoff(values), values, 0.0)
    return vectors * np.sqrt(values)
