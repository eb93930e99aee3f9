"""
Standardization (z-scores with the n-1 divisor) and principal component
analysis. Clustering always runs on the full standardized data; PCA is only
used to project it to two dimensions for plotting and to report the
explained variance.
"""

# pylint: disable=C0103:invalid-name

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from metriclust.errors import ConfigError, DataError
from metriclust.linalg import as_matrix, covariance, symmetric_eigen

logger = logging.getLogger(__name__)

# Eigenvalues of a covariance matrix above this negative value are round-off.
EIGEN_FLOOR = -1e-10


@dataclass(eq=False)
class StandardizationParams:
    """
    Column means and standard deviations used to standardize a dataset.
    Columns flagged in `zero_variance` are only centred.
    """
    mean: NDArray[np.float64]
    sd: NDArray[np.float64]
    zero_variance: NDArray[np.bool_]

    def _scale(self) -> NDArray[np.float64]:
        return np.where(self.zero_variance, 1.0, self.sd)

    def transform(self, data: ArrayLike) -> NDArray[np.float64]:
        return (as_matrix(data) - self.mean) / self._scale()

    def inverse_transform(self, data: ArrayLike) -> NDArray[np.float64]:
        return as_matrix(data) * self._scale() + self.mean


def standardize(data: ArrayLike) -> Tuple[NDArray[np.float64], StandardizationParams]:
    """
    Centre every column and scale it to unit sample variance.

    Raises
    ------
    DataError
        If fewer than two rows are given.
    """
    arr = as_matrix(data)
    if arr.shape[0] < 2:
        raise DataError("standardization needs at least two rows")
    mu = arr.mean(axis=0)
    sd = arr.std(axis=0, ddof=1)
    zero = sd <= np.finfo(np.float64).eps * np.maximum(np.abs(mu), 1.0)
    if np.any(zero):
        logger.warning(
            "Columns %s have zero variance; they are centred but not scaled",
            np.flatnonzero(zero).tolist())
    params = StandardizationParams(mu, sd, zero)
    return params.transform(arr), params


@dataclass(eq=False)
class PcaModel:
    """
    Principal axes of a dataset. `components` holds one unit eigenvector of
    the covariance matrix per column, ordered by decreasing eigenvalue.
    """
    mean: NDArray[np.float64]
    components: NDArray[np.float64]
    eigenvalues: NDArray[np.float64]
    explained_variance_ratio: NDArray[np.float64]

    @property
    def n_features(self) -> int:
        return self.components.shape[0]

    def cumulative_ratio(self) -> NDArray[np.float64]:
        return np.cumsum(self.explained_variance_ratio)


def pca_fit(data: ArrayLike) -> PcaModel:
    """
    Fit PCA on the covariance of `data`. The data is expected to be
    standardized already, which makes this a PCA on the correlation matrix.

    Raises
    ------
    DataError
        If the data has no variance at all.
    """
    arr = as_matrix(data)
    values, vectors = symmetric_eigen(covariance(arr))
    if values.size and values[-1] < EIGEN_FLOOR:
        logger.warning("Covariance eigenvalue %.3g clipped to zero", values[-1])
    values = np.clip(values, 0.0, None)
    total = values.sum()
    if total <= 0:
        raise DataError("data has zero total variance")
    return PcaModel(arr.mean(axis=0), vectors, values, values / total)


def pca_project(model: PcaModel, data: ArrayLike, n_components: int = 2) -> NDArray[np.float64]:
    """
    Scores of `data` on the leading `n_components` principal axes.

    Raises
    ------
    ConfigError
        If more components than features are requested.
    """
    if n_components < 1 or n_components > model.n_features:
        raise ConfigError(
            f"n_components must lie in [1, {model.n_features}], got {n_components}")
    arr = as_matrix(data)
    if arr.shape[1] != model.n_features:
        raise DataError(
            f"model has {model.n_features} features, data has {arr.shape[1]}")
    return (arr - model.mean) @ model.components[:, :n_components]


def pca_reconstruct(model: PcaModel, scores: ArrayLike) -> NDArray[np.float64]:
    """Map scores back to the original coordinates."""
    s = as_matrix(scores)
    m = s.shape[1]
    return s @ model.components[:, :m].T + model.mean
