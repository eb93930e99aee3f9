"""
Distance measures for clustering: the Minkowski family (Euclidean,
Manhattan, Chebyshev/Maximum and general p) between points, and the
(pseudo-)Mahalanobis distance between a point and a cluster summary.
"""

# pylint: disable=C0103:invalid-name

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import cdist

from metriclust.errors import ConfigError, DataError, NumericalError

# Quadratic forms below this are round-off; anything more negative is a bug.
NEGATIVE_QF_TOL = 1e-10


class MetricKind(str, Enum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    CHEBYSHEV = "maximum"
    MINKOWSKI = "minkowski"
    MAHALANOBIS = "mahalanobis"


_ALIASES = {
    "euclidean": MetricKind.EUCLIDEAN,
    "manhattan": MetricKind.MANHATTAN,
    "maximum": MetricKind.CHEBYSHEV,
    "chebyshev": MetricKind.CHEBYSHEV,
    "mahalanobis": MetricKind.MAHALANOBIS,
}

_SCIPY_NAMES = {
    MetricKind.EUCLIDEAN: "euclidean",
    MetricKind.MANHATTAN: "cityblock",
    MetricKind.CHEBYSHEV: "chebyshev",
    MetricKind.MINKOWSKI: "minkowski",
}


@dataclass(frozen=True)
class Metric:
    """
    A distance measure. `p` is only meaningful (and required) for
    Minkowski, where it must be at least 1.
    """
    kind: MetricKind = MetricKind.EUCLIDEAN
    p: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.kind, MetricKind):
            object.__setattr__(self, "kind", MetricKind(self.kind))
        if self.kind is MetricKind.MINKOWSKI:
            if self.p is None or not np.isfinite(self.p) or self.p < 1:
                raise ConfigError(f"Minkowski distance requires p >= 1, got {self.p}")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise ConfigError(f"parameter p is only valid for minkowski, not {self.kind.value}")

    @classmethod
    def parse(cls, name: str) -> "Metric":
        """
        Build a metric from its command-line spelling:
        `euclidean | manhattan | maximum | minkowski:<p> | mahalanobis`
        (`chebyshev` is accepted for `maximum`).
        """
        text = name.strip().lower()
        head, sep, value = text.partition(":")
        if head == "minkowski":
            if not sep or not value:
                raise ConfigError(f"metric '{name}' must be written minkowski:<p>")
            try:
                p = float(value)
            except ValueError as exc:
                raise ConfigError(f"invalid Minkowski parameter in '{name}'") from exc
            return cls(MetricKind.MINKOWSKI, p)
        if text not in _ALIASES:
            raise ConfigError(
                f"unknown metric '{name}'; expected one of "
                "euclidean, manhattan, maximum, minkowski:<p>, mahalanobis")
        return cls(_ALIASES[text])

    @classmethod
    def euclidean(cls) -> "Metric":
        return cls(MetricKind.EUCLIDEAN)

    @property
    def is_mahalanobis(self) -> bool:
        return self.kind is MetricKind.MAHALANOBIS

    def __str__(self) -> str:
        if self.kind is MetricKind.MINKOWSKI:
            return f"minkowski:{self.p:g}"
        return self.kind.value


@dataclass(frozen=True, eq=False)
class ClusterStats:
    """
    Summary of one cluster used by the Mahalanobis distance. `cov_inv` is
    the ordinary inverse of `cov`, or its pseudo-inverse when
    `rank_deficient` is set.
    """
    mean: NDArray[np.float64]
    cov: NDArray[np.float64]
    cov_inv: NDArray[np.float64]
    rank_deficient: bool
    n_members: int

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def _vector(x: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"expected a vector, got shape {arr.shape}")
    return arr


def _check_metric(metric: Metric):
    if metric.is_mahalanobis:
        raise ConfigError(
            "the mahalanobis distance needs cluster statistics; use mahalanobis_sq")


def distance(x: ArrayLike, y: ArrayLike, metric: Metric = Metric()) -> float:
    """
    Distance between two points under a non-Mahalanobis metric.

    Raises
    ------
    DataError
        If the points have different dimensions.
    ConfigError
        If the metric is Mahalanobis.
    """
    _check_metric(metric)
    xv, yv = _vector(x), _vector(y)
    if xv.shape != yv.shape:
        raise DataError(f"dimension mismatch: {xv.shape[0]} != {yv.shape[0]}")
    return float(pairwise_distances(xv[None, :], yv[None, :], metric)[0, 0])


def pairwise_distances(
        data: ArrayLike,
        centers: ArrayLike,
        metric: Metric = Metric()) -> NDArray[np.float64]:
    """
    Matrix of distances between every row of `data` (n x d) and every row
    of `centers` (k x d), shape (n, k).
    """
    _check_metric(metric)
    a = np.asarray(data, dtype=np.float64)
    b = np.asarray(centers, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DataError(f"dimension mismatch: {a.shape} against {b.shape}")
    name = _SCIPY_NAMES[metric.kind]
    if metric.kind is MetricKind.MINKOWSKI:
        return cdist(a, b, metric=name, p=metric.p)
    return cdist(a, b, metric=name)


def _clamp(values: NDArray[np.float64]) -> NDArray[np.float64]:
    if np.any(values < -NEGATIVE_QF_TOL):
        raise NumericalError(
            f"negative Mahalanobis quadratic form ({values.min():.3g})")
    return np.clip(values, 0.0, None)


def mahalanobis_sq_many(data: ArrayLike, stats: ClusterStats) -> NDArray[np.float64]:
    """Squared Mahalanobis distance of every row of `data` to a cluster."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != stats.dim:
        raise DataError(f"dimension mismatch: {arr.shape} against {stats.dim}")
    diff = arr - stats.mean
    values = np.einsum("ij,jk,ik->i", diff, stats.cov_inv, diff)
    return _clamp(values)


def mahalanobis_sq(x: ArrayLike, stats: ClusterStats) -> float:
    """
    (x - mu)^T W^-1 (x - mu), with W^-1 the stored (pseudo-)inverse. Tiny
    negative round-off is clamped to zero.
    """
    xv = _vector(x)
    if xv.shape[0] != stats.dim:
        raise DataError(f"dimension mismatch: {xv.shape[0]} != {stats.dim}")
    return float(mahalanobis_sq_many(xv[None, :], stats)[0])
