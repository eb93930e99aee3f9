"""
Two-phase Mahalanobis clustering: a Euclidean K-means run gives the
initial partition, then points are repeatedly reassigned to the cluster
with the smallest squared Mahalanobis distance, recomputing each cluster's
mean and covariance between iterations.
"""

# pylint: disable=C0103:invalid-name, R0902:too-many-instance-attributes
# pylint: disable=R0914:too-many-locals

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from metriclust.errors import ConfigError, DataError, SingularMatrixError
from metriclust.kmeans import (
    ClusteringResult,
    KMeansConfig,
    cluster_means,
    kmeans,
    repair_empty_clusters,
    within_ss,
)
from metriclust.linalg import as_matrix, covariance, invert_spd, pseudo_inverse
from metriclust.metrics import ClusterStats, Metric, MetricKind, mahalanobis_sq_many

logger = logging.getLogger(__name__)


@dataclass
class MahaConfig:
    """
    Parameters of the two-phase procedure. The defaults follow the
    reference experiments: 50 Euclidean iterations and starts, then up to
    100 Mahalanobis iterations.

    Parameters
    ----------
    k: int
        Number of clusters.
    euclid_iter: int
        Iteration cap of the Euclidean phase.
    euclid_starts: int
        Restarts of the Euclidean phase.
    maha_iter: int
        Maximum number of Mahalanobis reassignment iterations. The phase
        stops early once the labels no longer change.
    seed: int
        Seed of the Euclidean phase (the Mahalanobis phase is deterministic).
    min_cluster_for_cov: int
        Clusters with fewer members use the pseudo-inverse of their
        covariance. None means d + 2.
    n_jobs: int
        Threads for the Euclidean restarts.
    """
    k: int
    euclid_iter: int = 50
    euclid_starts: int = 50
    maha_iter: int = 100
    seed: int = 0
    min_cluster_for_cov: Optional[int] = None
    n_jobs: Optional[int] = None

    def validate(self) -> List[str]:
        problems = []
        for name in ("k", "euclid_iter", "euclid_starts", "maha_iter"):
            value = getattr(self, name)
            if value < 1:
                problems.append(f"{name} must be >= 1, got {value}")
        if self.min_cluster_for_cov is not None and self.min_cluster_for_cov < 1:
            problems.append(
                f"min_cluster_for_cov must be >= 1, got {self.min_cluster_for_cov}")
        if self.seed < 0 or self.seed >= 2 ** 64:
            problems.append(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.n_jobs is not None and self.n_jobs < 1:
            problems.append(f"n_jobs must be >= 1, got {self.n_jobs}")
        return problems

    def euclidean_phase(self) -> KMeansConfig:
        return KMeansConfig(
            k=self.k,
            max_iter=self.euclid_iter,
            n_start=self.euclid_starts,
            metric=Metric.euclidean(),
            seed=self.seed,
            n_jobs=self.n_jobs)


@dataclass
class MahaIteration:
    iteration: int
    changed: int
    pseudo_inverse_clusters: List[int]
    repaired_clusters: List[int]


@dataclass
class MahaResult(ClusteringResult):
    """
    Result of the two-phase procedure. The inherited fields describe the
    final partition; `phase1` is the Euclidean partition it started from.
    """
    phase1: Optional[ClusteringResult] = None
    history: List[MahaIteration] = field(default_factory=list)

    @property
    def repaired(self) -> bool:
        return any(step.repaired_clusters for step in self.history)


def _stats_for(members: NDArray, min_cluster_for_cov: int) -> ClusterStats:
    n, d = members.shape
    mu = members.mean(axis=0)
    cov = covariance(members) if n >= 2 else np.zeros((d, d))
    if n >= min_cluster_for_cov:
        try:
            return ClusterStats(mu, cov, invert_spd(cov), False, n)
        except SingularMatrixError:
            logger.warning(
                "Covariance of a %d-member cluster is singular; "
                "using its pseudo-inverse", n)
    return ClusterStats(mu, cov, pseudo_inverse(cov), True, n)


def cluster_stats(
        data: ArrayLike,
        labels: ArrayLike,
        k: int,
        min_cluster_for_cov: int = None) -> List[ClusterStats]:
    """
    Mean, sample covariance and (pseudo-)inverse covariance of every
    cluster. The ordinary inverse is used when the cluster has at least
    `min_cluster_for_cov` members (default d + 2) and its covariance can be
    inverted; otherwise the pseudo-inverse is stored and the stats are
    flagged `rank_deficient`.

    Raises
    ------
    DataError
        If any cluster has no members.
    """
    arr = as_matrix(data)
    lab = np.asarray(labels, dtype=np.int64)
    if lab.shape[0] != arr.shape[0]:
        raise DataError(f"{lab.shape[0]} labels for {arr.shape[0]} points")
    if min_cluster_for_cov is None:
        min_cluster_for_cov = arr.shape[1] + 2

    stats = []
    for c in range(k):
        members = arr[lab == c]
        if members.shape[0] == 0:
            raise DataError("cannot compute stats for empty cluster")
        stats.append(_stats_for(members, min_cluster_for_cov))
    return stats


def mahalanobis_assign(
        data: NDArray,
        stats: List[ClusterStats]) -> Tuple[NDArray[np.int64], NDArray[np.float64]]:
    """
    Nearest cluster by squared Mahalanobis distance (lowest index on ties),
    together with the (n, k) matrix of squared distances.
    """
    dist = np.column_stack([mahalanobis_sq_many(data, s) for s in stats])
    return np.argmin(dist, axis=1).astype(np.int64), dist


def mahalanobis_kmeans(data: ArrayLike, cfg: MahaConfig) -> MahaResult:
    """
    Run the Euclidean phase, then at most `cfg.maha_iter` synchronous
    Mahalanobis reassignments: stats are computed from the whole previous
    labelling, then every point moves to its closest cluster. A cluster
    emptied by a reassignment is repaired as in K-means (farthest point by
    Mahalanobis distance to its own cluster) and flagged in the history.

    Raises
    ------
    ConfigError
        If the configuration is invalid or there are fewer than 2k points.
    """
    arr = as_matrix(data)
    problems = cfg.validate()
    if problems:
        raise ConfigError(problems)
    if arr.shape[0] < 2 * cfg.k:
        raise ConfigError(
            f"the Mahalanobis procedure needs at least {2 * cfg.k} points, "
            f"got {arr.shape[0]}")

    phase1 = kmeans(arr, cfg.euclidean_phase())
    labels = phase1.labels.copy()
    history = []

    for iteration in range(1, cfg.maha_iter + 1):
        stats = cluster_stats(arr, labels, cfg.k, cfg.min_cluster_for_cov)
        new_labels, dist = mahalanobis_assign(arr, stats)
        repaired = []
        if np.any(np.bincount(new_labels, minlength=cfg.k) == 0):
            own = dist[np.arange(arr.shape[0]), new_labels]
            new_labels, repaired = repair_empty_clusters(new_labels, own, cfg.k)
        changed = int(np.sum(new_labels != labels))
        history.append(MahaIteration(
            iteration, changed,
            [c for c, s in enumerate(stats) if s.rank_deficient],
            repaired))
        logger.debug("Mahalanobis iteration %d: %d labels changed", iteration, changed)
        labels = new_labels
        if changed == 0:
            break

    centroids = cluster_means(arr, labels, cfg.k)
    wss = within_ss(arr, labels, centroids)
    logger.info(
        "Mahalanobis phase: %d iterations, wss %.6f -> %.6f",
        len(history), phase1.wss, wss)
    return MahaResult(
        labels=labels,
        centroids=centroids,
        wss=wss,
        iterations_run=len(history),
        restart_index=phase1.restart_index,
        converged=bool(history) and history[-1].changed == 0,
        metric=Metric(MetricKind.MAHALANOBIS),
        restarts=phase1.restarts,
        phase1=phase1,
        history=history)
