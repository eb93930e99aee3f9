"""
Lloyd-style K-means with a pluggable (non-Mahalanobis) distance, seeded
restarts and within-cluster sum of squares diagnostics.
"""

# pylint: disable=C0103:invalid-name, R0902:too-many-instance-attributes
# pylint: disable=R0913:too-many-arguments, R0914:too-many-locals

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from metriclust.errors import ConfigError, DataError
from metriclust.linalg import as_matrix
from metriclust.metrics import Metric, pairwise_distances

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "METRICLUST_THREADS"
INIT_METHODS = ("random", "kmeans++")


def max_workers(n_jobs: Optional[int] = None) -> int:
    """
    Number of threads used for restarts: `n_jobs` when given, otherwise the
    value of METRICLUST_THREADS, otherwise 1.
    """
    if n_jobs is None:
        value = os.environ.get(THREADS_ENV_VAR)
        if value is None or value.strip() == "":
            return 1
        try:
            n_jobs = int(value)
        except ValueError as exc:
            raise ConfigError(
                f"{THREADS_ENV_VAR} must be a positive integer, got '{value}'") from exc
    if n_jobs < 1:
        raise ConfigError(f"thread count must be a positive integer, got {n_jobs}")
    return n_jobs


@dataclass
class KMeansConfig:
    """
    Parameters of a K-means run.

    Parameters
    ----------
    k: int
        Number of clusters.
    max_iter: int
        Maximum number of assign/update iterations per restart.
    n_start: int
        Number of independent restarts; the one with the lowest WSS wins.
    metric: Metric
        Distance used for assignment. Mahalanobis is not allowed here.
    seed: int
        Non-negative seed; restart r draws from a generator seeded with
        (seed, r), so results do not depend on thread count.
    init: str
        'random' (k distinct data rows) or 'kmeans++'.
    n_jobs: int
        Threads for restarts. None reads METRICLUST_THREADS.
    """
    k: int
    max_iter: int = 100
    n_start: int = 1
    metric: Metric = field(default_factory=Metric.euclidean)
    seed: int = 0
    init: str = "random"
    n_jobs: Optional[int] = None

    def validate(self) -> List[str]:
        problems = []
        if self.k < 1:
            problems.append(f"k must be >= 1, got {self.k}")
        if self.max_iter < 1:
            problems.append(f"max_iter must be >= 1, got {self.max_iter}")
        if self.n_start < 1:
            problems.append(f"n_start must be >= 1, got {self.n_start}")
        if self.metric.is_mahalanobis:
            problems.append(
                "K-means assignment cannot use the mahalanobis metric; "
                "use the two-phase Mahalanobis procedure")
        if self.seed < 0 or self.seed >= 2 ** 64:
            problems.append(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.init not in INIT_METHODS:
            problems.append(f"init must be one of {INIT_METHODS}, got '{self.init}'")
        if self.n_jobs is not None and self.n_jobs < 1:
            problems.append(f"n_jobs must be >= 1, got {self.n_jobs}")
        return problems

    def check(self, n_points: int = None):
        problems = self.validate()
        if problems:
            raise ConfigError(problems)
        if n_points is not None and self.k > n_points:
            raise DataError("more clusters than points")


@dataclass
class RestartTrace:
    restart_index: int
    iterations: int
    converged: bool
    wss: float
    wss_history: List[float]
    repairs: int


@dataclass
class ClusteringResult:
    """
    Outcome of a clustering run. `labels` are in [0, k) and every cluster
    has at least one member; `wss` is always the Euclidean within-cluster
    sum of squares, whatever metric drove the assignment.
    """
    labels: NDArray[np.int64]
    centroids: NDArray[np.float64]
    wss: float
    iterations_run: int
    restart_index: int
    converged: bool = True
    metric: Metric = field(default_factory=Metric.euclidean)
    restarts: List[RestartTrace] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def cluster_sizes(self) -> NDArray[np.int64]:
        return np.bincount(self.labels, minlength=self.k)


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """Generator for restart `restart` of a run seeded with `seed`."""
    return np.random.default_rng(np.random.SeedSequence([seed, restart]))


def within_ss(data: ArrayLike, labels: ArrayLike, centroids: ArrayLike) -> float:
    """Euclidean within-cluster sum of squares of a labelling."""
    arr = np.asarray(data, dtype=np.float64)
    diff = arr - np.asarray(centroids)[np.asarray(labels)]
    return float(np.sum(diff * diff))


def assign(data: ArrayLike, centroids: ArrayLike, metric: Metric = Metric()) -> NDArray[np.int64]:
    """
    Label of the nearest centroid for every point; ties go to the lowest
    centroid index.
    """
    cents = np.asarray(centroids, dtype=np.float64)
    if cents.ndim != 2 or cents.shape[0] == 0:
        raise DataError("at least one centroid is required")
    dist = pairwise_distances(data, cents, metric)
    return np.argmin(dist, axis=1).astype(np.int64)


def cluster_means(data: NDArray, labels: NDArray, k: int) -> NDArray[np.float64]:
    """Per-cluster means; rows of empty clusters are NaN."""
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.zeros((k, data.shape[1]))
    np.add.at(sums, labels, data)
    with np.errstate(invalid="ignore", divide="ignore"):
        return sums / counts[:, None]


def repair_empty_clusters(
        labels: ArrayLike,
        own_cost: ArrayLike,
        k: int) -> Tuple[NDArray[np.int64], List[int]]:
    """
    Give every empty cluster one point: the point farthest from its own
    cluster (largest `own_cost`, lowest index on ties) among points whose
    cluster has more than one member. Empty clusters are filled in
    increasing order.

    Returns
    -------
    labels: ndarray
        The repaired labelling (a copy).
    repaired: list of int
        The clusters that were empty.
    """
    labels = np.array(labels, dtype=np.int64, copy=True)
    cost = np.array(own_cost, dtype=np.float64, copy=True)
    sizes = np.bincount(labels, minlength=k)
    empty = [c for c in range(k) if sizes[c] == 0]
    for c in empty:
        candidates = sizes[labels] > 1
        if not np.any(candidates):
            raise DataError("more clusters than points")
        masked = np.where(candidates, cost, -np.inf)
        donor = int(np.argmax(masked))
        sizes[labels[donor]] -= 1
        sizes[c] += 1
        labels[donor] = c
        # a singleton never donates again
        cost[donor] = -np.inf
        logger.warning("Cluster %d was empty; re-seeded with point %d", c, donor)
    return labels, empty


def _own_cost(data: NDArray, labels: NDArray, centroids: NDArray, metric: Metric) -> NDArray:
    cost = np.zeros(data.shape[0])
    for c in np.unique(labels):
        members = labels == c
        cost[members] = pairwise_distances(
            data[members], centroids[c][None, :], metric)[:, 0]
    return cost


def update_centroids(
        data: ArrayLike,
        labels: ArrayLike,
        k: int,
        metric: Metric = Metric()) -> NDArray[np.float64]:
    """
    Arithmetic mean of the members of each cluster. An empty cluster is
    re-seeded with the point farthest (under `metric`) from its cluster
    mean, which then leaves its old cluster.
    """
    arr = as_matrix(data)
    lab = np.asarray(labels, dtype=np.int64)
    if np.any(lab < 0) or np.any(lab >= k):
        raise DataError(f"labels must lie in [0, {k})")
    centroids = cluster_means(arr, lab, k)
    if np.any(np.bincount(lab, minlength=k) == 0):
        lab, _ = repair_empty_clusters(lab, _own_cost(arr, lab, centroids, metric), k)
        centroids = cluster_means(arr, lab, k)
    return centroids


def _initial_centroids(data: NDArray, k: int, init: str, rng: np.random.Generator) -> NDArray:
    n = data.shape[0]
    if init == "random":
        return data[rng.choice(n, size=k, replace=False)].copy()

    # kmeans++: D^2 weighting on squared Euclidean distance
    chosen = [int(rng.integers(n))]
    closest = np.sum((data - data[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            remaining = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(remaining))
        else:
            nxt = int(rng.choice(n, p=closest / total))
        chosen.append(nxt)
        closest = np.minimum(closest, np.sum((data - data[nxt]) ** 2, axis=1))
    return data[chosen].copy()


def _single_run(data: NDArray, cfg: KMeansConfig, restart: int):
    rng = restart_rng(cfg.seed, restart)
    k = cfg.k
    centroids = _initial_centroids(data, k, cfg.init, rng)
    labels = None
    history = []
    repairs = 0
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iter + 1):
        new_labels = assign(data, centroids, cfg.metric)
        if np.any(np.bincount(new_labels, minlength=k) == 0):
            new_labels, empty = repair_empty_clusters(
                new_labels, _own_cost(data, new_labels, centroids, cfg.metric), k)
            repairs += len(empty)
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
        centroids = cluster_means(data, labels, k)
        history.append(within_ss(data, labels, centroids))

    wss = within_ss(data, labels, centroids)
    trace = RestartTrace(restart, iterations, converged, wss, history, repairs)
    logger.debug("Restart %d: %d iterations, converged=%s, wss=%.6f",
                 restart, iterations, converged, wss)
    return labels, centroids, trace


def kmeans(data: ArrayLike, cfg: KMeansConfig) -> ClusteringResult:
    """
    K-means clustering with `cfg.n_start` independent restarts. Each restart
    samples its initial centroids, then alternates nearest-centroid
    assignment and mean update until the labels stop changing or
    `cfg.max_iter` is reached. The restart with the lowest Euclidean WSS is
    returned (lowest restart index on ties).

    Raises
    ------
    ConfigError
        If the configuration is invalid.
    DataError
        If there are more clusters than points.
    """
    arr = as_matrix(data)
    cfg.check(arr.shape[0])

    workers = min(max_workers(cfg.n_jobs), cfg.n_start)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda r: _single_run(arr, cfg, r), range(cfg.n_start)))
    else:
        runs = [_single_run(arr, cfg, r) for r in range(cfg.n_start)]

    best = min(range(len(runs)), key=lambda r: (runs[r][2].wss, r))
    labels, centroids, trace = runs[best]
    if not trace.converged:
        logger.warning("Best restart %d did not converge in %d iterations",
                       best, cfg.max_iter)
    logger.info("K-means k=%d metric=%s: restart %d won with wss=%.6f",
                cfg.k, cfg.metric, best, trace.wss)
    return ClusteringResult(
        labels=labels,
        centroids=centroids,
        wss=trace.wss,
        iterations_run=trace.iterations,
        restart_index=best,
        converged=trace.converged,
        metric=cfg.metric,
        restarts=[run[2] for run in runs])


@dataclass
class ScreePoint:
    k: int
    wss: float


def scree(
        data: ArrayLike,
        k_values: Sequence[int],
        template: KMeansConfig,
        on_step=None) -> List[ScreePoint]:
    """
    One K-means run per value of k, all sharing the template's seed.
    `on_step(i, k)` is called after each run, e.g. to move a progress bar.
    """
    arr = as_matrix(data)
    points = []
    for i, k in enumerate(k_values):
        result = kmeans(arr, replace(template, k=int(k)))
        points.append(ScreePoint(int(k), result.wss))
        if on_step is not None:
            on_step(i + 1, k)
    return points


def largest_drop(points: Sequence[ScreePoint]) -> Optional[int]:
    """
    The k at which the relative WSS drop from the previous k is largest,
    or None when fewer than two points are given.
    """
    if len(points) < 2:
        return None
    best_k, best_drop = None, -np.inf
    for prev, cur in zip(points[:-1], points[1:]):
        drop = (prev.wss - cur.wss) / prev.wss if prev.wss > 0 else 0.0
        if drop > best_drop:
            best_k, best_drop = cur.k, drop
    return best_k
