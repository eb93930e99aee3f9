"""

Tests for K-means with pluggable metrics, restarts and the scree helpers.

"""
# pylint: disable=E1101:no-member, W0201:attribute-defined-outside-init, W0511:fixme
# pylint: disable=C0103:invalid-name, W0212:protected-access
# pylint: disable=C0116:missing-function-docstring, C0115:missing-class-docstring
# pylint: disable=R0913:too-many-arguments, R0903:too-few-public-methods
# pylint: disable=R0914:too-many-locals
# pylint: disable=C0413:wrong-import-position

import itertools
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(
    os.path.join(os.path.dirname(__file__), '../..')))

from metriclust.datagen import crossing_gaussians
from metriclust.errors import ConfigError, DataError
from metriclust.kmeans import (
    THREADS_ENV_VAR,
    KMeansConfig,
    ScreePoint,
    assign,
    kmeans,
    largest_drop,
    max_workers,
    repair_empty_clusters,
    scree,
    update_centroids,
    within_ss,
)
from metriclust.metrics import Metric, pairwise_distances
from metriclust.preprocess import standardize


def two_blobs(seed=0, n=50):
    rng = np.random.default_rng(seed)
    a = rng.normal(loc=(-5.0, 0.0), scale=0.3, size=(n, 2))
    b = rng.normal(loc=(5.0, 0.0), scale=0.3, size=(n, 2))
    return np.vstack([a, b])


def best_two_partition(data):
    best = np.inf
    for bits in itertools.product([0, 1], repeat=data.shape[0]):
        labels = np.array(bits)
        if labels.min() == labels.max():
            continue
        centroids = np.vstack([data[labels == c].mean(axis=0) for c in (0, 1)])
        best = min(best, within_ss(data, labels, centroids))
    return best


class Test_KMeansConfig:

    # Every invalid parameter is reported at once
    def test_all_problems(self):
        cfg = KMeansConfig(k=0, max_iter=0, n_start=0, metric=Metric.parse("mahalanobis"),
                           seed=-1, init="farthest")
        with pytest.raises(ConfigError) as excinfo:
            cfg.check()
        assert len(excinfo.value.problems) == 6

    # More clusters than points is a data error
    def test_more_clusters_than_points(self):
        with pytest.raises(DataError, match="more clusters than points"):
            kmeans(np.zeros((3, 2)), KMeansConfig(k=4))

    # Thread count comes from the environment when not given
    def test_threads_from_env(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "3")
        assert max_workers() == 3
        assert max_workers(2) == 2
        monkeypatch.delenv(THREADS_ENV_VAR)
        assert max_workers() == 1

    # A malformed thread count is a configuration error
    @pytest.mark.parametrize("value", ["zero", "0", "-2"])
    def test_threads_invalid(self, monkeypatch, value):
        monkeypatch.setenv(THREADS_ENV_VAR, value)
        with pytest.raises(ConfigError):
            max_workers()


class Test_Steps:

    # Assignment agrees with a point-by-point search
    @pytest.mark.parametrize("name", ["euclidean", "manhattan", "maximum", "minkowski:3"])
    def test_assign_brute_force(self, name):
        rng = np.random.default_rng(13)
        data, centroids = rng.normal(size=(20, 2)), rng.normal(size=(3, 2))
        norm = {"euclidean": lambda v: np.sqrt(np.sum(v ** 2)),
                "manhattan": lambda v: np.sum(np.abs(v)),
                "maximum": lambda v: np.max(np.abs(v)),
                "minkowski:3": lambda v: np.sum(np.abs(v) ** 3) ** (1.0 / 3.0)}[name]
        expected = []
        for x in data:
            dists = [norm(x - c) for c in centroids]
            expected.append(dists.index(min(dists)))
        assert assign(data, centroids, Metric.parse(name)).tolist() == expected

    # Reassignment never raises the total distance to fixed centroids
    @pytest.mark.parametrize("name", ["manhattan", "maximum"])
    def test_assign_cost_non_increasing(self, name):
        metric = Metric.parse(name)
        for seed in range(20):
            rng = np.random.default_rng(seed)
            data, centroids = rng.normal(size=(50, 3)), rng.normal(size=(4, 3))
            before = rng.integers(0, 4, size=50)
            after = assign(data, centroids, metric)
            dist = pairwise_distances(data, centroids, metric)
            rows = np.arange(50)
            assert dist[rows, after].sum() <= dist[rows, before].sum()
            assert np.allclose(dist[rows, after], dist.min(axis=1))

    # Centroids are the means of their members
    def test_update_is_cluster_mean(self):
        rng = np.random.default_rng(14)
        data = rng.normal(size=(40, 3))
        labels = np.arange(40) % 4
        rng.shuffle(labels)
        centroids = update_centroids(data, labels, 4, Metric.parse("manhattan"))
        for c in range(4):
            assert np.allclose(centroids[c], data[labels == c].mean(axis=0))

    # Ties in assignment go to the lowest centroid index
    def test_assign_ties(self):
        labels = assign([[0.0], [2.0]], [[-1.0], [1.0]])
        assert labels.tolist() == [0, 1]

    # The farthest point of a multi-member cluster fills the empty one
    def test_repair_farthest(self):
        labels, repaired = repair_empty_clusters([0, 0, 0, 1], [1.0, 5.0, 2.0, 0.0], 3)
        assert labels.tolist() == [0, 2, 0, 1]
        assert repaired == [2]

    # Equal costs pick the lowest point index
    def test_repair_ties(self):
        labels, _ = repair_empty_clusters([0, 0, 0, 1], [3.0, 3.0, 1.0, 0.0], 3)
        assert labels.tolist() == [2, 0, 0, 1]

    # Singleton clusters never give away their only member
    def test_repair_skips_singletons(self):
        labels, _ = repair_empty_clusters([0, 1, 1], [9.0, 1.0, 2.0], 3)
        assert labels.tolist() == [0, 1, 2]

    # Repair is impossible when every cluster is a singleton
    def test_repair_impossible(self):
        with pytest.raises(DataError):
            repair_empty_clusters([0, 1], [1.0, 1.0], 3)

    # Update re-seeds an empty cluster with the farthest point
    def test_update_with_empty_cluster(self):
        centroids = update_centroids([[0.0], [1.0], [10.0]], [0, 0, 0], 2)
        assert np.allclose(centroids, [[0.5], [10.0]])

    # Labels out of range are rejected
    def test_update_bad_labels(self):
        with pytest.raises(DataError):
            update_centroids([[0.0], [1.0]], [0, 2], 2)


class Test_KMeans:

    # Well separated blobs are found exactly
    @pytest.mark.parametrize("name", ["euclidean", "manhattan", "maximum", "minkowski:3"])
    def test_blobs(self, name):
        data = two_blobs()
        result = kmeans(data, KMeansConfig(k=2, n_start=5, metric=Metric.parse(name), seed=1))
        first = result.labels[0]
        assert np.all(result.labels[:50] == first)
        assert np.all(result.labels[50:] == 1 - first)
        assert result.wss == pytest.approx(within_ss(data, result.labels, result.centroids))
        assert result.cluster_sizes().tolist() == [50, 50]

    # One cluster has the mean as centroid
    def test_single_cluster(self):
        data = two_blobs()
        result = kmeans(data, KMeansConfig(k=1))
        assert np.allclose(result.centroids[0], data.mean(axis=0))
        assert result.wss == pytest.approx(np.sum((data - data.mean(axis=0)) ** 2))

    # As many clusters as distinct points gives zero WSS
    def test_k_equals_n(self):
        data = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0], [2.0, 3.0]])
        result = kmeans(data, KMeansConfig(k=5, n_start=3))
        assert result.wss == 0.0
        assert sorted(result.labels.tolist()) == [0, 1, 2, 3, 4]

    # The same seed gives the same result, whatever the thread count
    def test_reproducible_across_threads(self):
        data = np.random.default_rng(2).normal(size=(200, 3))
        serial = kmeans(data, KMeansConfig(k=4, n_start=8, seed=9, n_jobs=1))
        parallel = kmeans(data, KMeansConfig(k=4, n_start=8, seed=9, n_jobs=4))
        assert np.array_equal(serial.labels, parallel.labels)
        assert serial.wss == parallel.wss
        assert serial.restart_index == parallel.restart_index

    # The chosen restart has the lowest WSS of all restarts
    def test_best_restart(self):
        data = np.random.default_rng(4).normal(size=(150, 2))
        result = kmeans(data, KMeansConfig(k=3, n_start=10, seed=3))
        assert len(result.restarts) == 10
        assert result.wss == min(trace.wss for trace in result.restarts)
        assert result.restarts[result.restart_index].wss == result.wss

    # WSS never increases along a Euclidean run without repairs
    def test_wss_monotone(self):
        data = np.random.default_rng(6).normal(size=(300, 2))
        result = kmeans(data, KMeansConfig(k=5, n_start=10, seed=0))
        for trace in result.restarts:
            if trace.repairs:
                continue
            history = trace.wss_history
            assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))

    # A single iteration cannot detect a fixpoint
    def test_not_converged(self):
        data = np.random.default_rng(8).normal(size=(100, 2))
        result = kmeans(data, KMeansConfig(k=3, max_iter=1, seed=0))
        assert not result.converged
        assert result.iterations_run == 1

    # k-means++ seeding is deterministic and finds the blobs
    def test_kmeans_plus_plus(self):
        data = two_blobs(seed=3)
        cfg = KMeansConfig(k=2, n_start=3, seed=5, init="kmeans++")
        a, b = kmeans(data, cfg), kmeans(data, cfg)
        assert np.array_equal(a.labels, b.labels)
        assert len(set(a.labels[:50].tolist())) == 1

    # Restarts reach the exhaustive optimum on tiny problems
    def test_exhaustive_oracle(self):
        successes = 0
        for seed in range(50):
            data = np.random.default_rng(seed).normal(size=(8, 2))
            result = kmeans(data, KMeansConfig(k=2, n_start=20, seed=seed))
            if result.wss <= best_two_partition(data) + 1e-9:
                successes += 1
        assert successes >= 48


class Test_Scree:

    # One point per k, with WSS decreasing on clustered data
    def test_scree(self):
        data = two_blobs()
        steps = []
        points = scree(data, [1, 2, 3], KMeansConfig(k=1, n_start=5, seed=0),
                       on_step=lambda i, k: steps.append((i, k)))
        assert [p.k for p in points] == [1, 2, 3]
        assert points[0].wss > points[1].wss > points[2].wss
        assert steps == [(1, 1), (2, 2), (3, 3)]
        assert largest_drop(points) == 2

    # The largest relative drop, or nothing with a single point
    def test_largest_drop(self):
        points = [ScreePoint(1, 100.0), ScreePoint(2, 40.0), ScreePoint(3, 30.0)]
        assert largest_drop(points) == 2
        assert largest_drop(points[:1]) is None

    # With enough restarts an extra cluster does not raise the WSS
    def test_scree_non_increasing(self):
        for seed in range(1, 21):
            data, _ = standardize(crossing_gaussians(seed, n_per_class=200).data)
            points = scree(data, range(1, 7), KMeansConfig(k=1, n_start=25, seed=seed))
            for a, b in zip(points, points[1:]):
                assert b.wss <= 1.02 * a.wss
