"""

Statistical checks on the crossing-Gaussians benchmark and, when the file is
available, on the Dry-Bean dataset. Run with `pytest -m slow`.

"""
# pylint: disable=E1101:no-member, W0201:attribute-defined-outside-init, W0511:fixme
# pylint: disable=C0103:invalid-name, W0212:protected-access
# pylint: disable=C0116:missing-function-docstring, C0115:missing-class-docstring
# pylint: disable=R0913:too-many-arguments, R0903:too-few-public-methods
# pylint: disable=C0413:wrong-import-position

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(
    os.path.join(os.path.dirname(__file__), '../..')))

from metriclust.datagen import crossing_gaussians
from metriclust.evaluation import align_and_score, confusion
from metriclust.experiment import Experiment, RunConfig
from metriclust.kmeans import KMeansConfig, kmeans, largest_drop, scree
from metriclust.maha import MahaConfig, mahalanobis_kmeans
from metriclust.metrics import Metric
from metriclust.preprocess import standardize

pytestmark = pytest.mark.slow

SEEDS = range(1, 26)
DRYBEAN_ENV = "METRICLUST_DRYBEAN_CSV"
BEAN_FEATURES = ["Area", "Perimeter", "MajorAxisLength", "ConvexArea",
                 "EquivDiameter", "ShapeFactor3"]

drybean = pytest.mark.skipif(
    not os.environ.get(DRYBEAN_ENV),
    reason=f"set {DRYBEAN_ENV} to the Dry-Bean CSV to run")


def benchmark(seed: int) -> tuple:
    dataset = crossing_gaussians(seed)
    data, _ = standardize(dataset.data)
    return data, dataset.true_labels


def misclassified(true_labels, labels) -> int:
    return align_and_score(confusion(true_labels, labels, 2)).misclassified


def class_errors(true_labels, labels) -> list:
    """Errors of each true class after alignment."""
    cm = confusion(true_labels, labels, 2)
    aligned = align_and_score(cm)
    correct = {aligned.permutation[c]: int(cm.counts[aligned.permutation[c], c])
               for c in range(2)}
    return [int(cm.row_totals[t]) - correct[t] for t in range(2)]


def metric_totals(metric: str) -> list:
    totals = []
    for seed in SEEDS:
        data, truth = benchmark(seed)
        cfg = KMeansConfig(k=2, max_iter=100, n_start=100,
                           metric=Metric.parse(metric), seed=seed)
        totals.append(misclassified(truth, kmeans(data, cfg).labels))
    return totals


def bean_experiment(classes: list, seed: int) -> Experiment:
    config = RunConfig(data="csv", csv=os.environ[DRYBEAN_ENV], features=BEAN_FEATURES,
                       label_col="Class", classes=classes, seed=seed,
                       rename={"AspectRation": "AspectRatio", "roundness": "Roundness"})
    return Experiment(config, silent=True)


class Test_Benchmark:

    # Euclidean K-means leaves about half of one class in the wrong cluster
    def test_euclidean(self):
        totals, lopsided = [], 0
        for seed in SEEDS:
            data, truth = benchmark(seed)
            cfg = KMeansConfig(k=2, max_iter=100, n_start=100, seed=seed)
            labels = kmeans(data, cfg).labels
            totals.append(misclassified(truth, labels))
            lopsided += min(class_errors(truth, labels)) <= 25
        assert 400 <= np.median(totals) <= 560
        assert lopsided >= 0.8 * len(SEEDS)

    # Manhattan K-means behaves like the Euclidean one
    def test_manhattan(self):
        assert 400 <= np.median(metric_totals("manhattan")) <= 570

    # Maximum-distance K-means behaves like the Euclidean one
    def test_maximum(self):
        assert 390 <= np.median(metric_totals("maximum")) <= 560

    # The Mahalanobis phase improves on the Euclidean phase
    def test_mahalanobis(self):
        improved, finals = 0, []
        for seed in range(1, 51):
            data, truth = benchmark(seed)
            result = mahalanobis_kmeans(data, MahaConfig(k=2, seed=seed))
            final = misclassified(truth, result.labels)
            improved += final < misclassified(truth, result.phase1.labels)
            finals.append(final)
        assert improved >= 45
        assert 240 <= np.median(finals) <= 400

    # Standardized class means sit near (0.579, 0.248) and its opposite
    def test_scaled_centroids(self):
        expected = np.array([[0.579, 0.248], [-0.579, -0.248]])
        close = 0
        for seed in SEEDS:
            data, truth = benchmark(seed)
            means = np.vstack([data[truth == c].mean(axis=0) for c in range(2)])
            close += bool(np.all(np.abs(means - expected) <= 0.05))
        assert close >= 0.7 * len(SEEDS)

    # The scree curve has its elbow at two clusters
    def test_scree_elbow(self):
        hits = 0
        for seed in SEEDS:
            data, _ = benchmark(seed)
            cfg = KMeansConfig(k=1, n_start=25, seed=seed)
            hits += largest_drop(scree(data, range(1, 11), cfg)) == 2
        assert hits >= 0.95 * len(SEEDS)


@drybean
class Test_DryBean:

    # SEKER and CALI separate almost perfectly and Manhattan agrees with Euclidean
    def test_seker_cali(self):
        agree = 0
        for seed in range(1, 11):
            experiment = bean_experiment(["SEKER", "CALI"], seed)
            prepared = experiment.prepare(experiment.load_dataset())
            assert prepared.class_sizes().tolist() == [2027, 1630]
            euclid = experiment.fit(prepared)
            assert misclassified(prepared.true_labels, euclid.labels) <= 25
            manhattan = kmeans(prepared.data,
                               experiment.config.kmeans_config(Metric.parse("manhattan")))
            agree += bool(Experiment._agrees(euclid.labels, manhattan.labels))
        assert agree >= 8

    # Two components carry nearly all the variance
    def test_seker_cali_pca(self):
        experiment = bean_experiment(["SEKER", "CALI"], 1)
        pca = experiment.projection(experiment.prepare(experiment.load_dataset()), 2)
        assert pca["cumulative_ratio"][1] >= 0.99

    # Maximum distance beats Euclidean and the Mahalanobis phase does not help
    def test_sira_seker(self):
        maximum_wins, maha_worse = 0, 0
        for seed in range(1, 11):
            experiment = bean_experiment(["SIRA", "SEKER"], seed)
            prepared = experiment.prepare(experiment.load_dataset())
            assert prepared.class_sizes().tolist() == [2636, 2027]
            config = experiment.config
            truth = prepared.true_labels
            euclid = misclassified(truth, kmeans(prepared.data, config.kmeans_config()).labels)
            maximum = misclassified(
                truth, kmeans(prepared.data, config.kmeans_config(Metric.parse("maximum"))).labels)
            maximum_wins += maximum <= 0.7 * euclid
            result = mahalanobis_kmeans(prepared.data, config.maha_config())
            maha_worse += (misclassified(truth, result.labels)
                           >= misclassified(truth, result.phase1.labels))
        assert maximum_wins >= 7
        assert maha_worse >= 7
