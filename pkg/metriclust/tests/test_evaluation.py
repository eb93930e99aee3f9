"""

Tests for confusion matrices and cluster-to-class alignment.

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

from metriclust.errors import ConfigError, DataError
from metriclust.evaluation import (
    ConfusionMatrix,
    align_and_score,
    confusion,
    evaluation_report,
)


class Test_Confusion:

    # Counts of true class against predicted cluster
    def test_counts(self):
        cm = confusion([0, 0, 1, 1, 1], [0, 1, 1, 1, 0])
        assert cm.counts.tolist() == [[1, 1], [1, 2]]
        assert cm.n == 5
        assert cm.row_totals.tolist() == [2, 3]
        assert cm.col_totals.tolist() == [2, 3]

    # The matrix is square even when a cluster is unused
    def test_padded(self):
        cm = confusion([0, 0, 1], [0, 0, 0])
        assert cm.shape == (2, 2)
        assert confusion([0, 1], [0, 1], n_labels=3).shape == (3, 3)

    # Inconsistent labellings are data errors
    def test_invalid(self):
        with pytest.raises(DataError):
            confusion([0, 1], [0, 1, 1])
        with pytest.raises(DataError):
            confusion([0, -1], [0, 1])
        with pytest.raises(DataError):
            confusion([0, 2], [0, 1], n_labels=2)


class Test_Align:

    # Swapped cluster indices are matched back to their classes
    def test_swapped(self):
        cm = ConfusionMatrix(np.array([[10, 90], [80, 20]]))
        aligned = align_and_score(cm)
        assert aligned.permutation == (1, 0)
        assert aligned.misclassified == 30
        assert aligned.per_cluster_correct == [80, 90]
        assert aligned.relabel([0, 1, 1]).tolist() == [1, 0, 0]

    # Ties keep the lexicographically smallest permutation
    def test_ties(self):
        aligned = align_and_score(ConfusionMatrix(np.array([[5, 5], [5, 5]])))
        assert aligned.permutation == (0, 1)
        assert aligned.misclassified == 10

    # Renaming the clusters does not change the score
    def test_invariant_under_relabelling(self):
        rng = np.random.default_rng(0)
        true = rng.integers(0, 3, size=300)
        pred = np.where(rng.random(300) < 0.7, true, rng.integers(0, 3, size=300))
        base = align_and_score(confusion(true, pred)).misclassified
        for mapping in ([1, 2, 0], [2, 1, 0], [0, 2, 1]):
            renamed = np.asarray(mapping)[pred]
            assert align_and_score(confusion(true, renamed)).misclassified == base

    # A perfect clustering has no misclassification
    def test_perfect(self):
        labels = [0, 1, 2, 2, 1, 0]
        assert align_and_score(confusion(labels, labels)).misclassified == 0

    # Rectangular or oversized matrices cannot be aligned exhaustively
    def test_limits(self):
        with pytest.raises(ConfigError):
            align_and_score(ConfusionMatrix(np.zeros((2, 3), dtype=np.int64)))
        with pytest.raises(ConfigError, match="explicit mapping"):
            align_and_score(ConfusionMatrix(np.eye(9, dtype=np.int64)))


class Test_Report:

    # The report names matched classes and counts per cluster
    def test_report(self):
        cm = ConfusionMatrix(np.array([[10, 90], [80, 20]]))
        report = evaluation_report(cm, align_and_score(cm), ["A", "B"])
        assert list(report) == ["confusion", "row_totals", "col_totals", "permutation",
                                "misclassified", "per_cluster_correct", "cluster_bars"]
        assert report["misclassified"] == 30
        assert report["cluster_bars"][0] == {
            "cluster": 0, "matched_class": "B", "counts": {"A": 10, "B": 80}}

    # Missing class names are numbered from one
    def test_default_names(self):
        cm = confusion([0, 1, 2], [0, 1, 2])
        report = evaluation_report(cm, align_and_score(cm))
        assert [bar["matched_class"] for bar in report["cluster_bars"]] == ["1", "2", "3"]
