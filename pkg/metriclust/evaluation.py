"""
Confusion matrices between true classes and predicted clusters, and the
misclassification count after matching cluster indices to classes.
"""

# pylint: disable=C0103:invalid-name

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from metriclust.errors import ConfigError, DataError

MAX_ALIGN_K = 8


@dataclass(eq=False)
class ConfusionMatrix:
    """`counts[t, p]` is the number of points of true class t in cluster p."""
    counts: NDArray[np.int64]

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_totals(self) -> NDArray[np.int64]:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> NDArray[np.int64]:
        return self.counts.sum(axis=0)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.counts.shape


@dataclass
class AlignedEvaluation:
    """
    Best matching of predicted clusters to true classes: cluster p is read
    as class `permutation[p]`.
    """
    permutation: Tuple[int, ...]
    misclassified: int
    per_cluster_correct: List[int]

    def relabel(self, predicted: ArrayLike) -> NDArray[np.int64]:
        """Predicted labels expressed as true class indices."""
        return np.asarray(self.permutation, dtype=np.int64)[np.asarray(predicted)]


def confusion(
        true_labels: ArrayLike,
        predicted_labels: ArrayLike,
        n_labels: Optional[int] = None) -> ConfusionMatrix:
    """
    Cross-tabulate true classes against predicted clusters. The matrix is
    square, with side `n_labels` or the largest label seen plus one, so
    that it can always be aligned.

    Raises
    ------
    DataError
        If the labellings differ in length or contain negative labels.
    """
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    if t.shape != p.shape or t.ndim != 1:
        raise DataError(
            f"label vectors differ in length: {t.shape} and {p.shape}")
    if t.size and (t.min() < 0 or p.min() < 0):
        raise DataError("labels must be non-negative")
    side = max(int(t.max()) + 1 if t.size else 0, int(p.max()) + 1 if p.size else 0)
    if n_labels is not None:
        if n_labels < side:
            raise DataError(f"labels exceed n_labels={n_labels}")
        side = n_labels
    counts = np.zeros((side, side), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts)


def align_and_score(cm: ConfusionMatrix) -> AlignedEvaluation:
    """
    Search all K! matchings of clusters to classes for the one with the
    largest number of agreements; ties go to the lexicographically smallest
    permutation.

    Raises
    ------
    ConfigError
        If the matrix is not square or K exceeds 8.
    """
    rows, cols = cm.shape
    if rows != cols:
        raise ConfigError(f"alignment needs a square confusion matrix, got {cm.shape}")
    if rows > MAX_ALIGN_K:
        raise ConfigError(
            f"{rows} clusters are too many to align exhaustively; use explicit mapping")

    clusters = np.arange(cols)
    best_perm, best_trace = None, -1
    for perm in itertools.permutations(range(cols)):
        trace = int(cm.counts[list(perm), clusters].sum())
        if trace > best_trace:
            best_perm, best_trace = perm, trace

    correct = [int(cm.counts[best_perm[c], c]) for c in range(cols)]
    return AlignedEvaluation(tuple(best_perm), cm.n - best_trace, correct)


def evaluation_report(
        cm: ConfusionMatrix,
        aligned: AlignedEvaluation,
        class_names: Sequence[str] = None) -> dict:
    """
    JSON-ready summary: the confusion grid, the matching, the
    misclassification count, and for every predicted cluster the number of
    members of each true class (the data behind grouped bar plots).
    """
    k = cm.shape[0]
    names = list(class_names or [])
    names += [str(i + 1) for i in range(len(names), k)]
    bars = []
    for c in range(k):
        bars.append({
            "cluster": c,
            "matched_class": names[aligned.permutation[c]],
            "counts": {names[t]: int(cm.counts[t, c]) for t in range(k)},
        })
    return {
        "confusion": cm.counts.tolist(),
        "row_totals": cm.row_totals.tolist(),
        "col_totals": cm.col_totals.tolist(),
        "permutation": list(aligned.permutation),
        "misclassified": aligned.misclassified,
        "per_cluster_correct": aligned.per_cluster_correct,
        "cluster_bars": bars,
    }
