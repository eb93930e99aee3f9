"""
Multivariate normal sampling and the two-cluster benchmark of crossing,
strongly correlated bivariate Gaussians.

Normal variates come from numpy's `Generator` over the PCG64 bit generator
(ziggurat method), so a seed fixes the dataset on every platform running
the same numpy version.
"""

# pylint: disable=C0103:invalid-name

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from metriclust.errors import ConfigError, DataError, NumericalError
from metriclust.linalg import cholesky, eigen_factor, is_symmetric, symmetric_eigen

logger = logging.getLogger(__name__)

PSD_TOL = 1e-10

# Benchmark components: class 0 is positively, class 1 negatively correlated.
MU_1 = np.array([1.0, 1.0])
SIGMA_1 = np.array([[1.5, 1.0], [1.0, 1.0]])
MU_2 = np.array([-0.5, 0.5])
SIGMA_2 = np.array([[0.8, -0.5], [-0.5, 0.6]])
BENCHMARK_SEED = 4511


@dataclass(eq=False)
class MvnSpec:
    """A multivariate normal N(mu, sigma) and the number of draws."""
    mu: NDArray[np.float64]
    sigma: NDArray[np.float64]
    n: int

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)

    def check(self):
        d = self.mu.shape[0]
        if self.mu.ndim != 1 or self.sigma.shape != (d, d):
            raise DataError(
                f"mu of length {self.mu.shape} does not match sigma {self.sigma.shape}")
        if self.n < 0:
            raise DataError(f"sample count must be non-negative, got {self.n}")
        if not is_symmetric(self.sigma):
            raise NumericalError("sigma is not symmetric")
        values, _ = symmetric_eigen(self.sigma)
        if values.size and values[-1] < -PSD_TOL:
            raise NumericalError(
                f"sigma is not positive semi-definite (eigenvalue {values[-1]:.3g})")


@dataclass(eq=False)
class LabeledDataset:
    """
    Observations with optional ground-truth classes. Labels are contiguous
    class indices starting at 0; `class_names[i]` names class i.
    """
    data: NDArray[np.float64]
    true_labels: Optional[NDArray[np.int64]] = None
    class_names: List[str] = field(default_factory=list)
    feature_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if not self.feature_names:
            self.feature_names = [f"X{j + 1}" for j in range(self.data.shape[1])]
        if self.true_labels is not None:
            self.true_labels = np.asarray(self.true_labels, dtype=np.int64)
            if self.true_labels.shape[0] != self.data.shape[0]:
                raise DataError(
                    f"{self.true_labels.shape[0]} labels for {self.data.shape[0]} rows")
            if not self.class_names:
                n_classes = int(self.true_labels.max()) + 1 if self.n else 0
                self.class_names = [str(c + 1) for c in range(n_classes)]

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def with_data(self, data: ArrayLike) -> "LabeledDataset":
        """Same labels and names over transformed data."""
        return LabeledDataset(
            data, self.true_labels, list(self.class_names), list(self.feature_names))

    def class_sizes(self) -> NDArray[np.int64]:
        if self.true_labels is None:
            raise DataError("dataset has no class labels")
        return np.bincount(self.true_labels, minlength=self.n_classes)

    def class_means(self) -> NDArray[np.float64]:
        """Mean of each true class (the true centroids)."""
        if self.true_labels is None:
            raise DataError("dataset has no class labels")
        return np.vstack([
            self.data[self.true_labels == c].mean(axis=0)
            for c in range(self.n_classes)])


def sample_mvn(spec: MvnSpec, rng: np.random.Generator) -> NDArray[np.float64]:
    """
    Draw `spec.n` rows x = mu + F z with z standard normal, F the Cholesky
    factor of sigma, or an eigen-factor when sigma is only semi-definite.

    Raises
    ------
    NumericalError
        If sigma is not symmetric positive semi-definite.
    """
    spec.check()
    try:
        factor = cholesky(spec.sigma)
    except NumericalError:
        factor = eigen_factor(spec.sigma, PSD_TOL)
    z = rng.standard_normal((spec.n, spec.mu.shape[0]))
    return spec.mu + z @ factor.T


def concatenate(parts: Sequence[NDArray[np.float64]],
                class_names: Sequence[str] = None,
                feature_names: Sequence[str] = None) -> LabeledDataset:
    """Stack samples and label rows of `parts[i]` with class i."""
    labels = np.concatenate([np.full(p.shape[0], i, dtype=np.int64)
                             for i, p in enumerate(parts)])
    return LabeledDataset(np.vstack(parts), labels,
                          list(class_names or []), list(feature_names or []))


def crossing_gaussians(seed: int = BENCHMARK_SEED, n_per_class: int = 1000) -> LabeledDataset:
    """
    The two-cluster benchmark: `n_per_class` draws from N((1, 1), SIGMA_1)
    labelled 0 followed by `n_per_class` draws from N((-0.5, 0.5), SIGMA_2)
    labelled 1, both from a single generator seeded with `seed`.

    Raises
    ------
    ConfigError
        If `seed` is not an integer in [0, 2**64).
    DataError
        If `n_per_class` is smaller than 1.
    """
    if (isinstance(seed, bool) or not isinstance(seed, (int, np.integer))
            or not 0 <= int(seed) < 2 ** 64):
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    if n_per_class < 1:
        raise DataError(f"n_per_class must be >= 1, got {n_per_class}")
    rng = np.random.default_rng(seed)
    first = sample_mvn(MvnSpec(MU_1, SIGMA_1, n_per_class), rng)
    second = sample_mvn(MvnSpec(MU_2, SIGMA_2, n_per_class), rng)
    logger.debug("Generated benchmark with seed %d, %d points per class",
                 seed, n_per_class)
    return concatenate([first, second], ["1", "2"], ["X1", "X2"])
