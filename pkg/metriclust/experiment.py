"""
Run configuration and the `Experiment` host. The methods of `Experiment`
are the stages that the command line chains together with a `Pipeline`:
each one takes the results of earlier stages by name and returns the value
stored for the next ones.
"""

# pylint: disable=C0103:invalid-name, R0902:too-many-instance-attributes
# pylint: disable=R0913:too-many-arguments

import logging
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import yaml
from numpy.typing import NDArray

from metriclust.datagen import BENCHMARK_SEED, LabeledDataset, crossing_gaussians
from metriclust.errors import ConfigError, DataError
from metriclust.evaluation import (
    MAX_ALIGN_K,
    align_and_score,
    confusion,
    evaluation_report,
)
from metriclust.ingest import DatasetSchema, load_csv
from metriclust.kmeans import ClusteringResult, KMeansConfig, kmeans, largest_drop, scree
from metriclust.linalg import covariance
from metriclust.maha import MahaConfig, MahaResult, mahalanobis_kmeans
from metriclust.metrics import Metric
from metriclust.preprocess import pca_fit, pca_project, standardize
from metriclust.progbar import ProgBar
from metriclust.report import write_json

logger = logging.getLogger(__name__)

DATA_SOURCES = ("sim", "csv")
ALGORITHMS = ("kmeans", "mahalanobis")
COMPARE_METRICS = ("euclidean", "manhattan", "maximum")

# Fields that change how a run executes but not what it computes.
RUNTIME_FIELDS = ("out", "threads")
INT_FIELDS = ("n_per_class", "k", "max_iter", "n_start", "euclid_iter",
              "euclid_starts", "maha_iter", "seed")
OPTIONAL_INT_FIELDS = ("data_seed", "min_cluster_for_cov", "threads")


@dataclass
class RunConfig:
    """
    Everything a command needs, mirrored as a JSON/YAML document.

    Parameters
    ----------
    data: str
        'sim' for the crossing-Gaussians benchmark, 'csv' for a file.
    csv: str
        Path of the CSV file when `data` is 'csv'.
    features, label_col, classes, rename:
        Column selection for CSV input (see `DatasetSchema`).
    n_per_class: int
        Points per class of the simulated benchmark.
    data_seed: int
        Seed of the simulated benchmark. None reuses `seed`.
    standardize: bool
        Cluster z-scored data (the default) or the raw columns.
    algorithm: str
        'kmeans' with `metric`, or 'mahalanobis' for the two-phase procedure.
        A metric of 'mahalanobis' selects the two-phase procedure.
    k, max_iter, n_start, init:
        K-means parameters.
    euclid_iter, euclid_starts, maha_iter, min_cluster_for_cov:
        Two-phase parameters.
    seed: int
        Clustering seed.
    threads: int
        Threads for restarts. None reads METRICLUST_THREADS.
    out: str
        Output directory.
    """
    data: str = "sim"
    csv: Optional[str] = None
    features: List[str] = field(default_factory=list)
    label_col: Optional[str] = None
    classes: Optional[List[str]] = None
    rename: Dict[str, str] = field(default_factory=dict)
    n_per_class: int = 1000
    data_seed: Optional[int] = None
    standardize: bool = True
    algorithm: str = "kmeans"
    metric: str = "euclidean"
    k: int = 2
    max_iter: int = 100
    n_start: int = 100
    init: str = "random"
    euclid_iter: int = 50
    euclid_starts: int = 50
    maha_iter: int = 100
    min_cluster_for_cov: Optional[int] = None
    seed: int = BENCHMARK_SEED
    threads: Optional[int] = None
    out: str = "results"

    def __post_init__(self):
        if isinstance(self.metric, str) and self.metric.strip().lower() == "mahalanobis":
            self.algorithm = "mahalanobis"

    @classmethod
    def from_dict(cls, values: dict) -> "RunConfig":
        """
        Build a config from a mapping, rejecting unknown keys.
        """
        if not isinstance(values, dict):
            raise ConfigError("run configuration must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError([f"unknown configuration key '{key}'" for key in unknown])
        return cls(**values)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        """
        Load a config from a JSON or YAML document.
        """
        try:
            with open(path, "r", encoding="utf-8") as fh:
                values = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse configuration {path}: {exc}") from exc
        return cls.from_dict(values or {})

    def to_dict(self) -> dict:
        return asdict(self)

    def report_dict(self) -> dict:
        """The config as written in reports, without runtime-only fields."""
        return {k: v for k, v in self.to_dict().items() if k not in RUNTIME_FIELDS}

    @property
    def dataset_seed(self) -> int:
        return self.seed if self.data_seed is None else self.data_seed

    def schema(self) -> DatasetSchema:
        return DatasetSchema(
            feature_columns=list(self.features),
            label_column=self.label_col,
            class_filter=None if self.classes is None else list(self.classes),
            rename=dict(self.rename))

    def kmeans_config(self, metric: Optional[Metric] = None) -> KMeansConfig:
        return KMeansConfig(
            k=self.k,
            max_iter=self.max_iter,
            n_start=self.n_start,
            metric=metric if metric is not None else Metric.parse(self.metric),
            seed=self.seed,
            init=self.init,
            n_jobs=self.threads)

    def maha_config(self) -> MahaConfig:
        return MahaConfig(
            k=self.k,
            euclid_iter=self.euclid_iter,
            euclid_starts=self.euclid_starts,
            maha_iter=self.maha_iter,
            seed=self.seed,
            min_cluster_for_cov=self.min_cluster_for_cov,
            n_jobs=self.threads)

    def validate(self) -> List[str]:
        """
        Every violated constraint, checked against the dataset, K-means and
        two-phase configurations the run will build.
        """
        problems = []
        for name in INT_FIELDS + OPTIONAL_INT_FIELDS:
            value = getattr(self, name)
            if value is None and name in OPTIONAL_INT_FIELDS:
                continue
            if isinstance(value, bool) or not isinstance(value, int):
                problems.append(f"{name} must be an integer, got {value!r}")
        if not isinstance(self.standardize, bool):
            problems.append(f"standardize must be true or false, got {self.standardize!r}")
        for name in ("data", "algorithm", "metric", "init"):
            if not isinstance(getattr(self, name), str):
                problems.append(f"{name} must be a string, got {getattr(self, name)!r}")
        if problems:
            return problems

        if self.data not in DATA_SOURCES:
            problems.append(f"data must be one of {DATA_SOURCES}, got '{self.data}'")
        elif self.data == "csv":
            if not self.csv:
                problems.append("a CSV path is required when data is 'csv'")
            problems.extend(self.schema().validate())
        elif self.n_per_class < 1:
            problems.append(f"n_per_class must be >= 1, got {self.n_per_class}")
        if self.data_seed is not None and not 0 <= self.data_seed < 2 ** 64:
            problems.append(f"data_seed must be a 64-bit unsigned integer, got {self.data_seed}")

        if self.algorithm not in ALGORITHMS:
            problems.append(
                f"algorithm must be one of {ALGORITHMS}, got '{self.algorithm}'")
            return problems
        if self.algorithm == "mahalanobis":
            problems.extend(self.maha_config().validate())
            return problems
        try:
            metric = Metric.parse(self.metric)
        except ConfigError as exc:
            problems.extend(exc.problems)
            metric = Metric.euclidean()
        problems.extend(self.kmeans_config(metric).validate())
        return problems

    def check(self):
        problems = self.validate()
        if problems:
            raise ConfigError(problems)


class Experiment:
    """
    Host of the stages of every command. Values returned by the stages are
    stored as attributes of the host by the `Pipeline` that runs them.

    Parameters
    ----------
    config: RunConfig
        The validated run configuration.
    silent: bool
        Do not draw progress bars.

    A `Pipeline` created with `subtask=True` sets `pbar` while it runs, and
    long stages then draw their steps below the stage bar.
    """

    def __init__(self, config: RunConfig, silent: bool = False):
        config.check()
        self.config = config
        self.silent = silent
        self.out_dir = Path(config.out)
        self.scaling = None
        self.pbar: Optional[ProgBar] = None

    @contextmanager
    def _progress(self, name: str, steps: int) -> Iterator[ProgBar]:
        if self.pbar is not None:
            self.pbar.start_subtask(name, steps)
            try:
                yield self.pbar
            finally:
                self.pbar.remove(name)
            return
        pbar = ProgBar(name, steps, silent=self.silent)
        try:
            yield pbar
        finally:
            pbar.close()

    def load_dataset(self) -> LabeledDataset:
        cfg = self.config
        if cfg.data == "sim":
            return crossing_gaussians(cfg.dataset_seed, cfg.n_per_class)
        return load_csv(cfg.csv, cfg.schema())

    def prepare(self, dataset: LabeledDataset) -> LabeledDataset:
        """Standardize the dataset unless the config asks for raw columns."""
        if not self.config.standardize:
            return dataset
        data, self.scaling = standardize(dataset.data)
        return dataset.with_data(data)

    def fit(self, prepared: LabeledDataset) -> ClusteringResult:
        if self.config.algorithm == "mahalanobis":
            return mahalanobis_kmeans(prepared.data, self.config.maha_config())
        return kmeans(prepared.data, self.config.kmeans_config())

    def _evaluate_labels(self, prepared: LabeledDataset, labels: NDArray, k: int) -> Optional[dict]:
        if prepared.true_labels is None:
            return None
        side = max(k, prepared.n_classes)
        if side > MAX_ALIGN_K:
            logger.warning(
                "Skipping evaluation: %d labels are too many to align", side)
            return None
        cm = confusion(prepared.true_labels, labels, side)
        return evaluation_report(cm, align_and_score(cm), prepared.class_names)

    def _section(self, prepared: LabeledDataset, result: ClusteringResult) -> dict:
        section = {
            "wss": result.wss,
            "iterations": result.iterations_run,
            "converged": result.converged,
            "restart_index": result.restart_index,
            "cluster_sizes": result.cluster_sizes().tolist(),
            "evaluation": self._evaluate_labels(prepared, result.labels, result.k),
        }
        if isinstance(result, MahaResult):
            section["mahalanobis_iterations"] = [
                {
                    "iteration": step.iteration,
                    "changed": step.changed,
                    "pseudo_inverse_clusters": step.pseudo_inverse_clusters,
                    "repaired_clusters": step.repaired_clusters,
                }
                for step in result.history]
        else:
            section["restarts"] = [
                {
                    "restart_index": trace.restart_index,
                    "iterations": trace.iterations,
                    "converged": trace.converged,
                    "wss": trace.wss,
                    "repairs": trace.repairs,
                }
                for trace in result.restarts]
        return section

    def _dataset_summary(self, prepared: LabeledDataset) -> dict:
        return {
            "source": self.config.data,
            "n": prepared.n,
            "d": prepared.data.shape[1],
            "feature_names": list(prepared.feature_names),
            "class_names": list(prepared.class_names),
            "class_sizes": (None if prepared.true_labels is None
                            else prepared.class_sizes().tolist()),
            "standardized": self.config.standardize,
            "covariance": covariance(prepared.data).tolist() if prepared.n >= 2 else None,
        }

    def evaluate(self, prepared: LabeledDataset, result: ClusteringResult) -> dict:
        """
        The run report: configuration, dataset summary and one section per
        phase with the confusion matrix and misclassification count.
        """
        report = {
            "command": "cluster",
            "config": self.config.report_dict(),
            "dataset": self._dataset_summary(prepared),
            "algorithm": self.config.algorithm,
            "metric": str(result.metric),
            "k": result.k,
            "seed": self.config.seed,
        }
        if isinstance(result, MahaResult):
            report["phase1"] = self._section(prepared, result.phase1)
        report["final"] = self._section(prepared, result)

        final = report["final"]["evaluation"]
        if final is not None:
            logger.info("Run finished with %d misclassified points", final["misclassified"])
        return report

    def _projector(self, prepared: LabeledDataset) -> Tuple[str, List[str], Callable]:
        """
        Plot coordinates: the data itself when it has at most two columns,
        otherwise its first two principal component scores.
        """
        d = prepared.data.shape[1]
        if d <= 2:
            return "data", list(prepared.feature_names), np.asarray
        model = pca_fit(prepared.data)
        return "pca", ["PC1", "PC2"], lambda points: pca_project(model, points, 2)

    def scatter_data(self, prepared: LabeledDataset, result: ClusteringResult) -> dict:
        kind, axes, project = self._projector(prepared)
        scatter = {
            "coordinates": kind,
            "axes": axes,
            "points": project(prepared.data).tolist(),
            "true_labels": (None if prepared.true_labels is None
                            else prepared.true_labels.tolist()),
        }
        if isinstance(result, MahaResult):
            scatter["phase1"] = {"labels": result.phase1.labels.tolist()}
        scatter["final"] = {"labels": result.labels.tolist()}
        return scatter

    def centroid_data(self, prepared: LabeledDataset, result: ClusteringResult) -> dict:
        """True class means and fitted centroids, in data and plot coordinates."""
        kind, axes, project = self._projector(prepared)

        def snapshot(centers: NDArray) -> dict:
            return {"centroids": centers.tolist(), "projected": project(centers).tolist()}

        centroids = {
            "space": "standardized" if self.config.standardize else "raw",
            "feature_names": list(prepared.feature_names),
            "coordinates": kind,
            "axes": axes,
            "true": None if prepared.true_labels is None else snapshot(prepared.class_means()),
        }
        if isinstance(result, MahaResult):
            centroids["phase1"] = snapshot(result.phase1.centroids)
        centroids["final"] = snapshot(result.centroids)
        return centroids

    def write_outputs(self, report: dict, scatter: dict, centroids: dict) -> Dict[str, Path]:
        return {
            "report": self.write_payload("report.json", report),
            "scatter": self.write_payload("scatter.json", scatter),
            "centroids": self.write_payload("centroids.json", centroids),
        }

    def write_payload(self, name: str, payload: dict) -> Path:
        path = write_json(payload, self.out_dir / name)
        logger.info("Wrote %s", path)
        return path

    def scree_curve(self, prepared: LabeledDataset, k_min: int = 1, k_max: int = 10) -> dict:
        """
        WSS for every k in [k_min, k_max], with the k of the largest relative
        drop. The two-phase algorithm is represented by its Euclidean phase.

        Raises
        ------
        ConfigError
            If the range is empty or starts below 1.
        DataError
            If k_max exceeds the number of points.
        """
        if k_min < 1 or k_max < k_min:
            raise ConfigError(f"invalid k range [{k_min}, {k_max}]")
        if k_max > prepared.n:
            raise DataError(f"k_max={k_max} exceeds the {prepared.n} points")

        if self.config.algorithm == "mahalanobis":
            template = self.config.maha_config().euclidean_phase()
        else:
            template = self.config.kmeans_config()
        k_values = list(range(k_min, k_max + 1))

        with self._progress("k values", len(k_values)) as pbar:
            points = scree(prepared.data, k_values, template,
                           on_step=lambda i, k: pbar.update_subtask("k values", i))

        drop = largest_drop(points)
        logger.info("Scree over k=%d..%d: largest drop at k=%s", k_min, k_max, drop)
        return {
            "command": "scree",
            "config": self.config.report_dict(),
            "metric": str(template.metric),
            "points": [{"k": p.k, "wss": p.wss} for p in points],
            "largest_drop_k": drop,
        }

    def projection(self, prepared: LabeledDataset, n_components: int = 2) -> dict:
        """
        Principal component scores of the prepared data and the share of
        variance each component explains.
        """
        model = pca_fit(prepared.data)
        scores = pca_project(model, prepared.data, n_components)
        return {
            "command": "project",
            "config": self.config.report_dict(),
            "feature_names": list(prepared.feature_names),
            "n_components": n_components,
            "eigenvalues": model.eigenvalues.tolist(),
            "explained_variance_ratio": model.explained_variance_ratio.tolist(),
            "cumulative_ratio": model.cumulative_ratio().tolist(),
            "components": model.components[:, :n_components].tolist(),
            "scores": scores.tolist(),
            "true_labels": (None if prepared.true_labels is None
                            else prepared.true_labels.tolist()),
        }

    @staticmethod
    def _agrees(a: NDArray, b: NDArray) -> Optional[bool]:
        """Whether two partitions are identical up to renaming clusters."""
        k = int(max(a.max(), b.max())) + 1
        if k > MAX_ALIGN_K:
            return None
        return align_and_score(confusion(a, b, k)).misclassified == 0

    def _compare_entry(self, prepared: LabeledDataset, name: str,
                       result: ClusteringResult, reference: NDArray) -> dict:
        evaluation = self._evaluate_labels(prepared, result.labels, result.k)
        entry = {
            "method": name,
            "wss": result.wss,
            "converged": result.converged,
            "misclassified": None if evaluation is None else evaluation["misclassified"],
            "confusion": None if evaluation is None else evaluation["confusion"],
            "same_partition_as_euclidean": self._agrees(reference, result.labels),
        }
        if isinstance(result, MahaResult):
            phase1 = self._evaluate_labels(prepared, result.phase1.labels, result.k)
            entry["phase1_wss"] = result.phase1.wss
            entry["phase1_misclassified"] = (
                None if phase1 is None else phase1["misclassified"])
        return entry

    def comparison(self, prepared: LabeledDataset) -> dict:
        """
        Cluster the same data with every K-means metric and with the
        two-phase procedure, all from the same seed. The first metric
        (Euclidean) is the reference partition of the others.
        """
        methods = list(COMPARE_METRICS) + ["mahalanobis"]
        entries, reference = [], None
        with self._progress("methods", len(methods)) as pbar:
            for i, name in enumerate(methods):
                if name == "mahalanobis":
                    result = mahalanobis_kmeans(prepared.data, self.config.maha_config())
                else:
                    result = kmeans(prepared.data, self.config.kmeans_config(Metric.parse(name)))
                if reference is None:
                    reference = result.labels
                entries.append(self._compare_entry(prepared, name, result, reference))
                pbar.update_subtask("methods", i + 1)

        return {
            "command": "compare",
            "config": self.config.report_dict(),
            "k": self.config.k,
            "seed": self.config.seed,
            "methods": entries,
        }
