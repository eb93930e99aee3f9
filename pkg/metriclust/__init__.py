from ._version import __version__
from .datagen import LabeledDataset, MvnSpec, crossing_gaussians, sample_mvn
from .errors import ConfigError, DataError, MetriclustError, NumericalError, SingularMatrixError
from .evaluation import align_and_score, confusion, evaluation_report
from .experiment import Experiment, RunConfig
from .ingest import DatasetSchema, load_csv, write_csv
from .kmeans import ClusteringResult, KMeansConfig, kmeans, largest_drop, scree
from .maha import MahaConfig, MahaResult, mahalanobis_kmeans
from .metrics import Metric, MetricKind, distance, mahalanobis_sq
from .pipeline import Pipeline
from .preprocess import pca_fit, pca_project, pca_reconstruct, standardize


__all__ = [
    '__version__',
    'ClusteringResult', 'ConfigError', 'DataError', 'DatasetSchema', 'Experiment',
    'KMeansConfig', 'LabeledDataset', 'MahaConfig', 'MahaResult', 'Metric',
    'MetricKind', 'MetriclustError', 'MvnSpec', 'NumericalError', 'Pipeline',
    'RunConfig', 'SingularMatrixError',
    'align_and_score', 'confusion', 'crossing_gaussians', 'distance',
    'evaluation_report', 'kmeans', 'largest_drop', 'load_csv', 'mahalanobis_kmeans',
    'mahalanobis_sq', 'pca_fit', 'pca_project', 'pca_reconstruct', 'sample_mvn',
    'scree', 'standardize', 'write_csv',
]
