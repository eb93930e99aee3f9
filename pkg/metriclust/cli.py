"""
Command line of metriclust. Every command builds a `RunConfig` (from a
JSON/YAML file, flags, or both), then runs a `Pipeline` of `Experiment`
stages that writes the JSON outputs.

    metriclust simulate --seed 4511 --out sim.csv
    metriclust cluster --data sim --metric manhattan --k 2 --out results/
    metriclust cluster --data sim --mahalanobis --k 2 --out results/
    metriclust cluster --data sim --stages stages.yaml --out results/
    metriclust scree --data sim --k-min 1 --k-max 10 --out results/
    metriclust project --data csv --csv beans.csv --features Area,Perimeter --out results/
    metriclust compare --data sim --k 2 --seed 4511 --out results/

Exit codes: 0 success, 2 configuration error, 3 data or IO error,
4 numerical failure.
"""

# pylint: disable=C0103:invalid-name

import argparse
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path
from typing import Dict, List, Optional

from rich.console import Console
from rich.table import Table

from metriclust._version import __version__
from metriclust.datagen import BENCHMARK_SEED, crossing_gaussians
from metriclust.errors import ConfigError, DataError, MetriclustError
from metriclust.experiment import Experiment, RunConfig
from metriclust.ingest import write_csv
from metriclust.logconfig import VALID_LEVELS, LogConfig
from metriclust.pipeline import Pipeline

logger = logging.getLogger(__name__)

CLUSTER_STAGES = [
    ('dataset', 'load_dataset'),
    ('prepared', 'prepare'),
    ('result', 'fit'),
    ('report', 'evaluate'),
    ('scatter', 'scatter_data'),
    ('centroids', 'centroid_data'),
    ('outputs', 'write_outputs'),
]

DATASET_STAGES = [
    ('dataset', 'load_dataset'),
    ('prepared', 'prepare'),
]

err_console = Console(stderr=True)


def cmd_simulate(
        seed: int = BENCHMARK_SEED,
        out_path: str = "simulation.csv",
        n_per_class: int = 1000) -> Path:
    """
    Write the crossing-Gaussians benchmark as CSV, with a `label` column.

    Raises
    ------
    DataError
        If the file cannot be written.
    """
    out_path = Path(out_path)
    dataset = crossing_gaussians(seed, n_per_class)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create {out_path.parent}: {exc}") from exc
    write_csv(dataset, out_path)
    logger.info("Wrote %d simulated points to %s", dataset.n, out_path)
    return out_path


def _run(config: RunConfig, description: str, steps: list, silent: bool,
         stages_file: Optional[str] = None) -> Experiment:
    experiment = Experiment(config, silent=silent)
    pipeline = Pipeline(host=experiment, description=description, subtask=True,
                        silent=silent)
    if stages_file is None:
        pipeline.from_list(steps)
    else:
        pipeline.from_config(stages_file)
    pipeline.run()
    return experiment


def cmd_cluster(config: RunConfig, silent: bool = False,
                stages_file: Optional[str] = None) -> Dict[str, Path]:
    """
    Cluster the configured dataset and write `report.json`,
    `scatter.json` and `centroids.json` to the output directory.

    `stages_file` replaces CLUSTER_STAGES with the stages of a YAML file
    mapping stage ids to an `attribute`, a `method` of `Experiment` and
    its `arguments`. Files written by such a pipeline are returned only
    when it runs `write_outputs`.
    """
    experiment = _run(config, "cluster", CLUSTER_STAGES, silent, stages_file)
    return getattr(experiment, "outputs", None) or {}


def cmd_scree(config: RunConfig, k_min: int = 1, k_max: int = 10,
              silent: bool = False) -> Path:
    """Write `scree.json`: WSS for every k in [k_min, k_max]."""
    steps = DATASET_STAGES + [
        ('scree', 'scree_curve', {'k_min': k_min, 'k_max': k_max}),
        ('output', 'write_payload', {'name': 'scree.json', 'payload': 'scree'}),
    ]
    return _run(config, "scree", steps, silent).output


def cmd_project(config: RunConfig, n_components: int = 2,
                silent: bool = False) -> Path:
    """Write `pca.json`: principal component scores and explained variance."""
    steps = DATASET_STAGES + [
        ('pca', 'projection', {'n_components': n_components}),
        ('output', 'write_payload', {'name': 'pca.json', 'payload': 'pca'}),
    ]
    return _run(config, "project", steps, silent).output


def cmd_compare(config: RunConfig, silent: bool = False) -> Path:
    """
    Write `compare.json` with one entry per metric plus the two-phase
    Mahalanobis procedure, and print them as a table unless silent.
    """
    steps = DATASET_STAGES + [
        ('comparison_result', 'comparison'),
        ('output', 'write_payload', {'name': 'compare.json', 'payload': 'comparison_result'}),
    ]
    experiment = _run(config, "compare", steps, silent)
    if not silent:
        Console().print(comparison_table(experiment.comparison_result))
    return experiment.output


def comparison_table(comparison: dict) -> Table:
    table = Table(title=f"k={comparison['k']}, seed={comparison['seed']}")
    table.add_column("method")
    table.add_column("misclassified", justify="right")
    table.add_column("phase 1", justify="right")
    table.add_column("WSS", justify="right")
    table.add_column("same as euclidean", justify="center")
    for entry in comparison["methods"]:
        phase1 = entry.get("phase1_misclassified")
        table.add_row(
            entry["method"],
            "-" if entry["misclassified"] is None else str(entry["misclassified"]),
            "-" if phase1 is None else str(phase1),
            f"{entry['wss']:.4f}",
            "-" if entry["same_partition_as_euclidean"] is None
            else ("yes" if entry["same_partition_as_euclidean"] else "no"))
    return table


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_rename(value: str) -> Dict[str, str]:
    rename = {}
    for item in _split(value):
        old, sep, new = item.partition("=")
        if not sep or not old.strip() or not new.strip():
            raise ConfigError(f"rename '{item}' must be written Old=New")
        rename[old.strip()] = new.strip()
    return rename


def _dataset_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("dataset")
    group.add_argument("--config", help="JSON or YAML run configuration")
    group.add_argument("--data", choices=["sim", "csv"])
    group.add_argument("--csv", help="CSV file with a header row")
    group.add_argument("--features", type=_split, help="comma-separated feature columns")
    group.add_argument("--label-col", dest="label_col")
    group.add_argument("--classes", type=_split, help="comma-separated classes to keep")
    group.add_argument("--rename", help="header renames, Old=New,...")
    group.add_argument("--n-per-class", dest="n_per_class", type=int)
    group.add_argument("--data-seed", dest="data_seed", type=int)
    group.add_argument("--no-standardize", dest="standardize",
                       action="store_const", const=False)
    group.add_argument("--seed", type=int)
    group.add_argument("--threads", type=int)
    group.add_argument("--out", help="output directory")
    return parent


def _algorithm_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("algorithm")
    group.add_argument("--metric",
                       help="euclidean, manhattan, maximum, minkowski:<p> or mahalanobis")
    group.add_argument("--k", type=int)
    group.add_argument("--max-iter", dest="max_iter", type=int)
    group.add_argument("--n-start", dest="n_start", type=int)
    group.add_argument("--init", choices=["random", "kmeans++"])
    group.add_argument("--mahalanobis", dest="algorithm",
                       action="store_const", const="mahalanobis",
                       help="two-phase Euclidean then Mahalanobis clustering")
    group.add_argument("--euclid-iter", dest="euclid_iter", type=int)
    group.add_argument("--euclid-starts", dest="euclid_starts", type=int)
    group.add_argument("--maha-iter", dest="maha_iter", type=int)
    group.add_argument("--min-cluster-for-cov", dest="min_cluster_for_cov", type=int)
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metriclust",
        description="K-means with alternative metrics and two-phase Mahalanobis clustering")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", dest="log_level", choices=VALID_LEVELS)
    parser.add_argument("--log-file", dest="log_file")
    parser.add_argument("--quiet", action="store_true",
                        help="no progress bars or summary messages")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="write the crossing-Gaussians benchmark as CSV")
    simulate.add_argument("--seed", type=int, default=BENCHMARK_SEED)
    simulate.add_argument("--out", required=True, help="CSV file to write")
    simulate.add_argument("--n-per-class", dest="n_per_class", type=int, default=1000)

    dataset, algorithm = _dataset_flags(), _algorithm_flags()
    cluster = sub.add_parser("cluster", parents=[dataset, algorithm],
                             help="cluster a dataset and write report, scatter and centroids")
    cluster.add_argument("--stages", help="YAML file with the stages to run")
    scree = sub.add_parser("scree", parents=[dataset, algorithm],
                           help="WSS against k for an elbow plot")
    scree.add_argument("--k-min", dest="k_min", type=int, default=1)
    scree.add_argument("--k-max", dest="k_max", type=int, default=10)
    project = sub.add_parser("project", parents=[dataset],
                             help="principal component scores of a dataset")
    project.add_argument("--n-components", dest="n_components", type=int, default=2)
    sub.add_parser("compare", parents=[dataset, algorithm],
                   help="compare every metric and the Mahalanobis procedure")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    The run configuration of a command: the `--config` file when given,
    with every flag present on the command line taking precedence.
    """
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    given = vars(args)
    overrides = {f.name: given[f.name] for f in fields(RunConfig)
                 if given.get(f.name) is not None}
    if given.get("rename") is not None:
        overrides["rename"] = _parse_rename(given["rename"])
    config = replace(config, **overrides)
    config.check()
    return config


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "simulate":
        path = cmd_simulate(args.seed, args.out, args.n_per_class)
        if not args.quiet:
            err_console.print(f"wrote {path}", markup=False, highlight=False)
        return 0

    config = config_from_args(args)
    if args.command == "cluster":
        outputs = cmd_cluster(config, silent=args.quiet, stages_file=args.stages)
        written = ", ".join(str(p) for p in outputs.values()) or "no files"
    elif args.command == "scree":
        written = cmd_scree(config, args.k_min, args.k_max, silent=args.quiet)
    elif args.command == "project":
        written = cmd_project(config, args.n_components, silent=args.quiet)
    else:
        written = cmd_compare(config, silent=args.quiet)
    if not args.quiet:
        err_console.print(f"wrote {written}", markup=False, highlight=False)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        LogConfig.setup_logging(level=args.log_level, fname=args.log_file)
    except AssertionError as exc:
        err_console.print(str(exc), markup=False, highlight=False)
        return ConfigError.exit_code
    try:
        return _dispatch(args)
    except MetriclustError as exc:
        for problem in getattr(exc, "problems", [str(exc)]):
            logger.error("%s: %s", args.command, problem)
        return exc.exit_code
    except OSError as exc:
        logger.error("%s: %s", args.command, exc)
        return DataError.exit_code
    finally:
        LogConfig.shutdown()


if __name__ == "__main__":
    sys.exit(main())
