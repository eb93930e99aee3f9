"""
CSV loading for labelled datasets: column selection, optional header
renames, class filtering and strict numeric parsing.

Spreadsheets must be converted to CSV first, e.g.
`pandas.read_excel("Dry_Bean_Dataset.xlsx").to_csv("dry_bean.csv", index=False)`.
"""

# pylint: disable=C0103:invalid-name

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from metriclust.datagen import LabeledDataset
from metriclust.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

LABEL_COLUMN = "label"
FLOAT_FORMAT = "%.17g"


@dataclass
class DatasetSchema:
    """
    Which columns of a CSV to use.

    Parameters
    ----------
    feature_columns: list of str
        Numeric columns, in the order they become matrix columns.
    label_column: str
        Column with the true class of each row, if any.
    class_filter: list of str
        Keep only rows of these classes; class i of the result is
        `class_filter[i]`.
    rename: dict
        Header renames applied before any lookup.
    """
    feature_columns: List[str]
    label_column: Optional[str] = None
    class_filter: Optional[List[str]] = None
    rename: Dict[str, str] = field(default_factory=dict)

    def validate(self) -> List[str]:
        problems = []
        if not self.feature_columns:
            problems.append("at least one feature column is required")
        if len(set(self.feature_columns)) != len(self.feature_columns):
            problems.append(f"feature columns are not distinct: {self.feature_columns}")
        if self.label_column is not None and self.label_column in self.feature_columns:
            problems.append(
                f"label column '{self.label_column}' is also a feature column")
        if self.class_filter is not None:
            if self.label_column is None:
                problems.append("a class filter needs a label column")
            if len(set(self.class_filter)) != len(self.class_filter):
                problems.append(f"class filter repeats classes: {self.class_filter}")
        return problems


def _parse_column(frame: pd.DataFrame, column: str, row_numbers: np.ndarray) -> np.ndarray:
    raw = frame[column].str.strip()
    empty = raw == ""
    if empty.any():
        line = row_numbers[np.flatnonzero(empty.to_numpy())[0]]
        raise DataError(f"empty cell in column '{column}' at line {line}")
    values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        pos = np.flatnonzero(bad)[0]
        raise DataError(
            f"cannot parse '{raw.iloc[pos]}' as a finite number in column "
            f"'{column}' at line {row_numbers[pos]}")
    return values


def load_csv(path: Union[str, Path], schema: DatasetSchema) -> LabeledDataset:
    """
    Load the schema's columns from a comma-separated file with a header
    row. Row order is preserved. Classes are numbered in filter order, or in
    order of first appearance without a filter.

    Raises
    ------
    ConfigError
        If the schema is inconsistent.
    DataError
        On a missing file or column, an empty or unparsable cell, or when no
        row survives the class filter.
    """
    problems = schema.validate()
    if problems:
        raise ConfigError(problems)

    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError as exc:
        raise DataError(f"data file not found: {path}") from exc
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    frame = frame.rename(columns=schema.rename)
    wanted = list(schema.feature_columns)
    if schema.label_column is not None:
        wanted.append(schema.label_column)
    for column in wanted:
        if column not in frame.columns:
            raise DataError(f"missing column '{column}' in {path}")

    # line numbers in the file: header is line 1
    row_numbers = np.arange(frame.shape[0]) + 2
    labels, class_names = None, []
    if schema.label_column is not None:
        classes = frame[schema.label_column].str.strip()
        if schema.class_filter is not None:
            keep = classes.isin(schema.class_filter).to_numpy()
            frame, classes, row_numbers = frame[keep], classes[keep], row_numbers[keep]
            class_names = list(schema.class_filter)
        else:
            empty = (classes == "").to_numpy()
            if empty.any():
                raise DataError(
                    f"empty cell in column '{schema.label_column}' "
                    f"at line {row_numbers[np.flatnonzero(empty)[0]]}")
            class_names = [str(name) for name in pd.unique(classes)]
        index = {name: i for i, name in enumerate(class_names)}
        labels = classes.map(index).to_numpy(dtype=np.int64)

    if frame.shape[0] == 0:
        raise DataError(f"no rows left in {path} after filtering")

    data = np.column_stack([
        _parse_column(frame, column, row_numbers) for column in schema.feature_columns])
    logger.info("Loaded %d rows and %d features from %s",
                data.shape[0], data.shape[1], path)
    return LabeledDataset(data, labels, class_names, list(schema.feature_columns))


def write_csv(dataset: LabeledDataset, path: Union[str, Path]):
    """
    Write the features (17 significant digits) and, when present, the class
    names in a `label` column.

    Raises
    ------
    DataError
        If the file cannot be written.
    """
    path = Path(path)
    frame = pd.DataFrame(dataset.data, columns=dataset.feature_names)
    if dataset.true_labels is not None:
        frame[LABEL_COLUMN] = [dataset.class_names[c] for c in dataset.true_labels]
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                     encoding="utf-8", lineterminator="\n")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
