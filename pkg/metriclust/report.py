"""
Deterministic JSON emission for reports and plot data. Dictionaries keep
their insertion order, floats are written with 17 significant digits
(enough to read back the same double) and NaN/Infinity are refused, so
identical runs produce byte-identical files.
"""

import json
import math
from pathlib import Path
from typing import Any, Union

import numpy as np

from metriclust.errors import DataError

SCHEMA_DIR = Path(__file__).parent / "schemas"
REPORT_SCHEMA = SCHEMA_DIR / "report.schema.json"


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars and arrays (recursively) to plain Python values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def float_text(value: float) -> str:
    """`%.17g` of a finite float, with `.0` appended to integral values."""
    if not math.isfinite(value):
        raise ValueError(f"Out of range float values are not JSON compliant: {value!r}")
    text = f"{value:.17g}"
    if "." not in text and "e" not in text:
        text += ".0"
    return text


class ReportEncoder(json.JSONEncoder):
    """JSON encoder writing every float through `float_text`."""

    def iterencode(self, o, _one_shot=False):
        markers = {} if self.check_circular else None
        if self.ensure_ascii:
            encoder = json.encoder.encode_basestring_ascii
        else:
            encoder = json.encoder.encode_basestring
        # pylint: disable=W0212:protected-access
        iterencode = json.encoder._make_iterencode(
            markers, self.default, encoder, self.indent, float_text,
            self.key_separator, self.item_separator, self.sort_keys,
            self.skipkeys, _one_shot)
        return iterencode(o, 0)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), cls=ReportEncoder, indent=2,
                      allow_nan=False, ensure_ascii=False) + "\n"


def write_json(obj: Any, path: Union[str, Path]) -> Path:
    """
    Write `obj` as JSON to `path`, creating parent directories.

    Raises
    ------
    DataError
        If the file cannot be written.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(obj), encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
    return path


def load_schema(path: Union[str, Path] = REPORT_SCHEMA) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
