"""Reading and writing controller documents, reports and traces."""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import ArtifactError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _jsonable(value: Any) -> Any:
    """Convert report values into JSON-serializable data, keeping key order."""
    if value is None or isinstance(value, (str, bool, int, float)):
        return value

    if isinstance(value, np.generic):
        return _jsonable(value.item())

    if isinstance(value, complex):
        return [value.real, value.imag]

    if isinstance(value, Path):
        return str(value)

    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}

    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(item) for item in value]

    return str(value)


def _float_text(value: float) -> str:
    if value != value:
        return "NaN"
    if value in (float("inf"), float("-inf")):
        return "Infinity" if value > 0 else "-Infinity"
    text = format(value, ".17g")
    # keep floats recognizable as floats after reload
    return text if any(c in text for c in ".en") else text + ".0"


class _SeventeenDigitEncoder(json.JSONEncoder):
    """Writes every float with 17 significant digits, enough to reload it bit for bit."""

    def iterencode(self, o, _one_shot=False):
        indent = " " * self.indent if isinstance(self.indent, int) else self.indent
        return json.encoder._make_iterencode(
            {} if self.check_circular else None, self.default,
            json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring,
            indent, _float_text, self.key_separator, self.item_separator,
            self.sort_keys, self.skipkeys, _one_shot,
        )(o, 0)


def dumps(document: Dict[str, Any]) -> str:
    """Deterministic JSON text: insertion order kept, floats at 17 significant digits."""
    return json.dumps(_jsonable(document), indent=2, cls=_SeventeenDigitEncoder) + "\n"


def write_json(path: PathLike, document: Dict[str, Any]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(document))
    except OSError as e:
        raise ArtifactError("write_failed", f"Cannot write {path}: {e}")
    logger.debug("Wrote %s", path)
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ArtifactError("read_failed", f"Cannot read {path}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ArtifactError("parse_failed", f"{path} is not valid JSON: {e}")


def write_csv(
    path: PathLike,
    header: Sequence[str],
    rows: Iterable[Sequence[float]],
    comments: Sequence[str] = (),
) -> Path:
    """CSV with a header row; ``comments`` are appended as '# ...' lines."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(value)) for value in row])
            for comment in comments:
                handle.write(f"# {comment}\n")
    except OSError as e:
        raise ArtifactError("write_failed", f"Cannot write {path}: {e}")
    logger.debug("Wrote %s", path)
    return path


def read_csv(path: PathLike) -> Tuple[List[str], List[List[float]], List[str]]:
    """(header, numeric rows, comment lines without the leading '# ')."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise ArtifactError("read_failed", f"Cannot read {path}: {e}")
    comments = [line[2:] for line in lines if line.startswith("# ")]
    data = [line for line in lines if line and not line.startswith("#")]
    if not data:
        raise ArtifactError("parse_failed", f"{path} has no header row")
    reader = csv.reader(data)
    header = next(reader)
    try:
        rows = [[float(value) for value in row] for row in reader]
    except ValueError as e:
        raise ArtifactError("parse_failed", f"{path} has a non-numeric row: {e}")
    return header, rows, comments


def delta_comment(t: float, weight: float) -> str:
    return f"delta,t={t!r},weight={weight!r}"
