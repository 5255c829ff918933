"""CSV matrices, label files and the key-value summary/manifest format."""

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .admm import AdmmConfig

FORMAT_VERSION = "biadmm-kv/1"
_NORM_NAMES = {1: "l1", 2: "l2", math.inf: "linf"}


class CsvParseError(ValueError):
    """Malformed CSV input; ``line`` and ``column`` are 1-based."""

    def __init__(self, path, line, column, message):
        self.path, self.line, self.column = path, line, column
        super().__init__(f"{path}: line {line}, column {column}: {message}")


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


@dataclass
class LabelledMatrix:
    values: np.ndarray
    row_names: list = None
    col_names: list = None


def read_matrix(path):
    """Read a numeric CSV, auto-detecting a header row and a row-name column.

    A first row containing any non-numeric cell is a header; a first column
    whose body cells are all non-numeric holds row names. Empty, NaN or
    infinite cells are rejected with their position.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if any(c.strip() for c in r)]
    if not rows:
        raise CsvParseError(path, 1, 1, "no data")
    header = None
    if not all(_is_number(c) for c in rows[0][1]):
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise CsvParseError(path, 1, 1, "header but no data rows")
    names_col = all(not _is_number(r[0]) for _, r in rows)
    start = 1 if names_col else 0
    width = len(rows[0][1])
    values, names = [], []
    for lineno, r in rows:
        if len(r) != width:
            raise CsvParseError(path, lineno, min(len(r), width) + 1, f"expected {width} fields, found {len(r)}")
        out = []
        for j, cell in enumerate(r[start:], start=start + 1):
            cell = cell.strip()
            try:
                v = float(cell)
            except ValueError:
                raise CsvParseError(path, lineno, j, f"not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise CsvParseError(path, lineno, j, f"non-finite value {cell!r}")
            out.append(v)
        values.append(out)
        if names_col:
            names.append(r[0].strip())
    X = np.array(values, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise CsvParseError(path, rows[0][0], 1, "no numeric columns")
    col_names = header[start:] if header is not None else None
    return LabelledMatrix(X, names if names_col else None, col_names)


def write_matrix(path, X, row_names=None, col_names=None):
    """Write with 17 significant digits so reading back is exact."""
    X = np.asarray(X, dtype=np.float64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if col_names is not None:
            w.writerow(([""] if row_names is not None else []) + list(col_names))
        for i, row in enumerate(X):
            cells = ["%.17g" % v for v in row]
            w.writerow(([row_names[i]] if row_names is not None else []) + cells)


def write_labels(path, labels):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in np.asarray(labels).ravel():
            fh.write(f"{int(v)}\n")


def read_labels(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            try:
                out.append(int(s))
            except ValueError:
                raise CsvParseError(path, lineno, 1, f"not an integer label: {s!r}") from None
    return np.array(out, dtype=np.int64)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def write_summary(path, items):
    """Flat ``key = json`` lines, led by the format version."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"format_version = {json.dumps(FORMAT_VERSION)}\n")
        for key, val in items.items():
            if "=" in key or "\n" in key:
                raise ValueError(f"bad summary key {key!r}")
            fh.write(f"{key} = {json.dumps(_jsonable(val), sort_keys=True)}\n")


def read_summary(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            key, sep, val = line.partition(" = ")
            if not sep:
                raise CsvParseError(path, lineno, 1, "expected 'key = value'")
            out[key] = json.loads(val)
    version = out.pop("format_version", None)
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version!r}")
    return out


def config_to_dict(config):
    d = asdict(config)
    d["q"] = _NORM_NAMES[float(config.q)] if not isinstance(config.q, str) else config.q
    return d


def config_from_dict(d):
    return AdmmConfig(**d)


@dataclass
class RunManifest:
    """What a CLI run consumed and produced."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    grid: dict = None
    seed: int = None
    format_version: str = FORMAT_VERSION

    def to_items(self):
        return {
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "config": self.config,
            "grid": self.grid,
            "seed": self.seed,
        }

    def write(self, path):
        write_summary(path, self.to_items())

    @classmethod
    def read(cls, path):
        items = read_summary(path)
        return cls(**items)
