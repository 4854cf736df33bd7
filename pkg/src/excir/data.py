"""Tabular dataset model: typed feature columns, an optional output column,
and CSV loading/writing.

Columns are either ``discrete`` (integer-coded categories) or ``continuous``.
Unhinted columns are auto-typed: a column whose values are all integral with
at most :data:`MAX_AUTO_CATEGORIES` distinct values becomes discrete.  All
arrays are frozen after construction so datasets can be shared freely across
worker threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import InputError

Kind = Literal["discrete", "continuous"]

MAX_AUTO_CATEGORIES = 32


def _freeze(values: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"column values must be one-dimensional, got shape {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _check_finite(arr: np.ndarray, what: str) -> None:
    if arr.size == 0:
        raise InputError(f"{what} is empty")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} contains NaN or infinite values")


@dataclass(frozen=True)
class FeatureColumn:
    """A named column of n observations with a declared kind."""

    name: str
    kind: Kind
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        _check_finite(self.values, f"feature {self.name!r}")
        if self.kind not in ("discrete", "continuous"):
            raise InputError(f"unknown column kind {self.kind!r}")
        if self.kind == "discrete" and not np.all(self.values == np.floor(self.values)):
            raise InputError(f"discrete feature {self.name!r} has non-integer values")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class OutputVector:
    """Model outputs (or targets) aligned with a dataset's rows."""

    values: np.ndarray
    kind: Kind = "continuous"

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        _check_finite(self.values, "output")
        if self.kind == "discrete" and not np.all(self.values == np.floor(self.values)):
            raise InputError("discrete output has non-integer values")

    def __len__(self) -> int:
        return self.values.size

    def take(self, rows: Sequence[int]) -> "OutputVector":
        return OutputVector(self.values[np.asarray(rows, dtype=np.intp)], self.kind)


@dataclass(frozen=True)
class Dataset:
    """k equal-length feature columns plus an optional output column."""

    features: tuple[FeatureColumn, ...]
    output: OutputVector | None = None
    output_name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        if not self.features:
            raise InputError("dataset needs at least one feature column")
        n = len(self.features[0])
        for col in self.features:
            if len(col) != n:
                raise InputError(
                    f"feature {col.name!r} has {len(col)} rows, expected {n}"
                )
        names = [c.name for c in self.features]
        if len(set(names)) != len(names):
            raise InputError("feature names must be unique")
        if self.output is not None and len(self.output) != n:
            raise InputError("output length does not match feature length")

    @property
    def n(self) -> int:
        return len(self.features[0])

    @property
    def k(self) -> int:
        return len(self.features)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.features)

    def feature(self, name: str) -> FeatureColumn:
        for col in self.features:
            if col.name == name:
                return col
        raise InputError(f"no feature named {name!r}")

    def matrix(self) -> np.ndarray:
        """Row-major (n, k) view of the feature values."""
        return np.column_stack([c.values for c in self.features])

    def subset(self, rows: Sequence[int]) -> "Dataset":
        idx = np.asarray(rows, dtype=np.intp)
        if idx.size == 0:
            raise InputError("row subset is empty")
        if idx.min() < 0 or idx.max() >= self.n:
            raise InputError("row subset index out of range")
        feats = tuple(
            FeatureColumn(c.name, c.kind, c.values[idx]) for c in self.features
        )
        out = self.output.take(idx) if self.output is not None else None
        return Dataset(feats, out, self.output_name)


def _parse_cell(text: str, row: int, col: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputError(
            f"non-numeric cell {text!r} in column {col!r}, data row {row}"
        ) from None


def _auto_kind(values: np.ndarray, max_categories: int) -> Kind:
    if np.all(values == np.floor(values)):
        if np.unique(values).size <= max_categories:
            return "discrete"
    return "continuous"


def load_dataset(
    path: str | Path,
    output_col: str | None = None,
    discrete: Iterable[str] = (),
    continuous: Iterable[str] = (),
    max_categories: int = MAX_AUTO_CATEGORIES,
) -> Dataset:
    """Read a headered CSV ('.' decimal separator) into a typed dataset.

    ``discrete``/``continuous`` name columns whose kind is forced; everything
    else is auto-typed.  Hinting a non-integer column as discrete is an error.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise InputError("duplicate column names in header")
        rows: list[list[str]] = []
        for i, row in enumerate(reader):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise InputError(
                    f"ragged row {i}: {len(row)} cells, header has {len(header)}"
                )
            rows.append(row)
    if not rows:
        raise InputError(f"{path} has a header but no data rows")

    columns: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        columns[name] = np.array(
            [_parse_cell(r[j], i, name) for i, r in enumerate(rows)], dtype=np.float64
        )

    discrete = set(discrete)
    continuous = set(continuous)
    for hinted in (discrete | continuous) - set(header):
        raise InputError(f"hinted column {hinted!r} not in file")
    if discrete & continuous:
        raise InputError(f"columns hinted both ways: {sorted(discrete & continuous)}")
    if output_col is not None and output_col not in header:
        raise InputError(f"output column {output_col!r} not in file")

    def kind_of(name: str) -> Kind:
        if name in discrete:
            values = columns[name]
            if not np.all(values == np.floor(values)):
                raise InputError(f"column {name!r} hinted discrete but has non-integer values")
            return "discrete"
        if name in continuous:
            return "continuous"
        return _auto_kind(columns[name], max_categories)

    feats = []
    output = None
    for name in header:
        if name == output_col:
            output = OutputVector(columns[name], kind_of(name))
        else:
            feats.append(FeatureColumn(name, kind_of(name), columns[name]))
    if not feats:
        raise InputError("dataset has no feature columns besides the output")
    return Dataset(tuple(feats), output, output_col)


def _format_value(v: float) -> str:
    v = float(v)
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset back to CSV; finite decimal inputs round-trip exactly."""
    path = Path(path)
    header = list(dataset.names)
    cols = [c.values for c in dataset.features]
    if dataset.output is not None:
        header.append(dataset.output_name or "y")
        cols.append(dataset.output.values)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(dataset.n):
            writer.writerow([_format_value(col[i]) for col in cols])


def dataset_from_mapping(
    data: dict[str, Sequence[float]],
    output_col: str | None = None,
    discrete: Iterable[str] = (),
    continuous: Iterable[str] = (),
    max_categories: int = MAX_AUTO_CATEGORIES,
) -> Dataset:
    """Build a dataset from a name -> values mapping (column order preserved)."""
    discrete = set(discrete)
    continuous = set(continuous)
    feats = []
    output = None
    for name, values in data.items():
        arr = np.asarray(values, dtype=np.float64)
        if name in discrete:
            kind: Kind = "discrete"
        elif name in continuous:
            kind = "continuous"
        else:
            kind = _auto_kind(arr, max_categories)
        if name == output_col:
            output = OutputVector(arr, kind)
        else:
            feats.append(FeatureColumn(name, kind, arr))
    if output_col is not None and output is None:
        raise InputError(f"output column {output_col!r} not in mapping")
    if not feats:
        raise InputError("mapping has no feature columns besides the output")
    return Dataset(tuple(feats), output, output_col)
