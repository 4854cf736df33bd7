"""Plug-in information estimators over discretized columns.

Everything here is maximum-likelihood on empirical cell frequencies: no
smoothing, log base 2, zero cells contributing nothing (0 log 0 := 0).  That
keeps the estimators exact on exhaustive tables, which is what the test
oracles rely on.  Continuous columns enter through equal-width binning.

Joint entropies are computed from sorted nonzero cell counts, so any
permutation of the argument columns produces a bit-identical value; the
derived quantities (MI, conditional MI) therefore satisfy their symmetries
exactly rather than up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import FeatureColumn, OutputVector
from .errors import InputError, TableBudgetError

TABLE_CELL_BUDGET = 10_000_000

_CLAMP = 1e-12


@dataclass(frozen=True)
class DiscretizedColumn:
    """Integer codes in [0, cardinality) plus where they came from."""

    codes: np.ndarray
    cardinality: int
    origin: str  # "discrete" or "binned"

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        if codes.ndim != 1 or codes.size == 0:
            raise InputError("codes must be a nonempty 1-D array")
        if self.cardinality < 1:
            raise InputError("cardinality must be >= 1")
        if codes.min() < 0 or codes.max() >= self.cardinality:
            raise InputError("codes out of range for declared cardinality")
        codes = codes.copy()
        codes.flags.writeable = False
        object.__setattr__(self, "codes", codes)

    def __len__(self) -> int:
        return self.codes.size


@dataclass(frozen=True)
class JointDistribution:
    """Dense empirical joint probability table."""

    arities: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        if self.table.shape != self.arities:
            raise InputError("table shape does not match arities")
        if np.any(self.table < 0):
            raise InputError("negative probability cell")
        if abs(float(self.table.sum()) - 1.0) > 1e-12:
            raise InputError("table does not sum to 1")


def discretize(
    col: FeatureColumn | OutputVector | np.ndarray,
    bins: int = 8,
) -> DiscretizedColumn:
    """Turn a column into integer codes.

    Discrete columns keep one code per native category, assigned in first
    appearance order.  Continuous columns get ``bins`` equal-width bins over
    [min, max]; a constant column collapses to a single category.
    """
    if bins < 1:
        raise InputError("bins must be >= 1")
    if isinstance(col, (FeatureColumn, OutputVector)):
        values = col.values
        kind = col.kind
    else:
        values = np.asarray(col, dtype=np.float64)
        kind = "continuous"

    if kind == "discrete":
        _, first_pos, inverse = np.unique(values, return_index=True, return_inverse=True)
        order = np.argsort(np.argsort(first_pos))  # unique index -> appearance rank
        return DiscretizedColumn(order[inverse], int(first_pos.size), "discrete")

    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return DiscretizedColumn(np.zeros(values.size, dtype=np.int64), 1, "binned")
    width = (hi - lo) / bins
    codes = np.minimum((((values - lo) / width)).astype(np.int64), bins - 1)
    return DiscretizedColumn(codes, bins, "binned")


def _as_columns(
    cols: DiscretizedColumn | Sequence[DiscretizedColumn],
) -> tuple[DiscretizedColumn, ...]:
    if isinstance(cols, DiscretizedColumn):
        return (cols,)
    return tuple(cols)


def _joint_counts(cols: Sequence[DiscretizedColumn]) -> tuple[np.ndarray, int]:
    """Flat nonzero-inclusive count vector for the joint table, plus n."""
    if not cols:
        raise InputError("need at least one column")
    n = len(cols[0])
    cells = 1
    for c in cols:
        if len(c) != n:
            raise InputError("columns have mismatched lengths")
        cells *= c.cardinality
    if cells > TABLE_CELL_BUDGET:
        raise TableBudgetError(cells, TABLE_CELL_BUDGET)
    flat = np.zeros(n, dtype=np.int64)
    for c in cols:
        flat = flat * c.cardinality + c.codes
    counts = np.bincount(flat, minlength=cells)
    return counts, n


def joint_distribution(
    cols: DiscretizedColumn | Sequence[DiscretizedColumn],
) -> JointDistribution:
    """Empirical joint probabilities as a dense table, one axis per column."""
    cols = _as_columns(cols)
    counts, n = _joint_counts(cols)
    arities = tuple(c.cardinality for c in cols)
    return JointDistribution(arities, (counts / n).reshape(arities))


def _entropy_from_counts(counts: np.ndarray, n: int) -> float:
    nz = np.sort(counts[counts > 0])
    # H = log2(n) - (1/n) * sum c*log2(c); exact for powers-of-two tables.
    return float(math.log2(n) - float(np.dot(nz, np.log2(nz))) / n)


def shannon_entropy(
    cols: DiscretizedColumn | Sequence[DiscretizedColumn],
    miller_madow: bool = False,
) -> float:
    """Joint Shannon entropy in bits; optionally Miller-Madow corrected."""
    cols = _as_columns(cols)
    counts, n = _joint_counts(cols)
    h = _entropy_from_counts(counts, n)
    if miller_madow:
        nonzero = int(np.count_nonzero(counts))
        h += (nonzero - 1) / (2.0 * n * math.log(2.0))
    return h


def _clamp(v: float) -> float:
    return 0.0 if -_CLAMP <= v < 0.0 else v


def mutual_information(
    x: DiscretizedColumn | Sequence[DiscretizedColumn],
    y: DiscretizedColumn | Sequence[DiscretizedColumn],
) -> float:
    """I(X; Y) = H(X) + H(Y) - H(X, Y), in bits."""
    x = _as_columns(x)
    y = _as_columns(y)
    return _clamp(shannon_entropy(x) + shannon_entropy(y) - shannon_entropy(x + y))


def conditional_mutual_information(
    y: DiscretizedColumn,
    x: DiscretizedColumn,
    z: Sequence[DiscretizedColumn] = (),
) -> float:
    """I(Y; X | Z) in bits; an empty Z reduces this to plain MI."""
    z = tuple(z)
    if not z:
        return mutual_information(y, x)
    h_yz = shannon_entropy((y,) + z)
    h_xz = shannon_entropy((x,) + z)
    h_z = shannon_entropy(z)
    h_yxz = shannon_entropy((y, x) + z)
    return _clamp(h_yz + h_xz - h_z - h_yxz)


def cmmi(
    y: DiscretizedColumn,
    target: DiscretizedColumn,
    others: Sequence[DiscretizedColumn],
) -> float:
    """Information the target feature adds about Y beyond all other features.

    With a single other feature this is exactly the pairwise conditional
    mutual information.
    """
    return conditional_mutual_information(y, target, tuple(others))


def joint_mutual_information(
    y: DiscretizedColumn,
    features: Sequence[DiscretizedColumn],
) -> float:
    """Information between Y and the joint tuple of all features, in bits."""
    features = tuple(features)
    if not features:
        raise InputError("need at least one feature")
    return mutual_information(y, features)
