"""Correlation-impact scores for independent features.

The score of a feature against the output is the between-group share of the
total sum of squares when the feature's values and the output's values are
pooled as two equal-sized groups around their joint mean.  By the ANOVA
decomposition it always lands in [0, 1]: 1 when the two value sets are
constant and distinct, 0 when they coincide.

Also here: the ratio prediction model over direction-grouped features and an
analytic-vs-finite-difference derivative checker for it.  For a numerator
feature the derivative is weight/D; for a denominator feature it is
-weight*N/D^2, with N and D the numerator and denominator sums at the
evaluation row.  Dividing a numerator-side derivative by its weight gives the
shared constant 1/D, which is what the checker's ratio field exposes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .data import FeatureColumn, OutputVector
from .errors import DegenerateFeatureError, InputError, SingularRowError

Direction = Literal["numerator", "denominator"]


def _values(col, what: str) -> np.ndarray:
    if isinstance(col, (FeatureColumn, OutputVector)):
        arr = col.values
    else:
        arr = np.asarray(col, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError(f"{what} must be a nonempty 1-D array")
    return arr


def _name_of(col, default: str) -> str:
    return col.name if isinstance(col, FeatureColumn) else default


@dataclass(frozen=True)
class PcirScore:
    feature: str
    eta: float
    f_mean: float
    y_mean: float
    joint_mean: float
    direction: Direction


def feature_means(f, y) -> tuple[float, float, float]:
    """Means of the feature, the output, and their average (the joint mean)."""
    fv = _values(f, "feature")
    yv = _values(y, "output")
    if fv.size != yv.size:
        raise InputError("feature and output lengths differ")
    f_mean = float(fv.mean())
    y_mean = float(yv.mean())
    return f_mean, y_mean, (f_mean + y_mean) / 2.0


def assign_direction(f, y, name: str | None = None) -> Direction:
    """Numerator when the sample covariance with the output is >= 0.

    A zero covariance is a tie; it resolves to numerator with a warning.
    """
    fv = _values(f, "feature")
    yv = _values(y, "output")
    if fv.size != yv.size:
        raise InputError("feature and output lengths differ")
    cov = float(np.mean((fv - fv.mean()) * (yv - yv.mean())))
    if cov == 0.0:
        warnings.warn(
            f"direction tie (zero covariance) for {name or _name_of(f, 'feature')!r};"
            " defaulting to numerator",
            RuntimeWarning,
            stacklevel=2,
        )
        return "numerator"
    return "numerator" if cov > 0.0 else "denominator"


def pcir(f, y) -> PcirScore:
    """Between/total sum-of-squares ratio of the {feature, output} partition."""
    fv = _values(f, "feature")
    yv = _values(y, "output")
    if fv.size != yv.size:
        raise InputError("feature and output lengths differ")
    n = fv.size
    f_mean = float(fv.mean())
    y_mean = float(yv.mean())
    g = (f_mean + y_mean) / 2.0
    ss_between = n * ((f_mean - g) ** 2 + (y_mean - g) ** 2)
    ss_total = float(np.sum((fv - g) ** 2) + np.sum((yv - g) ** 2))
    name = _name_of(f, "feature")
    if ss_total == 0.0:
        raise DegenerateFeatureError(
            [name], "feature and output are constant and equal"
        )
    eta = ss_between / ss_total
    return PcirScore(
        feature=name,
        eta=eta,
        f_mean=f_mean,
        y_mean=y_mean,
        joint_mean=g,
        direction=assign_direction(fv, yv, name=name),
    )


@dataclass(frozen=True)
class IndependentModelSpec:
    """Weights in [0, 1] plus the numerator/denominator split index."""

    etas: tuple[float, ...]
    split: int

    def __post_init__(self):
        k = len(self.etas)
        if not 1 <= self.split < k:
            raise InputError(f"split must be in [1, {k}), got {self.split}")
        for e in self.etas:
            if not (0.0 <= e <= 1.0):
                raise InputError(f"weight {e} outside [0, 1]")


def _split_sums(spec: IndependentModelSpec, row: np.ndarray) -> tuple[float, float]:
    w = np.asarray(spec.etas, dtype=np.float64)
    if row.size != w.size:
        raise InputError(f"row has {row.size} values, model expects {w.size}")
    num = float(w[: spec.split] @ row[: spec.split])
    den = float(w[spec.split :] @ row[spec.split :])
    return num, den


def excir_independent_predict(spec: IndependentModelSpec, row: Sequence[float]) -> float:
    """Evaluate the weighted ratio model at one row."""
    r = np.asarray(row, dtype=np.float64)
    num, den = _split_sums(spec, r)
    if den == 0.0:
        raise SingularRowError("denominator sum is zero at this row")
    return num / den


@dataclass(frozen=True)
class DerivativeCheck:
    index: int
    analytic: float
    finite_diff: float
    ratio_to_eta: float


def derivative_check(
    spec: IndependentModelSpec,
    row: Sequence[float],
    h: float = 1e-6,
) -> list[DerivativeCheck]:
    """Compare analytic partial derivatives with central differences.

    All numerator-side ``ratio_to_eta`` values equal 1/D at the row, so they
    must agree to machine precision; denominator-side derivatives are negative
    whenever the numerator sum is positive.
    """
    if h <= 0:
        raise InputError("step h must be positive")
    r = np.asarray(row, dtype=np.float64)
    num, den = _split_sums(spec, r)
    if den == 0.0:
        raise SingularRowError("denominator sum is zero at this row")
    checks = []
    for j, eta in enumerate(spec.etas):
        if j < spec.split:
            analytic = eta / den
        else:
            analytic = -eta * num / den**2
        plus = r.copy()
        plus[j] += h
        minus = r.copy()
        minus[j] -= h
        fd = (
            excir_independent_predict(spec, plus)
            - excir_independent_predict(spec, minus)
        ) / (2.0 * h)
        ratio = analytic / eta if eta != 0.0 else float("nan")
        checks.append(DerivativeCheck(j, analytic, fd, ratio))
    return checks
