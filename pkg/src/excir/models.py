"""Black-box model handles and their row-wise evaluation.

Three variants: a closed-form ratio model defined by generative weights, a
precomputed prediction column already present in the dataset, and an external
command.  The external protocol is deliberately primitive: the command
receives headerless CSV data rows on stdin and must print exactly one
prediction per input row on stdout.
"""

from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .data import Dataset, OutputVector
from .errors import EvaluationError, InputError, SingularRowError


@dataclass(frozen=True)
class SyntheticModel:
    """Ratio model: y = sum(w[:split] * x[:split]) / sum(w[split:] * x[split:])."""

    weights: tuple[float, ...]
    split: int

    def __post_init__(self):
        k = len(self.weights)
        if not 1 <= self.split < k:
            raise InputError(f"split must be in [1, {k}), got {self.split}")
        if any(not np.isfinite(w) for w in self.weights):
            raise InputError("model weights must be finite")

    def predict_rows(self, x: np.ndarray) -> np.ndarray:
        w = np.asarray(self.weights, dtype=np.float64)
        if x.shape[1] != w.size:
            raise InputError(f"model expects {w.size} features, got {x.shape[1]}")
        num = x[:, : self.split] @ w[: self.split]
        den = x[:, self.split :] @ w[self.split :]
        zero = np.flatnonzero(den == 0.0)
        if zero.size:
            raise SingularRowError(f"zero denominator at row {int(zero[0])}")
        return num / den


@dataclass(frozen=True)
class PrecomputedModel:
    """Predictions read verbatim from a named dataset column."""

    column: str


@dataclass(frozen=True)
class ExternalModel:
    """Predictions produced by an external command (one line per row)."""

    command: str


ModelHandle = Union[SyntheticModel, PrecomputedModel, ExternalModel]


def _precomputed_values(model: PrecomputedModel, dataset: Dataset) -> np.ndarray:
    if dataset.output is not None and dataset.output_name == model.column:
        return dataset.output.values
    for col in dataset.features:
        if col.name == model.column:
            return col.values
    raise InputError(f"precomputed column {model.column!r} not in dataset")


def _run_external(model: ExternalModel, x: np.ndarray, rows: np.ndarray) -> np.ndarray:
    payload = "\n".join(",".join(repr(float(v)) for v in row) for row in x) + "\n"
    try:
        proc = subprocess.run(
            shlex.split(model.command),
            input=payload,
            capture_output=True,
            text=True,
            check=False,
        )
    except OSError as exc:
        raise EvaluationError(f"could not run external model: {exc}") from exc
    if proc.returncode != 0:
        raise EvaluationError(
            f"external model exited with {proc.returncode}: {proc.stderr.strip()}"
        )
    lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
    if len(lines) != len(x):
        raise EvaluationError(
            f"external model printed {len(lines)} predictions for {len(x)} rows"
        )
    preds = np.empty(len(x), dtype=np.float64)
    for i, line in enumerate(lines):
        try:
            preds[i] = float(line)
        except ValueError:
            raise EvaluationError(
                f"non-numeric prediction {line!r} for row {int(rows[i])}"
            ) from None
    return preds


def evaluate_model(
    model: ModelHandle,
    dataset: Dataset,
    rows: Sequence[int] | None = None,
) -> OutputVector:
    """Evaluate a model on the requested rows (all rows when ``rows`` is None).

    Predictions come back in request order.  Evaluation is a pure function of
    the row values for the synthetic and precomputed variants.
    """
    if rows is None:
        idx = np.arange(dataset.n, dtype=np.intp)
    else:
        idx = np.asarray(rows, dtype=np.intp)
        if idx.size == 0:
            raise InputError("empty row set")
        if idx.min() < 0 or idx.max() >= dataset.n:
            raise InputError(f"row index out of range [0, {dataset.n})")

    if isinstance(model, PrecomputedModel):
        return OutputVector(_precomputed_values(model, dataset)[idx])
    x = dataset.matrix()[idx]
    if isinstance(model, SyntheticModel):
        return OutputVector(model.predict_rows(x))
    if isinstance(model, ExternalModel):
        return OutputVector(_run_external(model, x, idx))
    raise InputError(f"unknown model handle {model!r}")


def parse_model_flag(text: str) -> ModelHandle:
    """Parse the CLI --model value.

    Accepted forms: ``precomputed:<column>``, ``exec:<command line>`` and
    ``synthetic:<truth.json>`` (a sidecar holding generative weights/split).
    """
    kind, sep, arg = text.partition(":")
    if not sep or not arg:
        raise InputError(f"malformed model spec {text!r}")
    if kind == "precomputed":
        return PrecomputedModel(arg)
    if kind == "exec":
        return ExternalModel(arg)
    if kind == "synthetic":
        import json
        from pathlib import Path

        p = Path(arg)
        if not p.exists():
            raise InputError(f"no such model sidecar: {p}")
        payload = json.loads(p.read_text(encoding="utf-8"))
        try:
            return SyntheticModel(tuple(payload["betas"]), int(payload["split"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"sidecar {p} lacks betas/split: {exc}") from exc
    raise InputError(f"unknown model kind {kind!r}")
