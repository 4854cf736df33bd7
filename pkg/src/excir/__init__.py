"""Correlation-impact feature attribution for tabular data.

Library surface mirroring the CLI: :func:`explain` runs the full pipeline and
returns the report structure, :func:`pcir` and :func:`mcir` compute the
per-feature scores directly, and :func:`synth` generates the canonical
synthetic fixtures.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping, Sequence

__version__ = "0.1.0"

from .data import (  # noqa: F401
    Dataset,
    FeatureColumn,
    OutputVector,
    dataset_from_mapping,
    load_dataset,
    write_dataset,
)
from .errors import (  # noqa: F401
    DegenerateFeatureError,
    EvaluationError,
    ExcirError,
    InputError,
    SingularRowError,
    TableBudgetError,
)
from .infotheory import discretize  # noqa: F401
from .mcir import McirScore, mcir_full, mcir_pair  # noqa: F401
from .models import (  # noqa: F401
    ExternalModel,
    ModelHandle,
    PrecomputedModel,
    SyntheticModel,
    evaluate_model,
)
from .pcir import PcirScore, pcir as _pcir_one  # noqa: F401
from .pipeline import ExplainConfig, coerce_dataset, explain_dataset
from .report import dumps_report, loads_report


def explain(
    data: str | Path | Mapping[str, Sequence[float]] | Dataset,
    output_col: str | None = None,
    mode: str = "pairwise",
    bins: int = 8,
    n_prime: int | None = None,
    seed: int = 0,
    model: ModelHandle | None = None,
    discrete: Sequence[str] = (),
    continuous: Sequence[str] = (),
    **kwargs: Any,
) -> dict[str, Any]:
    """Run the explanation pipeline; returns the report.json structure.

    The result round-trips through the byte-stable serializer, so its values
    are bit-identical to what the CLI writes for the same inputs.
    """
    dataset = coerce_dataset(data, output_col, discrete, continuous)
    cfg = ExplainConfig(mode=mode, bins=bins, n_prime=n_prime, seed=seed, **kwargs)
    report = explain_dataset(dataset, model, cfg)
    return loads_report(dumps_report(report))


def pcir(
    data: str | Path | Mapping[str, Sequence[float]] | Dataset,
    output_col: str | None = None,
    discrete: Sequence[str] = (),
    continuous: Sequence[str] = (),
) -> list[PcirScore]:
    """Correlation-impact ratio of every feature against the output."""
    dataset = coerce_dataset(data, output_col, discrete, continuous)
    if dataset.output is None:
        raise InputError("need an output column")
    return [_pcir_one(col, dataset.output) for col in dataset.features]


def mcir(
    data: str | Path | Mapping[str, Sequence[float]] | Dataset,
    output_col: str | None = None,
    mode: str = "full",
    bins: int = 8,
    discrete: Sequence[str] = (),
    continuous: Sequence[str] = (),
) -> list[McirScore]:
    """Mutual correlation-impact ratio of every feature against the output."""
    from .pipeline import _pair_partner

    if mode not in ("pairwise", "full"):
        raise InputError(f"unknown mode {mode!r}")
    dataset = coerce_dataset(data, output_col, discrete, continuous)
    if dataset.output is None:
        raise InputError("need an output column")
    if dataset.k < 2:
        raise InputError("mcir needs at least two features")
    y_col = discretize(dataset.output, bins)
    cols = [discretize(c, bins) for c in dataset.features]
    scores = []
    for i, col in enumerate(dataset.features):
        if mode == "full":
            scores.append(mcir_full(y_col, i, cols, names=dataset.names))
        else:
            scores.append(mcir_pair(y_col, cols[i], cols[_pair_partner(i, cols)], name=col.name))
    return scores


def synth(preset_name: str, n: int, seed: int = 0, noise: float = 0.0):
    """Generate a canonical synthetic fixture plus its ground-truth record."""
    from .synthgen import preset

    return preset(preset_name, n, seed, noise)
