"""End-to-end explanation pipeline: ingest -> subsample -> attribute -> report.

The same code path backs the CLI and the library ``explain`` entry point, so
both produce numerically identical reports.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .data import Dataset, OutputVector, dataset_from_mapping, load_dataset
from .envmatch import RiskSearchConfig, risk_minimize
from .errors import DegenerateFeatureError, ExcirError, InputError
from .infotheory import (
    DiscretizedColumn,
    discretize,
    joint_mutual_information,
    mutual_information,
    shannon_entropy,
)
from .mcir import McirScore, mcir_full, mcir_pair
from .models import ModelHandle, PrecomputedModel, evaluate_model
from .pcir import pcir as pcir_score
from .report import FeatureRecord, build_report

MODES = ("independent", "pairwise", "full")


@dataclass(frozen=True)
class ExplainConfig:
    mode: str = "pairwise"
    bins: int = 8
    n_prime: int | None = None
    lam: float = 1.0
    candidates: int = 32
    refine_iters: int = 50
    divergence: str = "js"
    epsilon: float = 0.0
    seed: int = 0
    threads: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.bins < 1:
            raise InputError("bins must be >= 1")
        if self.n_prime is not None and self.n_prime < 1:
            raise InputError("n_prime must be >= 1")


def default_n_prime(n: int) -> int:
    return min(n, max(32, n // 10))


def _pair_partner(i: int, features: Sequence[DiscretizedColumn]) -> int:
    """Most informative partner for feature i (highest pairwise MI, first wins)."""
    best_j = -1
    best_mi = -1.0
    for j, other in enumerate(features):
        if j == i:
            continue
        mi = mutual_information(features[i], other)
        if mi > best_mi:
            best_mi = mi
            best_j = j
    return best_j


def _attribute_one(
    i: int,
    dataset: Dataset,
    y_values: np.ndarray,
    y_col: DiscretizedColumn,
    feat_cols: Sequence[DiscretizedColumn],
    mode: str,
) -> tuple[FeatureRecord, McirScore | None]:
    col = dataset.features[i]
    score = pcir_score(col, y_values)
    entropy = shannon_entropy(feat_cols[i])
    mscore: McirScore | None = None
    if mode == "pairwise":
        j = _pair_partner(i, feat_cols)
        mscore = mcir_pair(y_col, feat_cols[i], feat_cols[j], name=col.name)
    elif mode == "full":
        mscore = mcir_full(y_col, i, feat_cols, names=dataset.names)
    record = FeatureRecord(
        name=col.name,
        kind=col.kind,
        direction=score.direction,
        pcir=score.eta,
        entropy_bits=entropy,
        mcir=mscore.mcir if mscore else None,
        cmmi_bits=mscore.cmmi_bits if mscore else None,
    )
    return record, mscore


def explain_dataset(
    dataset: Dataset,
    model: ModelHandle | None,
    cfg: ExplainConfig,
) -> dict[str, Any]:
    """Run the full pipeline and return the report structure."""
    if model is None:
        if dataset.output is None or dataset.output_name is None:
            raise InputError("need an output column or a model to explain")
        model = PrecomputedModel(dataset.output_name)
    if cfg.mode in ("pairwise", "full") and dataset.k < 2:
        raise InputError(f"mode {cfg.mode!r} needs at least two features")

    n = dataset.n
    n_prime = cfg.n_prime if cfg.n_prime is not None else default_n_prime(n)
    if n_prime > n:
        raise InputError(f"n_prime {n_prime} exceeds dataset rows {n}")
    risk_cfg = RiskSearchConfig(
        n_prime=n_prime,
        lam=cfg.lam,
        candidates=cfg.candidates,
        refine_iters=cfg.refine_iters,
        seed=cfg.seed,
        divergence=cfg.divergence,
        bins=cfg.bins,
    )
    env, loss = risk_minimize(dataset, model, risk_cfg, cfg.epsilon)
    assert env.selected_rows is not None
    rows = list(env.selected_rows)

    sample = dataset.subset(rows)
    y_sample = evaluate_model(model, dataset, rows)
    if (
        isinstance(model, PrecomputedModel)
        and dataset.output is not None
        and dataset.output_name == model.column
        and dataset.output.kind == "discrete"
    ):
        y_sample = OutputVector(y_sample.values, "discrete")

    y_col = discretize(y_sample, cfg.bins)
    feat_cols = [discretize(c, cfg.bins) for c in sample.features]

    workers = cfg.threads if cfg.threads else (os.cpu_count() or 1)
    records: list[FeatureRecord | None] = [None] * dataset.k
    mscores: list[McirScore | None] = [None] * dataset.k
    degenerate: list[str] = []

    def run(i: int) -> None:
        try:
            records[i], mscores[i] = _attribute_one(
                i, sample, y_sample.values, y_col, feat_cols, cfg.mode
            )
        except DegenerateFeatureError as exc:
            degenerate.extend(exc.features)

    if workers > 1 and dataset.k > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(dataset.k)))
    else:
        for i in range(dataset.k):
            run(i)
    if degenerate:
        raise DegenerateFeatureError(sorted(set(degenerate)))
    feature_records = [r for r in records if r is not None]
    if len(feature_records) != dataset.k:
        raise ExcirError("attribution failed for some features")

    jmi_bits = None
    joint_impact = None
    if cfg.mode == "full":
        jmi_bits = joint_mutual_information(y_col, feat_cols)
    if cfg.mode in ("pairwise", "full"):
        scored = [m for m in mscores if m is not None]
        top = max(range(len(scored)), key=lambda i: (scored[i].mcir, -i))
        joint_impact = scored[top].joint_mutual_impact

    config_echo: dict[str, Any] = {
        "mode": cfg.mode,
        "bins": cfg.bins,
        "n_prime": n_prime,
        "lambda": cfg.lam,
        "candidates": cfg.candidates,
        "refine_iters": cfg.refine_iters,
        "divergence": cfg.divergence,
        "epsilon": cfg.epsilon,
        "seed": cfg.seed,
    }
    return build_report(
        config=config_echo,
        n=n,
        n_prime=n_prime,
        env_gap=env.gap,
        output_divergence_bits=loss,
        seed=cfg.seed,
        features=feature_records,
        jmi_bits=jmi_bits,
        joint_mutual_impact=joint_impact,
    )


def coerce_dataset(
    data: str | Path | Mapping[str, Sequence[float]] | Dataset,
    output_col: str | None = None,
    discrete: Sequence[str] = (),
    continuous: Sequence[str] = (),
) -> Dataset:
    if isinstance(data, Dataset):
        return data
    if isinstance(data, (str, Path)):
        return load_dataset(data, output_col, discrete, continuous)
    if isinstance(data, Mapping):
        return dataset_from_mapping(dict(data), output_col, discrete, continuous)
    raise InputError(f"cannot build a dataset from {type(data).__name__}")
