"""Environment matching: pick a small row subset whose feature-to-output
distance profile matches the full dataset's.

The per-row distance of output y_i to its feature row is the summed squared
difference against every feature value; averaging over rows gives the final
distance of a space.  The environment gap between the full data and a sample
is the absolute difference of the two averages, and the subsample search
minimizes it.  Because the row distances enter only through their mean, the
search reduces to picking n' values whose mean is closest to the full mean:
below a combinatorial budget of 1e5 subsets it enumerates exactly, above it
a greedy construction plus single-swap local search runs from seeded
restarts.

The risk minimizer adds a second term: the divergence between the sampled and
full output distributions, traded against the gap by a regularization weight.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import Dataset, OutputVector
from .dimdist import histogram_divergence
from .errors import InputError
from .models import ModelHandle, evaluate_model

EXHAUSTIVE_SUBSET_BUDGET = 100_000


@dataclass(frozen=True)
class EnvGapResult:
    d2_final: float
    d2_prime_final: float
    gap: float
    selected_rows: tuple[int, ...] | None


@dataclass(frozen=True)
class RiskSearchConfig:
    n_prime: int
    lam: float = 1.0
    candidates: int = 32
    refine_iters: int = 50
    seed: int = 0
    divergence: str = "js"
    bins: int = 8

    def __post_init__(self):
        if self.n_prime < 1:
            raise InputError("n_prime must be >= 1")
        if self.candidates < 1:
            raise InputError("candidates must be >= 1")
        if self.lam < 0:
            raise InputError("lambda must be >= 0")
        if self.divergence not in ("kl", "js"):
            raise InputError(f"unknown divergence {self.divergence!r}")
        if self.bins < 1:
            raise InputError("bins must be >= 1")


def _output_values(output) -> np.ndarray:
    if isinstance(output, OutputVector):
        return output.values
    arr = np.asarray(output, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("output must be a nonempty 1-D array")
    return arr


def local_distance(y_i: float, row: Sequence[float]) -> float:
    """Squared distance of one output value to every feature value in its row."""
    r = np.asarray(row, dtype=np.float64)
    return float(np.sum((y_i - r) ** 2))


def per_row_distances(dataset: Dataset, output) -> np.ndarray:
    y = _output_values(output)
    if y.size != dataset.n:
        raise InputError("output length does not match dataset rows")
    return np.sum((y[:, None] - dataset.matrix()) ** 2, axis=1)


def final_distance(output, dataset: Dataset) -> float:
    """Average per-row distance: (1/n) * sum_j sum_i (y_i - f_ji)^2."""
    return float(per_row_distances(dataset, output).mean())


def _match_rows(full: Dataset, y_full, sample: Dataset, y_sample) -> tuple[int, ...] | None:
    pool: dict[tuple, list[int]] = {}
    fm = full.matrix()
    yv = _output_values(y_full)
    for i in range(full.n):
        pool.setdefault((*fm[i], yv[i]), []).append(i)
    matched = []
    sm = sample.matrix()
    sv = _output_values(y_sample)
    for i in range(sample.n):
        key = (*sm[i], sv[i])
        bucket = pool.get(key)
        if not bucket:
            return None
        matched.append(bucket.pop(0))
    return tuple(matched)


def environment_gap(
    full: tuple[Dataset, OutputVector | np.ndarray],
    sample: tuple[Dataset, OutputVector | np.ndarray],
) -> EnvGapResult:
    """|D2_final(full) - D2_final(sample)|; zero iff the averages coincide."""
    full_ds, full_y = full
    sample_ds, sample_y = sample
    if full_ds.k != sample_ds.k:
        raise InputError(
            f"feature count mismatch: full has {full_ds.k}, sample has {sample_ds.k}"
        )
    d2 = final_distance(full_y, full_ds)
    d2p = final_distance(sample_y, sample_ds)
    return EnvGapResult(
        d2_final=d2,
        d2_prime_final=d2p,
        gap=abs(d2 - d2p),
        selected_rows=_match_rows(full_ds, full_y, sample_ds, sample_y),
    )


def _gap_of(distances: np.ndarray, d2: float, rows: np.ndarray) -> float:
    return abs(float(distances[rows].mean()) - d2)


def _greedy_subset(distances: np.ndarray, n_prime: int, target_sum: float) -> np.ndarray:
    order = np.argsort(distances, kind="stable")
    remaining = [(float(distances[i]), int(i)) for i in order]
    picked: list[int] = []
    total = 0.0
    for step in range(n_prime):
        need = (target_sum - total) / (n_prime - step)
        pos = bisect_left(remaining, (need, -1))
        best_pos = pos
        if pos == len(remaining) or (
            pos > 0 and need - remaining[pos - 1][0] <= remaining[pos][0] - need
        ):
            best_pos = pos - 1
        value, idx = remaining.pop(best_pos)
        picked.append(idx)
        total += value
    return np.array(sorted(picked), dtype=np.intp)


def _swap_refine(
    distances: np.ndarray,
    rows: np.ndarray,
    target_sum: float,
    max_passes: int,
) -> np.ndarray:
    n = distances.size
    in_set = np.zeros(n, dtype=bool)
    in_set[rows] = True
    current = float(distances[rows].sum())
    for _ in range(max_passes):
        gap_sum = target_sum - current
        out_idx = np.flatnonzero(~in_set)
        if out_idx.size == 0:
            break
        out_vals = distances[out_idx]
        order = np.argsort(out_vals, kind="stable")
        out_idx = out_idx[order]
        out_vals = out_vals[order]
        in_idx = np.flatnonzero(in_set)
        in_vals = distances[in_idx]
        wanted = in_vals + gap_sum
        pos = np.searchsorted(out_vals, wanted)
        best = (abs(gap_sum), -1, -1)
        for shift in (0, -1):
            cand = pos + shift
            ok = (cand >= 0) & (cand < out_vals.size)
            if not np.any(ok):
                continue
            residual = np.abs(out_vals[cand[ok]] - wanted[ok])
            j = int(np.argmin(residual))
            if residual[j] < best[0] - 1e-18:
                src = np.flatnonzero(ok)[j]
                best = (float(residual[j]), int(in_idx[src]), int(out_idx[cand[ok][j]]))
        if best[1] < 0:
            break
        _, drop, add = best
        in_set[drop] = False
        in_set[add] = True
        current += float(distances[add]) - float(distances[drop])
    return np.flatnonzero(in_set).astype(np.intp)


def _searched_subsets(distances: np.ndarray, cfg: RiskSearchConfig) -> list[np.ndarray]:
    """The refined subset family the gap search considers, in a fixed order.

    Exhaustive below the combinatorial budget (a single globally optimal
    subset); otherwise one refined subset per seeded restart, restart 0 being
    the greedy construction.  The family is nested in ``cfg.candidates``.
    """
    n = distances.size
    d2 = float(distances.mean())
    if math.comb(n, cfg.n_prime) <= EXHAUSTIVE_SUBSET_BUDGET:
        best_rows: tuple[int, ...] | None = None
        best_gap = math.inf
        for combo in itertools.combinations(range(n), cfg.n_prime):
            gap = abs(float(distances[list(combo)].mean()) - d2)
            if gap < best_gap:
                best_gap = gap
                best_rows = combo
        assert best_rows is not None
        return [np.array(best_rows, dtype=np.intp)]
    target_sum = d2 * cfg.n_prime
    subsets = []
    best_gap = math.inf
    for restart in range(cfg.candidates):
        if restart == 0:
            start = _greedy_subset(distances, cfg.n_prime, target_sum)
        else:
            rng = np.random.default_rng([cfg.seed, restart])
            start = np.sort(rng.choice(n, cfg.n_prime, replace=False)).astype(np.intp)
        refined = _swap_refine(distances, start, target_sum, cfg.refine_iters)
        subsets.append(refined)
        best_gap = min(best_gap, _gap_of(distances, d2, refined))
        if best_gap == 0.0:
            break
    return subsets


def select_lightweight_sample(
    dataset: Dataset,
    output,
    cfg: RiskSearchConfig,
) -> EnvGapResult:
    """Row subset of size n' minimizing the environment gap.

    Exhaustive (and therefore globally optimal) when C(n, n') is at most
    1e5; otherwise greedy construction plus single-swap refinement from
    ``cfg.candidates`` seeded restarts.
    """
    n = dataset.n
    if cfg.n_prime > n:
        raise InputError(f"n_prime {cfg.n_prime} exceeds dataset rows {n}")
    distances = per_row_distances(dataset, output)
    d2 = float(distances.mean())
    rows = min(_searched_subsets(distances, cfg), key=lambda s: _gap_of(distances, d2, s))
    d2p = float(distances[rows].mean())
    return EnvGapResult(
        d2_final=d2,
        d2_prime_final=d2p,
        gap=abs(d2 - d2p),
        selected_rows=tuple(int(i) for i in rows),
    )


def output_distribution_loss(
    y_full,
    y_sample,
    cfg: RiskSearchConfig,
    epsilon: float = 0.0,
) -> float:
    """Divergence between the sampled and full output distributions, in bits."""
    full = _output_values(y_full)
    sample = _output_values(y_sample)
    lo = min(full.min(), sample.min())
    hi = max(full.max(), sample.max())
    if hi == lo:
        if cfg.bins > 1:
            raise InputError(
                "output support has zero width; use bins=1 for constant outputs"
            )
        return 0.0
    return histogram_divergence(sample, full, cfg.divergence, cfg.bins, epsilon)


def risk_minimize(
    dataset: Dataset,
    model: ModelHandle,
    cfg: RiskSearchConfig,
    epsilon: float = 0.0,
) -> tuple[EnvGapResult, float]:
    """Pick the candidate subsample minimizing loss + lambda * gap.

    The candidate set is the gap search's refined subset family followed by
    ``cfg.candidates`` seeded random subsets.  Every member depends only on
    (seed, index), so growing the candidate count never worsens the
    objective.  Ties keep the earliest candidate, so as lambda grows the
    gap-search winner prevails.
    """
    if cfg.n_prime > dataset.n:
        raise InputError(f"n_prime {cfg.n_prime} exceeds dataset rows {dataset.n}")
    y_full = evaluate_model(model, dataset).values
    distances = per_row_distances(dataset, y_full)
    d2 = float(distances.mean())

    searched = _searched_subsets(distances, cfg)
    searched.sort(key=lambda s: _gap_of(distances, d2, s))
    candidates: list[np.ndarray] = searched
    n = dataset.n
    for i in range(cfg.candidates):
        rng = np.random.default_rng([cfg.seed, 7919, i])
        candidates.append(
            np.sort(rng.choice(n, cfg.n_prime, replace=False)).astype(np.intp)
        )

    best: tuple[float, float, float, np.ndarray] | None = None
    for rows in candidates:
        gap = _gap_of(distances, d2, rows)
        loss = output_distribution_loss(y_full, y_full[rows], cfg, epsilon)
        objective = loss + cfg.lam * gap
        if best is None or objective < best[0]:
            best = (objective, loss, gap, rows)
    assert best is not None
    _, loss, gap, rows = best
    result = EnvGapResult(
        d2_final=d2,
        d2_prime_final=float(distances[rows].mean()),
        gap=gap,
        selected_rows=tuple(int(i) for i in rows),
    )
    return result, loss
