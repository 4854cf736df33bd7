"""Deterministic synthetic datasets with known generative structure.

The generative model is a weighted ratio: numerator features over denominator
features, each value first drawn from its own distribution, optionally copied
from a source feature (dependency edges), then zeroed by an independent
presence mask.  Rows whose denominator sum lands on zero are resampled so
every generated output is finite.

All randomness flows through the SplitMix64 stream in :mod:`excir.rng`;
identical specs produce bit-identical datasets on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .data import Dataset, FeatureColumn, OutputVector
from .errors import InputError
from .models import SyntheticModel
from .rng import SplitMix64

MAX_ROW_RESAMPLES = 1000


@dataclass(frozen=True)
class Bernoulli:
    p: float = 0.5

    def draw(self, g: SplitMix64) -> float:
        return float(g.bernoulli(self.p))

    kind = "discrete"


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def draw(self, g: SplitMix64) -> float:
        return g.uniform(self.lo, self.hi)

    kind = "continuous"


@dataclass(frozen=True)
class Categorical:
    categories: int

    def draw(self, g: SplitMix64) -> float:
        return float(g.below(self.categories))

    kind = "discrete"


FeatureDistribution = Union[Bernoulli, Uniform, Categorical]


@dataclass(frozen=True)
class DependencyEdge:
    """Target feature copies the source, except with probability ``noise``."""

    source: int
    target: int
    noise: float


@dataclass(frozen=True)
class SyntheticSpec:
    k: int
    n: int
    split: int
    betas: tuple[float, ...]
    distributions: tuple[FeatureDistribution, ...]
    presence: tuple[float, ...]
    edges: tuple[DependencyEdge, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise InputError("need at least two features")
        if self.n < 1:
            raise InputError("need at least one row")
        if not 1 <= self.split < self.k:
            raise InputError("split must leave at least one feature on each side")
        if len(self.betas) != self.k or len(self.distributions) != self.k:
            raise InputError("betas and distributions must have length k")
        if len(self.presence) != self.k:
            raise InputError("presence must have length k")
        if any(b <= 0 for b in self.betas):
            raise InputError("betas must be positive")
        for p in self.presence:
            if not 0.0 < p <= 1.0:
                raise InputError("presence probabilities must be in (0, 1]")
        for e in self.edges:
            if not (0 <= e.source < self.k and 0 <= e.target < self.k):
                raise InputError("dependency edge index out of range")
            if e.source == e.target:
                raise InputError("dependency edge cannot be a self-loop")
            if not 0.0 <= e.noise <= 1.0:
                raise InputError("edge noise must be in [0, 1]")

    def model(self) -> SyntheticModel:
        return SyntheticModel(self.betas, self.split)


@dataclass(frozen=True)
class GroundTruth:
    """Generative record written next to synthesized datasets."""

    preset: str | None
    betas: tuple[float, ...] | None
    split: int | None
    edges: tuple[DependencyEdge, ...]
    seed: int
    notes: str = ""

    def derivative_magnitudes(self, row: Sequence[float]) -> np.ndarray:
        """|dy/dx_j| of the generative ratio model at the given row."""
        if self.betas is None or self.split is None:
            raise InputError("ground truth has no generative ratio model")
        w = np.asarray(self.betas, dtype=np.float64)
        r = np.asarray(row, dtype=np.float64)
        num = float(w[: self.split] @ r[: self.split])
        den = float(w[self.split :] @ r[self.split :])
        if den == 0.0:
            raise InputError("ratio model is singular at this row")
        out = np.empty(w.size)
        out[: self.split] = np.abs(w[: self.split] / den)
        out[self.split :] = np.abs(-w[self.split :] * num / den**2)
        return out

    def to_json_dict(self) -> dict:
        return {
            "preset": self.preset,
            "betas": list(self.betas) if self.betas is not None else None,
            "split": self.split,
            "edges": [
                {"source": e.source, "target": e.target, "noise": e.noise}
                for e in self.edges
            ],
            "seed": self.seed,
            "notes": self.notes,
        }


def generate(spec: SyntheticSpec) -> tuple[Dataset, GroundTruth]:
    """Draw a dataset from the spec; same spec, same bits."""
    g = SplitMix64(spec.seed)
    w = np.asarray(spec.betas, dtype=np.float64)
    values = np.empty((spec.n, spec.k))
    outputs = np.empty(spec.n)
    for r in range(spec.n):
        for attempt in range(MAX_ROW_RESAMPLES):
            base = [dist.draw(g) for dist in spec.distributions]
            for e in spec.edges:
                if g.random() >= e.noise:
                    base[e.target] = base[e.source]
            row = np.array(
                [v if g.random() < p else 0.0 for v, p in zip(base, spec.presence)]
            )
            den = float(w[spec.split :] @ row[spec.split :])
            if den != 0.0:
                break
        else:
            raise InputError(
                f"row {r}: no nonzero denominator after {MAX_ROW_RESAMPLES} resamples"
            )
        values[r] = row
        outputs[r] = float(w[: spec.split] @ row[: spec.split]) / den

    feats = tuple(
        FeatureColumn(f"f{i + 1}", spec.distributions[i].kind, values[:, i])
        for i in range(spec.k)
    )
    dataset = Dataset(feats, OutputVector(outputs), "y")
    truth = GroundTruth(
        preset=None,
        betas=spec.betas,
        split=spec.split,
        edges=spec.edges,
        seed=spec.seed,
    )
    return dataset, truth


def _xor_preset(n: int, seed: int) -> tuple[Dataset, GroundTruth]:
    if n < 4 or n % 4 != 0:
        raise InputError("xor preset needs n to be a positive multiple of 4")
    table = np.array([[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=np.float64)
    rows = np.tile(table, (n // 4, 1))
    feats = (
        FeatureColumn("f1", "discrete", rows[:, 0]),
        FeatureColumn("f2", "discrete", rows[:, 1]),
    )
    ds = Dataset(feats, OutputVector(rows[:, 2], "discrete"), "y")
    truth = GroundTruth(
        preset="xor",
        betas=None,
        split=None,
        edges=(),
        seed=seed,
        notes="y = f1 xor f2, truth table tiled",
    )
    return ds, truth


def _draw_distinct(g: SplitMix64, ranges: Sequence[tuple[float, float]], gap: float):
    while True:
        vals = [g.uniform(lo, hi) for lo, hi in ranges]
        ok = all(
            abs(vals[i] - vals[j]) >= gap
            for i in range(len(vals))
            for j in range(i + 1, len(vals))
        )
        if ok:
            return vals


def _independent_k4_preset(n: int, seed: int) -> tuple[Dataset, GroundTruth]:
    # One dominant numerator feature against three denominator features, with
    # feature locations tied to the weights so that both the weighted-ratio
    # derivatives and the mean-separation scores order the features the same
    # way.  Weight ranges keep the output mean strictly below every feature
    # mean, which is what makes the top feature identifiable from data.
    g = SplitMix64(seed)
    betas = _draw_distinct(
        g, [(1.4, 2.0), (1.2, 1.8), (1.2, 1.8), (1.2, 1.8)], gap=0.02
    )
    dists: tuple[FeatureDistribution, ...] = (
        Uniform(2 * betas[0] + 3.0, 2 * betas[0] + 4.0),
        Uniform(betas[1] + 2.2, betas[1] + 3.2),
        Uniform(betas[2] + 2.2, betas[2] + 3.2),
        Uniform(betas[3] + 2.2, betas[3] + 3.2),
    )
    spec = SyntheticSpec(
        k=4,
        n=n,
        split=1,
        betas=tuple(betas),
        distributions=dists,
        presence=(1.0, 1.0, 1.0, 1.0),
        seed=seed + 1,
    )
    ds, truth = generate(spec)
    return ds, GroundTruth(
        preset="independent_k4",
        betas=truth.betas,
        split=truth.split,
        edges=(),
        seed=seed,
        notes="dominant numerator feature; locations tied to weights",
    )


def _chain_dependent_k3_preset(
    n: int, seed: int, noise: float
) -> tuple[Dataset, GroundTruth]:
    spec = SyntheticSpec(
        k=3,
        n=n,
        split=1,
        betas=(1.5, 1.0, 0.8),
        distributions=(Bernoulli(0.5), Bernoulli(0.5), Bernoulli(0.5)),
        presence=(1.0, 1.0, 1.0),
        edges=(DependencyEdge(source=0, target=1, noise=noise),),
        seed=seed + 1,
    )
    ds, truth = generate(spec)
    return ds, GroundTruth(
        preset="chain_dependent_k3",
        betas=truth.betas,
        split=truth.split,
        edges=truth.edges,
        seed=seed,
        notes=f"f2 copies f1 with noise rate {noise}",
    )


PRESETS = ("xor", "independent_k4", "chain_dependent_k3")


def preset(
    name: str, n: int, seed: int = 0, noise: float = 0.0
) -> tuple[Dataset, GroundTruth]:
    """Canonical fixtures used throughout the test suite."""
    if name == "xor":
        return _xor_preset(n, seed)
    if name == "independent_k4":
        return _independent_k4_preset(n, seed)
    if name == "chain_dependent_k3":
        return _chain_dependent_k3_preset(n, seed, noise)
    raise InputError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
