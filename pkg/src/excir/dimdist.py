"""f-divergences between weighted point clouds of possibly different
dimensions.

Two empirical measures that live in different spaces are compared by
searching over affine maps with orthonormal rows.  Projecting pushes the
higher-dimensional cloud down through x -> Px + b and compares in the lower
space; embedding lifts the lower-dimensional cloud up through x -> P'(x - b)
(so that the lifted cloud projects back exactly onto the original) and
compares in the higher space.  The reported distance is the minimum of the
two; they agree, and vanish, exactly when one cloud is a rotated/translated
copy of the other inside the bigger space.

Densities are fixed-grid histograms on a shared support padded by 1% of the
range per dimension, so every value is deterministic and checkable against
brute-force oracles.  The offset b is pinned by mean alignment rather than
searched; that removes one search axis and is exact for the zero-distance
cases.  The search over row-orthonormal matrices runs R random restarts
(QR of Gaussian matrices) plus one axis-aligned start, each refined by T
accept/reject small-rotation steps with an adaptive step size.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError

logger = logging.getLogger("excir.dimdist")

PAD_FRACTION = 0.01
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted points in d dimensions; weights are normalized to sum to 1."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InputError("points must be a nonempty (m, d) array")
        if not np.all(np.isfinite(pts)):
            raise InputError("points contain NaN or infinite values")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (pts.shape[0],):
            raise InputError("weights length must match number of points")
        if np.any(w < 0):
            raise InputError("weights must be nonnegative")
        total = float(w.sum())
        if not math.isfinite(total) or abs(total - 1.0) > 1e-9:
            raise InputError("weights must sum to 1")
        if abs(total - 1.0) > 1e-12:
            w = w / total
        else:
            w = w.copy()
        pts = pts.copy()
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_points(
        cls, points: np.ndarray, weights: np.ndarray | None = None
    ) -> "EmpiricalMeasure":
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if weights is None:
            weights = np.full(pts.shape[0], 1.0 / pts.shape[0])
        return cls(pts, np.asarray(weights, dtype=np.float64))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def mean(self) -> np.ndarray:
        return self.weights @ self.points


@dataclass(frozen=True)
class OrthonormalMap:
    """Affine map x -> Px + b where P has orthonormal rows."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.matrix, dtype=np.float64)
        b = np.asarray(self.offset, dtype=np.float64)
        if p.ndim != 2:
            raise InputError("matrix must be 2-D")
        if b.shape != (p.shape[0],):
            raise InputError("offset length must match output dimension")
        gram = p @ p.T
        if np.max(np.abs(gram - np.eye(p.shape[0]))) > ORTHO_TOL:
            raise InputError("matrix rows are not orthonormal")
        p = p.copy()
        b = b.copy()
        p.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "matrix", p)
        object.__setattr__(self, "offset", b)


def pushforward(mapping: OrthonormalMap, measure: EmpiricalMeasure) -> EmpiricalMeasure:
    """Image measure under the affine map; weights are preserved."""
    if mapping.matrix.shape[1] != measure.dim:
        raise InputError(
            f"map takes dimension {mapping.matrix.shape[1]}, measure has {measure.dim}"
        )
    pts = measure.points @ mapping.matrix.T + mapping.offset
    return EmpiricalMeasure(pts, measure.weights)


@dataclass(frozen=True)
class HistogramGrid:
    """Dense per-dimension equal-width histogram with a padded support."""

    bins: int
    lows: np.ndarray
    highs: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        if self.bins < 1:
            raise InputError("bins must be >= 1")
        if np.any(self.masses < 0):
            raise InputError("histogram masses must be nonnegative")
        if abs(float(self.masses.sum()) - 1.0) > 1e-9:
            raise InputError("histogram masses must sum to 1")

    def same_support(self, other: "HistogramGrid") -> bool:
        return (
            self.bins == other.bins
            and np.array_equal(self.lows, other.lows)
            and np.array_equal(self.highs, other.highs)
        )


def _padded_support(stacks: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    pts = np.vstack(stacks)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = hi - lo
    pad = np.where(span > 0, PAD_FRACTION * span, 0.5)
    return lo - pad, hi + pad


def shared_support(
    a: EmpiricalMeasure, b: EmpiricalMeasure
) -> tuple[np.ndarray, np.ndarray]:
    """Padded per-dimension bounds covering both measures."""
    if a.dim != b.dim:
        raise InputError("measures have different dimensions")
    return _padded_support([a.points, b.points])


def _cell_masses(
    measure: EmpiricalMeasure, bins: int, lows: np.ndarray, highs: np.ndarray
) -> np.ndarray:
    width = (highs - lows) / bins
    scaled = (measure.points - lows) / width
    if np.any(scaled < 0) or np.any(scaled > bins):
        raise InputError("point outside the supplied histogram support")
    idx = np.minimum(scaled.astype(np.int64), bins - 1)
    flat = np.zeros(measure.points.shape[0], dtype=np.int64)
    for d in range(measure.dim):
        flat = flat * bins + idx[:, d]
    masses = np.bincount(flat, weights=measure.weights, minlength=bins**measure.dim)
    masses /= masses.sum()  # binning re-sums weights; renormalize exactly to 1
    return masses.reshape((bins,) * measure.dim)


def histogram(
    measure: EmpiricalMeasure,
    bins: int = 32,
    grid: HistogramGrid | tuple[np.ndarray, np.ndarray] | None = None,
) -> HistogramGrid:
    """Histogram a measure, either on its own padded support or a shared one."""
    if bins < 1:
        raise InputError("bins must be >= 1")
    if grid is None:
        lows, highs = _padded_support([measure.points])
    elif isinstance(grid, HistogramGrid):
        bins = grid.bins
        lows, highs = grid.lows, grid.highs
    else:
        lows, highs = np.asarray(grid[0], dtype=np.float64), np.asarray(
            grid[1], dtype=np.float64
        )
    if lows.shape != (measure.dim,) or highs.shape != (measure.dim,):
        raise InputError("grid bounds do not match the measure dimension")
    masses = _cell_masses(measure, bins, lows, highs)
    return HistogramGrid(bins, lows, highs, masses)


def f_divergence(
    p: HistogramGrid,
    q: HistogramGrid,
    kind: str = "js",
    epsilon: float = 0.0,
) -> float:
    """KL or Jensen-Shannon divergence between two same-grid histograms, in bits.

    With ``epsilon`` > 0, KL replaces q's empty cells by epsilon; with
    epsilon = 0 an unmatched cell makes the divergence infinite.  JS needs no
    smoothing and never exceeds 1 bit.
    """
    if not p.same_support(q):
        raise InputError("histograms are on different grids")
    pm = p.masses.ravel()
    qm = q.masses.ravel()
    if kind == "kl":
        mask = pm > 0
        qv = qm[mask]
        if epsilon > 0:
            qv = np.where(qv == 0, epsilon, qv)
        elif np.any(qv == 0):
            return math.inf
        val = float(np.dot(pm[mask], np.log2(pm[mask] / qv)))
        return 0.0 if -1e-12 <= val < 0.0 else val
    if kind == "js":
        mid = 0.5 * (pm + qm)
        pmask = pm > 0
        qmask = qm > 0
        left = float(np.dot(pm[pmask], np.log2(pm[pmask] / mid[pmask])))
        right = float(np.dot(qm[qmask], np.log2(qm[qmask] / mid[qmask])))
        val = 0.5 * (left + right)
        return min(max(val, 0.0), 1.0)
    raise InputError(f"unknown divergence kind {kind!r}")


def histogram_divergence(
    a: np.ndarray,
    b: np.ndarray,
    kind: str = "js",
    bins: int = 8,
    epsilon: float = 0.0,
) -> float:
    """Divergence of two 1-D samples histogrammed on their shared support."""
    ma = EmpiricalMeasure.from_points(np.asarray(a, dtype=np.float64))
    mb = EmpiricalMeasure.from_points(np.asarray(b, dtype=np.float64))
    bounds = shared_support(ma, mb)
    return f_divergence(
        histogram(ma, bins, bounds), histogram(mb, bins, bounds), kind, epsilon
    )


@dataclass(frozen=True)
class SearchConfig:
    """Budget for the orthonormal-map search."""

    restarts: int = 64
    refine_iters: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.refine_iters < 0:
            raise InputError("restarts must be >= 1 and refine_iters >= 0")


def _orthonormal_rows(m: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(m.T)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return (q * signs).T


def _random_orthonormal(rng: np.random.Generator, d_out: int, d_in: int) -> np.ndarray:
    return _orthonormal_rows(rng.normal(size=(d_out, d_in)))


def _search(
    mu: EmpiricalMeasure,
    delta: EmpiricalMeasure,
    kind: str,
    bins: int,
    search: SearchConfig,
    epsilon: float,
    mode: str,
) -> tuple[float, OrthonormalMap]:
    d_low, d_high = mu.dim, delta.dim
    mu_mean = mu.mean()
    delta_mean = delta.mean()

    def evaluate(p: np.ndarray) -> tuple[float, np.ndarray]:
        b = mu_mean - p @ delta_mean
        if mode == "project":
            mapped = EmpiricalMeasure(delta.points @ p.T + b, delta.weights)
            first, second = mu, mapped
        else:
            # Lift through P^T and recenter at delta's mean.  The lifted
            # cloud still pushes forward exactly onto mu under x -> Px + b;
            # writing it as x@P + c keeps the identity case bit-exact.
            c = delta_mean - mu_mean @ p
            lifted = EmpiricalMeasure(mu.points @ p + c, mu.weights)
            first, second = delta, lifted
        bounds = _padded_support([first.points, second.points])
        div = f_divergence(
            histogram(first, bins, bounds),
            histogram(second, bins, bounds),
            kind,
            epsilon,
        )
        return div, b

    starts = [np.eye(d_high)[:d_low]]
    centered = (delta.points - delta_mean) * np.sqrt(delta.weights)[:, None]
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    pca = vt[:d_low]
    if pca.shape[0] == d_low:
        starts.append(pca)
        flipped = pca.copy()
        flipped[0] = -flipped[0]
        starts.append(flipped)

    best_p = starts[0]
    best_val, best_b = evaluate(best_p)
    for restart in range(1 + search.restarts):
        if best_val == 0.0:
            break
        rng = np.random.default_rng([search.seed, restart])
        if restart < len(starts):
            p = starts[restart]
        else:
            p = _random_orthonormal(rng, d_low, d_high)
        val, b = evaluate(p)
        step = 0.3
        for _ in range(search.refine_iters):
            if val == 0.0:
                break
            cand = _orthonormal_rows(p + step * rng.normal(size=p.shape))
            cand_val, cand_b = evaluate(cand)
            if cand_val < val:
                p, val, b = cand, cand_val, cand_b
                step = min(step * 1.2, 1.0)
            else:
                step = max(step * 0.85, 1e-6)
        if val < best_val:
            best_p, best_val, best_b = p, val, b
    return best_val, OrthonormalMap(best_p, best_b)


def _check_dims(mu: EmpiricalMeasure, delta: EmpiricalMeasure) -> None:
    if mu.dim > delta.dim:
        raise InputError(
            f"first measure dimension ({mu.dim}) exceeds second ({delta.dim})"
        )


def projection_distance(
    mu: EmpiricalMeasure,
    delta: EmpiricalMeasure,
    kind: str = "js",
    bins: int = 32,
    search: SearchConfig = SearchConfig(),
    epsilon: float = 0.0,
) -> tuple[float, OrthonormalMap]:
    """Best divergence between mu and an orthonormal projection of delta."""
    _check_dims(mu, delta)
    return _search(mu, delta, kind, bins, search, epsilon, "project")


def embedding_distance(
    mu: EmpiricalMeasure,
    delta: EmpiricalMeasure,
    kind: str = "js",
    bins: int = 32,
    search: SearchConfig = SearchConfig(),
    epsilon: float = 0.0,
) -> tuple[float, OrthonormalMap]:
    """Best divergence between delta and a rigid embedding of mu."""
    _check_dims(mu, delta)
    return _search(mu, delta, kind, bins, search, epsilon, "embed")


@dataclass(frozen=True)
class DistanceHat:
    """Projection/embedding distances, their minimum, and the disagreement."""

    value: float
    projection: float
    embedding: float
    disagreement: float
    projection_map: OrthonormalMap
    embedding_map: OrthonormalMap


def distance_hat(
    mu: EmpiricalMeasure,
    delta: EmpiricalMeasure,
    kind: str = "js",
    bins: int = 32,
    search: SearchConfig = SearchConfig(),
    epsilon: float = 0.0,
) -> DistanceHat:
    """Minimum of the projection and embedding distances."""
    proj, proj_map = projection_distance(mu, delta, kind, bins, search, epsilon)
    emb, emb_map = embedding_distance(mu, delta, kind, bins, search, epsilon)
    disagreement = abs(proj - emb)
    if disagreement > 0.05:
        logger.debug(
            "projection/embedding disagreement %.4f bits (proj=%.4f emb=%.4f)",
            disagreement,
            proj,
            emb,
        )
    return DistanceHat(
        value=min(proj, emb),
        projection=proj,
        embedding=emb,
        disagreement=disagreement,
        projection_map=proj_map,
        embedding_map=emb_map,
    )
