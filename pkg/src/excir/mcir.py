"""Correlation-impact scores for dependent features.

Each feature's score normalizes the information it adds about the output
beyond the remaining features (CMMI) against the information carried by the
joint feature tuple (JMI):

    mcir = CMMI / (CMMI + JMI)

Both terms are nonnegative plug-in estimates, so the score is always in
[0, 1]; its complement JMI / (CMMI + JMI) is the feature's joint-mutual-impact
share and the two sum to one exactly.  A 0/0 ratio means the data carries no
information about the output at all and is reported as an error rather than
silently defaulted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateFeatureError, InputError, SingularRowError
from .infotheory import (
    DiscretizedColumn,
    cmmi,
    conditional_mutual_information,
    joint_mutual_information,
)
from .pcir import Direction


@dataclass(frozen=True)
class McirScore:
    feature: str
    cmmi_bits: float
    jmi_bits: float
    mcir: float
    joint_mutual_impact: float


def _score(name: str, info_target: float, info_joint: float) -> McirScore:
    total = info_target + info_joint
    if total == 0.0:
        raise DegenerateFeatureError(
            [name], "output carries no information about the features (0/0)"
        )
    return McirScore(
        feature=name,
        cmmi_bits=info_target,
        jmi_bits=info_joint,
        mcir=info_target / total,
        joint_mutual_impact=info_joint / total,
    )


def mcir_pair(
    y: DiscretizedColumn,
    target: DiscretizedColumn,
    other: DiscretizedColumn,
    name: str = "feature",
) -> McirScore:
    """Two-feature score: conditional MI against the pair's joint MI."""
    cmi = conditional_mutual_information(y, target, (other,))
    jmi = joint_mutual_information(y, (target, other))
    return _score(name, cmi, jmi)


def mcir_full(
    y: DiscretizedColumn,
    target_index: int,
    features: Sequence[DiscretizedColumn],
    names: Sequence[str] | None = None,
) -> McirScore:
    """Score of one feature conditioned on every other feature."""
    features = tuple(features)
    if not 0 <= target_index < len(features):
        raise InputError(f"target index {target_index} out of range")
    if len(features) < 2:
        raise InputError("need at least two features")
    name = names[target_index] if names else f"f{target_index + 1}"
    rest = tuple(c for i, c in enumerate(features) if i != target_index)
    info_target = cmmi(y, features[target_index], rest)
    info_joint = joint_mutual_information(y, features)
    return _score(name, info_target, info_joint)


def excir_dependent_predict(
    weights: Sequence[float],
    directions: Sequence[Direction],
    joint_impact: float,
    row: Sequence[float],
) -> float:
    """Joint-impact offset plus the direction-grouped weighted ratio.

    ``weights`` may mix dependent-feature scores with independent-feature
    ratios; they are applied verbatim, one per feature.
    """
    w = np.asarray(weights, dtype=np.float64)
    r = np.asarray(row, dtype=np.float64)
    if w.size != r.size or w.size != len(directions):
        raise InputError("weights, directions and row must have equal length")
    num_mask = np.array([d == "numerator" for d in directions])
    if not np.any(~num_mask):
        raise InputError("need at least one denominator feature")
    num = float(w[num_mask] @ r[num_mask])
    den = float(w[~num_mask] @ r[~num_mask])
    if den == 0.0:
        raise SingularRowError("denominator sum is zero at this row")
    return joint_impact + num / den
