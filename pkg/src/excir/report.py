"""Explanation report assembly and byte-stable JSON serialization.

The report layout is a fixed contract: top level {version, config, globals,
features}, per-feature objects with fields in a fixed order, floats rendered
at 17 significant digits.  Identical inputs therefore serialize to identical
bytes, which downstream bindings rely on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Any

from .errors import InputError

REPORT_VERSION = "1"


@dataclass(frozen=True)
class FeatureRecord:
    name: str
    kind: str
    direction: str
    pcir: float
    entropy_bits: float
    mcir: float | None = None
    cmmi_bits: float | None = None

    def to_ordered_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "name": self.name,
            "kind": self.kind,
            "direction": self.direction,
            "pcir": self.pcir,
        }
        if self.mcir is not None:
            d["mcir"] = self.mcir
        d["entropy_bits"] = self.entropy_bits
        if self.cmmi_bits is not None:
            d["cmmi_bits"] = self.cmmi_bits
        return d


def build_report(
    config: dict[str, Any],
    n: int,
    n_prime: int,
    env_gap: float,
    output_divergence_bits: float,
    seed: int,
    features: list[FeatureRecord],
    jmi_bits: float | None = None,
    joint_mutual_impact: float | None = None,
) -> dict[str, Any]:
    globals_block: dict[str, Any] = {
        "n": n,
        "n_prime": n_prime,
        "env_gap": env_gap,
        "output_divergence_bits": output_divergence_bits,
    }
    if jmi_bits is not None:
        globals_block["jmi_bits"] = jmi_bits
    if joint_mutual_impact is not None:
        globals_block["joint_mutual_impact"] = joint_mutual_impact
    globals_block["seed"] = seed
    return {
        "version": REPORT_VERSION,
        "config": config,
        "globals": globals_block,
        "features": [f.to_ordered_dict() for f in features],
    }


def _format_number(value: float) -> str:
    if math.isnan(value) or math.isinf(value):
        raise InputError("report contains a non-finite number")
    return format(value, ".17g")


def _serialize(value: Any, indent: int) -> str:
    pad = "  " * indent
    child = "  " * (indent + 1)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_number(value)
    if value is None:
        return "null"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{child}{json.dumps(str(k))}: {_serialize(v, indent + 1)}"
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ",\n".join(f"{child}{_serialize(v, indent + 1)}" for v in value)
        return "[\n" + items + "\n" + pad + "]"
    raise InputError(f"cannot serialize {type(value).__name__} in report")


def dumps_report(report: dict[str, Any]) -> str:
    """Serialize with fixed key order and 17-significant-digit floats."""
    return _serialize(report, 0) + "\n"


def loads_report(text: str) -> dict[str, Any]:
    return json.loads(text)


def report_schema() -> dict[str, Any]:
    """The published JSON schema for report.json."""
    with resources.files("excir").joinpath("report_schema.json").open(
        "r", encoding="utf-8"
    ) as fh:
        return json.load(fh)


def plot_data_csv(report: dict[str, Any]) -> str:
    """Plot-ready CSV: one row per feature, blank cells for absent scores."""
    lines = ["feature,pcir,mcir,entropy_bits,cmmi_bits"]
    for feat in report["features"]:
        cells = [
            feat["name"],
            _format_number(float(feat["pcir"])),
            _format_number(float(feat["mcir"])) if "mcir" in feat else "",
            _format_number(float(feat["entropy_bits"])),
            _format_number(float(feat["cmmi_bits"])) if "cmmi_bits" in feat else "",
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
