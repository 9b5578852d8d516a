"""Uniform result records for every check in the package."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

import numpy as np


def _jsonify(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _jsonify(getattr(value, f.name)) for f in dataclasses.fields(value)}
    return value


@dataclass
class CheckReport:
    """Outcome of one numerical check.

    worst_margin is the smallest slack seen; the check passes when it clears
    -tol.  witness carries whatever object realized that margin (a sample
    triple, a grid pair, a point) and is None for vacuous passes.
    """

    passed: bool
    worst_margin: float
    witness: Any
    samples_used: int
    tol: float
    seed: int | None = None
    notes: str = ""
    extras: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "pass": bool(self.passed),
            "worst_margin": float(self.worst_margin),
            "witness": _jsonify(self.witness),
            "samples_used": int(self.samples_used),
            "tol": float(self.tol),
            "seed": self.seed if self.seed is None else int(self.seed),
            "notes": self.notes,
        }
        if self.extras:
            out["extras"] = _jsonify(self.extras)
        return out
