"""Verification report records and their JSON form."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["Check", "VerificationReport", "SCHEMA_VERSION", "to_jsonable", "format_value"]

SCHEMA_VERSION = 1


def format_value(v: float) -> str:
    """Shortest readable form: 15 significant digits, so 4.0 prints as ``4.0``."""
    v = float(v)
    if not math.isfinite(v):
        return repr(v)
    return repr(float(f"{v:.15g}"))


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and tuples; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


@dataclass
class Check:
    check_id: str
    inputs: dict
    expected: Any
    actual: Any
    tolerance: Any
    passed: bool
    note: str | None = None

    def to_json(self) -> dict:
        out = {
            "check_id": self.check_id,
            "inputs": self.inputs,
            "expected": self.expected,
            "actual": self.actual,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class VerificationReport:
    tool_version: str
    command: list[str]
    model: str | None
    seed: int | None
    checks: list[Check] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    started: float = field(default_factory=time.perf_counter)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def to_json(self) -> dict:
        body = {
            "schema": SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "command": list(self.command),
            "model": self.model,
            "seed": self.seed,
            "checks": [c.to_json() for c in self.checks],
            "pass": self.passed,
        }
        body.update(self.extra)
        body["timing"] = {"elapsed_seconds": round(time.perf_counter() - self.started, 6)}
        return to_jsonable(body)

    def dumps(self) -> str:
        # json writes floats with repr, which round-trips every double exactly
        return json.dumps(self.to_json(), indent=2, allow_nan=False) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())
