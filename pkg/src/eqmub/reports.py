"""Small report type shared by every verification predicate."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np


def jsonable(obj: Any) -> Any:
    """Best-effort conversion of report payloads to plain JSON types."""
    from .cyclotomic import Cyclotomic

    if isinstance(obj, Check):
        return obj.to_json()
    if isinstance(obj, Cyclotomic):
        return obj.to_json()
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return repr(obj)


@dataclass
class Check:
    """Outcome of a predicate: truthiness plus the first counterexample, if any."""

    ok: bool
    witness: Any = None
    info: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.ok)

    def to_json(self) -> dict:
        return {"ok": bool(self.ok), "witness": jsonable(self.witness), "info": jsonable(self.info)}
