"""Report container shared by the finite-window diagnostics."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

from ._stats import CERTIFIED, INCONCLUSIVE, VIOLATED

__all__ = ["CriterionReport", "CERTIFIED", "INCONCLUSIVE", "VIOLATED", "jsonable"]

VERDICTS = (CERTIFIED, INCONCLUSIVE, VIOLATED)


def jsonable(obj):
    """Convert numpy scalars/arrays and complex numbers into JSON-friendly values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    try:
        import numpy as np
    except ImportError:  # pragma: no cover
        np = None
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if np is not None:
        if isinstance(obj, np.ndarray):
            return [jsonable(v) for v in obj.tolist()]
        if isinstance(obj, np.generic):
            obj = obj.item()
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return str(obj)


@dataclass
class CriterionReport:
    """Outcome of one diagnostic over a finite window.

    ``statistics`` holds the measured extrema, ``witnesses`` the concrete
    ``{"n": ..., "x": ...}`` locations behind a violation and ``notes`` the
    hypotheses that could only be assumed.
    """

    criterion: str
    window: Dict[str, Any]
    statistics: Dict[str, Any] = field(default_factory=dict)
    verdict: str = INCONCLUSIVE
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == VIOLATED and not self.witnesses:
            raise ValueError("a violated verdict needs at least one witness")

    @property
    def exit_code(self) -> int:
        return {CERTIFIED: 0, INCONCLUSIVE: 3, VIOLATED: 4}[self.verdict]

    def to_dict(self) -> dict:
        return jsonable({
            "criterion": self.criterion,
            "window": self.window,
            "statistics": self.statistics,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "notes": self.notes,
        })

    def to_json(self, **kw) -> str:
        kw.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kw)
