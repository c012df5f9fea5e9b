"""Jacobi coefficient sequences, presets, tables and band intervals.

A sequence maps an index ``k >= 0`` to the pair ``(a_k, b_k)`` of diagonal
and off-diagonal entries of a semi-infinite Jacobi matrix.  Every query is
validated (``b_k > 0``, finite entries) and every query is deterministic:
vectorised access goes through the same scalar function as single lookups,
so repeated queries at the same index are bit-identical.
"""
from __future__ import annotations

import csv
import io
import math
import os
import threading
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from ._stats import series_trend

__all__ = [
    "CoefficientError",
    "IndexBeyondTable",
    "CoefficientSequence",
    "BandInterval",
    "CenteredReport",
    "CarlemanReport",
    "family_preset",
    "load_table",
    "save_table",
    "band_interval",
    "centered_check",
    "carleman_diagnostic",
]

PRESETS = ("constant", "hermite", "power", "paired", "saturating")


class CoefficientError(ValueError):
    """Invalid coefficient data (non-positive b, non-finite entry, bad params)."""


class IndexBeyondTable(IndexError):
    """A finite table was queried past its last row."""


class CoefficientSequence:
    """Deterministic provider of Jacobi coefficients ``(a_k, b_k)``.

    Parameters
    ----------
    kind : str
        One of ``constant``, ``hermite``, ``power``, ``paired``,
        ``saturating``, ``table``, ``closure`` or ``shifted``.
    func : callable
        ``func(k) -> (a_k, b_k)`` for a non-negative integer ``k``.
    params : dict, optional
        Parameters of the family, echoed into output metadata.
    length : int, optional
        Number of rows for finite (table) sequences.
    """

    def __init__(self, kind: str, func: Callable[[int], Tuple[float, float]],
                 params: Optional[dict] = None, length: Optional[int] = None):
        self.kind = kind
        self.params = dict(params or {})
        self.length = length
        self.parent: Optional[CoefficientSequence] = None
        self._func = func
        self._lock = threading.Lock()
        self._a = np.empty(0)
        self._b = np.empty(0)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"CoefficientSequence({self.kind}{', ' if args else ''}{args})"

    def _check_index(self, k):
        if k < 0:
            raise IndexError(f"coefficient index must be >= 0, got {k}")
        if self.length is not None and k >= self.length:
            raise IndexBeyondTable(
                f"index {k} beyond table of length {self.length}")

    def __call__(self, k: int) -> Tuple[float, float]:
        k = int(k)
        self._check_index(k)
        try:
            a, b = self._func(k)
            a, b = float(a), float(b)
        except OverflowError as exc:
            raise CoefficientError(f"coefficient at k={k} overflows: {exc}") from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise CoefficientError(f"non-finite coefficient at k={k}: ({a}, {b})")
        if not b > 0:
            raise CoefficientError(f"non-positive b at k={k}: b={b}")
        return a, b

    def arrays(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Return ``(a[0:n], b[0:n])`` as read-only float arrays."""
        n = int(n)
        if n <= 0:
            return np.empty(0), np.empty(0)
        self._check_index(n - 1)
        if len(self._b) < n:
            with self._lock:
                have = len(self._b)
                if have < n:
                    # grow geometrically so that repeated window scans stay cheap
                    want = max(n, 2 * have)
                    if self.length is not None:
                        want = min(want, self.length)
                    rows = [self(k) for k in range(have, want)]
                    a = np.concatenate([self._a, [r[0] for r in rows]])
                    b = np.concatenate([self._b, [r[1] for r in rows]])
                    a.flags.writeable = False
                    b.flags.writeable = False
                    self._a, self._b = a, b
        return self._a[:n], self._b[:n]

    def shift(self, m: int) -> "CoefficientSequence":
        """The tail sequence ``k -> (a_{k+m}, b_{k+m})``."""
        m = int(m)
        if m < 0:
            raise ValueError("shift must be non-negative")
        length = None if self.length is None else self.length - m
        if length is not None and length <= 0:
            raise IndexBeyondTable(f"shift {m} leaves an empty table")
        parent = self
        out = CoefficientSequence("shifted", lambda k: parent(k + m),
                                  params={"parent": self.describe(), "shift": m},
                                  length=length)
        out.parent = self
        return out

    def zero_diagonal(self, n: int) -> bool:
        """True when ``a_k == 0`` for every ``k < n``."""
        a, _ = self.arrays(n)
        return bool(np.all(a == 0.0))

    @property
    def carleman_verdict(self) -> Optional[str]:
        """Analytic verdict on divergence of the sum of 1/b_k (presets only)."""
        kind, p = self.kind, self.params
        if self.parent is not None:
            return self.parent.carleman_verdict
        if kind in ("constant", "hermite", "saturating"):
            return "divergent"
        if kind == "power":
            return "divergent" if p["exponent"] <= 1 else "convergent"
        if kind == "paired":
            return "divergent" if p["ratio"] <= 1 else "convergent"
        return None

    @property
    def diagonal_unbounded(self) -> Optional[bool]:
        """Analytic answer to ``lim |a_k| = inf`` (presets only)."""
        if self.parent is not None:
            return self.parent.diagonal_unbounded
        if self.kind in PRESETS:
            return False
        return None

    def describe(self) -> dict:
        out = {"kind": self.kind, "params": dict(self.params)}
        if self.length is not None:
            out["length"] = self.length
        return out

    @classmethod
    def from_closure(cls, func, **params) -> "CoefficientSequence":
        return cls("closure", func, params=params)

    @classmethod
    def from_arrays(cls, a, b, source=None) -> "CoefficientSequence":
        a = np.array(a, dtype=float)
        b = np.array(b, dtype=float)
        if a.shape != b.shape or a.ndim != 1 or len(a) == 0:
            raise CoefficientError("a and b must be non-empty 1-D arrays of equal length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            bad = int(np.flatnonzero(~(np.isfinite(a) & np.isfinite(b)))[0])
            raise CoefficientError(f"non-finite entry in row {bad}")
        if not np.all(b > 0):
            bad = int(np.flatnonzero(~(b > 0))[0])
            raise CoefficientError(f"non-positive b in row {bad}: b={b[bad]}")
        params = {} if source is None else {"source": str(source)}
        return cls("table", lambda k: (a[k], b[k]), params=params, length=len(a))


def family_preset(kind: str, **params) -> CoefficientSequence:
    """Build one of the built-in coefficient families.

    ``constant(a, b)``
        ``a_k = a``, ``b_k = b``.
    ``hermite()``
        ``a_k = 0``, ``b_k = sqrt((k+1)/2)``.
    ``power(exponent, scale=1)``
        ``a_k = 0``, ``b_k = scale * (k+1)**exponent``.
    ``paired(ratio=2, scale=1)``
        ``a_k = 0``, ``b_0 = scale`` and ``b_{2j-1} = b_{2j} = scale * ratio**j``.
    ``saturating(limit=1, start=0.5, rate=0.5)``
        ``a_k = 0``, ``b_k = limit - (limit - start) * rate**k``, increasing to ``limit``.
    """
    if kind == "constant":
        a = float(params.get("a", 0.0))
        b = float(params.get("b", 0.5))
        if not (math.isfinite(a) and math.isfinite(b)) or b <= 0:
            raise CoefficientError(f"constant family needs finite a and b > 0, got ({a}, {b})")
        return CoefficientSequence("constant", lambda k: (a, b), {"a": a, "b": b})
    if kind == "hermite":
        if params:
            raise CoefficientError("hermite preset takes no parameters")
        return CoefficientSequence("hermite", lambda k: (0.0, math.sqrt((k + 1) / 2)))
    if kind == "power":
        p = float(params.get("exponent", 1.0))
        c = float(params.get("scale", 1.0))
        if not c > 0 or not math.isfinite(p):
            raise CoefficientError(f"power family needs scale > 0, got scale={c}")
        return CoefficientSequence("power", lambda k: (0.0, c * math.pow(k + 1, p)),
                                   {"exponent": p, "scale": c})
    if kind == "paired":
        r = float(params.get("ratio", 2.0))
        c = float(params.get("scale", 1.0))
        if not (c > 0 and r > 0):
            raise CoefficientError(f"paired family needs ratio > 0 and scale > 0, got ({r}, {c})")
        return CoefficientSequence("paired", lambda k: (0.0, c * math.pow(r, (k + 1) // 2)),
                                   {"ratio": r, "scale": c})
    if kind == "saturating":
        lim = float(params.get("limit", 1.0))
        s = float(params.get("start", 0.5))
        q = float(params.get("rate", 0.5))
        if not (0 < s <= lim and 0 <= q < 1):
            raise CoefficientError("saturating family needs 0 < start <= limit and 0 <= rate < 1")
        return CoefficientSequence(
            "saturating", lambda k: (0.0, lim - (lim - s) * math.pow(q, k)),
            {"limit": lim, "start": s, "rate": q})
    raise CoefficientError(f"unknown family kind {kind!r}")


def load_table(stream: Union[str, os.PathLike, io.TextIOBase]) -> CoefficientSequence:
    """Read a ``.jcoef.csv`` table: one ``a_k,b_k`` row per index, no header."""
    source = None
    if isinstance(stream, (str, os.PathLike)):
        source = os.fspath(stream)
        with open(source, newline="") as fh:
            text = fh.read()
    else:
        text = stream.read()
    a, b = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise CoefficientError(f"line {lineno}: expected 2 columns, got {len(row)}")
        try:
            ak, bk = float(row[0]), float(row[1])
        except ValueError as exc:
            raise CoefficientError(f"line {lineno}: {exc}") from None
        if not (math.isfinite(ak) and math.isfinite(bk)):
            raise CoefficientError(f"line {lineno}: non-finite entry")
        if not bk > 0:
            raise CoefficientError(f"line {lineno}: non-positive b={bk}")
        a.append(ak)
        b.append(bk)
    if not a:
        raise CoefficientError("empty coefficient table")
    return CoefficientSequence.from_arrays(a, b, source=source)


def save_table(seq: CoefficientSequence, n: int, path) -> None:
    """Write the first ``n`` rows of ``seq`` in the table format."""
    a, b = seq.arrays(n)
    with open(path, "w", newline="") as fh:
        for ak, bk in zip(a, b):
            fh.write(f"{float(ak)!r},{float(bk)!r}\n")


@dataclass(frozen=True)
class BandInterval:
    """The interval ``[a_n - 2 b_n, a_n + 2 b_n]``."""

    n: int
    lo: float
    hi: float

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def to_dict(self) -> dict:
        return {"n": self.n, "lo": self.lo, "hi": self.hi}


def band_interval(seq: CoefficientSequence, n: int) -> BandInterval:
    if n < 0:
        raise IndexError("band index must be >= 0")
    a, b = seq(n)
    return BandInterval(int(n), a - 2 * b, a + 2 * b)


@dataclass(frozen=True)
class CenteredReport:
    centered: bool
    n0: Optional[int]
    interval: Tuple[float, float]
    n_start: int
    n_end: int
    margin: float = 0.0

    def to_dict(self) -> dict:
        return {"centered": self.centered, "n0": self.n0, "interval": list(self.interval),
                "n_start": self.n_start, "n_end": self.n_end, "margin": self.margin}


def centered_check(seq, interval, n_start, n_end, margin=0.0) -> CenteredReport:
    """Find the first ``N0`` in ``[n_start, n_end]`` from which ``[a, b]`` lies
    strictly inside every band ``I_n`` up to ``n_end``.

    ``margin`` shrinks each band on both sides before the comparison.
    """
    lo_t, hi_t = map(float, interval)
    if not lo_t < hi_t:
        raise ValueError("interval must satisfy a < b")
    if n_start > n_end:
        raise ValueError("n_start must not exceed n_end")
    a, b = seq.arrays(n_end + 1)
    a, b = a[n_start:], b[n_start:]
    inside = (a - 2 * b + margin < lo_t) & (hi_t < a + 2 * b - margin)
    if not inside[-1]:
        return CenteredReport(False, None, (lo_t, hi_t), n_start, n_end, margin)
    bad = np.flatnonzero(~inside)
    n0 = n_start if len(bad) == 0 else n_start + int(bad[-1]) + 1
    return CenteredReport(True, n0, (lo_t, hi_t), n_start, n_end, margin)


@dataclass(frozen=True)
class CarlemanReport:
    partial_sum: float
    n_terms: int
    trend: str
    dyadic_ratio: Optional[float]
    analytic_verdict: Optional[str]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def carleman_diagnostic(seq, N) -> CarlemanReport:
    """Partial sum of ``1/b_k`` for ``k < N`` plus a growth classification.

    The trend is only a heuristic; ``analytic_verdict`` is set for presets
    whose behaviour is known in closed form and is ``None`` otherwise.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    _, b = seq.arrays(N)
    trend = series_trend(1.0 / b)
    label = {"divergent": "growing unbounded",
             "convergent": "apparently convergent"}.get(trend.classification, trend.classification)
    return CarlemanReport(trend.partial_sum, int(N), label, trend.dyadic_ratio,
                          seq.carleman_verdict)
