"""Finite-window heuristics shared by the diagnostics.

Nothing here proves convergence or divergence.  The helpers turn a finite
prefix of a sequence into numbers that can be reported next to a verdict.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

CERTIFIED = "certified-at-scale"
INCONCLUSIVE = "inconclusive"
VIOLATED = "violated"

# dyadic increment ratio 2**(1-q) for terms ~ k**-q; 0.9 splits near q = 1.15
DIVERGENCE_RATIO = 0.9


@dataclass(frozen=True)
class SeriesTrend:
    partial_sum: float
    dyadic_ratio: Optional[float]
    classification: str  # divergent | convergent | insufficient


def series_trend(terms) -> SeriesTrend:
    """Classify the partial sums of non-negative ``terms``.

    Compares the increment of the partial sums over ``[N/2, N)`` with the one
    over ``[N/4, N/2)``.  For terms decaying like ``k**-q`` the ratio tends to
    ``2**(1-q)``: at least 1 for divergent power laws, well below 1 for
    summable ones.
    """
    t = np.abs(np.asarray(terms, dtype=float))
    s = np.cumsum(t)
    total = float(s[-1]) if len(s) else 0.0
    n = len(t)
    if n < 8:
        return SeriesTrend(total, None, "insufficient")
    q, h = n // 4, n // 2
    hi = float(s[-1] - s[h - 1])
    lo = float(s[h - 1] - s[q - 1])
    if lo == 0.0:
        ratio = 0.0 if hi == 0.0 else float("inf")
    else:
        ratio = hi / lo
    cls = "divergent" if ratio >= DIVERGENCE_RATIO else "convergent"
    return SeriesTrend(total, ratio, cls)


def loglog_slope(values, ns) -> float:
    """Least-squares slope of ``log|values|`` against ``log(ns)`` over the
    second half of the window."""
    v = np.abs(np.asarray(values, dtype=float))
    x = np.asarray(ns, dtype=float)
    h = len(v) // 2
    v, x = v[h:], x[h:]
    keep = (v > 0) & (x > 0)
    if keep.sum() < 2:
        return 0.0
    return float(np.polyfit(np.log(x[keep]), np.log(v[keep]), 1)[0])


def window_trend(values, bound: str, tol: float = 0.1, fail: float = 2.0):
    """Three-way verdict on a per-index extremum sequence.

    ``bound='lower'`` checks that the infimum over the last quartile has not
    dropped more than ``tol`` below the infimum over the earlier part of the
    window; ``bound='upper'`` is the mirror check for suprema.  A change by a
    factor ``fail`` or more (or a non-positive lower bound) is a violation.

    Returns ``(verdict, stats, witness_index)`` where the index points into
    ``values`` at the extremum of the last quartile.
    """
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        raise ValueError("need at least two window points for a trend")
    cut = max(1, (3 * len(v)) // 4)
    prev, last = v[:cut], v[cut:]
    if bound == "lower":
        i_last = cut + int(np.nanargmin(last))
        early, late = float(np.nanmin(prev)), float(v[i_last])
        overall = min(early, late)
        if not late > 0 or not early > 0:
            return VIOLATED, _stats(early, late, overall, None), i_last
        ratio = late / early
        if ratio >= 1 - tol:
            verdict = CERTIFIED
        elif ratio <= 1 / fail:
            verdict = VIOLATED
        else:
            verdict = INCONCLUSIVE
    elif bound == "upper":
        i_last = cut + int(np.nanargmax(last))
        early, late = float(np.nanmax(prev)), float(v[i_last])
        overall = max(early, late)
        if not np.isfinite(late):
            return VIOLATED, _stats(early, late, overall, None), i_last
        ratio = late / early if early > 0 else (1.0 if late <= 0 else float("inf"))
        if ratio <= 1 + tol:
            verdict = CERTIFIED
        elif ratio >= fail:
            verdict = VIOLATED
        else:
            verdict = INCONCLUSIVE
    else:
        raise ValueError("bound must be 'lower' or 'upper'")
    return verdict, _stats(early, late, overall, ratio), i_last


def _stats(early, late, overall, ratio):
    return {"early_extremum": early, "last_quartile_extremum": late,
            "window_extremum": overall, "trend_ratio": ratio}


def combine_verdicts(verdicts) -> str:
    verdicts = list(verdicts)
    if any(v == VIOLATED for v in verdicts):
        return VIOLATED
    if verdicts and all(v == CERTIFIED for v in verdicts):
        return CERTIFIED
    return INCONCLUSIVE
