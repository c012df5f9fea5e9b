"""Brute-force reference values from finite truncations.

The ``N x N`` leading block of the Jacobi matrix is a symmetric tridiagonal
matrix; its eigenvalues with the squared first eigenvector components form
a discrete probability measure that approximates the spectral measure, and
its resolvent's corner entry approximates the resolvent element.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, solve_banded

__all__ = [
    "SpectralMeasureDiscrete",
    "truncation_measure",
    "dense_resolvent",
    "kolmogorov_distance",
]


@dataclass(frozen=True)
class SpectralMeasureDiscrete:
    """Nodes (ascending) and weights of the truncation measure."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def cdf(self, x):
        """Measure of ``(-inf, x]`` for scalar or array ``x``."""
        x = np.asarray(x, dtype=float)
        c = np.concatenate([[0.0], np.cumsum(self.weights)])
        out = c[np.searchsorted(self.nodes, x, side="right")]
        return float(out) if out.ndim == 0 else out

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.nodes ** k))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "weight"])
        for lam, wt in zip(self.nodes.tolist(), self.weights.tolist()):
            w.writerow([repr(lam), repr(wt)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SpectralMeasureDiscrete":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["lambda", "weight"]:
            raise ValueError("expected a 'lambda,weight' header")
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
        data = data.reshape(-1, 2)
        return cls(data[:, 0], data[:, 1])


def truncation_measure(seq, N: int) -> SpectralMeasureDiscrete:
    """Eigen-decomposition of the ``N x N`` truncation.

    Weights are the squared first components of the normalised
    eigenvectors; they sum to 1 up to rounding.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    a, b = seq.arrays(N)
    if N == 1:
        return SpectralMeasureDiscrete(np.array([a[0]], float), np.array([1.0]))
    try:
        w, v = eigh_tridiagonal(np.asarray(a, float), np.asarray(b[: N - 1], float),
                                lapack_driver="stemr")
    except LinAlgError as exc:
        raise LinAlgError(f"tridiagonal eigen-solver failed for N={N}: {exc}") from exc
    return SpectralMeasureDiscrete(w, v[0] ** 2)


def dense_resolvent(seq, N: int, lam) -> complex:
    """``((T_N - lam)^{-1})_{00}`` for the ``N x N`` truncation ``T_N``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    lam = complex(lam)
    a, b = seq.arrays(N)
    if N == 1:
        d = a[0] - lam
        if d == 0:
            raise LinAlgError("singular system: lambda equals a_0")
        return complex(1 / d)
    ab = np.zeros((3, N), dtype=complex)
    ab[0, 1:] = b[: N - 1]
    ab[1] = a - lam
    ab[2, :-1] = b[: N - 1]
    rhs = np.zeros(N, dtype=complex)
    rhs[0] = 1.0
    try:
        x = solve_banded((1, 1), ab, rhs, check_finite=True)
    except LinAlgError as exc:
        raise LinAlgError(f"singular system at lambda={lam!r}: {exc}") from exc
    return complex(x[0])


def kolmogorov_distance(measure: SpectralMeasureDiscrete, sigma_curve, interval=None) -> float:
    """Sup distance between the truncation CDF and a sampled distribution.

    ``sigma_curve`` is either a ``DistributionSamples`` object or a pair
    ``(lambdas, values)``.  Both CDFs are renormalised to the compared
    interval (the curve's grid range by default) before comparing at the
    grid points.
    """
    if hasattr(sigma_curve, "lambdas"):
        lam, val = np.asarray(sigma_curve.lambdas, float), np.asarray(sigma_curve.values, float)
    else:
        lam, val = (np.asarray(v, float) for v in sigma_curve)
    if lam.size < 2:
        raise ValueError("sigma curve needs at least two points")
    lo, hi = (lam[0], lam[-1]) if interval is None else map(float, interval)
    keep = (lam >= lo) & (lam <= hi)
    if keep.sum() < 2:
        raise ValueError("sigma curve does not cover the compared interval")
    inside = (measure.nodes >= lo) & (measure.nodes <= hi)
    if not inside.any():
        raise ValueError("measure has no nodes in the compared interval")
    lam, val = lam[keep], val[keep]
    emp = measure.cdf(lam)
    e0, e1 = measure.cdf(lo) - measure.weights[measure.nodes == lo].sum(), measure.cdf(hi)
    # curve values are right-continuous CDF samples; renormalise both to [lo, hi]
    c0, c1 = val[0], val[-1]
    if e1 - e0 <= 0 or c1 - c0 <= 0:
        raise ValueError("zero mass on the compared interval")
    emp_n = (emp - e0) / (e1 - e0)
    cur_n = (val - c0) / (c1 - c0)
    return float(np.max(np.abs(emp_n - cur_n)))
