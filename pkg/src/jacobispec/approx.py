"""Spectral data of the constant-tail approximants.

The approximant ``A_n`` agrees with the Jacobi matrix up to row ``n`` and
repeats ``(a_n, b_n)`` from there on.  Its absolutely continuous part lives
on the band ``[a_n - 2 b_n, a_n + 2 b_n]`` with density

    f_n(x) = f_J(a_n, b_n, x) / (P_n**2 - (b_{n-1}/b_n) P_{n-1} P_{n+1}),

where ``f_J`` is the semicircle density of the constant tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.optimize import brentq

from ._stats import CERTIFIED, VIOLATED, series_trend
from .coefficients import BandInterval, CoefficientError, band_interval
from .contfrac import boundary_K, constant_tail_K, tail_assembled_R
from .polynomials import NumericalBreakdown, _ldexp, _points, eval_P_grid, eval_PQ
from .reports import CriterionReport

__all__ = [
    "WeightCurve",
    "DistributionSamples",
    "OffBandEigenvalue",
    "weight_fJ",
    "weight_fn",
    "weight_curve",
    "fn_at_zero",
    "Rn",
    "Rn_boundary",
    "offband_eigenvalues",
    "sigma_n",
    "ac_conditions_An",
    "zero_eigenvalue_test",
    "ZeroEigenvalueReport",
]

METHODS = ("auto", "turan-det", "turan-sum")
# Gauss-Legendre pair used by the adaptive quadrature
_GL_LO = np.polynomial.legendre.leggauss(12)
_GL_HI = np.polynomial.legendre.leggauss(24)


def weight_fJ(a, b, x):
    """Semicircle density of the constant Jacobi matrix ``(a, b)``.

    ``sqrt(4 b**2 - (a - x)**2) / (2 pi b**2)`` on the band, 0 elsewhere.
    Accepts scalars or arrays.
    """
    if not b > 0:
        raise ValueError("b must be positive")
    x_arr = np.asarray(x, dtype=float)
    d = a - x_arr
    out = np.sqrt(np.maximum(4 * b * b - d * d, 0.0)) / (2 * math.pi * b * b)
    return float(out) if out.ndim == 0 else out


@dataclass
class WeightCurve:
    n: int
    xs: np.ndarray
    fs: np.ndarray
    band: BandInterval
    method: str

    def to_dict(self) -> dict:
        return {"n": self.n, "band": self.band.to_dict(), "method": self.method,
                "count": int(len(self.xs))}


def _denominators(seq, n, xs, method):
    """Scaled ``g_n`` at real points ``xs``: returns ``(mantissa, exponent, used)``."""
    grid = eval_P_grid(seq, n + 1, xs)
    used = np.empty(len(xs), dtype=object)
    if method == "auto":
        g, use_sum = grid.turan_checked([n])
        used[:] = np.where(use_sum[0], "turan-sum", "turan-det")
        return g.mantissa[0].copy(), g.exponent[0].copy(), used
    if method == "turan-det":
        det = grid.turan_det([n])
        used[:] = "turan-det"
        return det.mantissa[0].copy(), det.exponent[0].copy(), used
    if method == "turan-sum":
        s = grid.turan_sum([n])
        used[:] = "turan-sum"
        return s.mantissa[0].copy(), s.exponent[0].copy(), used
    raise ValueError(f"method must be one of {METHODS}")


def weight_fn(seq, n, x, method="auto"):
    """Density ``f_n`` of the approximant ``A_n`` at real ``x``.

    Parameters
    ----------
    seq : CoefficientSequence
    n : int
        Approximant index, ``n >= 1``.
    x : float or array_like
    method : {'auto', 'turan-det', 'turan-sum'}
        Which representation of the denominator to use.  ``'auto'`` uses the
        compensated determinant and switches to the sum form at points where
        the two disagree by more than 1e-6 relative or the determinant is
        not positive.

    Returns
    -------
    float or ndarray
        Zero outside the open band (the band edges included).

    Raises
    ------
    NumericalBreakdown
        If the denominator is not positive at a point inside the band.
    """
    if n < 1:
        raise ValueError("weight_fn needs n >= 1")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    pts, scalar = _points(x)
    if np.iscomplexobj(pts):
        raise ValueError("weight_fn is defined for real x")
    a_n, b_n = seq(n)
    out = np.zeros(len(pts))
    inside = np.abs(pts - a_n) < 2 * b_n
    if inside.any():
        xi = pts[inside]
        m, e, _ = _denominators(seq, n, xi, method)
        if not np.all(m > 0):
            k = int(np.flatnonzero(~(m > 0))[0])
            raise NumericalBreakdown(f"non-positive denominator g_{n}({xi[k]!r}) inside the band")
        with np.errstate(under="ignore", over="ignore"):
            out[inside] = _ldexp(weight_fJ(a_n, b_n, xi) / m, -e)
    return float(out[0]) if scalar else out


def weight_curve(seq, n, xs, method="auto") -> WeightCurve:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1:
        raise ValueError("xs must be one-dimensional")
    if np.any(np.diff(xs) < 0):
        raise ValueError("xs must be sorted")
    fs = weight_fn(seq, n, xs, method)
    return WeightCurve(n, xs, np.atleast_1d(fs), band_interval(seq, n), method)


def fn_at_zero(seq, n) -> float:
    """``f_n(0)`` from the closed products for a zero diagonal.

    With ``a_k = 0`` the polynomials at 0 alternate between zero and a ratio
    of off-diagonal products, and

        f_n(0) = (1/(pi b_n)) * prod_{odd j < n'} b_j**2 / prod_{even j < n'} b_j**2

    where the products run over ``j <= 2k - 1`` (odd) and ``j <= 2k - 2``
    (even) for ``n = 2k - 1`` and ``n = 2k``.  Evaluated as a sum of logs.
    """
    if n < 1:
        raise ValueError("fn_at_zero needs n >= 1")
    if not seq.zero_diagonal(n + 2):
        raise CoefficientError("fn_at_zero needs a_k = 0 for all k <= n + 1")
    k = (n + 1) // 2
    _, b = seq.arrays(max(n + 1, 2 * k))
    logs = np.log(b)
    odd = logs[1:2 * k:2]
    even = logs[0:2 * k - 1:2]
    log_val = 2.0 * math.fsum(odd) - 2.0 * math.fsum(even) - logs[n]
    return math.exp(log_val) / math.pi


def Rn(seq, n, lam) -> complex:
    """Resolvent element of the approximant ``A_n`` at ``lam``.

    Assembles the tail form with ``K = constant_tail_K(a_n, b_n, lam)``; for
    ``n = 0`` the approximant is the constant matrix and ``K`` itself is
    returned.  Real ``lam`` is accepted off the closed band.
    """
    a_n, b_n = seq(n)
    K = constant_tail_K(a_n, b_n, lam)
    if n == 0:
        return K
    return tail_assembled_R(seq, n, lam, K)


def Rn_boundary(seq, n, x) -> complex:
    """Boundary value ``R_n(x + i0)`` for real ``x`` using ``K = D + iB``."""
    a_n, b_n = seq(n)
    D, B = boundary_K(a_n, b_n, float(x))
    K = complex(D, B)
    if n == 0:
        return K
    return tail_assembled_R(seq, n, complex(x), K)


@dataclass(frozen=True)
class OffBandEigenvalue:
    x: float
    mass: float


def _gershgorin(seq, n):
    a, b = seq.arrays(n + 1)
    bl = np.concatenate([[0.0], b[:-1]])
    lo = float(np.min(a - bl - b))
    hi = float(np.max(a + bl + b))
    return lo, hi


def _normalised_det(seq, n, xs):
    """``(P_n + b_{n-1} D_n P_{n-1}) / |(P_{n-1}, P_n)|`` at real points.

    The normalisation keeps the function continuous and free of the
    scaling exponents, which is what the sign scan and Brent's method need.
    """
    a_n, b_n = seq(n)
    _, b_m = seq(n - 1)
    pts = np.atleast_1d(np.asarray(xs, dtype=float))
    grid = eval_P_grid(seq, n, pts)
    pm = grid._aligned(n - 1, n)
    p = grid.P[n]
    D, _ = boundary_K(a_n, b_n, pts)
    return (p + b_m * D * pm) / np.hypot(p, pm)


def _eigen_mass(seq, n, x):
    """Weight ``1/||u||**2`` of the eigenvector ``u_k = P_k(x)`` extended by the
    geometric tail ``u_{n+j} = P_n rho**j`` with ``rho = -b_n D_n``."""
    a_n, b_n = seq(n)
    D, _ = boundary_K(a_n, b_n, x)
    rho = -b_n * D
    tab = eval_PQ(seq, n, x)
    top = int(tab.exponent[n])
    # squared entries rescaled to the exponent of P_n
    sq = np.ldexp(tab.P[:n] ** 2, 2 * (tab.exponent[:n] - top))
    total = math.fsum(sq) + tab.P[n] ** 2 / (1 - rho * rho)
    return float(np.ldexp(1.0 / total, -2 * top))


def offband_eigenvalues(seq, n, grid_size=2000):
    """Eigenvalues of ``A_n`` outside the closed band, with their masses.

    Scans ``P_n + b_{n-1} D_n P_{n-1}`` for sign changes on a grid between
    the Gershgorin bounds and the band edges, then refines each bracket
    with Brent's method.
    """
    if n < 1:
        return []
    a_n, b_n = seq(n)
    g_lo, g_hi = _gershgorin(seq, n)
    edge_lo, edge_hi = a_n - 2 * b_n, a_n + 2 * b_n
    pad = 1e-9 * max(1.0, b_n)
    found = []
    for lo, hi in ((g_lo - 1.0, edge_lo - pad), (edge_hi + pad, g_hi + 1.0)):
        if not lo < hi:
            continue
        xs = np.linspace(lo, hi, grid_size)
        vals = _normalised_det(seq, n, xs)
        for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
            x0 = brentq(lambda t: float(_normalised_det(seq, n, t)[0]), xs[i], xs[i + 1],
                        xtol=1e-14, rtol=1e-15)
            found.append(OffBandEigenvalue(float(x0), _eigen_mass(seq, n, x0)))
        for i in np.flatnonzero(vals == 0):
            found.append(OffBandEigenvalue(float(xs[i]), _eigen_mass(seq, n, xs[i])))
    found.sort(key=lambda e: e.x)
    return found


@dataclass
class DistributionSamples:
    """Distribution function of ``A_n`` sampled on a grid.

    ``values[i]`` is the measure of ``(-inf, lambdas[i]]``; ``base`` is the
    value at the base point ``a`` and ``increments = values - base`` is the
    integral of ``f_n`` (plus any jumps) over ``(a, lambda]``.
    """

    n: int
    a: float
    lambdas: np.ndarray
    values: np.ndarray
    base: float
    increments: np.ndarray
    error_estimate: float
    masses: List[OffBandEigenvalue] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def total_mass(self) -> float:
        return self.metadata.get("total_mass", float("nan"))

    def to_dict(self) -> dict:
        return {"n": self.n, "base_point": self.a, "base_value": self.base,
                "error_estimate": self.error_estimate,
                "masses": [{"x": m.x, "mass": m.mass} for m in self.masses],
                **self.metadata}


def _theta_integrand(seq, n, thetas):
    """``f_n(x(theta)) dx/dtheta`` with ``x = a_n + 2 b_n sin(theta)``.

    Since ``f_J dx = (2/pi) cos(theta)**2 dtheta`` the edge singularity of
    the density disappears under this substitution.
    """
    a_n, b_n = seq(n)
    xs = a_n + 2 * b_n * np.sin(thetas)
    c2 = np.cos(thetas) ** 2 * (2 / math.pi)
    m, e, _ = _denominators(seq, n, xs, "auto")
    if not np.all(m > 0):
        k = int(np.flatnonzero(~(m > 0))[0])
        raise NumericalBreakdown(f"non-positive denominator at x={xs[k]!r}")
    with np.errstate(under="ignore", over="ignore"):
        return _ldexp(c2 / m, -e)


def _integrate_panels(seq, n, edges, tol, max_rounds=40):
    """Adaptive Gauss-Legendre on ``[edges[i], edges[i+1]]`` in theta.

    All open panels of a round are evaluated in one vectorised call.
    Returns the per-interval integrals and the summed error estimate.
    """
    (x1, w1), (x2, w2) = _GL_LO, _GL_HI
    n_int = len(edges) - 1
    result = np.zeros(n_int)
    err_total = 0.0
    span = max(edges[-1] - edges[0], 1e-300)
    panels = [(i, edges[i], edges[i + 1]) for i in range(n_int) if edges[i + 1] > edges[i]]
    for _ in range(max_rounds):
        if not panels:
            break
        lo = np.array([p[1] for p in panels])
        hi = np.array([p[2] for p in panels])
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        t1 = (mid[:, None] + half[:, None] * x1[None, :]).ravel()
        t2 = (mid[:, None] + half[:, None] * x2[None, :]).ravel()
        f = _theta_integrand(seq, n, np.concatenate([t1, t2]))
        f1 = f[: t1.size].reshape(len(panels), -1)
        f2 = f[t1.size:].reshape(len(panels), -1)
        q1 = half * (f1 @ w1)
        q2 = half * (f2 @ w2)
        err = np.abs(q2 - q1)
        nxt = []
        for j, (i, a, b) in enumerate(panels):
            if err[j] <= tol * (b - a) / span or (b - a) < 1e-13:
                result[i] += q2[j]
                err_total += err[j]
            else:
                m = 0.5 * (a + b)
                nxt += [(i, a, m), (i, m, b)]
        panels = nxt
    if panels:
        raise NumericalBreakdown("adaptive quadrature did not settle")
    return result, err_total


def _to_theta(x, a_n, b_n):
    s = np.clip((np.asarray(x, dtype=float) - a_n) / (2 * b_n), -1.0, 1.0)
    return np.arcsin(s)


def sigma_n(seq, n, a, lambdas, tol=1e-12, find_masses=True) -> DistributionSamples:
    """Distribution function of ``A_n`` on a grid of points.

    The density is integrated with the substitution ``x = a_n + 2 b_n sin t``
    over the whole band and adaptive paired Gauss-Legendre panels.  Off-band
    eigenvalues of ``A_n`` (if any) contribute their masses as jumps.

    Parameters
    ----------
    seq : CoefficientSequence
    n : int
    a : float
        Base point; ``base`` in the result is the measure of ``(-inf, a]``.
    lambdas : array_like
        Sorted evaluation points.
    tol : float
        Absolute error target for the total band integral.
    """
    if n < 1:
        raise ValueError("sigma_n needs n >= 1")
    lam = np.asarray(lambdas, dtype=float).ravel()
    if lam.size and np.any(np.diff(lam) < 0):
        raise ValueError("lambdas must be sorted")
    a_n, b_n = seq(n)
    pts = np.concatenate([[a], lam])
    th = _to_theta(pts, a_n, b_n)
    edges = np.unique(np.concatenate([[-math.pi / 2, math.pi / 2], th]))
    pieces, err = _integrate_panels(seq, n, edges, tol)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    ac_at = cum[np.searchsorted(edges, th)]
    masses = offband_eigenvalues(seq, n) if find_masses else []
    mx = np.array([m.x for m in masses])
    mw = np.array([m.mass for m in masses])

    def jumps(v):
        if not len(mx):
            return np.zeros_like(v)
        return (mw[None, :] * (mx[None, :] <= v[:, None])).sum(axis=1)

    vals = ac_at + jumps(pts)
    base, values = float(vals[0]), vals[1:]
    total = float(cum[-1] + mw.sum()) if len(mw) else float(cum[-1])
    meta = {"band": band_interval(seq, n).to_dict(), "total_mass": total,
            "ac_mass": float(cum[-1]), "quadrature": "gauss-legendre 12/24 adaptive, sine substitution",
            "tolerance": tol, "base_convention": "measure of (-inf, a]"}
    return DistributionSamples(n, float(a), lam, values, base, values - base, float(err), masses, meta)


def ac_conditions_An(seq, n_max) -> CriterionReport:
    """Check ``b_n >= b_{n-1}`` and ``|a_n - a_{n-1}| <= 2 (b_n - b_{n-1})``
    for ``1 <= n <= n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    a, b = seq.arrays(n_max + 1)
    db = np.diff(b)
    da = np.abs(np.diff(a))
    slack = 8 * np.finfo(float).eps * np.maximum(np.abs(b[1:]), np.abs(a[1:]))
    mono = db >= -slack
    step = da <= 2 * db + slack
    ok = mono & step
    window = {"n_start": 1, "n_end": int(n_max)}
    stats = {"min_b_increment": float(db.min()),
             "max_step_excess": float((da - 2 * db).max())}
    if ok.all():
        return CriterionReport("ac-conditions-An", window, stats, CERTIFIED)
    k = int(np.flatnonzero(~ok)[0]) + 1
    which = "b_n >= b_(n-1)" if not mono[k - 1] else "|a_n - a_(n-1)| <= 2(b_n - b_(n-1))"
    wit = {"n": k, "x": None, "condition": which, "a": [float(a[k - 1]), float(a[k])],
           "b": [float(b[k - 1]), float(b[k])]}
    return CriterionReport("ac-conditions-An", window, stats, VIOLATED, [wit])


@dataclass
class ZeroEigenvalueReport:
    fires: bool
    partial_sum: float
    n_terms: int
    tail_ratio_sup: float
    dyadic_ratio: Optional[float]
    trend: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def zero_eigenvalue_test(seq, N, tol=1e-2) -> ZeroEigenvalueReport:
    """Indicator for an eigenvalue at 0 of a zero-diagonal matrix.

    The squared polynomials at 0 are ``P_{2k}(0)**2 = prod (b_{2j}/b_{2j+1})**2``
    (``j < k``) and ``P_{2k+1}(0) = 0``.  The indicator fires when the ratio
    ``(b_{2k}/b_{2k+1})**2`` of consecutive terms stays below ``1 - tol`` over
    the second half of the window and the partial sums level off.
    """
    if N < 8:
        raise ValueError("N must be >= 8")
    if not seq.zero_diagonal(2 * N):
        raise CoefficientError("zero_eigenvalue_test needs a zero diagonal")
    _, b = seq.arrays(2 * N)
    log_ratio = 2 * (np.log(b[0:2 * N - 1:2]) - np.log(b[1:2 * N:2]))
    log_terms = np.concatenate([[0.0], np.cumsum(log_ratio)])[:N]
    terms = np.exp(log_terms)
    sup = float(np.exp(log_ratio[N // 2:].max()))
    trend = series_trend(terms)
    fires = sup < 1 - tol and trend.classification == "convergent"
    return ZeroEigenvalueReport(bool(fires), float(math.fsum(terms)), int(N), sup,
                                trend.dyadic_ratio, trend.classification)
