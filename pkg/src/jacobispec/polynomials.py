"""First- and second-kind polynomials of a Jacobi matrix.

``P_k`` and ``Q_k`` solve

    b_{k-1} y_{k-1} + a_k y_k + b_k y_{k+1} = z y_k

with ``P_0 = 1, P_1 = (z - a_0)/b_0`` and ``Q_0 = 0, Q_1 = 1/b_0``.  Off the
spectrum both grow geometrically, so the recurrence runs on scaled values:
whenever the working magnitude leaves ``[2**-w, 2**w]`` the working pair is
multiplied by an exact power of two and the exponent is recorded.  The true
value of entry ``k`` is ``stored[k] * 2**exponent[k]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .coefficients import CoefficientSequence

__all__ = [
    "NumericalBreakdown",
    "PolyTable",
    "PolyGrid",
    "eval_PQ",
    "eval_P_grid",
    "wronskian_residual",
    "turan_determinant",
    "turan_sum",
    "alt_denominator",
    "recurrence_residual",
]

# mantissas stay within 2**±256 so squares and triple products cannot overflow
SCALE_WINDOW = 256
# the two Turan forms may differ by this much before the sum form is preferred
AGREEMENT_RTOL = 1e-6
_SPLIT = 134217729.0  # 2**27 + 1


class NumericalBreakdown(ArithmeticError):
    """A non-finite or sign-violating intermediate that scaling cannot fix."""


def _ldexp(z, e):
    if np.iscomplexobj(z):
        return np.ldexp(np.real(z), e) + 1j * np.ldexp(np.imag(z), e)
    return np.ldexp(z, e)


def _run(a, b, xs, n, with_q, window):
    """Three-term recurrence over many points at once.

    Returns stored values ``P`` (and ``Q``) of shape ``(n+1, m)`` and the
    integer exponent array ``E`` of the same shape.
    """
    dtype = complex if np.iscomplexobj(xs) else float
    m = len(xs)
    P = np.empty((n + 1, m), dtype)
    E = np.zeros((n + 1, m), np.int64)
    Q = np.empty((n + 1, m), dtype) if with_q else None
    P[0] = 1.0
    if with_q:
        Q[0] = 0.0
    if n == 0:
        return P, Q, E
    P[1] = (xs - a[0]) / b[0]
    if with_q:
        Q[1] = 1.0 / b[0]
    lo, hi = 2.0 ** -window, 2.0 ** window
    e = np.zeros(m, np.int64)
    p0, p1 = P[0].copy(), P[1].copy()
    if with_q:
        q0, q1 = Q[0].copy(), Q[1].copy()
    for k in range(1, n):
        shift = xs - a[k]
        p0, p1 = p1, (shift * p1 - b[k - 1] * p0) / b[k]
        if with_q:
            q0, q1 = q1, (shift * q1 - b[k - 1] * q0) / b[k]
            mag = np.maximum(np.abs(p1), np.abs(q1))
        else:
            mag = np.maximum(np.abs(p1), np.abs(p0))
        out = (mag > hi) | (mag < lo)
        if out.any():
            if not np.all(np.isfinite(mag[out])):
                raise NumericalBreakdown(
                    f"non-finite polynomial value at k={k + 1} despite scaling")
            idx = np.flatnonzero(out & (mag > 0))
            s = np.frexp(mag[idx])[1].astype(np.int64)
            p0[idx] = _ldexp(p0[idx], -s)
            p1[idx] = _ldexp(p1[idx], -s)
            if with_q:
                q0[idx] = _ldexp(q0[idx], -s)
                q1[idx] = _ldexp(q1[idx], -s)
            e[idx] += s
        P[k + 1] = p1
        if with_q:
            Q[k + 1] = q1
        E[k + 1] = e
    return P, Q, E


def _points(x):
    arr = np.asarray(x)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.iscomplexobj(arr):
        if np.all(arr.imag == 0):
            arr = arr.real
    arr = arr.astype(complex if np.iscomplexobj(arr) else float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("evaluation points must be finite")
    return arr, scalar


@dataclass(frozen=True)
class PolyTable:
    """Scaled values of ``P_0..P_n`` and ``Q_0..Q_n`` at one point."""

    n: int
    point: Union[float, complex]
    P: np.ndarray
    Q: np.ndarray
    exponent: np.ndarray

    def p(self, k):
        return _ldexp(self.P[k], int(self.exponent[k]))

    def q(self, k):
        return _ldexp(self.Q[k], int(self.exponent[k]))

    def aligned(self, k, ref):
        """``(P_k, Q_k)`` expressed in the scale of entry ``ref``."""
        d = int(self.exponent[k] - self.exponent[ref])
        return _ldexp(self.P[k], d), _ldexp(self.Q[k], d)

    def unscaled(self):
        """``(P, Q)`` as plain arrays; entries may overflow to inf."""
        with np.errstate(over="ignore"):
            return _ldexp(self.P, self.exponent), _ldexp(self.Q, self.exponent)


def eval_PQ(seq: CoefficientSequence, n: int, point, window: int = SCALE_WINDOW) -> PolyTable:
    """Evaluate ``P_0..P_n`` and ``Q_0..Q_n`` at a single real or complex point."""
    if n < 0:
        raise ValueError("n must be >= 0")
    xs, scalar = _points(point)
    if not scalar:
        raise ValueError("eval_PQ takes a single point; use eval_P_grid for grids")
    a, b = seq.arrays(max(n, 1))
    P, Q, E = _run(a, b, xs, n, True, window)
    pt = xs[0].item()
    return PolyTable(n, pt, P[:, 0], Q[:, 0], E[:, 0])


def _two_prod(x, y):
    p = x * y
    cx = _SPLIT * x
    xh = cx - (cx - x)
    xl = x - xh
    cy = _SPLIT * y
    yh = cy - (cy - y)
    yl = y - yh
    err = ((xh * yh - p) + xh * yl + xl * yh) + xl * yl
    return p, err


def _diff_of_products(u, v, w, r, s):
    """``u*v - w*r*s`` with error-free products for real arrays."""
    if np.iscomplexobj(u) or np.iscomplexobj(w):
        return u * v - w * r * s
    h1, l1 = _two_prod(u, v)
    wr, lwr = _two_prod(w, r)
    h2, l2 = _two_prod(wr, s)
    return (h1 - h2) + (l1 - l2 - lwr * s)


@dataclass(frozen=True)
class ScaledArray:
    """``mantissa * 2**exponent`` elementwise."""

    mantissa: np.ndarray
    exponent: np.ndarray

    def value(self):
        with np.errstate(over="ignore", under="ignore"):
            return _ldexp(self.mantissa, self.exponent)


class PolyGrid:
    """``P_0..P_N`` at many points, with per-entry exponents.

    Built by :func:`eval_P_grid`.  The identity helpers accept an array of
    indices ``ns`` and return :class:`ScaledArray` objects of shape
    ``(len(ns), len(xs))``.
    """

    def __init__(self, seq, xs, P, E, a, b):
        self.seq = seq
        self.xs = xs
        self.P = P
        self.E = E
        self.a = a
        self.b = b
        self.N = P.shape[0] - 1

    def value(self, k):
        return _ldexp(self.P[k], self.E[k])

    def _aligned(self, k, ref):
        return _ldexp(self.P[k], self.E[k] - self.E[ref])

    def _check(self, ns, extra):
        ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
        if ns.size and (ns.min() < 0 or ns.max() + extra > self.N):
            raise IndexError(f"grid holds P_0..P_{self.N}; requested up to "
                             f"P_{int(ns.max()) + extra}")
        return ns

    def turan_det(self, ns) -> ScaledArray:
        """``P_n**2 - (b_{n-1}/b_n) P_{n-1} P_{n+1}`` for each ``n`` in ``ns`` (n >= 1)."""
        ns = self._check(ns, 1)
        if ns.size and ns.min() < 1:
            raise IndexError("Turan determinant needs n >= 1")
        p = self.P[ns]
        pm = self._aligned(ns - 1, ns)
        pp = self._aligned(ns + 1, ns)
        r = (self.b[ns - 1] / self.b[ns])[:, None]
        return ScaledArray(_diff_of_products(p, p, pm, r, pp), 2 * self.E[ns])

    def turan_checked(self, ns, rtol=AGREEMENT_RTOL):
        """Determinant form, replaced by the sum form wherever the two differ
        by more than ``rtol`` relative or the determinant is not positive.

        Returns ``(ScaledArray, used_sum)`` with a boolean mask ``used_sum``.
        """
        det = self.turan_det(ns)
        sm = self.turan_sum(ns)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            d = _ldexp(det.mantissa, det.exponent - sm.exponent)
            rel = np.abs(d - sm.mantissa) / np.maximum(np.abs(d), np.abs(sm.mantissa))
        use_sum = ~(det.mantissa > 0) | ~(rel <= rtol)
        m = np.where(use_sum, sm.mantissa, det.mantissa)
        e = np.where(use_sum, sm.exponent, det.exponent)
        return ScaledArray(m, e), use_sum

    def alt_den(self, ns) -> ScaledArray:
        """``P_{n+1}**2 + P_n**2 - ((x - a_n)/b_n) P_{n+1} P_n``."""
        ns = self._check(ns, 1)
        p = self.P[ns]
        pp = self._aligned(ns + 1, ns)
        rho = (self.xs[None, :] - self.a[ns][:, None]) / self.b[ns][:, None]
        return ScaledArray(pp * pp + p * p - rho * pp * p, 2 * self.E[ns])

    def pair_norm(self, ns) -> ScaledArray:
        """``P_{n+1}**2 + P_n**2`` (real points)."""
        ns = self._check(ns, 1)
        p = self.P[ns]
        pp = self._aligned(ns + 1, ns)
        return ScaledArray(np.abs(pp) ** 2 + np.abs(p) ** 2, 2 * self.E[ns])

    def turan_sum(self, ns) -> ScaledArray:
        """``(1/b_n**2) * sum_{k<=n} [(b_k**2 - b_{k-1}**2) P_k**2
        + b_{k-1}(a_k - a_{k-1}) P_{k-1} P_k]`` with ``b_{-1} = P_{-1} = 0``."""
        mant, exp2 = self.weighted_sum(ns)
        ns = np.atleast_1d(np.asarray(ns, dtype=np.int64))
        return ScaledArray(mant / (self.b[ns] ** 2)[:, None], exp2)

    def weighted_sum(self, ns):
        """The un-normalised sum of :meth:`turan_sum` as ``(mantissa, exponent)``."""
        ns = self._check(ns, 0)
        want = np.zeros(self.N + 1, bool)
        want[ns] = True
        top = int(ns.max()) if ns.size else -1
        m = len(self.xs)
        out_m = np.empty((len(ns), m), self.P.dtype)
        out_e = np.empty((len(ns), m), np.int64)
        pos = {int(k): i for i, k in enumerate(ns)}
        a, b, P, E = self.a, self.b, self.P, self.E
        s = b[0] ** 2 * P[0] ** 2
        se = 2 * E[0].copy()
        if want[0]:
            out_m[pos[0]], out_e[pos[0]] = s, se
        for k in range(1, top + 1):
            # the running sum keeps its own exponent, so early terms survive
            # when P_k grows far beyond them and later terms cancel
            ek = 2 * E[k]
            pk = P[k]
            pkm = _ldexp(P[k - 1], E[k - 1] - E[k])
            t = (b[k] ** 2 - b[k - 1] ** 2) * pk * pk + b[k - 1] * (a[k] - a[k - 1]) * pkm * pk
            t_shift = np.frexp(np.abs(t))[1].astype(np.int64)
            t, te = _ldexp(t, -t_shift), ek + t_shift
            te = np.where(t == 0, se, te)
            top_e = np.maximum(se, te)
            s = _ldexp(s, se - top_e) + _ldexp(t, te - top_e)
            shift = np.frexp(np.abs(s))[1].astype(np.int64)
            s = _ldexp(s, -shift)
            se = top_e + shift
            if want[k]:
                i = pos[k]
                out_m[i], out_e[i] = s, se
        return out_m, out_e


def eval_P_grid(seq: CoefficientSequence, n: int, xs, window: int = SCALE_WINDOW) -> PolyGrid:
    """Evaluate ``P_0..P_n`` at every point of ``xs`` in one vectorised pass."""
    if n < 0:
        raise ValueError("n must be >= 0")
    pts, _ = _points(xs)
    # one row past the recurrence so that b_n, a_n are available to the identities
    rows = n + 1 if seq.length is None or seq.length > n else max(n, 1)
    a, b = seq.arrays(rows)
    P, _, E = _run(a, b, pts, n, False, window)
    return PolyGrid(seq, pts, P, E, a, b)


def _finish(scaled: ScaledArray, scalar):
    val = scaled.value()[0]
    return val[0].item() if scalar else val


def _grid_for(seq, top, x):
    pts, scalar = _points(x)
    if np.iscomplexobj(pts):
        raise ValueError("Turan identities are defined for real x")
    return eval_P_grid(seq, top, pts), scalar


def turan_determinant(seq, n, x):
    """``g_n(x) = P_n**2 - (b_{n-1}/b_n) P_{n-1} P_{n+1}`` for real ``x``."""
    if n < 1:
        raise ValueError("turan_determinant needs n >= 1")
    grid, scalar = _grid_for(seq, n + 1, x)
    return _finish(grid.turan_det([n]), scalar)


def turan_sum(seq, n, x):
    """The sum representation of the Turan determinant (valid for n >= 0)."""
    if n < 0:
        raise ValueError("turan_sum needs n >= 0")
    grid, scalar = _grid_for(seq, n, x)
    return _finish(grid.turan_sum([n]), scalar)


def alt_denominator(seq, n, x):
    """``P_{n+1}**2 + P_n**2 - ((x - a_n)/b_n) P_{n+1} P_n``."""
    if n < 1:
        raise ValueError("alt_denominator needs n >= 1")
    grid, scalar = _grid_for(seq, n + 1, x)
    return _finish(grid.alt_den([n]), scalar)


def wronskian_residual(seq, n, point, normalize="terms") -> float:
    """Relative residual of ``P_{n-1} Q_n - P_n Q_{n-1} = 1/b_{n-1}``.

    ``normalize='terms'`` divides by the largest of ``|P_{n-1} Q_n|``,
    ``|P_n Q_{n-1}|`` and ``1/b_{n-1}``, which is the attainable accuracy of
    a difference of two floating products.  ``normalize='wronskian'`` divides
    by ``1/b_{n-1}`` alone; off the spectrum that form grows like
    ``eps * |P_n|**2`` and is only meaningful where the polynomials stay
    moderate.
    """
    if n < 1:
        raise ValueError("wronskian_residual needs n >= 1")
    tab = eval_PQ(seq, n, point)
    pm, qm = tab.aligned(n - 1, n)
    p, q = tab.P[n], tab.Q[n]
    _, b = seq.arrays(n)
    e2 = -2 * int(tab.exponent[n])
    target = float(np.ldexp(1.0 / b[n - 1], e2))
    t1, t2 = pm * q, p * qm
    resid = abs((t1 - t2) - target)
    if normalize == "terms":
        scale = max(abs(t1), abs(t2), target)
    elif normalize == "wronskian":
        scale = target
    else:
        raise ValueError("normalize must be 'terms' or 'wronskian'")
    if scale == 0.0:
        return 0.0 if resid == 0.0 else float("inf")
    return float(resid / max(scale, 1e-300))


def recurrence_residual(grid: PolyGrid, k: int):
    """Relative residual of the recurrence at index ``k`` (1 <= k < N) for
    every grid point, measured against the largest term of the triple."""
    if not 1 <= k < grid.N:
        raise IndexError("need 1 <= k < N")
    pm = grid._aligned(k - 1, k)
    p = grid.P[k]
    pp = grid._aligned(k + 1, k)
    a, b = grid.a, grid.b
    lhs = b[k - 1] * pm + a[k] * p + b[k] * pp
    rhs = grid.xs * p
    scale = np.maximum.reduce([np.abs(b[k - 1] * pm), np.abs(a[k] * p),
                               np.abs(b[k] * pp), np.abs(rhs)])
    return np.abs(lhs - rhs) / np.maximum(scale, 1e-300)
