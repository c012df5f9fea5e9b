"""Continued-fraction evaluation of the resolvent element and its tails.

The resolvent element ``R(z) = ((A - z)^{-1} e_0, e_0)`` is the limit of the
approximants ``-Q_n(z)/P_n(z)``; ``K_n(z)`` is the same fraction started at
row ``n``.  For a constant tail ``(a, b)`` the tail solves
``b**2 K**2 - (a - z) K + 1 = 0`` and the root is picked by the sign of its
imaginary part.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .polynomials import NumericalBreakdown, eval_PQ

__all__ = [
    "ConvergenceCertificate",
    "TailSeriesState",
    "ApproximantPole",
    "BandError",
    "resolvent_approximant",
    "resolvent_limit",
    "constant_tail_K",
    "boundary_K",
    "tail_series_K",
    "tail_assembled_R",
]

GUARANTEES = ("pringsheim-bound", "cauchy-empirical", "closed-form", "none")


class ApproximantPole(ZeroDivisionError):
    """The denominator of an approximant vanished."""


class BandError(ValueError):
    """A real point inside the closed band was passed where the boundary
    value is required."""


@dataclass(frozen=True)
class ConvergenceCertificate:
    converged: bool
    iterations: int
    residual: float
    guarantee: str
    tolerance: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class TailSeriesState:
    """Working data of the transformed tail fraction.

    ``C`` holds the elements, ``N`` and ``M`` the scaled denominators and
    numerators (true value ``N[k] * 2**exponent[k]``), ``partial_sums`` the
    series partial sums and ``n_increments`` the unscaled ``|N_k| - |N_{k-1}|``.
    """

    C: List[complex] = field(default_factory=list)
    M: List[complex] = field(default_factory=list)
    N: List[complex] = field(default_factory=list)
    exponent: List[int] = field(default_factory=list)
    partial_sums: List[complex] = field(default_factory=list)
    n_increments: List[float] = field(default_factory=list)
    bound_held: bool = True

    @property
    def partial_sum(self) -> complex:
        return self.partial_sums[-1] if self.partial_sums else 0j


def resolvent_approximant(seq, n, lam) -> complex:
    """``-Q_n(z)/P_n(z)``, the n-th approximant of the resolvent fraction."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tab = eval_PQ(seq, n, lam)
    p, q = tab.P[n], tab.Q[n]
    if p == 0:
        raise ApproximantPole(f"P_{n} vanishes at {lam!r}")
    return complex(-q / p)


def resolvent_limit(seq, lam, tol=1e-10, n_max=100_000, window=5):
    """Iterate approximants until ``window`` consecutive steps are below ``tol``.

    Returns ``(value, certificate)``.  When ``n_max`` is reached first the
    certificate reports ``converged=False`` and the value is the last
    approximant.
    """
    lam = complex(lam)
    if lam.imag == 0:
        raise ValueError("Im lambda must be nonzero")
    if tol <= 0:
        raise ValueError("tol must be positive")
    hi, lo = 2.0 ** 512, 2.0 ** -512
    a0, b0 = seq(0)
    p0, p1 = 1 + 0j, (lam - a0) / b0
    q0, q1 = 0j, 1 / b0
    prev = -q1 / p1
    calm = 0
    step = math.inf
    b_prev = b0
    n = 1
    while n < n_max:
        a_k, b_k = seq(n)
        shift = lam - a_k
        p0, p1 = p1, (shift * p1 - b_prev * p0) / b_k
        q0, q1 = q1, (shift * q1 - b_prev * q0) / b_k
        b_prev = b_k
        n += 1
        mag = max(abs(p1), abs(q1))
        if mag > hi or mag < lo:
            if not math.isfinite(mag):
                raise NumericalBreakdown(f"non-finite approximant data at n={n}")
            s = -math.frexp(mag)[1]
            p0, p1 = p0 * 2.0 ** s, p1 * 2.0 ** s
            q0, q1 = q0 * 2.0 ** s, q1 * 2.0 ** s
        if p1 == 0:
            calm = 0
            continue
        cur = -q1 / p1
        step = abs(cur - prev)
        prev = cur
        calm = calm + 1 if step < tol else 0
        if calm >= window:
            return prev, ConvergenceCertificate(True, n, step, "cauchy-empirical", tol)
    return prev, ConvergenceCertificate(False, n, step, "none", tol)


def _roots(a, b, lam):
    d = a - lam
    s = cmath.sqrt(d * d - 4 * b * b)
    # pick the sign that avoids cancellation, get the partner from the product 1/b**2
    big = d + s if abs(d + s) >= abs(d - s) else d - s
    k_big = big / (2 * b * b)
    k_small = 1 / (b * b * k_big)
    return k_big, k_small


def constant_tail_K(a, b, lam) -> complex:
    """Tail of the constant fraction with diagonal ``a`` and off-diagonal ``b``.

    For non-real ``lam`` the root with ``Im K`` of the same sign as ``Im lam``
    is returned.  For real ``lam`` off the closed band the real root of
    modulus at most ``1/b`` is returned (``+`` sign to the right of the
    band, ``-`` sign to the left).
    """
    if not b > 0:
        raise ValueError("b must be positive")
    lam = complex(lam)
    if lam.imag == 0:
        x = lam.real
        d = a - x
        if abs(d) <= 2 * b:
            raise BandError(f"real point {x} lies in the closed band [{a - 2 * b}, {a + 2 * b}]; "
                            "use boundary_K")
        D, _ = boundary_K(a, b, x)
        return complex(D, 0.0)
    k1, k2 = _roots(a, b, lam)
    sign = 1.0 if lam.imag > 0 else -1.0
    return k1 if sign * k1.imag >= sign * k2.imag else k2


def boundary_K(a, b, x):
    """``(D, B)`` with ``K(x + i0) = D + iB`` for real ``x``.

    Works elementwise on arrays.  ``B`` vanishes off the band; on the band
    ``D = (a - x)/(2 b**2)`` and ``B = sqrt(4 b**2 - (a - x)**2)/(2 b**2)``.
    """
    if not b > 0:
        raise ValueError("b must be positive")
    x_arr = np.asarray(x, dtype=float)
    d = a - x_arr
    inside = np.abs(d) <= 2 * b
    with np.errstate(invalid="ignore", divide="ignore"):
        D_in = d / (2 * b * b)
        B_in = np.sqrt(np.maximum(4 * b * b - d * d, 0.0)) / (2 * b * b)
        s = np.sqrt(np.maximum(d * d - 4 * b * b, 0.0))
        # small root 2/(d + sign(d) s): '+' branch right of the band, '-' branch left
        D_out = 2.0 / (d + np.sign(d) * s)
    D = np.where(inside, D_in, D_out)
    B = np.where(inside, B_in, 0.0)
    if D.ndim == 0:
        return float(D), float(B)
    return D, B


def tail_series_K(seq, n, lam, k_max=10_000, tol=1e-15, window=2, return_state=False):
    """Evaluate ``K_n(z)`` through the series form of the transformed fraction

        K_n = C_0/(2 + C_1/(2 + C_2/(2 + ...)))

    with ``C_0 = 2/(a_n - z)`` and ``C_k = -4 b_{n+k-1}**2/((a_{n+k-1} - z)(a_{n+k} - z))``.

    While every ``|C_k| < 1`` the denominators satisfy ``|N_k| - |N_{k-1}| >= 1``
    and every partial sum has modulus at most 1; these are checked on the
    fly and the certificate then carries ``guarantee='pringsheim-bound'``.
    Otherwise the value is still returned with ``guarantee='none'``.
    """
    lam = complex(lam)
    a_n, _ = seq(n)
    if a_n == lam:
        raise ApproximantPole("C_0 is singular: a_n equals lambda")
    state = TailSeriesState()
    hi, lo = 2.0 ** 512, 2.0 ** -512
    c = 2 / (a_n - lam)
    # N_{-2}, N_{-1}, M_{-2}, M_{-1} and the exponent shared by the working pair
    n2, n1, m2, m1, e = 0j, 1 + 0j, 1 + 0j, 0j, 0
    term = None
    total = 0j
    calm = 0
    step = math.inf
    a_prev = a_n
    converged = False
    k = 0
    while k <= k_max:
        if k > 0:
            a_k, _ = seq(n + k)
            _, b_km = seq(n + k - 1)
            if a_k == lam or a_prev == lam:
                raise ApproximantPole(f"C_{k} is singular")
            c = -4 * b_km * b_km / ((a_prev - lam) * (a_k - lam))
            a_prev = a_k
        state.C.append(c)
        if abs(c) >= 1:
            state.bound_held = False
        n0 = 2 * n1 + c * n2
        m0 = 2 * m1 + c * m2
        # increment |N_k| - |N_{k-1}| in unscaled terms
        n_prev_abs = abs(n1)
        if n0 == 0:
            raise ApproximantPole(f"denominator N_{k} vanished")
        inc_scaled = abs(n0) - n_prev_abs
        with np.errstate(over="ignore"):
            inc = float(np.ldexp(inc_scaled, e)) if inc_scaled != 0 else 0.0
        state.n_increments.append(inc)
        # term_k = (-1)^k C_0...C_k / (N_k N_{k-1}) via the ratio -C_k N_{k-2}/N_k
        if k == 0:
            term = c / (n0 * n1)
        else:
            # N_{k-2} and N_k share the working exponent
            term = -term * c * n2 / n0
        total += term
        state.partial_sums.append(total)
        state.N.append(n0)
        state.M.append(m0)
        state.exponent.append(e)
        if state.bound_held:
            if inc < 1 - 1e-12:
                raise NumericalBreakdown(
                    f"|N_k| - |N_(k-1)| = {inc} < 1 at k={k} although all |C_j| < 1")
            if abs(total) > 1 + 1e-12:
                raise NumericalBreakdown(
                    f"partial sum modulus {abs(total)} exceeds 1 at k={k}")
        step = abs(term)
        calm = calm + 1 if step <= tol * max(1.0, abs(total)) else 0
        # shift the working window; N_{k-1} becomes N_{k-2}
        n2, n1, m2, m1 = n1, n0, m1, m0
        mag = max(abs(n1), abs(n2))
        if mag > hi or mag < lo:
            s = math.frexp(mag)[1]
            f = 2.0 ** -s
            n1, n2, m1, m2 = n1 * f, n2 * f, m1 * f, m2 * f
            e += s
        if calm >= window:
            converged = True
            break
        k += 1
    guarantee = "pringsheim-bound" if state.bound_held else "none"
    cert = ConvergenceCertificate(converged, len(state.C), step, guarantee, tol)
    if return_state:
        return total, cert, state
    return total, cert


def tail_assembled_R(seq, n, lam, K) -> complex:
    """``-(Q_n + Q_{n-1} b_{n-1} K)/(P_n + P_{n-1} b_{n-1} K)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tab = eval_PQ(seq, n, lam)
    pm, qm = tab.aligned(n - 1, n)
    p, q = tab.P[n], tab.Q[n]
    _, b = seq(n - 1)
    den = p + pm * b * K
    if den == 0:
        raise ApproximantPole(f"tail-assembled denominator vanishes at n={n}")
    return complex(-(q + qm * b * K) / den)
