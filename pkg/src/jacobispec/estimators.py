"""scikit-learn style wrappers.

``fit`` takes the coefficients (a ``CoefficientSequence`` or an array of
``(a_k, b_k)`` rows) and ``transform``/``predict`` evaluate spectral
quantities at real points.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .approx import METHODS, sigma_n, weight_fn
from .coefficients import CoefficientSequence, band_interval
from .oracle import truncation_measure

__all__ = ["ApproximantSpectralDensity", "TruncatedSpectralMeasure"]


def _as_sequence(X):
    if isinstance(X, CoefficientSequence):
        return X
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("expected a CoefficientSequence or an array of shape (L, 2) with rows (a_k, b_k)")
    return CoefficientSequence.from_arrays(arr[:, 0], arr[:, 1], source="array")


def _points(X):
    x = np.asarray(X, dtype=float)
    if x.ndim == 2:
        if x.shape[1] != 1:
            raise ValueError("points must be a 1-D array or a single column")
        x = x[:, 0]
    return np.atleast_1d(x)


class ApproximantSpectralDensity(TransformerMixin, BaseEstimator):
    """Density ``f_n`` of the constant-tail approximant of order ``n``.

    Parameters
    ----------
    n : int
        Approximant order (>= 1).
    method : {'auto', 'turan-det', 'turan-sum'}
        Denominator representation, see :func:`jacobispec.approx.weight_fn`.

    Attributes
    ----------
    sequence_ : CoefficientSequence
    band_ : BandInterval
    """

    def __init__(self, n=100, method="auto"):
        self.n = n
        self.method = method

    def fit(self, X, y=None):
        if int(self.n) < 1:
            raise ValueError("n must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        seq = _as_sequence(X)
        if seq.length is not None and seq.length < int(self.n) + 2:
            raise ValueError(f"need at least n + 2 = {int(self.n) + 2} coefficient rows")
        self.sequence_ = seq
        self.band_ = band_interval(seq, int(self.n))
        return self

    def predict(self, X):
        """``f_n`` at the points ``X`` as a 1-D array."""
        check_is_fitted(self, "sequence_")
        return np.atleast_1d(weight_fn(self.sequence_, int(self.n), _points(X), self.method))

    def transform(self, X):
        return self.predict(X)[:, None]

    def cdf(self, X, base=None):
        """Distribution function of the approximant at sorted points ``X``."""
        check_is_fitted(self, "sequence_")
        x = _points(X)
        a = self.band_.lo if base is None else base
        return sigma_n(self.sequence_, int(self.n), a, x).values


class TruncatedSpectralMeasure(TransformerMixin, BaseEstimator):
    """Discrete spectral measure of the ``n_nodes x n_nodes`` truncation.

    ``transform``/``predict`` return the cumulative measure at the points.
    """

    def __init__(self, n_nodes=200):
        self.n_nodes = n_nodes

    def fit(self, X, y=None):
        seq = _as_sequence(X)
        if seq.length is not None and seq.length < int(self.n_nodes):
            raise ValueError(f"need at least n_nodes = {int(self.n_nodes)} coefficient rows")
        m = truncation_measure(seq, int(self.n_nodes))
        self.measure_ = m
        self.nodes_ = m.nodes
        self.weights_ = m.weights
        return self

    def predict(self, X):
        check_is_fitted(self, "measure_")
        return np.atleast_1d(self.measure_.cdf(_points(X)))

    def transform(self, X):
        return self.predict(X)[:, None]
