import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import reference as ref
from jacobispec.coefficients import CoefficientSequence, family_preset
from jacobispec.polynomials import (alt_denominator, eval_P_grid, eval_PQ, recurrence_residual,
                                    turan_determinant, turan_sum, wronskian_residual)

# 50-digit mpmath recurrences on the same float coefficients (tests/reference.py)
HERMITE_P8_13 = 0.66651773677228634
HERMITE_Q8_13 = 0.98997173730310397
HERMITE_P6_2i = complex(-9.7268957021240831, -27.130958126997449)
HERMITE_Q6_2i = complex(-10.584055093499004, -8.2734515167492224)
HERMITE_TURAN_7_04 = 0.3399502118675383

PRESETS = {
    "constant": family_preset("constant", a=0.3, b=0.7),
    "hermite": family_preset("hermite"),
    "power05": family_preset("power", exponent=0.5),
    "power1": family_preset("power", exponent=1.0),
}


def test_frozen_real_values():
    tab = eval_PQ(family_preset("hermite"), 8, 1.3)
    assert tab.p(8) == pytest.approx(HERMITE_P8_13, rel=1e-13)
    assert tab.q(8) == pytest.approx(HERMITE_Q8_13, rel=1e-13)


def test_frozen_complex_values():
    tab = eval_PQ(family_preset("hermite"), 6, 2 + 1j)
    assert abs(tab.p(6) - HERMITE_P6_2i) <= 1e-13 * abs(HERMITE_P6_2i)
    assert abs(tab.q(6) - HERMITE_Q6_2i) <= 1e-13 * abs(HERMITE_Q6_2i)


def test_matches_hermite_closed_form():
    tab = eval_PQ(family_preset("hermite"), 30, 0.9)
    P, _ = tab.unscaled()
    for n in (0, 1, 5, 17, 30):
        assert P[n] == pytest.approx(float(ref.hermite_normalised(n, 0.9)), rel=1e-12, abs=1e-14)


def test_frozen_turan():
    assert turan_determinant(family_preset("hermite"), 7, 0.4) == pytest.approx(
        HERMITE_TURAN_7_04, rel=1e-13)


def test_reference_turan_cross_check():
    seq = family_preset("power", exponent=0.5)
    a, b = ref.coeffs(seq, 40)
    for n, x in ((3, 0.2), (12, -1.7), (30, 2.5)):
        want = float(ref.turan(a, b, x, n))
        for f in (turan_determinant, turan_sum, alt_denominator):
            assert f(seq, n, x) == pytest.approx(want, rel=1e-10)


def test_scaling_survives_overflow():
    # far outside the band the polynomials exceed the float range
    seq = family_preset("constant", a=0.0, b=0.5)
    tab = eval_PQ(seq, 3000, 10.0)
    assert np.all(np.isfinite(tab.P))
    assert np.isinf(tab.unscaled()[0][-1])
    assert wronskian_residual(seq, 3000, 10.0) < 1e-13


def test_grid_matches_single_point():
    seq = PRESETS["hermite"]
    xs = np.linspace(-3, 3, 7)
    grid = eval_P_grid(seq, 40, xs)
    for j, x in enumerate(xs):
        tab = eval_PQ(seq, 40, x)
        np.testing.assert_allclose(grid.value(40)[j], tab.p(40), rtol=1e-13)


def test_recurrence_residual_small():
    grid = eval_P_grid(PRESETS["power1"], 200, np.linspace(-5, 5, 11))
    for k in (1, 50, 199):
        assert np.max(recurrence_residual(grid, k)) < 1e-14


def test_chebyshev_turan_is_one():
    seq = family_preset("constant", a=0.0, b=0.5)
    xs = np.linspace(-0.99, 0.99, 41)
    for n in (1, 10, 100, 400):
        for f in (turan_determinant, turan_sum, alt_denominator):
            np.testing.assert_allclose(f(seq, n, xs), 1.0, atol=1e-12)


def test_turan_sum_at_zero_index():
    seq = family_preset("constant", a=0.0, b=0.5)
    assert turan_sum(seq, 0, 0.3) == pytest.approx(1.0)


def test_argument_checks():
    h = PRESETS["hermite"]
    with pytest.raises(ValueError):
        eval_PQ(h, -1, 0.0)
    with pytest.raises(ValueError):
        eval_PQ(h, 3, [0.0, 1.0])
    with pytest.raises(ValueError):
        turan_determinant(h, 0, 0.0)
    with pytest.raises(ValueError):
        wronskian_residual(h, 0, 0.0)
    with pytest.raises(ValueError):
        wronskian_residual(h, 5, 0.0, normalize="bogus")


def test_literal_normalisation_fails_off_spectrum():
    # documents why the residual is measured against the product terms
    h = PRESETS["hermite"]
    assert wronskian_residual(h, 200, 2 + 1j, "wronskian") > 1e-3
    assert wronskian_residual(h, 200, 2 + 1j) < 1e-14


names = st.sampled_from(sorted(PRESETS))
ns = st.integers(1, 500)
reals = st.floats(-30, 30, allow_nan=False)
imags = st.floats(-30, 30, allow_nan=False).filter(lambda v: abs(v) > 1e-6)


@given(names, ns, reals)
def test_wronskian_real(name, n, x):
    assert wronskian_residual(PRESETS[name], n, x) <= 1e-10


@given(names, ns, reals, imags)
def test_wronskian_complex(name, n, x, y):
    assert wronskian_residual(PRESETS[name], n, complex(x, y)) <= 1e-10


@given(names, ns, st.floats(-0.999, 0.999))
def test_turan_forms_agree_in_band(name, n, t):
    seq = PRESETS[name]
    a, b = seq(n)
    x = a + 2 * b * t
    d, s, alt = turan_determinant(seq, n, x), turan_sum(seq, n, x), alt_denominator(seq, n, x)
    assert d > 0
    assert s == pytest.approx(d, rel=1e-8)
    assert alt == pytest.approx(d, rel=1e-8)


@given(st.floats(0.1, 3), st.floats(-2, 2), st.integers(1, 60), st.floats(-5, 5))
def test_recurrence_scale_covariance(c, shift, n, x):
    # P_n for (c a_k + s, c b_k) at c x + s equals P_n for (a_k, b_k) at x
    base = PRESETS["power05"]
    moved = CoefficientSequence.from_closure(lambda k: (c * base(k)[0] + shift, c * base(k)[1]))
    p1 = eval_PQ(base, n, x).p(n)
    p2 = eval_PQ(moved, n, c * x + shift).p(n)
    assert p2 == pytest.approx(p1, rel=1e-9, abs=1e-9 * max(1.0, abs(p1)))


def test_checked_form_prefers_sum_after_cancellation():
    # far off the band P_n**2 ~ 1e370 while g_n = 1, so only the sum form survives
    seq = family_preset("constant", a=0.25, b=0.75)
    grid = eval_P_grid(seq, 301, np.array([0.5, 12.0]))
    g, used_sum = grid.turan_checked([300])
    assert used_sum.tolist() == [[False, True]]
    np.testing.assert_allclose(g.value(), 1.0, rtol=1e-12)
