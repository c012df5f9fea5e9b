import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import reference as ref
from jacobispec.approx import (Rn, Rn_boundary, ac_conditions_An, fn_at_zero, offband_eigenvalues,
                               sigma_n, weight_curve, weight_fJ, weight_fn, zero_eigenvalue_test)
from jacobispec.coefficients import CoefficientError, CoefficientSequence, family_preset
from jacobispec.oracle import dense_resolvent, truncation_measure
from jacobispec.polynomials import NumericalBreakdown

# mpmath reference values (tests/reference.py, 50 digits)
FROZEN = [
    ("hermite", 5, 0.0, 0.58808415511657819),
    ("hermite", 10, 0.7, 0.33789526659076769),
    ("hermite", 50, 1.3, 0.10384520633522001),
    ("power05", 9, 0.5, 0.34330868860877945),
    ("power05", 20, -1.1, 0.21998782738332098),
]
FJ_0_1_1 = 0.27566444771089604
SEMICIRCLE_CDF_03 = 0.68808116760946352


def _seq(name):
    return family_preset("hermite") if name == "hermite" else family_preset("power", exponent=0.5)


@pytest.mark.parametrize("name,n,x,want", FROZEN)
@pytest.mark.parametrize("method", ["auto", "turan-det", "turan-sum"])
def test_weight_frozen(name, n, x, want, method):
    assert weight_fn(_seq(name), n, x, method) == pytest.approx(want, rel=1e-12)


def test_weight_against_reference_directly():
    seq = family_preset("saturating")
    a, b = ref.coeffs(seq, 40)
    for n, x in ((4, 0.1), (30, -1.5)):
        assert weight_fn(seq, n, x) == pytest.approx(float(ref.weight(a, b, n, x)), rel=1e-11)


def test_semicircle_density():
    assert weight_fJ(0, 1, 1) == pytest.approx(FJ_0_1_1, rel=1e-15)
    assert weight_fJ(0, 1, 2.5) == 0.0
    with pytest.raises(ValueError):
        weight_fJ(0, 0, 0)


def test_chebyshev_weight_is_semicircle():
    seq = family_preset("constant", a=0, b=0.5)
    xs = np.linspace(-1, 1, 201)
    for n in (1, 10, 100):
        np.testing.assert_allclose(weight_fn(seq, n, xs), 2 / math.pi * np.sqrt(1 - xs ** 2),
                                   atol=1e-12)


def test_weight_zero_off_band_and_curve():
    seq = family_preset("hermite")
    c = weight_curve(seq, 4, [-10.0, 0.0, 10.0])
    assert c.fs[0] == 0 and c.fs[2] == 0 and c.fs[1] > 0
    assert c.to_dict()["n"] == 4


def test_unknown_method():
    with pytest.raises(ValueError):
        weight_fn(family_preset("hermite"), 4, 0.0, "magic")


@given(st.sampled_from(["hermite", "power05"]), st.integers(1, 300), st.floats(-0.999, 0.999))
def test_weight_positive(name, n, t):
    seq = _seq(name)
    a, b = seq(n)
    assert weight_fn(seq, n, a + 2 * b * t) > 0


def test_fn_at_zero_paths_agree():
    for seq in (family_preset("hermite"), family_preset("power", exponent=1.0)):
        for n in (1, 2, 3, 10, 101, 1000):
            assert fn_at_zero(seq, n) == pytest.approx(weight_fn(seq, n, 0.0), rel=1e-10)


def test_fn_at_zero_paired_closed_form():
    assert fn_at_zero(family_preset("paired", ratio=2.0), 3) == pytest.approx(4 / math.pi)


def test_fn_at_zero_needs_zero_diagonal():
    with pytest.raises(CoefficientError):
        fn_at_zero(family_preset("constant", a=1.0, b=1.0), 3)


def test_Rn_limits():
    c = family_preset("constant", a=0, b=0.5)
    assert Rn(c, 0, 1j) == pytest.approx(0.8284271247461903j)
    assert Rn(c, 7, 1j) == pytest.approx(0.8284271247461903j)
    h = family_preset("hermite")
    assert abs(Rn(h, 300, 1 + 1j) - dense_resolvent(h, 3000, 1 + 1j)) < 1e-8


def test_Rn_boundary_imag_is_pi_density():
    h = family_preset("hermite")
    for x in (-0.8, 0.0, 0.6):
        assert Rn_boundary(h, 12, x).imag == pytest.approx(math.pi * weight_fn(h, 12, x), rel=1e-10)


def test_sigma_total_mass_semicircle():
    seq = family_preset("constant", a=0, b=0.5)
    for n in (1, 10, 100):
        s = sigma_n(seq, n, -1.0, [0.3, 1.0])
        assert s.total_mass == pytest.approx(1.0, abs=1e-12)
        assert s.values[0] == pytest.approx(SEMICIRCLE_CDF_03, abs=1e-12)
        assert s.base == 0.0


def test_sigma_rejects_unsorted():
    with pytest.raises(ValueError):
        sigma_n(family_preset("hermite"), 3, 0.0, [1.0, 0.0])


def test_offband_eigenvalue_and_mass():
    # a_0 = 3 pushes one eigenvalue of A_n above the band [-1, 1]
    seq = CoefficientSequence.from_closure(lambda k: (3.0 if k == 0 else 0.0, 0.5))
    eig = offband_eigenvalues(seq, 5)
    assert len(eig) == 1
    meas = truncation_measure(seq, 400)
    top = meas.nodes[-1]
    assert eig[0].x == pytest.approx(top, abs=1e-12)
    assert eig[0].mass == pytest.approx(meas.weights[-1], abs=1e-12)
    s = sigma_n(seq, 5, -2.0, [2.0, 4.0])
    assert s.total_mass == pytest.approx(1.0, abs=1e-10)
    assert s.values[1] - s.values[0] == pytest.approx(eig[0].mass, abs=1e-12)


@given(st.integers(1, 60), st.lists(st.floats(-6, 6), min_size=2, max_size=8))
def test_sigma_monotone(n, pts):
    s = sigma_n(family_preset("hermite"), n, -7.0, sorted(pts))
    assert np.all(np.diff(s.values) >= -1e-13)
    assert np.all((s.values >= -1e-13) & (s.values <= 1 + 1e-10))


def test_ac_conditions():
    assert ac_conditions_An(family_preset("hermite"), 100).verdict == "certified-at-scale"
    bad = CoefficientSequence.from_closure(lambda k: (0.0, 2.0 if k == 3 else 1.0))
    rep = ac_conditions_An(bad, 10)
    assert rep.verdict == "violated" and rep.witnesses[0]["n"] == 4


def test_zero_eigenvalue_indicator():
    assert zero_eigenvalue_test(family_preset("paired", ratio=2.0), 500).fires
    rep = zero_eigenvalue_test(family_preset("hermite"), 500)
    assert not rep.fires and rep.tail_ratio_sup > 0.99
    with pytest.raises(ValueError):
        zero_eigenvalue_test(family_preset("hermite"), 4)
    with pytest.raises(CoefficientError):
        zero_eigenvalue_test(family_preset("constant", a=1.0), 20)
