import io
import math

import numpy as np
import pytest

from jacobispec.coefficients import (CoefficientError, CoefficientSequence, IndexBeyondTable,
                                     band_interval, carleman_diagnostic, centered_check,
                                     family_preset, load_table, save_table)


def test_preset_values():
    h = family_preset("hermite")
    assert h(0) == (0.0, math.sqrt(0.5))
    assert h(7) == (0.0, 2.0)
    assert family_preset("constant", a=5, b=1)(123) == (5.0, 1.0)
    assert family_preset("power", exponent=0.5)(3) == (0.0, 2.0)


def test_paired_layout():
    p = family_preset("paired", ratio=2.0)
    _, b = p.arrays(7)
    np.testing.assert_array_equal(b, [1, 2, 2, 4, 4, 8, 8])


def test_saturating_increases_to_limit():
    s = family_preset("saturating", limit=1.0, start=0.5, rate=0.5)
    _, b = s.arrays(60)
    assert np.all(np.diff(b) >= 0)
    assert b[0] == 0.5 and b[-1] == pytest.approx(1.0)


@pytest.mark.parametrize("kind,params", [("constant", {"b": 0}), ("constant", {"b": -1}),
                                         ("power", {"scale": 0}), ("paired", {"ratio": -1}),
                                         ("saturating", {"start": 2.0}), ("nope", {})])
def test_bad_presets(kind, params):
    with pytest.raises(CoefficientError):
        family_preset(kind, **params)


def test_hermite_takes_no_parameters():
    with pytest.raises(CoefficientError):
        family_preset("hermite", a=1)


def test_invalid_closure_values():
    bad_b = CoefficientSequence.from_closure(lambda k: (0.0, 0.0 if k == 3 else 1.0))
    bad_b(2)
    with pytest.raises(CoefficientError):
        bad_b(3)
    nan = CoefficientSequence.from_closure(lambda k: (float("nan"), 1.0))
    with pytest.raises(CoefficientError):
        nan(0)


def test_overflow_reported():
    p = family_preset("paired", ratio=2.0)
    with pytest.raises(CoefficientError):
        p.arrays(2100)


def test_negative_index():
    with pytest.raises(IndexError):
        family_preset("hermite")(-1)


def test_arrays_cached_and_readonly():
    h = family_preset("hermite")
    a, b = h.arrays(10)
    assert not b.flags.writeable
    a2, b2 = h.arrays(5)
    np.testing.assert_array_equal(b2, b[:5])
    assert len(h.arrays(0)[0]) == 0


def test_shift():
    h = family_preset("hermite")
    s = h.shift(4)
    assert s(0) == h(4)
    assert s.carleman_verdict == "divergent"
    with pytest.raises(ValueError):
        h.shift(-1)


def test_table_roundtrip(tmp_path):
    h = family_preset("power", exponent=0.5)
    path = tmp_path / "t.jcoef.csv"
    save_table(h, 20, path)
    t = load_table(path)
    assert t.length == 20
    np.testing.assert_array_equal(t.arrays(20)[1], h.arrays(20)[1])
    with pytest.raises(IndexBeyondTable):
        t(20)
    with pytest.raises(IndexBeyondTable):
        t.shift(20)


@pytest.mark.parametrize("text", ["", "1,2,3\n", "1,x\n", "1,-1\n", "inf,1\n"])
def test_table_rejects(text):
    with pytest.raises(CoefficientError):
        load_table(io.StringIO(text))


def test_table_skips_blank_lines():
    t = load_table(io.StringIO("0,1\n\n2,3\n"))
    assert t.length == 2 and t(1) == (2.0, 3.0)


def test_band_and_centered():
    c = family_preset("constant", a=0.0, b=0.5)
    band = band_interval(c, 3)
    assert (band.lo, band.hi, band.center, band.width) == (-1.0, 1.0, 0.0, 2.0)
    h = family_preset("hermite")
    rep = centered_check(h, (-1, 1), 0, 100)
    # 2 b_n = sqrt(2(n+1)) > 1 from n = 0 on
    assert rep.centered and rep.n0 == 0
    rep = centered_check(h, (-3, 3), 0, 100)
    # sqrt(2(n+1)) > 3 first at n = 4
    assert rep.n0 == 4
    assert not centered_check(c, (-2, 2), 0, 50).centered
    with pytest.raises(ValueError):
        centered_check(h, (1, -1), 0, 10)


def test_carleman():
    h = carleman_diagnostic(family_preset("hermite"), 4000)
    assert h.analytic_verdict == "divergent" and h.trend == "growing unbounded"
    p = carleman_diagnostic(family_preset("power", exponent=2.0), 4000)
    assert p.analytic_verdict == "convergent" and p.trend == "apparently convergent"
    assert p.partial_sum == pytest.approx(math.pi ** 2 / 6, abs=1e-3)


def test_flags():
    assert family_preset("paired", ratio=2.0).carleman_verdict == "convergent"
    assert family_preset("constant").diagonal_unbounded is False
    assert family_preset("hermite").zero_diagonal(50)
    assert not family_preset("constant", a=1.0).zero_diagonal(5)
