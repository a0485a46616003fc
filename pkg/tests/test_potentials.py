import math

import pytest
from hypothesis import given, strategies as st

from symdyn import ArgumentError, enumerate_language, golden_mean
from symdyn.potentials import HolderSeries, LocallyConstant, birkhoff_bracket, bowen_check, variation


def test_locally_constant_value_and_bracket():
    phi = LocallyConstant(2, {"00": 0.0, "01": 1.0, "10": -1.0}, 2)
    assert phi.value("01") == 1.0
    # S_3 over [010]: windows 01, 10, then 00 or 01
    assert birkhoff_bracket(phi, "010", golden_mean()) == (0.0, 1.0)
    assert birkhoff_bracket(phi, "101", golden_mean()) == (-1.0, -1.0)
    lo, hi = birkhoff_bracket(phi, "00", golden_mean())
    assert (lo, hi) == (0.0, 1.0)


def test_missing_window_is_an_error():
    phi = LocallyConstant(2, {"00": 0.0}, 2)
    with pytest.raises(ArgumentError):
        phi.value("11")


def test_variation_of_locally_constant(golden_lang):
    phi = LocallyConstant(3, {w: float(int(w, 2)) for w in ("000", "001", "010", "100", "101")}, 2)
    assert variation(phi, golden_lang, 3) == 0.0
    assert variation(phi, golden_lang, 5) == 0.0
    assert variation(phi, golden_lang, 2) == 1.0
    assert variation(phi, golden_lang, 0) == 5.0


def test_bowen_locally_constant_zero_beyond_window(golden_lang):
    phi = LocallyConstant.on_symbols([0.0, 1.0])
    out = bowen_check(phi, golden_lang, 12)
    assert out["V_estimate"] == 0.0 and out["pass"]


def test_bowen_geometric_plateaus_below_bound(golden_lang):
    phi = HolderSeries.geometric(0.5, 40, [1.0, -1.0])
    out = bowen_check(phi, golden_lang, 16)
    # spread 2, sum_j j 2^-j = 2
    assert out["series_bound"] == pytest.approx(4.0, rel=1e-9)
    assert out["pass"]
    assert out["running_max"][-1] < out["series_bound"]


def test_bowen_harmonic_fails(golden_lang):
    phi = HolderSeries.harmonic(1000, [1.0, -1.0])
    out = bowen_check(phi, golden_lang, 16)
    assert not out["pass"]


def test_series_rejects_bad_input():
    with pytest.raises(ArgumentError):
        HolderSeries([1.0, -0.5], [0.0, 1.0])
    with pytest.raises(ArgumentError):
        HolderSeries.geometric(1.5, 10, [0.0, 1.0])


@given(st.text("01", min_size=2, max_size=12).filter(lambda s: "11" not in s), st.data())
def test_cocycle_brackets(w, data):
    g = golden_mean()
    m = data.draw(st.integers(1, len(w) - 1))
    for phi in (LocallyConstant(2, {"00": 0.3, "01": -0.2, "10": 0.5}, 2),
                HolderSeries.geometric(0.5, 30, [0.4, -0.6])):
        lo, hi = phi.bracket(w, g)
        a_lo, a_hi = phi.bracket(w[:m], g)
        b_lo, b_hi = phi.bracket(w[m:], g)
        width = (a_hi - a_lo) + (b_hi - b_lo)
        assert a_lo + b_lo - width - 1e-9 <= lo <= hi <= a_hi + b_hi + width + 1e-9


@given(st.floats(-5, 5))
def test_bowen_invariant_under_constant_shift(c):
    L = enumerate_language(golden_mean(), 10)
    for phi in (LocallyConstant.on_symbols([0.0, 1.0]), HolderSeries.geometric(0.5, 20, [1.0, -1.0])):
        a = bowen_check(phi, L, 9)
        b = bowen_check(phi.shifted(c), L, 9)
        assert b["widths"] == pytest.approx(a["widths"], abs=1e-9)
