import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdyn import ArgumentError, OrbitCollection, enumerate_language, even_shift, full_shift, golden_mean, sft_from_matrix
from symdyn.algebraic import AlgebraicReal, gap_series_root, is_irreducible, perron_root, period
from symdyn.entropy import (counting_bounds_check, entropy_estimate, model_pressure_estimate, partition_logsums,
                            pressure_estimate, spectral_pressure, variational_check)
from symdyn.measures import bernoulli, parry_measure, uniform_markov, weighted_gibbs_markov
from symdyn.potentials import LocallyConstant

LOG_PHI = math.log((1 + 5**0.5) / 2)


def golden_pressure(t):
    # Z_n weights each 1 by e^t: lambda^2 = lambda + e^t
    return math.log((1 + math.sqrt(1 + 4 * math.exp(t))) / 2)


def test_perron_root_is_golden_ratio():
    lam = perron_root([[1, 1], [1, 0]])
    lo, hi = lam.bounds(Fraction(1, 10**20))
    assert hi - lo <= Fraction(1, 10**20)
    assert lo * lo - lo - 1 <= 0 <= hi * hi - hi - 1
    assert lam.log() == pytest.approx(LOG_PHI, abs=1e-15)


def test_matrix_helpers():
    assert is_irreducible([[1, 1], [1, 0]])
    assert not is_irreducible([[1, 1], [0, 1]])
    assert period([[0, 1], [1, 0]]) == 2
    assert period([[1, 1], [1, 0]]) == 1


def test_gap_series_root():
    # S = {1}: blocks 10 only, lambda^2 = 1
    assert float(gap_series_root([1]).mp()) == pytest.approx(1.0)
    # S = {0, 1}: golden mean read backwards
    assert float(gap_series_root([0, 1]).mp()) == pytest.approx((1 + 5**0.5) / 2)


def test_compare_power_exact():
    lam = AlgebraicReal.rational(2)
    assert lam.compare_power(8, 3) == 0
    assert lam.compare_power(9, 3) == 1
    assert lam.compare_power(7, 3) == -1


def test_entropy_of_golden(golden_lang):
    est = entropy_estimate(golden_lang)
    assert est.certified_upper
    assert est.estimate == pytest.approx(LOG_PHI, abs=2e-3)
    lo, hi = est.bracket()
    assert lo <= hi
    assert est.fekete_bound >= LOG_PHI


def test_fekete_never_below_limit():
    counts = enumerate_language(even_shift(), 18).counts
    est = entropy_estimate(counts, subadditive=True)
    assert all(f >= LOG_PHI - 1e-12 for f in est.fekete)
    assert est.fekete == sorted(est.fekete, reverse=True)


def test_entropy_needs_data():
    with pytest.raises(ArgumentError):
        entropy_estimate([0, 0])


def test_counting_bounds_exact(golden_lang):
    rep = counting_bounds_check(golden_lang, perron_root([[1, 1], [1, 0]]), 1)
    assert rep.exact and rep.passed
    # too small a gap breaks the upper bound
    assert not counting_bounds_check(golden_lang, perron_root([[1, 1], [1, 0]]), 0).passed


def test_counting_bounds_float_route_agrees(golden_lang):
    rep = counting_bounds_check(golden_lang, LOG_PHI, 1)
    assert rep.passed and not rep.exact
    assert rep.empirical_Q <= rep.Q


@pytest.mark.parametrize("t", [-1.0, 0.0, 0.7])
def test_golden_pressure_closed_form(t):
    phi = LocallyConstant.on_symbols([0.0, t])
    assert spectral_pressure(golden_mean(), phi) == pytest.approx(golden_pressure(t), abs=1e-12)
    est = model_pressure_estimate(golden_mean(), phi, 20, (12, 20))
    assert est.estimate == pytest.approx(golden_pressure(t), abs=1e-2)
    lo, hi = est.bracket()
    assert lo <= hi


def test_enumerated_and_transfer_pressure_agree():
    model = sft_from_matrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    phi = LocallyConstant(2, {(a, b): 0.3 * a - 0.2 * b for a in range(3) for b in range(3)}, 3)
    L = enumerate_language(model, 14)
    a = pressure_estimate(L, phi, (6, 13))
    b = model_pressure_estimate(model, phi, 13, (6, 13))
    assert a.estimate == pytest.approx(b.estimate, abs=1e-9)


def test_zero_potential_pressure_is_entropy(golden_lang):
    phi = LocallyConstant.constant(0.0, 2)
    p = pressure_estimate(golden_lang, phi)
    e = entropy_estimate(golden_lang)
    assert p.estimate == pytest.approx(e.estimate)


@given(st.floats(-3, 3), st.integers(1, 12))
def test_constant_shift_scales_partition_sums(c, n):
    L = enumerate_language(golden_mean(), 13)
    phi = LocallyConstant.on_symbols([0.2, -0.5])
    lo0, hi0 = partition_logsums(L, phi, n)
    lo1, hi1 = partition_logsums(L, phi.shifted(c), n)
    assert lo1 == pytest.approx(lo0 + c * n, abs=1e-9)
    assert hi1 == pytest.approx(hi0 + c * n, abs=1e-9)


@given(st.integers(1, 12))
def test_pressure_monotone_in_collection(n):
    L = enumerate_language(golden_mean(), 12)
    phi = LocallyConstant.on_symbols([0.1, 0.4])
    D = OrbitCollection.from_predicate(L, lambda w: w[-1:] == (0,), "ends in 0")
    assert partition_logsums(D, phi, n)[1] <= partition_logsums(L, phi, n)[1] + 1e-12


def test_variational_principle_on_golden():
    phi = LocallyConstant.on_symbols([0.0, 0.5])
    g = golden_mean()
    rep = variational_check(g, phi, {
        "equilibrium": weighted_gibbs_markov(g, phi),
        "parry": parry_measure(g),
        "uniform": uniform_markov(g),
    })
    assert rep.passed
    assert rep.best["candidate"] == "equilibrium"
    assert rep.best["defect"] == pytest.approx(0.0, abs=1e-10)


def test_full_shift_pressure_of_bernoulli():
    # P(phi) = log(e^a + e^b) for a symbol potential on the full 2-shift
    phi = LocallyConstant.on_symbols([0.0, math.log(3)])
    assert spectral_pressure(full_shift(2), phi) == pytest.approx(math.log(4))
    rep = variational_check(full_shift(2), phi, {"b": bernoulli([0.25, 0.75])})
    assert rep.rows[0]["defect"] == pytest.approx(0.0, abs=1e-12)
