import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdyn import ArgumentError, ConstructionError, enumerate_language, full_shift, golden_mean, sft_from_matrix
from symdyn.measures import (MarkovMeasure, bernoulli, empirical_mme, gibbs_check, invariance_defect,
                             max_cylinder_deviation, parry_measure, periodic_measure, periodic_orbits, smb_check,
                             weighted_gibbs_markov)
from symdyn.potentials import LocallyConstant

PHI = (1 + 5**0.5) / 2
LOG_PHI = math.log(PHI)


def lucas(n):
    a, b = 2, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_parry_closed_form():
    mu = parry_measure(golden_mean())
    assert mu.mass("0") == pytest.approx(PHI**2 / (1 + PHI**2))
    assert mu.mass("1") == pytest.approx(1 / (1 + PHI**2))
    assert mu.mass("01") == pytest.approx(1 / (1 + PHI**2))
    assert mu.mass("11") == 0.0
    assert mu.entropy() == pytest.approx(LOG_PHI, abs=1e-12)


def test_markov_validation():
    with pytest.raises(ConstructionError):
        MarkovMeasure([(0,), (1,)], [0.5, 0.5], [[1.0, 0.0], [0.5, 0.5]], 2)


@pytest.mark.parametrize("mu", [parry_measure(golden_mean()), bernoulli([0.2, 0.3, 0.5]),
                                weighted_gibbs_markov(sft_from_matrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]]),
                                                      LocallyConstant(2, {(a, b): 0.1 * a * b for a in range(3)
                                                                          for b in range(3)}, 3))],
                         ids=["parry", "bernoulli", "two-block"])
def test_markov_additivity_normalization_invariance(mu):
    A = mu.alphabet_size
    L = enumerate_language(full_shift(A), 6)
    for n in range(1, 6):
        for w in L.iter_words(n):
            m = mu.mass(w)
            assert sum(mu.mass(w + (a,)) for a in range(A)) == pytest.approx(m, abs=1e-12)
            assert sum(mu.mass((a,) + w) for a in range(A)) == pytest.approx(m, abs=1e-12)
        assert mu.masses_level(L, n).sum() == pytest.approx(1.0)


def test_empirical_mme_matches_brute_force_oracle():
    mu = empirical_mme(golden_mean(), 10, 3)
    assert mu.exact
    # brute force over golden words of length 12 gives mu_10[1] = 7/24
    assert mu.mass("1") == Fraction(7, 24)
    assert mu.mass("0") == Fraction(17, 24)


def test_empirical_mme_exact_normalization_and_additivity(golden_lang):
    mu = empirical_mme(golden_mean(), 12, 4, lang=golden_lang)
    for n in range(1, 5):
        assert sum(mu.mass(w) for w in golden_lang.iter_words(n)) == 1
    for n in range(1, 4):
        for w in golden_lang.iter_words(n):
            assert mu.mass(w) == mu.mass(w + (0,)) + mu.mass(w + (1,))


def test_invariance_defect_bounded_and_decreasing():
    g = golden_mean()
    d = 3
    prev = None
    for n in (6, 10, 14):
        defect = max(invariance_defect(empirical_mme(g, n, d)))
        assert defect <= Fraction(d, n)
        if prev is not None:
            assert defect <= prev
        prev = defect


def test_empirical_mme_requires_depth_below_n():
    with pytest.raises(ArgumentError):
        empirical_mme(golden_mean(), 4, 4)


def test_weighted_empirical_measure_tracks_equilibrium_state():
    g = golden_mean()
    phi = LocallyConstant.on_symbols([0.0, 0.8])
    mu = empirical_mme(g, 16, 2, phi=phi)
    L = enumerate_language(g, 2)
    assert max_cylinder_deviation(mu, weighted_gibbs_markov(g, phi), L, 2) < 0.03


def test_gibbs_passes_for_parry_and_fails_for_wrong_entropy(golden_lang):
    mu = parry_measure(golden_mean())
    good = gibbs_check(mu, golden_lang, LOG_PHI)
    assert good.passed
    assert max(good.K) <= PHI**2
    assert not gibbs_check(mu, golden_lang, 0.4).passed


def test_gibbs_with_declared_constant(golden_lang):
    mu = parry_measure(golden_mean())
    assert gibbs_check(mu, golden_lang, LOG_PHI, K=3.0).passed
    assert not gibbs_check(mu, golden_lang, LOG_PHI, K=1.1).passed


def test_periodic_counts_are_traces():
    rep = periodic_orbits(golden_mean(), 16, LOG_PHI)
    assert rep.counts == [lucas(n) for n in range(1, 17)]
    assert rep.undecided == [0] * 16
    assert rep.drift_ok
    for n, c in enumerate(rep.counts, 1):
        e = math.exp(n * LOG_PHI)
        assert e / rep.C_emp <= c <= rep.C_emp * e


def test_periodic_measure_equidistributes():
    g = golden_mean()
    L = enumerate_language(g, 3)
    # brute force over cyclic golden words: 1.7253111717e-05 at period 12, depth 3
    dev = max_cylinder_deviation(periodic_measure(g, 12, 3), parry_measure(g), L, 3)
    assert dev == pytest.approx(1.7253111717e-05, rel=1e-6)


def test_smb_on_parry():
    out = smb_check(parry_measure(golden_mean()), 10_000, seed=3)
    assert out["pass"]


@given(st.integers(0, 2**31 - 1))
def test_markov_samples_are_admissible(seed):
    x = parry_measure(golden_mean()).sample(200, seed)
    assert not any(a == 1 and b == 1 for a, b in zip(x, x[1:]))
