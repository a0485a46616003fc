import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from symdyn import ArgumentError, InsufficientDataError, beta_membership, enumerate_language
from symdyn.beta_transform import (BetaMap, Interval, IntervalArith, circle_distance, forward_nonexpansive_probe,
                                   greedy_count_bruteforce, greedy_separated, is_separated, locality_ok,
                                   separated_count, separated_entropy, z_prefix_from_beta)
from symdyn.models import BetaModel

from conftest import all_words

RATIONAL_BETAS = [Fraction(5, 2), Fraction(101, 40), Fraction(3, 2), Fraction(3)]


def greedy_digits(beta: Fraction, x: Fraction, n: int):
    out = []
    for _ in range(n):
        y = beta * x
        d = math.floor(y)
        out.append(d)
        x = y - d
    return tuple(out)


def test_z_prefix_examples():
    assert z_prefix_from_beta("golden", 8) == (1, 0) * 4
    assert z_prefix_from_beta("101/40", 7) == (2, 1, 0, 2, 0, 0, 1)
    assert z_prefix_from_beta(2, 5) == (1,) * 5
    assert z_prefix_from_beta("1+sqrt(2)", 6) == (2, 0) * 3


def test_float_beta_flags_unreliable_digits():
    b = BetaMap(2.0)
    assert not b.exact
    # beta = 2 exactly: digits of 1 land on integers and cannot be certified
    with pytest.raises(InsufficientDataError):
        b.z_prefix(4)
    assert b.z_prefix(4, strict=False) == ()


def test_interval_beta_certifies_generic_digits():
    b = BetaMap(2.5, radius=1e-30)
    assert b.z_prefix(4) == (2, 1, 0, 1)


@pytest.mark.parametrize("beta", RATIONAL_BETAS)
@given(x=st.fractions(0, 1).filter(lambda q: q < 1))
def test_code_matches_direct_greedy(beta, x):
    digits, flags = BetaMap(beta).code(x, 12)
    assert digits == greedy_digits(beta, x, 12)


@given(st.sampled_from(["golden", "5/2", "101/40", "1+sqrt(2)"]), st.fractions(0, 1).filter(lambda q: q < 1),
       st.integers(1, 30))
def test_conjugacy(beta, x, n):
    b = BetaMap(beta)
    d, ok = b.code(x, n + 1)
    e, ok2 = b.code(b.f(x), n)
    if all(ok) and all(ok2):
        assert e == d[1:]


def test_code_rejects_points_outside_unit_interval():
    with pytest.raises(ArgumentError):
        BetaMap("5/2").code(Fraction(1), 3)


@pytest.mark.parametrize("beta", ["golden", "5/2", "101/40"])
def test_intervals_partition_unit_interval(beta):
    b = BetaMap(beta)
    z = b.z_prefix(12)
    L = enumerate_language(BetaModel(z), 8)
    for n in range(1, 9):
        total = b.arith.const(0)
        for w in L.iter_words(n):
            total = b.arith.add(total, b.interval_length(b.interval_of_word(w)))
        assert b.equal(total, b.arith.const(1))


def test_interval_lengths_rational_exact():
    b = BetaMap("5/2")
    assert b.interval_of_word((2,)) == (Fraction(4, 5), Fraction(1))
    assert b.interval_of_word((2, 2)) is None
    assert b.interval_of_word((2, 1)) == (Fraction(24, 25), Fraction(1))
    assert b.interval_of_word((2, 0)) == (Fraction(4, 5), Fraction(24, 25))


@pytest.mark.parametrize("beta", ["golden", "5/2", "101/40"])
def test_interval_nonempty_iff_admissible(beta):
    b = BetaMap(beta)
    z = b.z_prefix(8)
    for n in range(1, 7):
        for w in all_words(z[0] + 1, n):
            assert (b.interval_of_word(w) is not None) == beta_membership(z, w)


def test_cylinder_image_of_admissible_word():
    b = BetaMap("5/2")
    assert b.cylinder_image((1,)) == (Fraction(0), Fraction(1))
    assert b.cylinder_image((2,)) == (Fraction(0), Fraction(1, 2))


def test_interval_arith_is_outward():
    ar = IntervalArith(Fraction(5, 2), Fraction(1, 10**40))
    x = ar.mul_beta(ar.const(Fraction(1, 3)))
    assert x.lo <= Fraction(5, 6) <= x.hi
    assert ar.floor(Interval(Fraction(99, 100), Fraction(101, 100)))[1] is False
    assert ar.floor(Interval(Fraction(11, 10), Fraction(12, 10))) == (1, True)


def test_circle_distance():
    assert circle_distance(0.05, 0.95) == pytest.approx(0.1)
    assert circle_distance(0.2, 0.5) == pytest.approx(0.3)


def test_locality_condition():
    assert locality_ok(2.5, 0.1, False)
    assert not locality_ok(2.5, 0.2, False)
    assert locality_ok(2.0, 0.3, True)


@pytest.mark.parametrize("beta", [Fraction(2), Fraction(5, 2), Fraction(101, 40)])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_cylinder_count_matches_exhaustive_greedy(beta, n):
    b = BetaMap(beta)
    eps = Fraction(1, 20)
    assert separated_count(b, eps, n, Fraction(1, 400)).count == greedy_count_bruteforce(b, eps, n, 400)


def test_greedy_set_is_separated():
    b = BetaMap("5/2")
    from symdyn.beta_transform import exact_trajectories

    traj = exact_trajectories(b, 200, 3)
    chosen = greedy_separated(traj, Fraction(1, 20))
    assert is_separated([traj[i] for i in chosen], Fraction(1, 20))


@given(st.sampled_from(["2", "5/2", "101/40"]), st.integers(1, 10),
       st.fractions(Fraction(1, 1000), Fraction(1, 10)), st.fractions(Fraction(1, 1000), Fraction(1, 10)))
def test_separated_counts_monotone_in_eps(beta, n, e1, e2):
    b = BetaMap(beta)
    small, large = sorted((e1, e2))
    res = Fraction(1, 10**6)
    assert separated_count(b, small, n, res).count >= separated_count(b, large, n, res).count


def test_separated_scale_checks():
    b = BetaMap("5/2")
    with pytest.raises(ArgumentError):
        separated_count(b, Fraction(1, 10**7), 3, Fraction(1, 10**6))
    with pytest.raises(ArgumentError):
        separated_count(b, Fraction(1, 3), 3, Fraction(1, 10**6))
    with pytest.raises(ArgumentError):
        separated_count(b, Fraction(1, 10), 3, Fraction(3, 10**6))


@pytest.mark.parametrize("beta", ["2", "5/2"])
def test_separated_entropy_near_log_beta(beta):
    b = BetaMap(beta)
    est = separated_entropy(b, Fraction(1, 20), 12)
    assert est.lower_bound_only
    assert abs(est.estimate - math.log(b.value)) < 0.07


def test_forward_probe_shrinks():
    out = forward_nonexpansive_probe(BetaMap("5/2"), Fraction(3, 10), Fraction(1, 10), 4)
    assert out[0] == Fraction(1, 5)
    assert all(a >= b for a, b in zip(out, out[1:]))
    assert out[4] <= Fraction(1, 5) / Fraction(5, 2) ** 4
