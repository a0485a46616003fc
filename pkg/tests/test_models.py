import itertools
import re

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdyn import (BetaModel, ConstructionError, InsufficientDataError, SGapModel, SoficModel, beta_membership,
                    enumerate_language, even_shift, full_shift, golden_mean, sft_from_matrix)
from symdyn.beta_transform import BetaMap
from symdyn.models import GapSet, beta_graph_build, edge_shift, longest_zero_run, sgap_membership
from symdyn.words import as_word, format_word

from conftest import all_words, matrix_counts

Z_2102001 = "2102001"


def gap_factors(gaps, n, max_block):
    """Length-n factors of concatenations of blocks 1 0^s (s in gaps); an oracle independent of run-length logic."""
    blocks = ["1" + "0" * s for s in gaps]
    out = set()
    frontier = {""}
    while frontier:
        nxt = set()
        for u in frontier:
            for b in blocks:
                v = u + b
                if len(v) <= n + 2 * max_block + 2:
                    nxt.add(v)
        for v in nxt:
            for i in range(len(v) - n + 1):
                out.add(v[i:i + n])
        frontier = nxt
    return out


def even_oracle(w: str) -> bool:
    # a maximal 0-run with 1s on both sides has even length
    return all(len(r) % 2 == 0 for r in re.findall(r"(?<=1)0+(?=1)", w))


def test_sft_accepts():
    g = golden_mean()
    assert g.accepts("0101001")
    assert not g.accepts("0110")
    assert g.successors("1") == [0]
    assert g.successors("0") == [0, 1]


def test_sft_drops_dead_vertices():
    # vertex 2 has no successor, so it is not in the shift
    m = sft_from_matrix([[1, 1, 1], [1, 0, 0], [0, 0, 0]])
    assert not m.accepts("2")
    assert enumerate_language(m, 8).counts == matrix_counts([[1, 1], [1, 0]], 8)


def test_edge_shift_counts():
    m = edge_shift([[2]])
    assert enumerate_language(m, 6).counts == [2**n for n in range(1, 7)]
    m = edge_shift([[1, 1], [1, 0]])
    assert m.alphabet_size == 3
    assert enumerate_language(m, 10).counts == matrix_counts([[1, 1], [1, 0]], 11)[1:]


def test_even_shift_matches_run_oracle():
    L = enumerate_language(even_shift(), 12)
    for n in range(1, 13):
        brute = sorted(w for w in all_words(2, n) if even_oracle(format_word(w)))
        assert [tuple(r) for r in L.words(n).tolist()] == brute


def test_sofic_rejects_graph_without_cycle():
    with pytest.raises(ConstructionError):
        SoficModel([(0, 1, 0)])


@pytest.mark.parametrize("gaps", [(1, 2, 4), (0, 3), (2,)])
def test_sgap_finite_matches_block_factors(gaps):
    model = SGapModel(gaps)
    L = enumerate_language(model, 10)
    for n in range(1, 11):
        got = {format_word(tuple(r)) for r in L.words(n).tolist()}
        assert got == gap_factors(gaps, n, max(gaps))


def test_sgap_all_gaps_is_full_shift():
    L = enumerate_language(SGapModel(GapSet.parse("0:1")), 12)
    assert L.counts == [2**n for n in range(1, 13)]


def test_sgap_progression_membership():
    S = GapSet.parse("2:3")
    assert 2 in S and 5 in S and 8 in S and 3 not in S
    assert not S.is_finite
    assert sgap_membership(S, "1001000001")
    assert not sgap_membership(S, "10001")
    assert sgap_membership(S, "0" * 50)


def test_sgap_boundary_runs_are_bounded_for_finite_sets():
    assert sgap_membership([1, 2], "001")
    assert not sgap_membership([1, 2], "0001")


def test_beta_rejects_inconsistent_prefix():
    with pytest.raises(ConstructionError):
        BetaModel("1011")  # the suffix 11 exceeds 10
    with pytest.raises(ConstructionError):
        BetaModel("0")


def test_beta_membership_examples():
    assert not beta_membership(Z_2102001, "211")
    assert beta_membership(Z_2102001, "2102")
    assert beta_membership(Z_2102001, "20")
    assert beta_membership("21", "2020")
    assert not beta_membership("21", "0022")
    with pytest.raises(InsufficientDataError):
        beta_membership("21", "0210")


def test_beta_graph_shape():
    g = beta_graph_build(Z_2102001)
    assert g.n_vertices == 7
    assert g.edges[0] == [(0, 0), (1, 0), (2, 1)]
    assert g.edges[2] == [(0, 3)]
    assert g.end_vertex("21") == 2
    assert g.end_vertex("211") is None
    assert g.distance_to_base(2) == 2
    assert g.distance_to_base(1) == 1


def test_golden_beta_shift_is_golden_sft():
    z = BetaMap("golden").z_prefix(16)
    L = enumerate_language(BetaModel(z), 14)
    assert L.counts == matrix_counts([[1, 1], [1, 0]], 14)


def test_beta_depth_shortfall_is_an_error():
    with pytest.raises(Exception):
        enumerate_language(BetaModel("21"), 5)


@pytest.mark.parametrize("beta", ["golden", "5/2", "101/40"])
def test_three_way_membership(beta):
    bmap = BetaMap(beta)
    z = bmap.z_prefix(9)
    g = beta_graph_build(z)
    for n in range(1, 9):
        paths = g.path_words(n)
        for w in all_words(z[0] + 1, n):
            lex = beta_membership(z, w)
            assert lex == (w in paths) == g.spells(w)
            assert lex == (bmap.interval_of_word(w) is not None)


@given(st.sampled_from([golden_mean(), even_shift(), SGapModel((1, 3))]),
       st.lists(st.integers(0, 1), min_size=1, max_size=14))
def test_membership_matches_automaton(model, w):
    w = tuple(w)
    assert model.accepts(w) == (model.automaton().run(w) >= 0)


BETA_LANGS = {b: enumerate_language(BetaModel.from_beta(b, 14), 10) for b in ("golden", "5/2", "101/40")}


@given(st.sampled_from(sorted(BETA_LANGS)), st.integers(1, 10), st.integers(0, 10**6))
def test_enumerated_beta_language_is_factor_closed(beta, n, pick):
    L = BETA_LANGS[beta]
    words = L.words(n)
    w = tuple(int(a) for a in words[pick % len(words)])
    for i in range(n):
        for j in range(i + 1, n + 1):
            assert w[i:j] in L


def test_longest_zero_run():
    assert longest_zero_run(Z_2102001) == 2
