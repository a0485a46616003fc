import io
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdyn import (ArgumentError, InsufficientDataError, Language, OrbitCollection, ResourceError, enumerate_language,
                    even_shift, full_shift, golden_mean, sft_from_matrix)
from symdyn.language import automaton_counts, collection_counts, concat_check
from symdyn.words import as_word, format_word, lex_leq_prefix, longest_run, repeat_to, subword

from conftest import all_words, matrix_counts


def test_word_helpers():
    assert as_word("0110") == (0, 1, 1, 0)
    assert as_word([2, 1]) == (2, 1)
    assert format_word((1, 0, 2), 3) == "102"
    assert subword("01234", 2, 4) == (1, 2, 3)
    assert longest_run("1000100", 0) == 3
    assert repeat_to("01", 5) == (0, 1, 0, 1, 0)
    assert lex_leq_prefix((1, 0), (1, 0, 1))
    assert not lex_leq_prefix((1, 1), (1, 0, 1))


def test_as_word_rejects_symbols_outside_alphabet():
    with pytest.raises(ArgumentError):
        as_word("012", 2)


def test_golden_counts_are_fibonacci(golden_lang):
    fib = [2, 3]
    while len(fib) < golden_lang.depth:
        fib.append(fib[-1] + fib[-2])
    assert golden_lang.counts == fib


def test_empty_word_is_admissible(golden_lang):
    assert golden_lang.count(0) == 1
    assert () in golden_lang


def test_words_are_lexicographic_and_admissible(golden_lang):
    W = golden_lang.words(7)
    tuples = [tuple(r) for r in W.tolist()]
    assert tuples == sorted(tuples)
    assert all("11" not in format_word(w) for w in tuples)
    brute = [w for w in all_words(2, 7) if "11" not in format_word(w)]
    assert tuples == brute


@pytest.mark.parametrize("A", [[[1, 1], [1, 0]], [[1, 1, 0], [0, 1, 1], [1, 0, 1]], [[0, 1, 0], [0, 0, 1], [1, 1, 1]]])
def test_sft_counts_match_matrix_powers(A):
    depth = 14
    L = enumerate_language(sft_from_matrix(A), depth)
    assert L.counts == matrix_counts(A, depth)
    assert automaton_counts(sft_from_matrix(A), depth) == L.counts


def test_counts_beyond_64_bits():
    L = automaton_counts(full_shift(4), 40)
    assert L[-1] == 4**40
    assert isinstance(L[-1], int)


def test_index_of_and_membership(golden_lang):
    assert golden_lang.index_of("0101") >= 0
    assert golden_lang.index_of("0110") == -1
    with pytest.raises(InsufficientDataError):
        golden_lang.index_of("0" * 40)


def test_dump_load_round_trip(golden_lang):
    buf = io.StringIO()
    golden_lang.dump(buf)
    buf.seek(0)
    again = Language.load(buf)
    assert again.counts == golden_lang.counts
    assert np.array_equal(again.words(9), golden_lang.words(9))


def test_from_words_needs_prefix_closed_sets():
    L = Language.from_words(["0", "1", "01", "10", "010"], 2, 3)
    assert L.counts == [2, 2, 1]
    assert "010" in L and "00" not in L
    with pytest.raises(ArgumentError):
        Language.from_words(["0110"], 2, 4)


def test_node_budget(monkeypatch):
    monkeypatch.setenv("SYMDYN_NODE_BUDGET", "50")
    with pytest.raises(ResourceError):
        enumerate_language(full_shift(2), 10)


def test_depth_cap():
    with pytest.raises(ResourceError):
        enumerate_language(golden_mean(), 30, max_depth=22)


def test_reenumeration_is_deterministic():
    a = enumerate_language(even_shift(), 12)
    b = enumerate_language(even_shift(), 12)
    for n in range(1, 13):
        assert np.array_equal(a.words(n), b.words(n))


def test_concat_check():
    g = golden_mean()
    assert concat_check("10", "0", "01", g)
    assert not concat_check("01", "", "10", g)


@pytest.mark.parametrize("model", [golden_mean(), even_shift(), full_shift(3)], ids=["golden", "even", "full3"])
def test_log_counts_are_subadditive(model):
    c = enumerate_language(model, 14).counts
    for m in range(1, 8):
        for n in range(1, 14 - m + 1):
            assert c[m + n - 1] <= c[m - 1] * c[n - 1]


def test_collection_counts_never_exceed_language(golden_lang):
    D = OrbitCollection.from_predicate(golden_lang, lambda w: w[:1] == (1,), "starts with 1")
    counts = collection_counts(D, 12)
    assert all(d <= l for d, l in zip(counts, golden_lang.counts))
    # words of length n starting with 1 are 10 + (golden word of length n-2)
    assert counts[2:] == golden_lang.counts[:10]


def test_collection_union_and_states(golden_lang):
    ends0 = OrbitCollection.from_states(golden_lang, [0], "end 0")
    ends1 = OrbitCollection.from_states(golden_lang, [1], "end 1")
    both = ends0 | ends1
    assert collection_counts(both, 10) == golden_lang.counts[:10]
    assert ends1.contains("01")
    assert not ends1.contains("10")


@given(st.integers(0, 10**6), st.integers(3, 14), st.data())
def test_factor_closure_of_random_words(seed, n, data):
    L = enumerate_language(even_shift(), 14)
    words = L.words(n)
    w = tuple(int(a) for a in words[seed % len(words)])
    i = data.draw(st.integers(0, n - 1))
    j = data.draw(st.integers(i, n - 1))
    assert w[i:j + 1] in L
