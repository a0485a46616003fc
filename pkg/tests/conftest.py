import itertools

import numpy as np
import pytest
from hypothesis import settings

from symdyn import enumerate_language, golden_mean

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


def all_words(A, n):
    return list(itertools.product(range(A), repeat=n))


def matrix_counts(A, depth):
    """#L_n for a vertex shift: sum of the entries of A^(n-1), in Python ints."""
    M = np.array(A, dtype=object)
    P = np.identity(len(A), dtype=object)
    out = []
    for _ in range(depth):
        out.append(int(P.sum()))
        P = P.dot(M)
    return out


@pytest.fixture(scope="session")
def golden_lang():
    return enumerate_language(golden_mean(), 16)
