"""Potentials on one-sided shifts and certified Birkhoff-sum brackets.

Two representations are supported:

``LocallyConstant(k, table)``
    ``phi(x)`` depends on ``x_1 ... x_k`` only.
``HolderSeries(coefficients, base)``
    ``phi(x) = sum_j c_j g(x_{j+1})`` with ``g`` a per-symbol function in
    ``[-1, 1]``; coefficients past the truncation index are summarised by a
    recorded tail ``T = sum_{j>J} c_j``.

Sums over a cylinder ``[w]`` are returned as ``(lower, upper)`` brackets that
contain ``S_n phi(x)`` for every ``x`` in ``[w]``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import ArgumentError, InsufficientDataError
from .language import Language, OrbitCollection
from .models import DEAD, UNKNOWN, ShiftModel
from .words import Word, WordLike, as_word, format_word


class Potential:
    """Common interface: ``window`` is the number of leading symbols ``phi`` reads (``None`` if infinite)."""

    alphabet_size: int
    window: int | None = None

    def bracket_level(self, lang: Language, n: int) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def bracket(self, w: WordLike, model: ShiftModel | None = None) -> tuple[float, float]:
        raise NotImplementedError

    def shifted(self, c: float) -> "Potential":
        raise NotImplementedError

    def variation(self, n: int, lang: Language | None = None) -> float:
        raise NotImplementedError

    def levels_needed(self, n: int) -> int:
        """Language depth needed to bracket words of length ``n``."""
        return n


def _codes(words: np.ndarray, start: int, k: int, A: int) -> np.ndarray:
    code = np.zeros(words.shape[0], dtype=np.int64)
    for j in range(k):
        code = code * A + words[:, start + j]
    return code


class LocallyConstant(Potential):
    """``phi`` determined by the first ``k`` symbols, given as a table on ``k``-words.

    ``weights`` optionally holds exact values of ``exp(phi)`` (e.g. ``Fraction(2)``
    for ``log 2``) so that partition sums can be formed in rational arithmetic.
    """

    def __init__(self, k: int, table: Mapping[WordLike, float], alphabet_size: int,
                 weights: Mapping[WordLike, Fraction] | None = None, default: float | None = None):
        if k < 1:
            raise ArgumentError("window length k must be at least 1")
        self.k = self.window = k
        self.alphabet_size = alphabet_size
        self.table: dict[Word, float] = {}
        for w, v in table.items():
            w = as_word(w, alphabet_size)
            if len(w) != k:
                raise ArgumentError(f"table key {format_word(w)} does not have length {k}")
            self.table[w] = float(v)
        self.weights = None
        if weights is not None:
            self.weights = {as_word(w, alphabet_size): Fraction(v) for w, v in weights.items()}
            if set(self.weights) != set(self.table):
                raise ArgumentError("exact weights must cover the same words as the table")
        self.default = default
        size = alphabet_size ** k
        self._array = np.full(size, np.nan)
        if default is not None:
            self._array[:] = float(default)
        for w, v in self.table.items():
            self._array[_codes(np.array([w]), 0, k, alphabet_size)[0]] = v

    @classmethod
    def constant(cls, c: float, alphabet_size: int) -> "LocallyConstant":
        table = {(a,): c for a in range(alphabet_size)}
        weights = None
        if c == 0:
            weights = {(a,): Fraction(1) for a in range(alphabet_size)}
        return cls(1, table, alphabet_size, weights=weights)

    @classmethod
    def on_symbols(cls, values: Sequence[float], weights: Sequence | None = None) -> "LocallyConstant":
        A = len(values)
        table = {(a,): v for a, v in enumerate(values)}
        wts = {(a,): q for a, q in enumerate(weights)} if weights is not None else None
        return cls(1, table, A, weights=wts)

    def value(self, w: WordLike) -> float:
        w = as_word(w, self.alphabet_size)[: self.k]
        if len(w) < self.k:
            raise ArgumentError(f"need {self.k} symbols to evaluate the potential")
        v = self._array[_codes(np.array([w]), 0, self.k, self.alphabet_size)[0]]
        if np.isnan(v):
            raise ArgumentError(f"potential table has no entry for {format_word(w)}")
        return float(v)

    def levels_needed(self, n: int) -> int:
        return n + self.k - 1

    def _window_values(self, words: np.ndarray, n: int) -> np.ndarray:
        """``phi`` at positions ``0..n-1`` of each row (rows have length ``n+k-1``)."""
        vals = np.empty((words.shape[0], n))
        for i in range(n):
            vals[:, i] = self._array[_codes(words, i, self.k, self.alphabet_size)]
        if np.isnan(vals).any():
            bad = words[np.isnan(vals).any(axis=1)][0]
            raise ArgumentError(f"potential table misses a window of admissible word {format_word(bad.tolist())}")
        return vals

    def bracket_level(self, lang: Language, n: int) -> tuple[np.ndarray, np.ndarray]:
        m = self.levels_needed(n)
        if m > lang.depth:
            raise InsufficientDataError(
                f"bracketing length-{n} sums of a {self.k}-window potential needs language depth {m}"
            )
        words = lang.words(m)
        sums = np.array([math.fsum(r) for r in self._window_values(words, n)]) if len(words) else np.zeros(0)
        if m == n:
            return sums, sums.copy()
        anc = _ancestors(lang, m, n)
        starts = np.flatnonzero(np.r_[True, anc[1:] != anc[:-1]])
        return np.minimum.reduceat(sums, starts), np.maximum.reduceat(sums, starts)

    def bracket(self, w: WordLike, model: ShiftModel | None = None) -> tuple[float, float]:
        w = as_word(w, self.alphabet_size)
        n = len(w)
        if n < 1:
            raise ArgumentError("Birkhoff sums need a nonempty word")
        if self.k == 1:
            s = math.fsum(self.value((a,)) for a in w)
            return s, s
        exts = _extensions(w, self.k - 1, model, self)
        if not exts:
            raise ArgumentError(f"word {format_word(w)} has no admissible extension")
        sums = [math.fsum(self.value((w + e)[i : i + self.k]) for i in range(n)) for e in exts]
        return min(sums), max(sums)

    def shifted(self, c: float) -> "LocallyConstant":
        return LocallyConstant(self.k, {w: v + c for w, v in self.table.items()}, self.alphabet_size,
                               default=None if self.default is None else self.default + c)

    def variation(self, n: int, lang: Language | None = None) -> float:
        """``sup |phi(x) - phi(y)|`` over pairs agreeing on ``n`` symbols."""
        if n >= self.k:
            return 0.0
        words = lang.words(self.k) if lang is not None else np.array(sorted(self.table), dtype=np.int64)
        vals = self._array[_codes(words, 0, self.k, self.alphabet_size)]
        if lang is not None and np.isnan(vals).any():
            raise ArgumentError("potential table does not cover the language")
        prefix = _codes(words, 0, n, self.alphabet_size) if n > 0 else np.zeros(len(words), np.int64)
        best = 0.0
        for p in np.unique(prefix):
            v = vals[prefix == p]
            best = max(best, float(v.max() - v.min()))
        return best

    def exact_weight(self, w: Word) -> Fraction:
        if self.weights is None:
            raise ArgumentError("potential has no exact weights")
        return self.weights[w[: self.k]]

    def describe(self) -> dict:
        return {"kind": "locally_constant", "k": self.k,
                "table": {format_word(w, self.alphabet_size): v for w, v in sorted(self.table.items())}}


def _ancestors(lang: Language, m: int, n: int) -> np.ndarray:
    idx = np.arange(lang.count(m))
    for level in range(m, n, -1):
        idx = lang.levels[level].parent[idx]
    return idx


def _extensions(w: Word, length: int, model: ShiftModel | None, phi: LocallyConstant) -> list[Word]:
    """Admissible continuations of ``w`` of the given length."""
    if model is None:
        # fall back to the table: every window must be tabulated
        out: list[Word] = [()]
        for _ in range(length):
            out = [e + (a,) for e in out for a in range(phi.alphabet_size)]
        full = [e for e in out if all(not np.isnan(phi._array[_codes(np.array([(w + e)[i:i + phi.k]]), 0, phi.k, phi.alphabet_size)[0]])
                                      for i in range(len(w) + length - phi.k + 1))]
        return full
    aut = model.automaton()
    start = aut.run(w)
    if start == DEAD:
        return []
    frontier = [((), start)]
    for _ in range(length):
        nxt = []
        for e, s in frontier:
            if s == UNKNOWN:
                raise InsufficientDataError("extension runs past the certified part of the model")
            for a in range(model.alphabet_size):
                t = int(aut.table[s, a])
                if t != DEAD:
                    nxt.append((e + (a,), t))
        frontier = nxt
    return [e for e, _ in frontier]


class HolderSeries(Potential):
    """``phi(x) = sum_{j=0}^{J} c_j g(x_{j+1})`` plus a tail of total weight ``tail``."""

    window = None

    def __init__(self, coefficients: Sequence[float], base: Sequence[float], tail: float = 0.0):
        c = [float(x) for x in coefficients]
        if not c or any(x < 0 for x in c):
            raise ArgumentError("series coefficients must be a nonempty list of nonnegative numbers")
        g = [float(x) for x in base]
        if any(abs(x) > 1 for x in g):
            raise ArgumentError("base function values must lie in [-1, 1]")
        if tail < 0:
            raise ArgumentError("tail bound must be nonnegative")
        self.coefficients = c
        self.base = g
        self.tail = float(tail)
        self.alphabet_size = len(g)
        self.shift = 0.0
        # suffix sums R_m = sum_{j >= m} c_j (truncated part only)
        self._suffix = [math.fsum(c[m:]) for m in range(len(c) + 1)]

    @classmethod
    def geometric(cls, ratio: float, terms: int, base: Sequence[float]) -> "HolderSeries":
        if not 0 < ratio < 1:
            raise ArgumentError("geometric ratio must lie in (0, 1)")
        c = [ratio**j for j in range(terms + 1)]
        return cls(c, base, tail=ratio ** (terms + 1) / (1 - ratio))

    @classmethod
    def harmonic(cls, terms: int, base: Sequence[float]) -> "HolderSeries":
        """``c_0 = 1``, ``c_j = 1/j``; the series does not converge, so the truncation is the potential."""
        c = [1.0] + [1.0 / j for j in range(1, terms + 1)]
        return cls(c, base, tail=0.0)

    @property
    def spread(self) -> float:
        return max(self.base) - min(self.base)

    @property
    def gmax(self) -> float:
        return max(abs(x) for x in self.base)

    def _weights(self, n: int) -> tuple[list[float], float]:
        """Weight of ``g(x_p)`` for known positions ``p = 1..n`` and the total unknown weight."""
        c, J = self.coefficients, len(self.coefficients) - 1
        known = []
        for p in range(1, n + 1):
            lo = max(0, p - 1 - J)
            known.append(math.fsum(c[p - 1 - i] for i in range(lo, p)))
        unknown = math.fsum(self._suffix[min(m, J + 1)] for m in range(1, n + 1))
        return known, unknown

    def bracket_level(self, lang: Language, n: int) -> tuple[np.ndarray, np.ndarray]:
        words = lang.words(n)
        known, unknown = self._weights(n)
        g = np.asarray(self.base)
        base_vals = g[words] if n else np.zeros((len(words), 0))
        s = base_vals @ np.asarray(known) + n * self.shift
        lo = s + unknown * min(self.base) - n * self.tail * self.gmax
        hi = s + unknown * max(self.base) + n * self.tail * self.gmax
        return lo, hi

    def bracket(self, w: WordLike, model: ShiftModel | None = None) -> tuple[float, float]:
        w = as_word(w, self.alphabet_size)
        n = len(w)
        if n < 1:
            raise ArgumentError("Birkhoff sums need a nonempty word")
        known, unknown = self._weights(n)
        s = math.fsum(self.base[a] * k for a, k in zip(w, known)) + n * self.shift
        return (s + unknown * min(self.base) - n * self.tail * self.gmax,
                s + unknown * max(self.base) + n * self.tail * self.gmax)

    def width_bound(self, n: int) -> float:
        """Closed-form bracket width for words of length ``n``."""
        _, unknown = self._weights(n)
        return self.spread * unknown + 2 * n * self.tail * self.gmax

    def series_bound(self) -> float:
        """``spread * sum_j j c_j`` (+ tail contribution); ``inf`` when not summable."""
        if self.tail > 0 and not math.isfinite(self.tail):
            return math.inf
        J = len(self.coefficients) - 1
        body = math.fsum(j * self.coefficients[j] for j in range(1, J + 1))
        if self.tail > 0:
            # geometric tail: sum_{j>J} j c_j <= (J+1) T + T * r/(1-r); bounded by estimating the ratio
            c_last = self.coefficients[-1]
            r = self.tail / (self.tail + c_last) if c_last > 0 else 0.0
            body += (J + 1) * self.tail + self.tail * r / (1 - r)
        return self.spread * body

    def shifted(self, c: float) -> "HolderSeries":
        out = HolderSeries(self.coefficients, self.base, self.tail)
        out.shift = self.shift + c
        return out

    def variation(self, n: int, lang: Language | None = None) -> float:
        J = len(self.coefficients) - 1
        return self.spread * self._suffix[min(n, J + 1)] + 2 * self.gmax * self.tail

    def describe(self) -> dict:
        return {"kind": "series", "terms": len(self.coefficients) - 1, "tail": self.tail, "base": self.base}


def birkhoff_bracket(phi: Potential, w: WordLike, model: ShiftModel | None = None) -> tuple[float, float]:
    """Interval containing ``S_{|w|} phi(x)`` for every ``x`` in the cylinder ``[w]``."""
    return phi.bracket(w, model)


def variation(phi: Potential, lang: Language | None, n: int) -> float:
    return phi.variation(n, lang)


def bowen_check(phi: Potential, G: OrbitCollection | Language, depth: int, plateau_tol: float = 0.01) -> dict:
    """Running maximum of Birkhoff-bracket widths over ``G_n`` for ``n <= depth``.

    Passes when the running maximum has flattened out (last increment at most
    ``plateau_tol`` times its value) and, for series potentials, stays below the
    closed-form bound ``spread * sum_j j c_j``.
    """
    lang = G.base if isinstance(G, OrbitCollection) else G
    widths, running = [], []
    best = 0.0
    for n in range(1, depth + 1):
        lo, hi = phi.bracket_level(lang, n)
        if isinstance(G, OrbitCollection):
            m = G.mask(n)
            lo, hi = lo[m], hi[m]
        w = float((hi - lo).max()) if len(lo) else 0.0
        widths.append(w)
        best = max(best, w)
        running.append(best)
    bound = phi.series_bound() if isinstance(phi, HolderSeries) else 0.0
    last_step = running[-1] - running[-2] if depth >= 2 else 0.0
    plateau = last_step <= plateau_tol * max(running[-1], 1e-300) or running[-1] == 0.0
    below = running[-1] <= bound + 1e-12 if isinstance(phi, HolderSeries) else True
    return {
        "widths": widths,
        "running_max": running,
        "V_estimate": running[-1],
        "series_bound": bound,
        "last_increment": last_step,
        "plateau": plateau,
        "below_bound": below,
        "pass": bool(plateau and below),
    }
