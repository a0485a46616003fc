"""Executable presentations of shift spaces.

Every model carries two independent oracles:

* ``accepts(w)`` decides membership directly from the defining data
  (transition matrix, lexicographic rule, gap lengths, labelled graph);
* ``automaton()`` compiles the model to a deterministic follower automaton
  whose transition table drives enumeration, periodic-point checks and
  gluing searches.

They are cross-checked in the test-suite and optionally during enumeration.
All models use the one-sided convention; the language of a model is the set
of words that occur in some right-infinite point.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, ConstructionError, InsufficientDataError
from .words import Word, WordLike, as_word, format_word, lex_leq_prefix, longest_run

DEAD = -1
UNKNOWN = -2


@dataclass(frozen=True)
class Automaton:
    """Deterministic automaton with a dense ``(states, symbols)`` table.

    Entries are next-state indices, ``DEAD`` (-1) for a rejected symbol, or
    ``UNKNOWN`` (-2) when the model cannot decide (a beta-shift read past its
    certified z-prefix).
    """

    table: np.ndarray
    start: int
    labels: tuple = ()

    @property
    def n_states(self) -> int:
        return self.table.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.table.shape[1]

    def step(self, state: int, symbol: int) -> int:
        if state < 0:
            return state
        return int(self.table[state, symbol])

    def run(self, word: Iterable[int], state: int | None = None) -> int:
        """Final state after reading ``word``.

        ``UNKNOWN`` is returned only when the last symbol lands on an
        undetermined state (the word itself is admissible); reading further
        from such a state raises :class:`InsufficientDataError`.
        """
        s = self.start if state is None else state
        for a in word:
            if s == DEAD:
                return DEAD
            if s == UNKNOWN:
                raise InsufficientDataError("word runs past the certified part of the model")
            s = int(self.table[s, a])
        return s

    def run_array(self, words: np.ndarray, states: np.ndarray | None = None) -> np.ndarray:
        """Vectorised ``run`` over the rows of ``words``; ``DEAD`` is sticky."""
        m = words.shape[0]
        s = np.full(m, self.start, dtype=np.int64) if states is None else np.asarray(states, dtype=np.int64).copy()
        for col in range(words.shape[1]):
            if (s == UNKNOWN).any():
                raise InsufficientDataError("word runs past the certified part of the model")
            alive = s >= 0
            nxt = s.copy()
            nxt[alive] = self.table[s[alive], words[alive, col]]
            s = nxt
        return s


class ShiftModel:
    """Common interface. Subclasses set ``kind`` and ``alphabet_size``."""

    kind: str = "abstract"
    alphabet_size: int

    def accepts(self, w: WordLike) -> bool:
        raise NotImplementedError

    def automaton(self) -> Automaton:
        raise NotImplementedError

    @property
    def certified_length(self) -> int | None:
        """Longest word length decidable by the model (``None`` = unbounded)."""
        return None

    def successors(self, w: WordLike) -> list[int]:
        aut = self.automaton()
        s = aut.run(as_word(w, self.alphabet_size))
        if s == UNKNOWN:
            raise InsufficientDataError(f"word {format_word(as_word(w))} exceeds the certified length")
        if s == DEAD:
            return []
        out = []
        for a in range(self.alphabet_size):
            if int(aut.table[s, a]) != DEAD:
                out.append(a)
        return out

    def admits_periodic(self, w: WordLike, max_length: int | None = None) -> bool | None:
        """Is ``w w w ...`` a point of the shift? ``None`` if undecidable from the data."""
        w = as_word(w, self.alphabet_size)
        if not w:
            raise ArgumentError("periodic point needs a nonempty word")
        aut = self.automaton()
        seen = set()
        s = aut.start
        try:
            while True:
                s = aut.run(w, s)
                if s == DEAD:
                    return False
                if s == UNKNOWN:
                    return None
                if s in seen:
                    return True
                seen.add(s)
        except InsufficientDataError:
            return None

    def describe(self) -> dict:
        return {"kind": self.kind, "alphabet_size": self.alphabet_size}


def _live_rows(M: np.ndarray) -> np.ndarray:
    """States admitting an infinite forward path (iteratively drop sinks)."""
    live = np.ones(M.shape[0], dtype=bool)
    while True:
        has_succ = (M[:, live] != 0).any(axis=1) & live
        if (has_succ == live).all():
            return live
        live = has_succ


class SFTModel(ShiftModel):
    """Vertex shift: symbols are states, ``w_i w_{i+1}`` allowed iff ``A[w_i, w_{i+1}] = 1``."""

    kind = "sft"

    def __init__(self, matrix, edge_labels: Sequence | None = None):
        A = np.asarray(matrix)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise ConstructionError(f"transition matrix must be square and nonempty, got shape {A.shape}")
        if not np.isin(A, (0, 1)).all():
            raise ConstructionError("transition matrix entries must be 0 or 1")
        self.matrix = A.astype(np.int64)
        self.alphabet_size = A.shape[0]
        self.live = _live_rows(self.matrix)
        self.edge_labels = tuple(edge_labels) if edge_labels is not None else None
        if not self.live.any():
            raise ConstructionError(
                "empty shift: no symbol starts an infinite path (the transition graph has no cycle)"
            )

    def accepts(self, w: WordLike) -> bool:
        w = as_word(w, self.alphabet_size)
        if any(not self.live[a] for a in w):
            return False
        return all(self.matrix[a, b] == 1 for a, b in zip(w, w[1:]))

    @cached_property
    def _automaton(self) -> Automaton:
        n = self.alphabet_size
        table = np.full((n + 1, n), DEAD, dtype=np.int64)
        for a in range(n):
            if self.live[a]:
                table[n, a] = a
            for b in range(n):
                if self.live[a] and self.live[b] and self.matrix[a, b]:
                    table[a, b] = b
        return Automaton(table, n, labels=tuple(range(n)) + ("init",))

    def automaton(self) -> Automaton:
        return self._automaton

    def describe(self) -> dict:
        d = super().describe()
        d["matrix"] = self.matrix.tolist()
        return d


def sft_from_matrix(A) -> SFTModel:
    """Vertex-shift model of a 0/1 transition matrix."""
    return SFTModel(A)


def edge_shift(B) -> SFTModel:
    """Adapter: the edge shift of a nonnegative integer matrix, recoded as a vertex shift on edges."""
    B = np.asarray(B)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ConstructionError("edge matrix must be square")
    if (B < 0).any() or not np.all(np.equal(np.mod(B, 1), 0)):
        raise ConstructionError("edge matrix must have nonnegative integer entries")
    edges = [(i, j, m) for i in range(B.shape[0]) for j in range(B.shape[1]) for m in range(int(B[i, j]))]
    if not edges:
        raise ConstructionError("edge matrix has no edges")
    E = np.zeros((len(edges), len(edges)), dtype=np.int64)
    for e, (_, j, _) in enumerate(edges):
        for f, (k, _, _) in enumerate(edges):
            if j == k:
                E[e, f] = 1
    return SFTModel(E, edge_labels=edges)


def full_shift(n_symbols: int = 2) -> SFTModel:
    return SFTModel(np.ones((n_symbols, n_symbols), dtype=np.int64))


def golden_mean() -> SFTModel:
    """The shift forbidding the word ``11``."""
    return SFTModel([[1, 1], [1, 0]])


class SoficModel(ShiftModel):
    """Shift presented by a labelled graph ``(src, dst, label)``; follower automaton by subset construction."""

    kind = "sofic"

    def __init__(self, edges: Iterable[tuple[int, int, int]], alphabet_size: int | None = None):
        self.edges = tuple((int(s), int(d), int(a)) for s, d, a in edges)
        if not self.edges:
            raise ConstructionError("sofic presentation has no edges")
        self.n_vertices = 1 + max(max(s, d) for s, d, _ in self.edges)
        self.alphabet_size = alphabet_size or 1 + max(a for _, _, a in self.edges)
        adj = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for s, d, _ in self.edges:
            adj[s, d] = 1
        self.live = _live_rows(adj)
        if not self.live.any():
            raise ConstructionError("empty shift: labelled graph has no cycle")
        self._out: dict[tuple[int, int], frozenset] = {}
        for s, d, a in self.edges:
            if self.live[s] and self.live[d]:
                self._out.setdefault((s, a), set()).add(d)
        self._out = {k: frozenset(v) for k, v in self._out.items()}

    def _move(self, states: frozenset, a: int) -> frozenset:
        out: set = set()
        for s in states:
            out |= self._out.get((s, a), frozenset())
        return frozenset(out)

    def accepts(self, w: WordLike) -> bool:
        cur = frozenset(int(v) for v in np.flatnonzero(self.live))
        for a in as_word(w, self.alphabet_size):
            cur = self._move(cur, a)
            if not cur:
                return False
        return True

    @cached_property
    def _automaton(self) -> Automaton:
        start = frozenset(int(v) for v in np.flatnonzero(self.live))
        index = {start: 0}
        order = [start]
        rows: list[list[int]] = []
        queue = deque([start])
        while queue:
            S = queue.popleft()
            row = []
            for a in range(self.alphabet_size):
                T = self._move(S, a)
                if not T:
                    row.append(DEAD)
                    continue
                if T not in index:
                    index[T] = len(order)
                    order.append(T)
                    queue.append(T)
                row.append(index[T])
            rows.append(row)
        table = np.array(rows, dtype=np.int64)
        return Automaton(table, 0, labels=tuple(tuple(sorted(S)) for S in order))

    def automaton(self) -> Automaton:
        return self._automaton

    def describe(self) -> dict:
        d = super().describe()
        d["edges"] = [list(e) for e in self.edges]
        return d


def even_shift() -> SoficModel:
    """Blocks of 0s between 1s have even length."""
    return SoficModel([(0, 0, 1), (0, 1, 0), (1, 0, 0)])


# -- beta-shifts ---------------------------------------------------------------


def _check_z(z: Word) -> None:
    if not z:
        raise ConstructionError("z-prefix must be nonempty")
    if z[0] < 1:
        raise ConstructionError("z-prefix must start with a nonzero digit (beta > 1)")
    for j in range(1, len(z)):
        if not lex_leq_prefix(z[j:], z):
            raise ConstructionError(
                f"z-prefix {format_word(z)} violates its own admissibility at suffix {j + 1}"
            )


def beta_membership(z_prefix: WordLike, w: WordLike) -> bool:
    """Lexicographic test: every suffix ``w_[j,n]`` is ``<=`` the z-prefix on the common length.

    Words longer than the prefix are decided whenever each long suffix differs
    from the prefix somewhere; a suffix agreeing with all of it is undecidable.
    """
    z = as_word(z_prefix)
    w = as_word(w)
    undecided = False
    for j in range(len(w)):
        head = w[j : j + len(z)]
        if head > z[: len(head)]:
            return False
        if head == z and len(w) - j > len(z):
            undecided = True
    if undecided:
        raise InsufficientDataError(
            f"word {format_word(w)} agrees with the whole z-prefix of length {len(z)} at some position"
        )
    return True


@dataclass
class BetaGraph:
    """Truncated countable-state graph: vertex ``n`` has edges ``0..z_{n+1}``;
    the edge labelled ``z_{n+1}`` goes to ``n+1`` and the others to the base vertex 0."""

    z: Word
    n_vertices: int
    edges: dict = field(default_factory=dict)

    def end_vertex(self, w: WordLike) -> int | None:
        """Vertex reached by the path from 0 spelling ``w``; ``None`` if no such path."""
        v = 0
        for a in as_word(w):
            if v >= self.n_vertices:
                raise InsufficientDataError("path leaves the truncated graph")
            nxt = dict(self.edges[v]).get(a)
            if nxt is None:
                return None
            v = nxt
        return v

    def spells(self, w: WordLike) -> bool:
        return self.end_vertex(w) is not None

    def distance_to_base(self, v: int) -> int:
        """Graph distance from vertex ``v`` back to 0 (0 for the base itself)."""
        if v == 0:
            return 0
        dist = 0
        while True:
            if v >= self.n_vertices:
                raise InsufficientDataError(f"distance from vertex {v} is not determined by the prefix")
            dist += 1
            targets = [t for _, t in self.edges[v]]
            if 0 in targets:
                return dist
            v = targets[0]

    def path_words(self, n: int) -> set:
        out = {((), 0)}
        for _ in range(n):
            nxt = set()
            for w, v in out:
                if v >= self.n_vertices:
                    raise InsufficientDataError("path leaves the truncated graph")
                for a, t in self.edges[v]:
                    nxt.add((w + (a,), t))
            out = nxt
        return {w for w, _ in out}


def beta_graph_build(z_prefix: WordLike, n_vertices: int | None = None) -> BetaGraph:
    z = as_word(z_prefix)
    _check_z(z)
    V = len(z) if n_vertices is None else n_vertices
    if V > len(z):
        raise ArgumentError(f"vertex cap {V} exceeds z-prefix length {len(z)}")
    edges = {}
    for n in range(V):
        zn = z[n]
        edges[n] = [(a, n + 1 if a == zn else 0) for a in range(zn + 1)]
    return BetaGraph(z, V, edges)


class BetaModel(ShiftModel):
    """beta-shift given by a finite prefix of the quasi-greedy expansion ``z`` of 1."""

    kind = "beta"

    def __init__(self, z_prefix: WordLike, beta=None):
        z = as_word(z_prefix)
        _check_z(z)
        self.z = z
        self.beta = beta
        self.alphabet_size = z[0] + 1
        self.graph = beta_graph_build(z)

    @classmethod
    def from_beta(cls, beta, length: int = 64) -> "BetaModel":
        from .beta_transform import BetaMap

        bmap = beta if isinstance(beta, BetaMap) else BetaMap(beta)
        z = bmap.z_prefix(length)
        return cls(z, beta=bmap)

    @property
    def certified_length(self) -> int:
        return len(self.z)

    def accepts(self, w: WordLike) -> bool:
        return beta_membership(self.z, as_word(w, self.alphabet_size))

    @cached_property
    def _automaton(self) -> Automaton:
        p = len(self.z)
        table = np.full((p, self.alphabet_size), DEAD, dtype=np.int64)
        for v in range(p):
            for a, t in self.graph.edges[v]:
                table[v, a] = t if t < p else UNKNOWN
        return Automaton(table, 0, labels=tuple(range(p)))

    def automaton(self) -> Automaton:
        return self._automaton

    def describe(self) -> dict:
        d = super().describe()
        d["z"] = format_word(self.z, self.alphabet_size)
        return d


# -- S-gap shifts ----------------------------------------------------------------


@dataclass(frozen=True)
class GapSet:
    """Finite set of gap lengths plus arithmetic progressions ``{k, k+p, k+2p, ...}``."""

    finite: frozenset = frozenset()
    progressions: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "GapSet":
        finite, progs = set(), []
        for item in str(text).replace(" ", "").split(","):
            if not item:
                continue
            if ":" in item:
                k, p = item.split(":")
                k, p = int(k), int(p or 1)
                if k < 0 or p < 1:
                    raise ArgumentError(f"bad progression {item!r}")
                progs.append((k, p))
            else:
                v = int(item)
                if v < 0:
                    raise ArgumentError("gap lengths are nonnegative")
                finite.add(v)
        return cls(frozenset(finite), tuple(sorted(progs)))

    def __post_init__(self):
        if not self.finite and not self.progressions:
            raise ConstructionError("gap set S must be nonempty")

    def __contains__(self, n: int) -> bool:
        return n in self.finite or any(n >= k and (n - k) % p == 0 for k, p in self.progressions)

    @property
    def is_finite(self) -> bool:
        return not self.progressions

    @property
    def max_gap(self) -> float:
        return max(self.finite) if self.is_finite else math.inf

    @property
    def _threshold(self) -> tuple[int, int]:
        n0 = max([max(self.finite) + 1 if self.finite else 0] + [k for k, _ in self.progressions])
        period = 1
        for _, p in self.progressions:
            period = period * p // math.gcd(period, p)
        return n0, period

    def normalize(self, r: int) -> int:
        if self.is_finite:
            return r
        n0, period = self._threshold
        return r if r < n0 else n0 + (r - n0) % period

    def spec_text(self) -> str:
        items = [str(v) for v in sorted(self.finite)] + [f"{k}:{p}" for k, p in self.progressions]
        return ",".join(items)


def sgap_membership(S: GapSet | str | Iterable[int], w: WordLike) -> bool:
    """Run-length test: internal 0-runs lie in ``S``; truncated boundary runs must be extendable."""
    if not isinstance(S, GapSet):
        S = GapSet.parse(S) if isinstance(S, str) else GapSet(frozenset(int(s) for s in S))
    w = as_word(w, 2)
    ones = [i for i, a in enumerate(w) if a == 1]
    if not ones:
        return len(w) <= S.max_gap
    if ones[0] > S.max_gap or (len(w) - 1 - ones[-1]) > S.max_gap:
        return False
    return all((b - a - 1) in S for a, b in zip(ones, ones[1:]))


class SGapModel(ShiftModel):
    kind = "sgap"
    alphabet_size = 2

    def __init__(self, S: GapSet | str | Iterable[int]):
        if isinstance(S, GapSet):
            self.S = S
        elif isinstance(S, str):
            self.S = GapSet.parse(S)
        else:
            self.S = GapSet(frozenset(int(s) for s in S))

    def accepts(self, w: WordLike) -> bool:
        return sgap_membership(self.S, w)

    @cached_property
    def _automaton(self) -> Automaton:
        S = self.S
        cap = S.max_gap

        def nxt(state, a):
            tag, r = state
            if a == 1:
                if tag == "L" or r in S:
                    return ("R", 0)
                return None
            if r + 1 > cap:
                return None
            if tag == "L":
                return ("L", r + 1) if S.is_finite else ("L", 0)
            return ("R", S.normalize(r + 1))

        start = ("L", 0)
        index = {start: 0}
        order = [start]
        rows = []
        queue = deque([start])
        while queue:
            st = queue.popleft()
            row = []
            for a in (0, 1):
                t = nxt(st, a)
                if t is None:
                    row.append(DEAD)
                    continue
                if t not in index:
                    index[t] = len(order)
                    order.append(t)
                    queue.append(t)
                row.append(index[t])
            rows.append(row)
        return Automaton(np.array(rows, dtype=np.int64), 0, labels=tuple(order))

    def automaton(self) -> Automaton:
        return self._automaton

    def describe(self) -> dict:
        d = super().describe()
        d["S"] = self.S.spec_text()
        return d


def longest_zero_run(z: WordLike) -> int:
    return longest_run(as_word(z), 0)
