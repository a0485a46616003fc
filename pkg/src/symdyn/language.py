"""Finite-depth languages stored as level-by-level arrays.

A :class:`Language` is a prefix tree flattened into one block of arrays per
length ``n``: for each admissible word of length ``n`` we keep the index of
its parent (length ``n-1`` prefix), its last symbol and the automaton state
reached. Children are laid out in lexicographic order, so level ``n`` lists
``L_n`` sorted. Each node also carries a bitmap of its admissible children and
the offset of its first child, which makes lookups O(|w|).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence, TextIO

import numpy as np

from .errors import ArgumentError, ConsistencyError, InsufficientDataError, ResourceError
from .models import DEAD, UNKNOWN, ShiftModel
from .words import Word, WordLike, as_word, format_word

DEFAULT_MAX_DEPTH = 22
NODE_BUDGET_ENV = "SYMDYN_NODE_BUDGET"
DEFAULT_NODE_BUDGET = 60_000_000
NO_STATE = -3


def node_budget() -> int:
    raw = os.environ.get(NODE_BUDGET_ENV)
    if raw is None:
        return DEFAULT_NODE_BUDGET
    try:
        value = int(float(raw))
    except ValueError:
        raise ResourceError(f"{NODE_BUDGET_ENV}={raw!r} is not a number") from None
    if value <= 0:
        raise ResourceError(f"{NODE_BUDGET_ENV} must be positive")
    return value


@dataclass
class Level:
    parent: np.ndarray
    symbol: np.ndarray
    state: np.ndarray
    # filled once the next level is known
    child_bits: np.ndarray | None = None
    first_child: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.symbol)


class Language:
    """Admissible words of lengths ``0..depth``; immutable after construction."""

    def __init__(self, alphabet_size: int, levels: list[Level], model: ShiftModel | None = None):
        self.alphabet_size = alphabet_size
        self.levels = levels
        self.model = model
        self._words_cache: dict[int, np.ndarray] = {}

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def count(self, n: int) -> int:
        if not 0 <= n <= self.depth:
            raise ArgumentError(f"length {n} outside 0..{self.depth}")
        return int(len(self.levels[n]))

    @property
    def counts(self) -> list[int]:
        """``[#L_1, ..., #L_N]`` as Python ints."""
        return [int(len(lv)) for lv in self.levels[1:]]

    def states(self, n: int) -> np.ndarray:
        return self.levels[n].state

    def words(self, n: int) -> np.ndarray:
        """``L_n`` as an ``(#L_n, n)`` array in lexicographic order."""
        if n in self._words_cache:
            return self._words_cache[n]
        m = self.count(n)
        out = np.empty((m, n), dtype=np.int8 if self.alphabet_size <= 127 else np.int32)
        idx = np.arange(m)
        for k in range(n, 0, -1):
            lv = self.levels[k]
            out[:, k - 1] = lv.symbol[idx]
            idx = lv.parent[idx]
        if len(self._words_cache) > 8:
            self._words_cache.clear()
        self._words_cache[n] = out
        return out

    def iter_words(self, n: int) -> Iterator[Word]:
        for row in self.words(n):
            yield tuple(int(a) for a in row)

    def index_of(self, w: WordLike) -> int:
        """Position of ``w`` within level ``|w|``, or -1 if not admissible."""
        w = as_word(w, self.alphabet_size)
        if len(w) > self.depth:
            raise InsufficientDataError(f"word of length {len(w)} exceeds language depth {self.depth}")
        node = 0
        for k, a in enumerate(w):
            lv = self.levels[k]
            bits = int(lv.child_bits[node])
            if not (bits >> a) & 1:
                return -1
            node = int(lv.first_child[node]) + bin(bits & ((1 << a) - 1)).count("1")
        return node

    def __contains__(self, w) -> bool:
        return self.index_of(w) >= 0

    def children(self, w: WordLike) -> list[int]:
        w = as_word(w, self.alphabet_size)
        if len(w) >= self.depth:
            raise InsufficientDataError("children of a word at full depth are not enumerated")
        i = self.index_of(w)
        if i < 0:
            return []
        bits = int(self.levels[len(w)].child_bits[i])
        return [a for a in range(self.alphabet_size) if (bits >> a) & 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Language):
            return NotImplemented
        if self.alphabet_size != other.alphabet_size or self.depth != other.depth:
            return False
        return all(
            np.array_equal(a.parent, b.parent) and np.array_equal(a.symbol, b.symbol)
            for a, b in zip(self.levels, other.levels)
        )

    def __repr__(self) -> str:
        return f"Language(A={self.alphabet_size}, depth={self.depth}, counts={self.counts[:6]}...)"

    # -- text dump ---------------------------------------------------------

    def dump(self, fp: TextIO) -> None:
        """One word per line, all lengths, sorted lexicographically (empty word omitted)."""
        fp.write(f"# alphabet={self.alphabet_size} depth={self.depth}\n")
        for w in sorted(w for n in range(1, self.depth + 1) for w in self.iter_words(n)):
            fp.write(format_word(w, self.alphabet_size) + "\n")

    @classmethod
    def load(cls, fp: TextIO) -> "Language":
        header = fp.readline().strip()
        try:
            fields = dict(item.split("=") for item in header.lstrip("#").split())
            A, depth = int(fields["alphabet"]), int(fields["depth"])
        except (ValueError, KeyError):
            raise ArgumentError(f"bad language dump header {header!r}") from None
        words = [as_word(line.strip(), A) for line in fp if line.strip()]
        return cls.from_words(words, A, depth)

    @classmethod
    def from_words(cls, words: Iterable[WordLike], alphabet_size: int, depth: int) -> "Language":
        """Build from an explicit prefix-closed word set (no automaton states)."""
        by_len: list[set] = [set() for _ in range(depth + 1)]
        by_len[0].add(())
        for w in words:
            w = as_word(w, alphabet_size)
            if len(w) > depth:
                raise ArgumentError("word longer than declared depth")
            by_len[len(w)].add(w)
        levels = [Level(np.zeros(1, np.int64), np.zeros(1, np.int64), np.full(1, NO_STATE, np.int64))]
        prev_index = {(): 0}
        for n in range(1, depth + 1):
            ws = sorted(by_len[n])
            parent = np.empty(len(ws), np.int64)
            for i, w in enumerate(ws):
                p = prev_index.get(w[:-1])
                if p is None:
                    raise ArgumentError(f"word set is not prefix-closed: missing {format_word(w[:-1])}")
                parent[i] = p
            symbol = np.array([w[-1] for w in ws], dtype=np.int64)
            levels.append(Level(parent, symbol, np.full(len(ws), NO_STATE, np.int64)))
            prev_index = {w: i for i, w in enumerate(ws)}
        _link_levels(levels, alphabet_size)
        return cls(alphabet_size, levels)


def _link_levels(levels: list[Level], A: int) -> None:
    weights = np.left_shift(np.uint64(1), np.arange(A, dtype=np.uint64))
    for n in range(len(levels) - 1):
        lv, nxt = levels[n], levels[n + 1]
        m = len(lv)
        bits = np.zeros(m, dtype=np.uint64)
        np.bitwise_or.at(bits, nxt.parent, weights[nxt.symbol])
        counts = np.bincount(nxt.parent, minlength=m)
        lv.child_bits = bits
        lv.first_child = np.concatenate(([0], np.cumsum(counts)[:-1])).astype(np.int64)
    last = levels[-1]
    last.child_bits = np.zeros(len(last), dtype=np.uint64)
    last.first_child = np.zeros(len(last), dtype=np.int64)


def _verify_level(model: ShiftModel, words: np.ndarray, accepted: np.ndarray, rng: np.random.Generator,
                  limit: int) -> None:
    """Compare automaton verdicts on ``words`` (all one-symbol extensions) with the membership oracle."""
    m = words.shape[0]
    rows = np.arange(m) if m <= limit else np.sort(rng.choice(m, size=limit, replace=False))
    for i in rows:
        w = tuple(int(a) for a in words[i])
        if bool(model.accepts(w)) != bool(accepted[i]):
            verdict = "admits" if accepted[i] else "rejects"
            raise ConsistencyError(
                f"successor oracle {verdict} {format_word(w, model.alphabet_size)} but membership disagrees"
            )


def enumerate_language(model: ShiftModel, depth: int, max_depth: int = DEFAULT_MAX_DEPTH,
                       check: bool = False, check_limit: int = 4096, seed: int = 0) -> Language:
    """All admissible words of lengths ``1..depth``.

    ``check=True`` re-validates every candidate extension (sampled beyond
    ``check_limit`` per level) against the model's membership oracle.
    """
    if depth < 1:
        raise ArgumentError("depth must be at least 1")
    if depth > max_depth:
        raise ResourceError(f"depth {depth} exceeds the configured depth budget {max_depth}")
    cert = model.certified_length
    if cert is not None and depth > cert:
        raise InsufficientDataError(f"model is certified only up to length {cert}, requested {depth}")
    budget = node_budget()
    aut = model.automaton()
    A = model.alphabet_size
    rng = np.random.default_rng(seed)
    levels = [Level(np.zeros(1, np.int64), np.zeros(1, np.int64), np.array([aut.start], np.int64))]
    total = 1
    for n in range(1, depth + 1):
        prev = levels[-1].state
        if (prev == UNKNOWN).any():
            raise InsufficientDataError(f"successors at length {n - 1} are not determined by the model data")
        nxt = aut.table[prev]
        valid = nxt != DEAD
        parent, symbol = np.nonzero(valid)
        total += len(parent)
        if total > budget:
            raise ResourceError(
                f"enumeration to depth {depth} exceeds the node budget {budget} at length {n}"
                f" (set {NODE_BUDGET_ENV} to raise it)"
            )
        level = Level(parent.astype(np.int64), symbol.astype(np.int64), nxt[parent, symbol].astype(np.int64))
        if check:
            prev_words = _words_from(levels, n - 1)
            cand = np.concatenate([np.repeat(prev_words, A, axis=0),
                                   np.tile(np.arange(A), len(prev)).reshape(-1, 1)], axis=1)
            _verify_level(model, cand, valid.reshape(-1), rng, check_limit)
        levels.append(level)
    _link_levels(levels, A)
    return Language(A, levels, model=model)


def _words_from(levels: list[Level], n: int) -> np.ndarray:
    m = len(levels[n])
    out = np.empty((m, n), dtype=np.int64)
    idx = np.arange(m)
    for k in range(n, 0, -1):
        out[:, k - 1] = levels[k].symbol[idx]
        idx = levels[k].parent[idx]
    return out


def automaton_counts(model: ShiftModel, depth: int) -> list[int]:
    """``#L_1..#L_depth`` by dynamic programming over automaton states, in exact integers.

    Needs no trie, so it reaches depths far beyond the enumeration budget.
    """
    aut = model.automaton()
    cert = model.certified_length
    if cert is not None and depth > cert:
        raise InsufficientDataError(f"model is certified only up to length {cert}")
    vec: dict[int, int] = {aut.start: 1}
    out = []
    for _ in range(depth):
        nxt: dict[int, int] = {}
        for s, c in vec.items():
            if s == UNKNOWN:
                raise InsufficientDataError("counts depend on undetermined states")
            for t in aut.table[s]:
                t = int(t)
                if t != DEAD:
                    nxt[t] = nxt.get(t, 0) + c
        vec = nxt
        out.append(sum(vec.values()))
    return out


def concat_check(v: WordLike, u: WordLike, w: WordLike, model: ShiftModel) -> bool:
    """Is ``v u w`` admissible?"""
    A = model.alphabet_size
    return model.accepts(as_word(v, A) + as_word(u, A) + as_word(w, A))


MaskFn = Callable[["Language", int], np.ndarray]


@dataclass
class OrbitCollection:
    """A subset ``D_n`` of ``L_n`` for each ``n``, given by a vectorised mask function.

    ``state_set`` (optional) declares that membership is decided by the
    automaton state a word ends in; ``member`` (optional) decides words longer
    than the base language depth.
    """

    base: Language
    mask_fn: MaskFn
    name: str = "D"
    state_set: frozenset | None = None
    member: Callable[[Word], bool] | None = None
    _masks: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_predicate(cls, base: Language, pred: Callable[[Word], bool], name: str = "D") -> "OrbitCollection":
        def mask(lang: Language, n: int) -> np.ndarray:
            return np.fromiter((bool(pred(w)) for w in lang.iter_words(n)), dtype=bool, count=lang.count(n))
        return cls(base, mask, name)

    @classmethod
    def from_word_mask(cls, base: Language, fn: Callable[[np.ndarray], np.ndarray], name: str = "D") -> "OrbitCollection":
        return cls(base, lambda lang, n: np.asarray(fn(lang.words(n)), dtype=bool), name)

    @classmethod
    def whole(cls, base: Language, name: str = "L") -> "OrbitCollection":
        states = None
        if base.model is not None:
            states = frozenset(range(base.model.automaton().n_states))
        return cls(base, lambda lang, n: np.ones(lang.count(n), dtype=bool), name, state_set=states,
                   member=base.model.accepts if base.model is not None else None)

    @classmethod
    def from_states(cls, base: Language, states, name: str = "D") -> "OrbitCollection":
        """Words whose automaton run from the start ends in ``states``."""
        if base.model is None:
            raise ArgumentError("state-defined collections need a language built from a model")
        states = frozenset(int(s) for s in states)
        aut = base.model.automaton()
        keep = np.array(sorted(states), dtype=np.int64)

        def member(w: Word) -> bool:
            return aut.run(w) in states

        return cls(base, lambda lang, n: np.isin(lang.states(n), keep), name, state_set=states, member=member)

    def mask(self, n: int) -> np.ndarray:
        if n not in self._masks:
            if n > self.base.depth:
                raise InsufficientDataError(f"collection {self.name} asked beyond base depth {self.base.depth}")
            if n == 0:
                m = np.ones(1, dtype=bool)
            else:
                m = np.asarray(self.mask_fn(self.base, n), dtype=bool)
                if m.shape != (self.base.count(n),):
                    raise ConsistencyError(f"mask for {self.name} at length {n} has the wrong shape")
            self._masks[n] = m
        return self._masks[n]

    def count(self, n: int) -> int:
        return int(self.mask(n).sum())

    def words(self, n: int) -> np.ndarray:
        return self.base.words(n)[self.mask(n)]

    def contains(self, w: WordLike) -> bool:
        w = as_word(w, self.base.alphabet_size)
        if len(w) > self.base.depth:
            if self.member is None:
                raise InsufficientDataError(f"collection {self.name} cannot decide words beyond depth {self.base.depth}")
            return bool(self.member(w))
        i = self.base.index_of(w)
        return i >= 0 and bool(self.mask(len(w))[i])

    def __or__(self, other: "OrbitCollection") -> "OrbitCollection":
        if other.base is not self.base:
            raise ArgumentError("union of collections over different languages")
        member = None
        if self.member is not None and other.member is not None:
            member = lambda w: self.member(w) or other.member(w)  # noqa: E731
        states = None
        if self.state_set is not None and other.state_set is not None:
            states = self.state_set | other.state_set
        return OrbitCollection(self.base, lambda lang, n: self.mask(n) | other.mask(n), f"{self.name}|{other.name}",
                               state_set=states, member=member)


def collection_counts(D: OrbitCollection, depth: int) -> list[int]:
    """``[#D_1, ..., #D_depth]``."""
    if depth > D.base.depth:
        raise ArgumentError(f"depth {depth} exceeds the base language depth {D.base.depth}")
    return [D.count(n) for n in range(1, depth + 1)]
