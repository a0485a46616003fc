"""Specification (gluing) checks, language decompositions and the
entropy-production constructions built on strong specification.

Gluing is decided on classes rather than words. For a language coming from a
deterministic automaton, whether ``v u w`` is admissible depends on ``v`` only
through its transition map and on ``w`` only through its transition map, so
every pair of words is covered by one pair of class representatives.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .entropy import GrowthEstimate, entropy_estimate, growth_from_values
from .errors import ArgumentError, ConsistencyError, ConstructionError, InsufficientDataError
from .language import Language, OrbitCollection, collection_counts, enumerate_language
from .models import DEAD, UNKNOWN, BetaModel, ShiftModel, longest_zero_run
from .potentials import LocallyConstant
from .words import Word, WordLike, as_word, format_word

VARIANTS = ("leq", "strong", "periodic")


# -- certificates -----------------------------------------------------------------


@dataclass
class GlueEntry:
    v: Word
    u: Word
    w: Word
    u2: Word | None = None

    def glued(self) -> Word:
        return self.v + self.u + self.w + (self.u2 or ())


@dataclass
class SpecCertificate:
    """Outcome of a specification check.

    ``verdict`` is ``certified`` (every pair glued with the recorded gap),
    ``counterexample`` (an explicit pair with no connector up to ``tau_max``)
    or ``inconclusive`` (the model could not decide some gluing).
    """

    verdict: str
    tau: int | None
    depth: int
    variant: str
    tau_max: int
    basis: str = "pairwise"
    glue: list[GlueEntry] = field(default_factory=list)
    counterexample: tuple[Word, Word] | None = None
    classes: tuple[int, int] = (0, 0)
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_dict(self, alphabet_size: int = 10) -> dict:
        fw = lambda w: format_word(w, alphabet_size)  # noqa: E731
        return {
            "verdict": self.verdict,
            "tau": self.tau,
            "depth": self.depth,
            "variant": self.variant,
            "tau_max": self.tau_max,
            "basis": self.basis,
            "counterexample": None if self.counterexample is None else [fw(x) for x in self.counterexample],
            "v_classes": self.classes[0],
            "w_classes": self.classes[1],
            "glue_entries": len(self.glue),
            "note": self.note,
        }


# -- class computation ----------------------------------------------------------------


def _run_all(table: np.ndarray, words: np.ndarray) -> np.ndarray:
    """End state of each word from each start state, shape ``(len(words), n_states)``; DEAD/UNKNOWN sticky."""
    S = table.shape[0]
    m = len(words)
    s = np.tile(np.arange(S, dtype=np.int64), (m, 1))
    for col in range(words.shape[1] if words.ndim == 2 else 0):
        alive = s >= 0
        rows, cols = np.nonzero(alive)
        s[rows, cols] = table[s[rows, cols], words[rows, col]]
    return s


@dataclass
class _Classes:
    rows: np.ndarray          # (k, S) transition maps
    reps: list[Word]          # lex-least shortest representative per class
    first_len: np.ndarray     # length at which the class first appears


def _extended(table: np.ndarray) -> np.ndarray:
    """Transition table indexed by ``state + 2`` so that UNKNOWN (-2) and DEAD (-1) are sticky rows."""
    S, A = table.shape
    ext = np.empty((S + 2, A), dtype=np.int64)
    ext[0] = UNKNOWN
    ext[1] = DEAD
    ext[2:] = table
    return ext


def _pack(R: np.ndarray, key_start: int | None) -> np.ndarray:
    keys = R[:, [key_start]] if key_start is not None else R
    return np.ascontiguousarray(keys).view(np.dtype((np.void, keys.dtype.itemsize * keys.shape[1]))).reshape(-1)


def _collect(levels, key_start: int | None, S: int) -> _Classes:
    seen: set = set()
    rows, reps, first = [], [], []
    for m, R, reps_m in levels:
        packed = _pack(R, key_start)
        _, idx = np.unique(packed, return_index=True)
        for i in sorted(idx):
            k = packed[i].tobytes()
            if k not in seen:
                seen.add(k)
                rows.append(R[i])
                reps.append(reps_m(i))
                first.append(m)
    return _Classes(np.array(rows, dtype=np.int64).reshape(-1, S), reps, np.array(first, dtype=np.int64))


def _class_levels(G: OrbitCollection, table: np.ndarray, start: int, depth: int):
    """Per length, transition maps of the words of ``G`` (with lazy representatives).

    For a state-defined collection this walks distinct maps only, extending the
    lex-least representative of each map by each symbol in turn, which keeps
    representatives lex-least. Otherwise maps are composed along the trie.
    """
    ext = _extended(table)
    S, A = table.shape
    out = []
    if G.state_set is not None:
        keep = np.array(sorted(G.state_set), dtype=np.int64)
        rows = np.arange(S, dtype=np.int64)[None, :]
        reps: list[Word] = [()]
        for m in range(1, depth + 1):
            cand = ext[rows + 2]                       # (k, S, A)
            cand = np.transpose(cand, (0, 2, 1)).reshape(-1, S)
            cand_reps = [r + (a,) for r in reps for a in range(A)]
            alive = cand[:, start] != DEAD
            cand = cand[alive]
            cand_reps = [r for r, ok in zip(cand_reps, alive) if ok]
            packed = _pack(cand, None)
            _, idx = np.unique(packed, return_index=True)
            idx = np.sort(idx)
            rows = cand[idx]
            reps = [cand_reps[i] for i in idx]
            inside = np.isin(rows[:, start], keep)
            sel = np.nonzero(inside)[0]
            out.append((m, rows[sel], (lambda sel, reps: lambda i: reps[sel[i]])(sel, reps)))
        return out
    L = G.base
    R = np.arange(S, dtype=np.int64)[None, :]
    for m in range(1, depth + 1):
        lv = L.levels[m]
        R = ext[R[lv.parent] + 2, lv.symbol[:, None]]
        mask = G.mask(m)
        sel = np.nonzero(mask)[0]
        words_m = L.words(m)
        out.append((m, R[sel], (lambda sel, words_m: lambda i: tuple(int(a) for a in words_m[sel[i]]))(sel, words_m)))
    return out


def _connectors(table: np.ndarray, length: int) -> tuple[list[Word], np.ndarray]:
    A = table.shape[1]
    words = list(itertools.product(range(A), repeat=length))
    arr = np.array(words, dtype=np.int64).reshape(len(words), length)
    return words, _run_all(table, arr)


def _lookup(R: np.ndarray, states: np.ndarray) -> np.ndarray:
    """``R[:, s]`` for each entry of ``states``, propagating DEAD/UNKNOWN."""
    out = np.full((R.shape[0], len(states)), DEAD, dtype=np.int64)
    ok = states >= 0
    out[:, ok] = R[:, states[ok]]
    out[:, states == UNKNOWN] = UNKNOWN
    return out


def _first_connector(start_state: int, w_rows: np.ndarray, conn, accept: Callable[[np.ndarray], np.ndarray]):
    """For each w-class, index of the first connector (in ``conn`` order) that works, -1 if none.

    Also reports whether an undecidable run was met before success.
    """
    words, T = conn
    t = T[:, start_state] if start_state >= 0 else np.full(len(words), start_state)
    ends = _lookup(w_rows, t)  # (w_classes, connectors)
    good = accept(ends) & (t >= 0)[None, :]
    unsure = (ends == UNKNOWN) | (t == UNKNOWN)[None, :]
    has = good.any(axis=1)
    idx = np.where(has, good.argmax(axis=1), -1)
    # an UNKNOWN before the first success leaves minimality undecided
    first_unsure = np.where(unsure.any(axis=1), unsure.argmax(axis=1), len(words))
    undecided = first_unsure < np.where(has, idx, len(words))
    return idx, undecided


def _accept_language(ends: np.ndarray) -> np.ndarray:
    return ends != DEAD


def _accept_states(states: frozenset) -> Callable[[np.ndarray], np.ndarray]:
    keep = np.array(sorted(states), dtype=np.int64)
    return lambda ends: np.isin(ends, keep)


def check_specification(L: Language, G: OrbitCollection | None = None, tau_max: int = 4, depth: int | None = None,
                        variant: str = "leq", mode: str = "exhaustive", samples: int = 200,
                        seed: int = 0) -> SpecCertificate:
    """Smallest gap ``tau <= tau_max`` gluing every pair ``v, w`` in ``G`` of length ``<= depth``.

    ``variant``: ``leq`` (``|u| <= tau``, ``vuw`` in L), ``strong`` (``|u| = tau``)
    or ``periodic`` (``v u1 w u2`` with ``|u1| = |u2| = tau`` repeats to a point).
    Connectors are searched shortest first, then lexicographically. The
    certificate's ``depth`` is the word length up to which pairs were examined;
    for a counterexample it is the smallest length exposing it.
    """
    if variant not in VARIANTS:
        raise ArgumentError(f"variant must be one of {VARIANTS}")
    if tau_max < 0:
        raise ArgumentError("tau_max must be nonnegative")
    G = OrbitCollection.whole(L) if G is None else G
    if L.model is None:
        return _check_specification_words(L, G, tau_max, depth, variant)
    depth = L.depth if depth is None else depth
    if depth > L.depth:
        raise ArgumentError(f"depth {depth} exceeds the language depth {L.depth}")
    aut = L.model.automaton()
    table = aut.table
    key = None if variant == "periodic" else aut.start
    levels = _class_levels(G, table, aut.start, depth)
    V = _collect(levels, key, table.shape[0])
    W = _collect(levels, None, table.shape[0])
    conns = [_connectors(table, ell) for ell in range(tau_max + 1)]
    if variant == "periodic":
        return _check_periodic(aut, V, W, conns, tau_max, depth, mode, samples, seed)

    nv, nw = len(V.reps), len(W.reps)
    # admissibility of v u w only sees which states w is readable from
    readable = np.where(W.rows == DEAD, DEAD, np.where(W.rows == UNKNOWN, UNKNOWN, 0))
    patterns, back = np.unique(readable, axis=0, return_inverse=True)
    back = back.reshape(-1)
    undecided_any = np.zeros((nv, nw), dtype=bool)
    per_len = []
    for conn in conns:
        found = np.full((nv, nw), -1, dtype=np.int64)
        for i in range(nv):
            s = int(V.rows[i, aut.start])
            idx, und = _first_connector(s, patterns, conn, _accept_language)
            found[i] = idx[back]
            undecided_any[i] |= und[back]
        per_len.append(found)

    if variant == "leq":
        min_len = np.full((nv, nw), -1, dtype=np.int64)
        for ell in range(tau_max, -1, -1):
            min_len = np.where(per_len[ell] >= 0, ell, min_len)
        ok = min_len >= 0
        tau = int(min_len.max()) if ok.all() and nv and nw else (0 if ok.all() else None)
        choose = lambda i, j: (int(min_len[i, j]), int(per_len[min_len[i, j]][i, j]))  # noqa: E731
        failing = ~ok
    else:
        tau = next((ell for ell in range(tau_max + 1) if (per_len[ell] >= 0).all()), None)
        failing = np.ones((nv, nw), dtype=bool)
        for ell in range(tau_max + 1):
            failing &= per_len[ell] < 0
        choose = lambda i, j: (tau, int(per_len[tau][i, j]))  # noqa: E731

    if tau is None:
        return _negative(V, W, failing, undecided_any, tau_max, depth, variant)

    glue = []
    for i in range(nv):
        for j in range(nw):
            ell, k = choose(i, j)
            glue.append(GlueEntry(V.reps[i], conns[ell][0][k], W.reps[j]))
    cert = SpecCertificate("certified", tau, depth, variant, tau_max, glue=glue, classes=(nv, nw))
    if undecided_any.any() and variant == "leq":
        cert.note = "minimality of some connectors undecided by the model; tau is an upper bound"
    _assign_basis(cert, L, G, aut, V, W, conns, tau, variant, samples, seed)
    return cert


def _negative(V, W, failing, undecided, tau_max, depth, variant) -> SpecCertificate:
    firm = failing & ~undecided
    if firm.any():
        # the pair exposed at the smallest depth, then lex-least
        cand = np.argwhere(firm)
        order = sorted(cand.tolist(), key=lambda ij: (max(V.first_len[ij[0]], W.first_len[ij[1]]),
                                                      len(V.reps[ij[0]]) + len(W.reps[ij[1]]),
                                                      V.reps[ij[0]], W.reps[ij[1]]))
        i, j = order[0]
        d = int(max(V.first_len[i], W.first_len[j]))
        note = ""
        if variant == "strong":
            note = "no single connector length up to tau_max glues this pair"
        return SpecCertificate("counterexample", None, d, variant, tau_max,
                               counterexample=(V.reps[i], W.reps[j]), classes=(len(V.reps), len(W.reps)), note=note)
    if variant == "strong" and not failing.any():
        # each length fails for some pair, but no pair fails for every length
        return SpecCertificate("counterexample", None, depth, variant, tau_max, classes=(len(V.reps), len(W.reps)),
                               note="every exact gap up to tau_max fails on some pair")
    return SpecCertificate("inconclusive", None, depth, variant, tau_max, classes=(len(V.reps), len(W.reps)),
                           note="gluing undecidable from the certified part of the model")


def _assign_basis(cert, L, G, aut, V, W, conns, tau, variant, samples, seed) -> None:
    """Record whether k-fold gluing follows from pairwise gluing (glued words stay in G)."""
    if G.state_set is not None:
        accept = _accept_states(G.state_set)
        closed = True
        for i in range(len(V.reps)):
            s = int(V.rows[i, aut.start])
            ok = np.zeros(len(W.reps), dtype=bool)
            lens = range(tau + 1) if variant == "leq" else [tau]
            for ell in lens:
                idx, _ = _first_connector(s, W.rows, conns[ell], accept)
                ok |= idx >= 0
            if not ok.all():
                closed = False
                break
        if closed:
            cert.basis = "pairwise-closed"
            return
    cert.basis = "sampled-triples"
    failures = _triples(G, aut, W, conns, tau, variant, cert.depth, samples, seed)
    if failures:
        cert.basis = "pairwise-only"
        cert.note = (cert.note + "; " if cert.note else "") + f"{failures} sampled triples could not be glued"


def _triples(G, aut, W, conns, tau, variant, depth, samples, seed) -> int:
    rng = np.random.default_rng(seed)
    pool = [w for m in range(1, depth + 1) for w in map(tuple, G.words(m).tolist())]
    if not pool:
        return 0
    lens = range(tau + 1) if variant == "leq" else [tau]
    failures = 0
    for _ in range(samples):
        w1, w2, w3 = (pool[int(k)] for k in rng.integers(len(pool), size=3))
        states = {aut.run(w1)}
        for nxt in (w2, w3):
            reach = set()
            for s in states:
                if s < 0:
                    continue
                for ell in lens:
                    for u in conns[ell][0]:
                        try:
                            t = aut.run(u + nxt, s)
                        except InsufficientDataError:
                            continue
                        if t != DEAD:
                            reach.add(t)
            states = reach
        if not states:
            failures += 1
    return failures


def _check_periodic(aut, V, W, conns, tau_max, depth, mode, samples, seed) -> SpecCertificate:
    nv, nw = len(V.reps), len(W.reps)
    S = aut.n_states
    pairs = [(i, j) for i in range(nv) for j in range(nw)]
    if mode == "sampled" and len(pairs) > samples:
        rng = np.random.default_rng(seed)
        pairs = [pairs[k] for k in sorted(rng.choice(len(pairs), size=samples, replace=False))]
    undecided = np.zeros((nv, nw), dtype=bool)
    works = {}
    for tau in range(tau_max + 1):
        words, T = conns[tau]
        all_ok = True
        for i, j in pairs:
            key = (i, j, tau)
            hit = _periodic_pair(V.rows[i], W.rows[j], T, aut.start, S)
            if hit is None:
                undecided[i, j] = True
            works[key] = hit
            if hit is None or hit is False:
                all_ok = False
        if all_ok:
            glue = []
            for i, j in pairs:
                a, b = works[(i, j, tau)]
                glue.append(GlueEntry(V.reps[i], words[a], W.reps[j], words[b]))
            basis = "exhaustive" if len(pairs) == nv * nw else "sampled"
            return SpecCertificate("certified", tau, depth, "periodic", tau_max, basis=basis, glue=glue,
                                   classes=(nv, nw))
    failing = np.zeros((nv, nw), dtype=bool)
    for i, j in pairs:
        failing[i, j] = all(works[(i, j, t)] is False for t in range(tau_max + 1))
    return _negative(V, W, failing, undecided, tau_max, depth, "periodic")


def _periodic_pair(v_row, w_row, T, start, S):
    """First ``(u1, u2)`` making ``(v u1 w u2)^inf`` admissible; False if none; None if undecidable."""
    n = T.shape[0]
    unsure = False
    for a in range(n):
        for b in range(n):
            s = start
            for _ in range(S + 1):
                for step in (v_row, T[a], w_row, T[b]):
                    if s < 0:
                        break
                    s = int(step[s])
                if s < 0:
                    break
            if s == UNKNOWN:
                unsure = True
            elif s >= 0:
                return a, b
    return None if unsure else False


def _check_specification_words(L, G, tau_max, depth, variant) -> SpecCertificate:
    """Word-level check inside an enumerated language (no automaton)."""
    if variant == "periodic":
        raise ArgumentError("periodic gluing needs a model")
    limit = L.depth - tau_max
    depth = limit // 2 if depth is None else depth
    if 2 * depth > limit:
        raise ArgumentError(f"depth {depth} too large: pairs glued with tau_max={tau_max} must fit in {L.depth}")
    A = L.alphabet_size
    conns = [list(itertools.product(range(A), repeat=ell)) for ell in range(tau_max + 1)]
    pool = [w for m in range(1, depth + 1) for w in map(tuple, G.words(m).tolist())]
    # lengths[(v, w)] = {ell : some |u| = ell glues v and w}
    lengths = {(v, w): [ell for ell in range(tau_max + 1) if any((v + u + w) in L for u in conns[ell])]
               for v in pool for w in pool}
    if variant == "leq":
        bad = next((pair for pair, ls in lengths.items() if not ls), None)
        tau = max((ls[0] for ls in lengths.values()), default=0) if bad is None else None
    else:
        tau = next((t for t in range(tau_max + 1) if all(t in ls for ls in lengths.values())), None)
        bad = next((pair for pair, ls in lengths.items() if not ls), None)
    if tau is None:
        d = max(len(bad[0]), len(bad[1])) if bad else depth
        return SpecCertificate("counterexample", None, d, variant, tau_max, counterexample=bad)
    glue = []
    for (v, w), ls in lengths.items():
        ell = ls[0] if variant == "leq" else tau
        glue.append(GlueEntry(v, next(u for u in conns[ell] if (v + u + w) in L), w))
    return SpecCertificate("certified", tau, depth, variant, tau_max, glue=glue, basis="pairwise",
                           note="checked inside the enumerated language; k-fold gluing not examined")


def check_specification_grown(L: Language, G: OrbitCollection | None = None, tau_max: int = 4,
                              depth: int | None = None, variant: str = "leq") -> SpecCertificate:
    """Run :func:`check_specification` at depth 1, 2, ... and stop at the first counterexample."""
    depth = L.depth if depth is None else depth
    cert = None
    for d in range(1, depth + 1):
        cert = check_specification(L, G, tau_max, d, variant)
        if cert.verdict == "counterexample":
            return cert
    return cert


def validate_glue(cert: SpecCertificate, model: ShiftModel) -> int:
    """Re-check every glue entry against the model; returns the number checked."""
    from .language import concat_check

    for e in cert.glue:
        if cert.variant == "periodic":
            if model.admits_periodic(e.glued()) is False:
                raise ConsistencyError(f"glued word {format_word(e.glued())} does not repeat")
            continue
        if not concat_check(e.v, e.u, e.w, model):
            raise ConsistencyError(f"glue entry {format_word(e.v)}|{format_word(e.u)}|{format_word(e.w)} is inadmissible")
        limit = cert.tau if cert.variant == "leq" else None
        if limit is not None and len(e.u) > limit:
            raise ConsistencyError("connector longer than the certified gap")
        if cert.variant == "strong" and len(e.u) != cert.tau:
            raise ConsistencyError("connector length differs from the strong gap")
    return len(cert.glue)


def beta_spec_criterion(z_prefix: WordLike) -> dict:
    """Longest 0-run of a z-prefix; it lower-bounds any gap valid at the depths the prefix certifies."""
    z = as_word(z_prefix)
    if not z:
        raise ArgumentError("z-prefix must be nonempty")
    run = longest_zero_run(z)
    return {"longest_zero_run": run, "prefix_length": len(z), "has_spec_up_to_depth": run < len(z) - 1}


# -- decompositions ---------------------------------------------------------------------


Pred = Callable[[Word], bool]


@dataclass
class Decomposition:
    """``L = C^p G C^s`` with membership predicates and a deterministic splitter.

    ``g_states`` (optional) maps ``M`` to the automaton states characterising ``G^M``.
    """

    L: Language
    prefix: Pred
    good: Pred
    suffix: Pred
    rule: str
    g_states: Callable[[int], frozenset] | None = None
    vector_gm: Callable[[Language, int, int], np.ndarray] | None = None
    meta: dict = field(default_factory=dict)

    def split(self, w: WordLike) -> tuple[Word, Word, Word]:
        """Longest prefix in ``C^p``, then the longest suffix in ``C^s`` leaving a core in ``G``."""
        w = as_word(w, self.L.alphabet_size)
        n = len(w)
        p = next(i for i in range(n, -1, -1) if self.prefix(w[:i]))
        rest = w[p:]
        for j in range(len(rest), -1, -1):
            core, tail = rest[: len(rest) - j], rest[len(rest) - j:]
            if self.suffix(tail) and self.good(core):
                return w[:p], core, tail
        raise ConstructionError(f"word {format_word(w, self.L.alphabet_size)} is not covered by the {self.rule} decomposition")

    def collection(self, which: str) -> OrbitCollection:
        pred = {"prefix": self.prefix, "good": self.good, "suffix": self.suffix}[which]
        name = {"prefix": "Cp", "good": "G", "suffix": "Cs"}[which]
        return OrbitCollection.from_predicate(self.L, pred, name)

    def bad(self) -> OrbitCollection:
        return self.collection("prefix") | self.collection("suffix")

    def in_gm(self, w: WordLike, M: int) -> bool:
        w = as_word(w, self.L.alphabet_size)
        n = len(w)
        return any(self.prefix(w[:i]) and self.suffix(w[n - j:]) and self.good(w[i: n - j])
                   for i in range(min(M, n) + 1) for j in range(min(M, n - i) + 1))

    def gm(self, M: int) -> OrbitCollection:
        """``G^M``: words ``u^p v u^s`` with ``|u^p|, |u^s| <= M``."""
        if M < 0:
            raise ArgumentError("M must be nonnegative")
        if self.g_states is not None:
            col = OrbitCollection.from_states(self.L, self.g_states(M), f"G^{M}")
            return col
        if self.vector_gm is not None:
            fn = self.vector_gm
            return OrbitCollection(self.L, lambda lang, n: fn(lang, n, M), f"G^{M}",
                                   member=lambda w: self.in_gm(w, M))
        col = OrbitCollection.from_predicate(self.L, lambda w: self.in_gm(w, M), f"G^{M}")
        col.member = lambda w: self.in_gm(w, M)
        return col

    def check_cover(self, depth: int | None = None) -> int:
        """Split every enumerated word and confirm the pieces concatenate back; returns words checked."""
        depth = self.L.depth if depth is None else depth
        k = 0
        for n in range(depth + 1):
            for w in self.L.iter_words(n):
                p, g, s = self.split(w)
                if p + g + s != w:
                    raise ConsistencyError(f"split of {format_word(w)} does not concatenate back")
                k += 1
        return k


def _beta_canonical(L: Language) -> Decomposition:
    model = L.model
    if not isinstance(model, BetaModel):
        raise ArgumentError("the beta-canonical rule needs a beta-shift model")
    z = model.z
    graph = model.graph

    def good(w):
        return graph.end_vertex(w) == 0

    def suffix(w):
        return tuple(w) == z[: len(w)]

    return Decomposition(L, lambda w: len(w) == 0, good, suffix, "beta-canonical",
                         g_states=lambda M: frozenset(range(min(M, len(z) - 1) + 1)),
                         meta={"z": format_word(z, model.alphabet_size)})


def _threshold(L: Language, phi: LocallyConstant, r: float) -> Decomposition:
    """``C^p = {S_n phi >= -r n}``, ``G = {S_j phi < -r j for 1 <= j <= |w|}``, ``C^s = {empty}``."""
    if not isinstance(phi, LocallyConstant) or phi.k != 1:
        raise ArgumentError("the threshold rule takes a potential on single symbols")
    vals = np.array([phi.value((a,)) for a in range(L.alphabet_size)], dtype=float)
    tol = 1e-12

    def sums(w):
        return np.cumsum(vals[list(w)]) if len(w) else np.zeros(0)

    def prefix(w):
        return len(w) == 0 or sums(w)[-1] >= -r * len(w) - tol

    def good(w):
        s = sums(w)
        return bool(np.all(s < -r * np.arange(1, len(w) + 1) - tol))

    def gm(lang: Language, n: int, M: int) -> np.ndarray:
        words = lang.words(n)
        if n == 0:
            return np.ones(1, dtype=bool)
        S = np.cumsum(vals[words], axis=1)
        S = np.concatenate([np.zeros((len(words), 1)), S], axis=1)
        j = np.arange(n + 1)
        out = np.zeros(len(words), dtype=bool)
        for i in range(min(M, n) + 1):
            pre_ok = (S[:, i] >= -r * i - tol) if i else np.ones(len(words), dtype=bool)
            rel = S[:, i + 1:] - S[:, [i]]
            core = np.all(rel < -r * (j[i + 1:] - i) - tol, axis=1)
            out |= pre_ok & core
        return out

    return Decomposition(L, prefix, good, lambda w: len(w) == 0, "threshold", vector_gm=gm,
                         meta={"r": r, "potential": phi.describe()})


def _trivial(L: Language) -> Decomposition:
    states = None
    if L.model is not None:
        states = frozenset(range(L.model.automaton().n_states))
    dec = Decomposition(L, lambda w: len(w) == 0, lambda w: True, lambda w: len(w) == 0, "trivial",
                        g_states=(lambda M: states) if states is not None else None)
    return dec


def build_decomposition(L: Language, rule: str = "trivial", phi: LocallyConstant | None = None,
                        r: float | None = None, prefix: Pred | None = None, good: Pred | None = None,
                        suffix: Pred | None = None) -> Decomposition:
    """Rules: ``beta-canonical``, ``threshold`` (needs ``phi`` and ``r``), ``trivial`` or ``custom`` (three predicates)."""
    if rule == "beta-canonical":
        return _beta_canonical(L)
    if rule == "threshold":
        if phi is None or r is None:
            raise ArgumentError("threshold rule needs a potential and r")
        return _threshold(L, phi, r)
    if rule == "trivial":
        return _trivial(L)
    if rule == "custom":
        if None in (prefix, good, suffix):
            raise ArgumentError("custom rule needs prefix, good and suffix predicates")
        return Decomposition(L, prefix, good, suffix, "custom")
    raise ArgumentError(f"unknown decomposition rule {rule!r}")


# -- uniqueness hypotheses -------------------------------------------------------------------


@dataclass
class UniquenessReport:
    per_M: dict
    h_bad: GrowthEstimate | None
    h_total: GrowthEstimate
    bad_counts: list[int]
    density: dict
    exact_h: float | None = None

    @property
    def gap(self) -> float:
        hX = self.exact_h if self.exact_h is not None else self.h_total.estimate
        if self.h_bad is None:
            return hX
        return hX - self.h_bad.estimate

    @property
    def spec_ok(self) -> bool:
        return all(c.certified for c in self.per_M.values())

    @property
    def passed(self) -> bool:
        return self.spec_ok and self.gap > 0

    def rows(self) -> list[dict]:
        out = []
        for M, cert in self.per_M.items():
            out.append({"M": M, "verdict": cert.verdict, "tau": cert.tau, "basis": cert.basis,
                        "min_density": min(self.density[M]) if self.density[M] else None})
        return out


def verify_uniqueness_hypotheses(dec: Decomposition, M_list: Sequence[int], tau_max: int = 6,
                                 depth: int | None = None, window: tuple[int, int] | None = None) -> UniquenessReport:
    """Specification of each ``G^M``, entropy gap ``h(C^p u C^s) < h(X)`` and densities ``#G^M_n / #L_n``."""
    L = dec.L
    depth = L.depth if depth is None else depth
    per_M, density = {}, {}
    for M in M_list:
        GM = dec.gm(M)
        per_M[M] = check_specification(L, GM, tau_max, depth)
        counts = collection_counts(GM, depth)
        density[M] = [c / L.count(n) for n, c in enumerate(counts, start=1)]
    bad = dec.bad()
    bad_counts = collection_counts(bad, depth)
    if all(c == 0 for c in bad_counts):
        h_bad = None
    else:
        ns = [n for n, c in enumerate(bad_counts, start=1) if c > 0]
        h_bad = growth_from_values(ns, [math.log(bad_counts[n - 1]) for n in ns], [bad_counts[n - 1] for n in ns],
                                   window, label="h(C)")
    h_total = entropy_estimate(L.counts[:depth], window)
    exact = None
    if isinstance(L.model, BetaModel) and L.model.beta is not None:
        exact = math.log(L.model.beta.value)
    return UniquenessReport(per_M, h_bad, h_total, bad_counts, density, exact)


# -- entropy production ---------------------------------------------------------------------


@dataclass
class ProductionReport:
    bound: float
    n: int
    tau: int
    images: dict
    injective: dict
    measured_h: float | None

    @property
    def passed(self) -> bool:
        ok = all(self.injective.values())
        if self.measured_h is not None:
            ok = ok and self.bound <= self.measured_h + 1e-12
        return ok

    def rows(self) -> list[dict]:
        return [{"k": k, "images": self.images[k], "required": 2**k, "injective": self.injective[k]}
                for k in sorted(self.images)]


def _lex_connector(aut, state: int, tau: int, tail: Word, A: int) -> tuple[Word, int] | None:
    for u in itertools.product(range(A), repeat=tau):
        t = aut.run(u + tail, state)
        if t != DEAD:
            return u, t
    return None


def production_family(model: ShiftModel, w1: Word, w2: Word, tau: int, k: int) -> list[Word]:
    """``Phi(i) = w^{i_1} v^1 ... w^{i_k} v^k`` with lex-least length-``tau`` connectors."""
    aut = model.automaton()
    A = model.alphabet_size
    out = []
    for choice in itertools.product((0, 1), repeat=k):
        pieces = [(w1, w2)[c] for c in choice]
        word: Word = ()
        s = aut.run(pieces[0])
        word = pieces[0]
        if s == DEAD:
            raise ConstructionError(f"{format_word(pieces[0])} is not admissible")
        for j in range(1, k + 1):
            tail = pieces[j] if j < k else ()
            hit = _lex_connector(aut, s, tau, tail, A)
            if hit is None:
                raise ConstructionError(f"no connector of length {tau} after {format_word(word)}")
            u, s = hit
            word = word + u + tail
        out.append(word)
    return out


def entropy_production_bound(model: ShiftModel, cert: SpecCertificate | int, w1: WordLike, w2: WordLike,
                             k_max: int = 8, L: Language | None = None) -> ProductionReport:
    """``log 2 / (n + tau)`` with the injective family built and checked for ``k <= k_max``."""
    w1 = as_word(w1, model.alphabet_size)
    w2 = as_word(w2, model.alphabet_size)
    if len(w1) != len(w2):
        raise ArgumentError("words must have equal length")
    if w1 == w2:
        raise ArgumentError("words must differ")
    if isinstance(cert, SpecCertificate):
        if cert.variant not in ("strong", "periodic") or not cert.certified:
            raise ArgumentError("a certified strong gap is required")
        tau = cert.tau
    else:
        tau = int(cert)
    n = len(w1)
    images, injective = {}, {}
    for k in range(1, k_max + 1):
        fam = production_family(model, w1, w2, tau, k)
        limit = model.certified_length
        for word in fam:
            if (limit is None or len(word) <= limit) and not model.accepts(word):
                raise ConsistencyError(f"constructed word {format_word(word)} is inadmissible")
        images[k] = len(set(fam))
        injective[k] = images[k] == 2**k
    measured = None
    if L is not None:
        measured = entropy_estimate(L).estimate
    return ProductionReport(math.log(2) / (n + tau), n, tau, images, injective, measured)


@dataclass
class GapReport:
    N: int
    n: int
    alpha: float
    C: int
    tau: int
    realized: int
    predicted: Fraction
    count_Y: int
    count_X: int | None
    max_multiplicity: int
    multiplicity_bound: int

    @property
    def passed(self) -> bool:
        return self.realized >= self.predicted and self.max_multiplicity <= self.multiplicity_bound

    def row(self) -> dict:
        return {"N": self.N, "realized": self.realized, "predicted": float(self.predicted), "count_Y": self.count_Y,
                "count_X": self.count_X, "max_multiplicity": self.max_multiplicity,
                "multiplicity_bound": self.multiplicity_bound, "pass": self.passed}


def _vector_connector(table: np.ndarray, states: np.ndarray, tau: int, tail: np.ndarray, A: int):
    """Per row, the lex-least ``u`` of length ``tau`` with ``u + tail[row]`` readable; returns (u, end states)."""
    m = len(states)
    chosen = np.full((m, tau), -1, dtype=np.int64)
    ends = np.full(m, DEAD, dtype=np.int64)
    pending = np.ones(m, dtype=bool)
    for u in itertools.product(range(A), repeat=tau):
        if not pending.any():
            break
        rows = np.nonzero(pending)[0]
        s = states[rows].copy()
        seq = np.concatenate([np.tile(np.array(u, dtype=np.int64), (len(rows), 1)), tail[rows]], axis=1)
        for col in range(seq.shape[1]):
            alive = s >= 0
            s[alive] = table[s[alive], seq[alive, col]]
        ok = s >= 0
        hit = rows[ok]
        chosen[hit] = u
        ends[hit] = s[ok]
        pending[hit] = False
    if pending.any():
        raise ConstructionError("strong specification failed while gluing")
    return chosen, ends


def subshift_gap_check(X: ShiftModel, Y: ShiftModel, w: WordLike, alpha: float, n: int, N: int,
                       tau: int | None = None, tau_max: int = 4) -> GapReport:
    """Window surgery: mark ``alpha N - 1`` of the internal window boundaries and plant ``v1 w v2``
    before each, for every word of ``L_{nN}(Y)``; count the distinct words produced.
    """
    w = as_word(w, X.alphabet_size)
    t = len(w)
    if Y.alphabet_size > X.alphabet_size:
        raise ArgumentError("Y uses symbols outside the alphabet of X")
    LY_t = enumerate_language(Y, t) if t else None
    if t == 0 or w in LY_t:
        raise ArgumentError("the marker word must be admissible in X and absent from L(Y)")
    if not X.accepts(w):
        raise ArgumentError("the marker word must be admissible in X")
    if tau is None:
        LX = enumerate_language(X, 2 * 4 + tau_max)
        cert = check_specification(LX, None, tau_max, 4, "strong")
        if not cert.certified:
            raise ArgumentError("X has no certified strong specification gap up to tau_max")
        tau = cert.tau
    if n <= t + 2 * tau:
        raise ArgumentError(f"window n={n} must exceed t + 2 tau = {t + 2 * tau}")
    on = alpha * N - 1
    if abs(on - round(on)) > 1e-9 or round(on) < 0:
        raise ArgumentError("alpha * N must be a positive integer")
    on = int(round(on))
    total = n * N
    LY = enumerate_language(Y, total, max_depth=max(total, 22))
    words = LY.words(total).astype(np.int64)
    C = LY.count(t + 2 * tau)
    aut = X.automaton()
    table = aut.table
    A = X.alphabet_size
    w_arr = np.array(w, dtype=np.int64)
    produced: set = set()
    max_mult = 0
    cut = t + 2 * tau
    for J in itertools.combinations(range(1, N), on):
        out = words.copy()
        states = np.full(len(words), aut.start, dtype=np.int64)
        pos = 0
        bounds = [b * n for b in J]
        for b in bounds:
            start = b - cut
            seg = out[:, pos:start]
            for col in range(seg.shape[1]):
                states = table[states, seg[:, col]]
            if (states < 0).any():
                raise ConsistencyError("surgery produced an inadmissible word")
            tail = np.tile(w_arr, (len(words), 1))
            u1, states = _vector_connector(table, states, tau, tail, A)
            out[:, start:start + tau] = u1
            out[:, start + tau:start + tau + t] = w_arr
            nxt = bounds[bounds.index(b) + 1] - cut if b != bounds[-1] else total
            follow = out[:, b:nxt]
            u2, states = _vector_connector(table, states, tau, follow, A)
            out[:, b - tau:b] = u2
            pos = nxt
        for col in range(pos, total):
            states = table[states, out[:, col]]
        if (states < 0).any():
            raise ConsistencyError("surgery produced an inadmissible word")
        uniq, mult = np.unique(out, axis=0, return_counts=True)
        max_mult = max(max_mult, int(mult.max()) if len(mult) else 0)
        produced.update(map(tuple, uniq.tolist()))
    realized = len(produced)
    predicted = Fraction(math.comb(N - 1, on) * len(words), C**on)
    count_X = None
    try:
        count_X = enumerate_language(X, total, max_depth=max(total, 22)).count(total)
    except ResourceError:
        count_X = None
    return GapReport(N, n, alpha, C, tau, realized, predicted, len(words), count_X, max_mult, C**on)
