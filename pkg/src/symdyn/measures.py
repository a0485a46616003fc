"""Shift-invariant measures: Markov/Parry measures, empirical maximal-entropy
constructions, Gibbs-ratio checks and periodic-orbit statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .algebraic import is_irreducible, perron_data
from .errors import ArgumentError, ConstructionError, InsufficientDataError
from .language import Language, OrbitCollection, enumerate_language
from .models import DEAD, UNKNOWN, SFTModel, ShiftModel, full_shift
from .potentials import HolderSeries, LocallyConstant, Potential, _ancestors, _codes
from .words import Word, WordLike, as_word, format_word


def block_states(model: SFTModel, b: int) -> tuple[list[Word], np.ndarray]:
    """Admissible ``b``-words and their overlap adjacency (``s -> t`` iff ``s t_last`` is admissible)."""
    lang = enumerate_language(model, b + 1)
    blocks = list(lang.iter_words(b))
    index = {s: i for i, s in enumerate(blocks)}
    adj = np.zeros((len(blocks), len(blocks)), dtype=np.int64)
    for w in lang.iter_words(b + 1):
        adj[index[w[:b]], index[w[1:]]] = 1
    return blocks, adj


class ShiftMeasure:
    alphabet_size: int

    def mass(self, w: WordLike):
        raise NotImplementedError

    def masses_level(self, lang: Language, n: int) -> np.ndarray:
        return np.array([float(self.mass(w)) for w in lang.iter_words(n)])

    def table(self, depth: int, lang: Language) -> list[tuple[Word, float]]:
        return [(w, self.mass(w)) for n in range(1, depth + 1) for w in lang.iter_words(n)]


class MarkovMeasure(ShiftMeasure):
    """Stationary Markov chain on ``b``-blocks; ``P[s, t] > 0`` only for overlapping blocks."""

    def __init__(self, blocks: list[Word], p, P, alphabet_size: int, tol: float = 1e-9, name: str = "markov"):
        self.blocks = [tuple(s) for s in blocks]
        self.b = len(self.blocks[0])
        self.p = np.asarray(p, dtype=float)
        self.P = np.asarray(P, dtype=float)
        self.alphabet_size = alphabet_size
        self.name = name
        if (self.p < -tol).any() or abs(self.p.sum() - 1) > tol:
            raise ConstructionError("stationary vector must be a probability vector")
        if (self.P < -tol).any() or np.abs(self.P.sum(axis=1) - 1).max() > tol:
            raise ConstructionError("transition matrix must be row-stochastic")
        if np.abs(self.p @ self.P - self.p).max() > tol:
            raise ConstructionError("vector is not stationary for the transition matrix")
        self._index = {s: i for i, s in enumerate(self.blocks)}
        size = alphabet_size**self.b
        self._lookup = np.full(size, -1, dtype=np.int64)
        for i, s in enumerate(self.blocks):
            self._lookup[_codes(np.array([s]), 0, self.b, alphabet_size)[0]] = i

    def mass(self, w: WordLike) -> float:
        w = as_word(w, self.alphabet_size)
        b = self.b
        if len(w) < b:
            return float(sum(self.p[i] for i, s in enumerate(self.blocks) if s[: len(w)] == w))
        i = self._index.get(w[:b])
        if i is None:
            return 0.0
        m = self.p[i]
        for k in range(1, len(w) - b + 1):
            j = self._index.get(w[k : k + b])
            if j is None:
                return 0.0
            m *= self.P[i, j]
            i = j
        return float(m)

    def masses_level(self, lang: Language, n: int) -> np.ndarray:
        words = lang.words(n).astype(np.int64)
        b = self.b
        if n < b:
            return np.array([self.mass(tuple(r)) for r in words])
        idx = [self._lookup[_codes(words, k, b, self.alphabet_size)] for k in range(n - b + 1)]
        dead = np.zeros(len(words), dtype=bool)
        for col in idx:
            dead |= col < 0
        safe = [np.where(col < 0, 0, col) for col in idx]
        m = self.p[safe[0]].copy()
        for a, c in zip(safe, safe[1:]):
            m *= self.P[a, c]
        m[dead] = 0.0
        return m

    def entropy(self) -> float:
        """``-sum_i p_i sum_j P_ij log P_ij``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(self.P > 0, self.P * np.log(np.where(self.P > 0, self.P, 1.0)), 0.0)
        return float(-math.fsum((self.p[:, None] * terms).ravel()))

    def integrate(self, phi: Potential) -> float:
        if isinstance(phi, HolderSeries):
            eg = math.fsum(self.mass((a,)) * g for a, g in enumerate(phi.base))
            return (math.fsum(phi.coefficients) + phi.tail) * eg + phi.shift
        if isinstance(phi, LocallyConstant):
            total = []
            for w, v in phi.table.items():
                m = self.mass(w)
                if m > 0:
                    total.append(m * v)
            return math.fsum(total)
        raise ArgumentError("unsupported potential type")

    def stationary_error(self) -> float:
        return float(np.abs(self.p @ self.P - self.p).max())

    def sample(self, n: int, seed: int = 0) -> np.ndarray:
        """A length-``n`` sample path (symbols), seeded."""
        rng = np.random.default_rng(seed)
        cum = np.cumsum(self.P, axis=1)
        s = int(rng.choice(len(self.p), p=self.p))
        out = list(self.blocks[s])
        u = rng.random(max(0, n - self.b))
        for x in u:
            s = int(min(np.searchsorted(cum[s], x, side="right"), len(self.p) - 1))
            out.append(self.blocks[s][-1])
        return np.array(out[:n], dtype=np.int64)


def _markov_from_weighted(blocks: list[Word], M: np.ndarray, A: int, name: str) -> MarkovMeasure:
    if not is_irreducible(M):
        raise ConstructionError("weighted transition matrix is reducible; equilibrium data is not unique")
    pd = perron_data(M)
    lam, r, l = pd.value, pd.right, pd.left
    P = M * r[None, :] / (lam * r[:, None])
    P = P / P.sum(axis=1, keepdims=True)
    p = l * r
    p = p / p.sum()
    mu = MarkovMeasure(blocks, p, P, A, name=name)
    mu.log_radius = math.log(lam)
    return mu


def parry_measure(model: SFTModel) -> MarkovMeasure:
    """Maximal-entropy Markov measure of an irreducible vertex shift."""
    if not isinstance(model, SFTModel):
        raise ArgumentError("the Parry construction needs a shift of finite type")
    live = np.flatnonzero(model.live)
    A = model.matrix[np.ix_(live, live)].astype(float)
    blocks = [(int(a),) for a in live]
    return _markov_from_weighted(blocks, A, model.alphabet_size, "parry")


def weighted_gibbs_markov(model: SFTModel, phi: LocallyConstant) -> MarkovMeasure:
    """Equilibrium Markov measure of a locally constant potential on ``max(1, k-1)``-blocks."""
    if not isinstance(model, SFTModel):
        raise ArgumentError("weighted Markov construction needs a shift of finite type")
    b = max(1, phi.k - 1)
    blocks, adj = block_states(model, b)
    M = np.zeros(adj.shape)
    for i, s in enumerate(blocks):
        for j in np.flatnonzero(adj[i]):
            word = s + (blocks[j][-1],)
            M[i, j] = math.exp(phi.value(word[: phi.k]))
    return _markov_from_weighted(blocks, M, model.alphabet_size, "equilibrium")


def bernoulli(probs) -> MarkovMeasure:
    probs = np.asarray(probs, dtype=float)
    A = len(probs)
    return MarkovMeasure([(a,) for a in range(A)], probs, np.tile(probs, (A, 1)), A, name="bernoulli")


def uniform_markov(model: SFTModel) -> MarkovMeasure:
    """Each allowed successor equally likely; stationary vector solved directly."""
    live = np.flatnonzero(model.live)
    A = model.matrix[np.ix_(live, live)].astype(float)
    P = A / A.sum(axis=1, keepdims=True)
    vals, vecs = np.linalg.eig(P.T)
    k = int(np.argmin(np.abs(vals - 1)))
    p = np.abs(vecs[:, k].real)
    return MarkovMeasure([(int(a),) for a in live], p / p.sum(), P, model.alphabet_size, name="uniform-successor")


def point_mass(symbol: int, alphabet_size: int) -> MarkovMeasure:
    """Dirac measure on the fixed point ``symbol^infinity``."""
    p = np.zeros(alphabet_size)
    p[symbol] = 1.0
    return MarkovMeasure([(a,) for a in range(alphabet_size)], p, np.eye(alphabet_size), alphabet_size, name="point")


def markov_entropy(mu: MarkovMeasure) -> float:
    return mu.entropy()


def static_entropy(mu: ShiftMeasure, n: int, lang: Language) -> float:
    """``H_mu`` of the partition into ``n``-cylinders."""
    m = mu.masses_level(lang, n)
    m = np.asarray([float(x) for x in m])
    m = m[m > 0]
    return float(-math.fsum(m * np.log(m)))


# -- empirical constructions ---------------------------------------------------


@dataclass
class EmpiricalMeasure(ShiftMeasure):
    """Cylinder masses up to ``depth``, exact rationals when ``exact``."""

    masses: dict
    depth: int
    alphabet_size: int
    n: int
    exact: bool = True
    meta: dict = field(default_factory=dict)

    def mass(self, w: WordLike):
        w = as_word(w, self.alphabet_size)
        if len(w) > self.depth:
            raise InsufficientDataError(f"cylinder of length {len(w)} beyond table depth {self.depth}")
        if not w:
            return Fraction(1) if self.exact else 1.0
        return self.masses.get(w, Fraction(0) if self.exact else 0.0)

    def masses_level(self, lang: Language, n: int) -> np.ndarray:
        return np.array([float(self.mass(w)) for w in lang.iter_words(n)])

    def listing(self) -> list[tuple[str, str]]:
        out = []
        for w in sorted(self.masses):
            out.append((format_word(w, self.alphabet_size), str(self.masses[w])))
        return out


def empirical_mme(model: ShiftModel, n: int, depth: int, phi: Potential | None = None,
                  lang: Language | None = None) -> EmpiricalMeasure:
    """Time-averaged push-forwards of the uniform (or ``e^{S_n phi}``-weighted) measure on ``n``-cylinders.

    Inside each ``n``-cylinder the mass is spread uniformly over the admissible
    continuations of length ``depth - 1``, which fixes every cylinder mass of
    length ``<= depth`` at every time ``k < n``. Without a potential all masses
    are exact fractions.
    """
    if depth < 1:
        raise ArgumentError("cylinder depth must be at least 1")
    if depth >= n:
        raise ArgumentError(f"need cylinder depth < n, got depth={depth}, n={n}")
    need = n + depth - 1
    if phi is not None:
        need = max(need, phi.levels_needed(n))
    if lang is None or lang.depth < need:
        lang = enumerate_language(model, need, max_depth=max(need, 22))
    A = model.alphabet_size
    m_level = n + depth - 1
    W = lang.words(m_level).astype(np.int64)
    anc = _ancestors(lang, m_level, n)
    ext = np.bincount(anc, minlength=lang.count(n))
    exact = phi is None
    if exact:
        lcm = 1
        for e in np.unique(ext):
            lcm = lcm * int(e) // math.gcd(lcm, int(e))
        weights = (lcm // ext[anc]).astype(np.int64)
        denom = n * lang.count(n) * lcm
    else:
        _, hi = phi.bracket_level(lang, n)
        top = float(hi.max())
        nu = np.exp(hi - top)
        nu = nu / math.fsum(nu)
        weights = nu[anc] / ext[anc]
    masses: dict = {}
    for ell in range(1, depth + 1):
        acc = np.zeros(A**ell, dtype=np.int64 if exact else float)
        for k in range(n):
            codes = _codes(W, k, ell, A)
            if exact:
                np.add.at(acc, codes, weights)
            else:
                acc += np.bincount(codes, weights=weights, minlength=A**ell)
        for code in np.flatnonzero(acc):
            word = _decode(int(code), ell, A)
            masses[word] = Fraction(int(acc[code]), denom) if exact else float(acc[code]) / n
    return EmpiricalMeasure(masses, depth, A, n, exact=exact,
                            meta={"construction": "time-average", "weighted": phi is not None})


def _decode(code: int, length: int, A: int) -> Word:
    out = []
    for _ in range(length):
        code, a = divmod(code, A)
        out.append(a)
    return tuple(reversed(out))


def invariance_defect(mu: EmpiricalMeasure) -> list:
    """Total-variation distance between ``mu`` and its push-forward on cylinders of length ``1..depth-1``."""
    out = []
    A = mu.alphabet_size
    for ell in range(1, mu.depth):
        words = {w for w in mu.masses if len(w) == ell} | {w[1:] for w in mu.masses if len(w) == ell + 1}
        total = Fraction(0) if mu.exact else 0.0
        for u in words:
            pushed = sum((mu.mass((a,) + u) for a in range(A)), Fraction(0) if mu.exact else 0.0)
            total += abs(mu.mass(u) - pushed)
        out.append(total / 2)
    return out


def max_cylinder_deviation(mu: ShiftMeasure, nu: ShiftMeasure, lang: Language, depth: int) -> float:
    worst = 0.0
    for ell in range(1, depth + 1):
        a = mu.masses_level(lang, ell)
        b = nu.masses_level(lang, ell)
        worst = max(worst, float(np.max(np.abs(np.asarray(a, float) - np.asarray(b, float)))))
    return worst


# -- Gibbs bounds -----------------------------------------------------------------


@dataclass
class GibbsReport:
    target: float
    ns: list[int]
    K_lower: list[float]
    K_upper: list[float]
    K: list[float]
    running_K: list[float]
    stable: bool
    declared_K: float | None = None
    inside: dict | None = None
    outside: dict | None = None

    @property
    def passed(self) -> bool:
        if self.declared_K is not None:
            return all(1 / self.declared_K <= lo and hi <= self.declared_K
                       for lo, hi in zip(self.K_lower, self.K_upper))
        return self.stable

    @property
    def variation(self) -> float:
        half = [k for n, k in zip(self.ns, self.running_K) if n >= math.ceil(self.ns[-1] / 2)]
        return (max(half) - min(half)) / min(half)

    def rows(self) -> list[dict]:
        return [{"n": n, "K_lower": lo, "K_upper": hi} for n, lo, hi in zip(self.ns, self.K_lower, self.K_upper)]


def gibbs_check(mu: ShiftMeasure, lang: Language, h_or_P: float, phi: Potential | None = None,
                depth: int | None = None, restriction: OrbitCollection | None = None,
                K: float | None = None, stability: float = 0.10) -> GibbsReport:
    """Ratios ``mu[w] e^{n P - S_n phi(w)}`` over ``L_n``; sup/inf brackets are used conservatively."""
    depth = depth or lang.depth
    if phi is not None:
        while phi.levels_needed(depth) > lang.depth:
            depth -= 1
    ns, lows, highs, Ks, running = [], [], [], [], []
    inside = {"K_lower": [], "K_upper": []} if restriction is not None else None
    outside = {"K_lower": [], "K_upper": []} if restriction is not None else None
    best = 0.0
    for n in range(1, depth + 1):
        m = np.asarray(mu.masses_level(lang, n), dtype=float)
        with np.errstate(divide="ignore"):
            logm = np.log(m)
        if phi is None:
            s_lo = s_hi = np.zeros(len(m))
        else:
            s_lo, s_hi = phi.bracket_level(lang, n)
        r_hi = np.exp(logm + n * h_or_P - s_lo)
        r_lo = np.exp(logm + n * h_or_P - s_hi)
        lo, hi = float(r_lo.min()), float(r_hi.max())
        k_n = max(hi, 1 / lo if lo > 0 else math.inf)
        best = max(best, k_n)
        ns.append(n)
        lows.append(lo)
        highs.append(hi)
        Ks.append(k_n)
        running.append(best)
        if restriction is not None:
            mask = restriction.mask(n)
            for part, sel in ((inside, mask), (outside, ~mask)):
                part["K_lower"].append(float(r_lo[sel].min()) if sel.any() else math.nan)
                part["K_upper"].append(float(r_hi[sel].max()) if sel.any() else math.nan)
    half = [k for n, k in zip(ns, running) if n >= math.ceil(depth / 2)]
    stable = math.isfinite(max(half)) and (max(half) - min(half)) / min(half) < stability
    return GibbsReport(h_or_P, ns, lows, highs, Ks, running, stable, K, inside, outside)


# -- periodic points ----------------------------------------------------------------


def _run_sticky(table: np.ndarray, words: np.ndarray, states: np.ndarray) -> np.ndarray:
    s = states.copy()
    for col in range(words.shape[1]):
        alive = s >= 0
        s[alive] = table[s[alive], words[alive, col]]
    return s


def periodic_words(model: ShiftModel, n: int, lang: Language | None = None) -> tuple[np.ndarray, int]:
    """Words ``w`` of length ``n`` with ``w w w ...`` in the shift, plus the number left undecided.

    A word still alive after ``#states + 1`` repetitions revisits an automaton
    state, hence can be repeated forever.
    """
    if lang is None or lang.depth < n:
        lang = enumerate_language(model, n, max_depth=max(n, 22))
    aut = model.automaton()
    words = lang.words(n).astype(np.int64)
    s = np.full(len(words), aut.start, dtype=np.int64)
    for _ in range(aut.n_states + 1):
        s = _run_sticky(aut.table, words, s)
    ok = s >= 0
    undecided = int((s == UNKNOWN).sum())
    return words[ok], undecided


@dataclass
class PeriodicReport:
    counts: list[int]
    undecided: list[int]
    h: float | None = None
    C_emp: float | None = None
    C_first_half: float | None = None
    C_second_half: float | None = None

    @property
    def drift_ok(self) -> bool:
        if self.C_second_half is None:
            return True
        return self.C_second_half <= 1.1 * self.C_first_half

    def rows(self) -> list[dict]:
        return [{"n": n, "per_n": c, "undecided": u} for n, (c, u) in enumerate(zip(self.counts, self.undecided), 1)]


def periodic_orbits(model: ShiftModel, n_max: int, h: float | None = None) -> PeriodicReport:
    """``#Per_n`` for ``n <= n_max``; with ``h`` also the empirical two-sided constant."""
    lang = enumerate_language(model, n_max, max_depth=max(n_max, 22))
    counts, undecided = [], []
    for n in range(1, n_max + 1):
        w, u = periodic_words(model, n, lang)
        counts.append(len(w))
        undecided.append(u)
    rep = PeriodicReport(counts, undecided, h)
    if h is not None and all(c > 0 for c in counts):
        cs = [max(c / math.exp(n * h), math.exp(n * h) / c) for n, c in enumerate(counts, 1)]
        rep.C_emp = max(cs)
        mid = len(cs) // 2
        rep.C_first_half = max(cs[:mid]) if mid else max(cs)
        rep.C_second_half = max(cs[mid:])
    return rep


def periodic_measure(model: ShiftModel, n: int, depth: int) -> EmpiricalMeasure:
    """Uniform measure on the period-``n`` points, tabulated exactly on cylinders up to ``depth``."""
    words, undecided = periodic_words(model, n)
    if undecided:
        raise InsufficientDataError(f"{undecided} period-{n} words could not be decided")
    if len(words) == 0:
        raise ArgumentError(f"no points of period {n}")
    A = model.alphabet_size
    reps = -(-depth // n) + 1
    X = np.tile(words, (1, reps))[:, :depth]
    total = len(words)
    masses = {}
    for ell in range(1, depth + 1):
        codes = _codes(X, 0, ell, A)
        counts = np.bincount(codes, minlength=A**ell)
        for code in np.flatnonzero(counts):
            masses[_decode(int(code), ell, A)] = Fraction(int(counts[code]), total)
    return EmpiricalMeasure(masses, depth, A, n, exact=True, meta={"construction": "periodic"})


def smb_check(mu: MarkovMeasure, n: int = 10_000, seed: int = 0, batches: int = 50) -> dict:
    """``-(1/n) log mu[x_1..x_n]`` along a sampled path against the entropy, with a batch-means error bar."""
    x = mu.sample(n, seed)
    b = mu.b
    idx = [mu._index[tuple(int(a) for a in x[k : k + b])] for k in range(n - b + 1)]
    steps = np.array([-math.log(mu.P[i, j]) for i, j in zip(idx, idx[1:])])
    first = -math.log(mu.p[idx[0]])
    estimate = (first + steps.sum()) / n
    size = len(steps) // batches
    means = steps[: size * batches].reshape(batches, size).mean(axis=1)
    se = float(means.std(ddof=1) / math.sqrt(batches))
    h = mu.entropy()
    slack = 3 * se + abs(first) / n + h * b / n + 1e-12
    return {"estimate": float(estimate), "entropy": h, "stderr": se, "pass": abs(estimate - h) <= slack}
