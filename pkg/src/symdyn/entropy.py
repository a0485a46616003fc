"""Growth rates of word counts and partition sums."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .algebraic import AlgebraicReal, perron_data
from .errors import ArgumentError, InsufficientDataError
from .language import Language, OrbitCollection
from .models import DEAD, UNKNOWN, SFTModel, ShiftModel
from .potentials import LocallyConstant, Potential


@dataclass
class GrowthEstimate:
    """Estimates of ``lim a_n / n`` from ``a_n`` (nats) over ``n in ns``.

    ``raw`` keeps the exact counts when available (else the log-sums).
    ``fekete`` is the running minimum of ``a_n / n``; for subadditive data it
    is a certified upper bound on the limit. ``tail_max``/``tail_min`` bracket
    the point estimates over the window and ``regression`` is the slope of
    ``a_n`` against ``n`` there.
    """

    ns: list[int]
    values: list[float]
    raw: list
    window: tuple[int, int]
    point: list[float] = field(default_factory=list)
    fekete: list[float] = field(default_factory=list)
    regression: float = math.nan
    tail_max: float = math.nan
    tail_min: float = math.nan
    certified_upper: bool = False
    lower_bound_only: bool = False
    label: str = "entropy"

    @property
    def estimate(self) -> float:
        return self.regression

    @property
    def fekete_bound(self) -> float:
        return self.fekete[-1]

    def bracket(self) -> tuple[float, float]:
        return self.tail_min, self.tail_max

    def rows(self) -> list[dict]:
        return [
            {"n": n, "count_or_logsum": r, "point_estimate": p, "running_fekete": f}
            for n, r, p, f in zip(self.ns, self.raw, self.point, self.fekete)
        ]

    def summary(self) -> dict:
        return {
            "window": list(self.window),
            "regression": self.regression,
            "tail_max": self.tail_max,
            "tail_min": self.tail_min,
            "fekete_bound": self.fekete_bound,
            "certified_upper": self.certified_upper,
            "lower_bound_only": self.lower_bound_only,
        }


def growth_from_values(ns: Sequence[int], values: Sequence[float], raw: Sequence | None = None,
                       window: tuple[int, int] | None = None, subadditive: bool = False,
                       label: str = "entropy") -> GrowthEstimate:
    """Build a :class:`GrowthEstimate` from ``a_n`` values; ``-inf`` entries (empty ``D_n``) are skipped."""
    pairs = [(n, v, r) for n, v, r in zip(ns, values, raw if raw is not None else values) if math.isfinite(v)]
    if not pairs:
        raise ArgumentError("no nonempty lengths to estimate a growth rate from")
    ns2 = [p[0] for p in pairs]
    vals = [p[1] for p in pairs]
    raws = [p[2] for p in pairs]
    if window is None:
        window = (ns2[len(ns2) // 2], ns2[-1])
    lo, hi = window
    if lo > hi or lo < 1:
        raise ArgumentError(f"bad window {window}")
    point = [v / n for n, v in zip(ns2, vals)]
    fek, best = [], math.inf
    for p in point:
        best = min(best, p)
        fek.append(best)
    tail = [(n, v) for n, v in zip(ns2, vals) if lo <= n <= hi]
    if not tail:
        raise InsufficientDataError(f"no data inside window {window}")
    tail_points = [v / n for n, v in tail]
    if len(tail) >= 2:
        x = np.array([n for n, _ in tail], dtype=float)
        y = np.array([v for _, v in tail], dtype=float)
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = tail_points[0]
    return GrowthEstimate(ns2, vals, raws, (lo, hi), point, fek, slope, max(tail_points), min(tail_points),
                          certified_upper=subadditive, label=label)


def log_count(c: int) -> float:
    return math.log(c) if c > 0 else -math.inf


def entropy_estimate(L: Language | OrbitCollection | Sequence[int], window: tuple[int, int] | None = None,
                     subadditive: bool | None = None) -> GrowthEstimate:
    """Growth estimate of ``log #D_n``; for full languages the Fekete value is flagged as certified.

    Pass ``subadditive=True`` with a plain count list taken from a whole language.
    """
    if isinstance(L, Language):
        counts, full = L.counts, True
    elif isinstance(L, OrbitCollection):
        counts, full = [L.count(n) for n in range(1, L.base.depth + 1)], False
    else:
        counts, full = [int(c) for c in L], False
    if not counts or all(c == 0 for c in counts):
        raise ArgumentError("empty counts")
    if subadditive is not None:
        full = subadditive
    ns = list(range(1, len(counts) + 1))
    return growth_from_values(ns, [log_count(c) for c in counts], counts, window, subadditive=full)


@dataclass
class CountingReport:
    h: float
    tau: int
    Q: float
    ratios: list[float]
    lower_ok: list[bool]
    upper_ok: list[bool]
    exact: bool

    @property
    def passed(self) -> bool:
        return all(self.lower_ok) and all(self.upper_ok)

    @property
    def empirical_Q(self) -> float:
        return max(self.ratios)

    def rows(self) -> list[dict]:
        return [{"n": n, "ratio": r, "lower_ok": lo, "upper_ok": up}
                for n, (r, lo, up) in enumerate(zip(self.ratios, self.lower_ok, self.upper_ok), start=1)]


def counting_bounds_check(L: Language | Sequence[int], h: float | AlgebraicReal, tau: int) -> CountingReport:
    """Check ``e^{nh} <= #L_n <= (tau+1) e^{tau h} e^{nh}`` for every enumerated ``n``.

    With ``h`` given as the exponential growth constant (an :class:`AlgebraicReal`
    standing for ``e^h``) both inequalities are decided exactly.
    """
    counts = L.counts if isinstance(L, Language) else [int(c) for c in L]
    if tau < 0:
        raise ArgumentError("gap size must be nonnegative")
    lower_ok, upper_ok, ratios = [], [], []
    if isinstance(h, AlgebraicReal):
        lam = h
        hval = lam.log()
        for n, c in enumerate(counts, start=1):
            lower_ok.append(lam.compare_power(c, n) >= 0)
            upper_ok.append(lam.compare_power(c, n + tau, Fraction(tau + 1)) <= 0)
        with mpmath.workdps(40):
            lam_mp = lam.mp(40)
            ratios = [float(mpmath.mpf(c) / lam_mp**n) for n, c in enumerate(counts, start=1)]
            Q = float((tau + 1) * lam_mp**tau)
        return CountingReport(hval, tau, Q, ratios, lower_ok, upper_ok, exact=True)
    hval = float(h)
    with mpmath.workdps(40):
        Q_mp = (tau + 1) * mpmath.exp(tau * mpmath.mpf(hval))
        for n, c in enumerate(counts, start=1):
            r = mpmath.mpf(c) / mpmath.exp(n * mpmath.mpf(hval))
            ratios.append(float(r))
            lower_ok.append(bool(r >= 1))
            upper_ok.append(bool(r <= Q_mp))
        Q = float(Q_mp)
    return CountingReport(hval, tau, Q, ratios, lower_ok, upper_ok, exact=False)


# -- pressure -------------------------------------------------------------------


def _logsumexp(values: np.ndarray) -> float:
    if len(values) == 0:
        return -math.inf
    m = float(np.max(values))
    if not math.isfinite(m):
        return m
    return m + math.log(math.fsum(np.exp(values - m)))


@dataclass
class PressureEstimate:
    upper: GrowthEstimate
    lower: GrowthEstimate

    @property
    def estimate(self) -> float:
        return self.upper.regression

    def bracket(self) -> tuple[float, float]:
        """Tail bracket combining the inf- and sup-convention partition sums."""
        return self.lower.tail_min, self.upper.tail_max

    def rows(self) -> list[dict]:
        return [
            {"n": a["n"], "count_or_logsum": a["count_or_logsum"], "point_estimate": a["point_estimate"],
             "running_fekete": a["running_fekete"], "lower_logsum": b["count_or_logsum"]}
            for a, b in zip(self.upper.rows(), self.lower.rows())
        ]


def partition_logsums(D: OrbitCollection | Language, phi: Potential, n: int) -> tuple[float, float]:
    """``log`` of the partition sums with inf- and sup-convention Birkhoff sums over ``D_n``."""
    lang = D.base if isinstance(D, OrbitCollection) else D
    if isinstance(phi, LocallyConstant) and phi.weights is not None and all(v == 1 for v in phi.weights.values()):
        c = D.count(n) if isinstance(D, OrbitCollection) else lang.count(n)
        v = log_count(c)
        return v, v
    lo, hi = phi.bracket_level(lang, n)
    if isinstance(D, OrbitCollection):
        m = D.mask(n)
        lo, hi = lo[m], hi[m]
    return _logsumexp(lo), _logsumexp(hi)


def pressure_estimate(D: OrbitCollection | Language, phi: Potential, window: tuple[int, int] | None = None) -> PressureEstimate:
    """Growth of ``log Lambda_n`` over an enumerated collection.

    With ``phi = 0`` the values are exactly ``log #D_n``, so the result coincides
    with :func:`entropy_estimate`.
    """
    lang = D.base if isinstance(D, OrbitCollection) else D
    nmax = lang.depth
    while nmax >= 1 and phi.levels_needed(nmax) > lang.depth:
        nmax -= 1
    if nmax < 1:
        raise InsufficientDataError("language too shallow for this potential")
    if window is not None and window[1] > nmax:
        raise InsufficientDataError(
            f"window end {window[1]} needs language depth {phi.levels_needed(window[1])}, have {lang.depth}"
        )
    ns = list(range(1, nmax + 1))
    los, his = zip(*(partition_logsums(D, phi, n) for n in ns))
    full = isinstance(D, Language)
    up = growth_from_values(ns, list(his), list(his), window, subadditive=False, label="pressure")
    lo = growth_from_values(ns, list(los), list(los), window, subadditive=False, label="pressure-lower")
    if _is_zero(phi):
        counts = [D.count(n) if isinstance(D, OrbitCollection) else lang.count(n) for n in ns]
        up = growth_from_values(ns, list(his), counts, window, subadditive=full, label="pressure")
        lo = growth_from_values(ns, list(los), counts, window, subadditive=full, label="pressure-lower")
    return PressureEstimate(up, lo)


def _is_zero(phi: Potential) -> bool:
    return isinstance(phi, LocallyConstant) and phi.weights is not None and all(v == 1 for v in phi.weights.values())


def model_partition_logsums(model: ShiftModel, phi: LocallyConstant, depth: int) -> tuple[list[float], list[float]]:
    """Partition sums of the whole language up to ``depth`` without enumerating it.

    Dynamic programming over pairs (automaton state, last ``k-1`` symbols):
    the terms of ``S_n phi`` fixed by the word are accumulated along the way,
    and the last ``k-1`` terms are bracketed by their extremes over admissible
    continuations. Exact rational arithmetic is used when ``phi`` carries exact
    weights.
    """
    if not isinstance(phi, LocallyConstant):
        raise ArgumentError("transfer summation needs a locally constant potential")
    aut = model.automaton()
    k = phi.k
    A = model.alphabet_size
    exact = phi.weights is not None

    def weight(word):
        return phi.exact_weight(word) if exact else math.exp(phi.value(word))

    def tail_extremes(state, last):
        # the len(last) pending terms read the continuation of length k-1
        if k == 1:
            return (1, 1) if exact else (1.0, 1.0)
        frontier = [((), state)]
        for _ in range(k - 1):
            nxt = []
            for e, s in frontier:
                if s == UNKNOWN:
                    raise InsufficientDataError("continuation runs past the certified part of the model")
                for a in range(A):
                    t = int(aut.table[s, a])
                    if t != DEAD:
                        nxt.append((e + (a,), t))
            frontier = nxt
        vals = []
        for e, _ in frontier:
            word = last + e
            prod = Fraction(1) if exact else 1.0
            for i in range(len(last)):
                prod *= weight(word[i : i + k])
            vals.append(prod)
        return min(vals), max(vals)

    # key: (state, last up to k-1 symbols) -> accumulated weight of determined terms
    dist: dict = {(aut.start, ()): (Fraction(1) if exact else 1.0)}
    log_scale = 0.0
    his, los = [], []
    cache: dict = {}
    for n in range(1, depth + 1):
        nxt: dict = {}
        for (s, last), val in dist.items():
            if s == UNKNOWN:
                raise InsufficientDataError("partition sum runs past the certified part of the model")
            for a in range(A):
                t = int(aut.table[s, a])
                if t == DEAD:
                    continue
                word = last + (a,)
                if len(word) == k:
                    v2 = val * weight(word)
                    word = word[1:]
                else:
                    v2 = val
                key = (t, word)
                nxt[key] = nxt.get(key, 0) + v2
        dist = nxt
        lo_total = Fraction(0) if exact else []
        hi_total = Fraction(0) if exact else []
        for (s, last), val in dist.items():
            key = (s, last)
            if key not in cache:
                cache[key] = tail_extremes(s, last)
            tlo, thi = cache[key]
            if exact:
                lo_total += val * tlo
                hi_total += val * thi
            else:
                lo_total.append(val * tlo)
                hi_total.append(val * thi)
        if exact:
            los.append(_log_fraction(lo_total) + log_scale)
            his.append(_log_fraction(hi_total) + log_scale)
        else:
            los.append(math.log(math.fsum(lo_total)) + log_scale)
            his.append(math.log(math.fsum(hi_total)) + log_scale)
            # renormalise to keep floats in range
            peak = max(dist.values())
            if peak > 1e100 or peak < 1e-100:
                dist = {key: v / peak for key, v in dist.items()}
                log_scale += math.log(peak)
    return los, his


def _log_fraction(q: Fraction) -> float:
    if q <= 0:
        return -math.inf
    return math.log(q.numerator) - math.log(q.denominator)


def model_pressure_estimate(model: ShiftModel, phi: LocallyConstant, depth: int,
                            window: tuple[int, int] | None = None) -> PressureEstimate:
    los, his = model_partition_logsums(model, phi, depth)
    ns = list(range(1, depth + 1))
    return PressureEstimate(growth_from_values(ns, his, his, window, label="pressure"),
                            growth_from_values(ns, los, los, window, label="pressure-lower"))


def weighted_matrix(model: SFTModel, phi: LocallyConstant) -> tuple[np.ndarray, list]:
    """Transfer matrix on ``b``-blocks (``b = max(1, k-1)``): ``M[s, t] = e^{phi(first k symbols of s t_last)}``."""
    from .measures import block_states

    blocks, adj = block_states(model, max(1, phi.k - 1))
    M = np.zeros(adj.shape)
    for i, s in enumerate(blocks):
        for j in np.flatnonzero(adj[i]):
            word = s + (blocks[j][-1],)
            M[i, j] = math.exp(phi.value(word[: phi.k]))
    return M, blocks


def spectral_pressure(model: SFTModel, phi: LocallyConstant) -> float:
    """``log`` of the spectral radius of the weighted transfer matrix (the oracle value of the pressure)."""
    M, _ = weighted_matrix(model, phi)
    return math.log(max(abs(np.linalg.eigvals(M))))


@dataclass
class VariationalReport:
    pressure: float
    tolerance: float
    rows: list[dict]

    @property
    def passed(self) -> bool:
        return all(r["free_energy"] <= self.pressure + self.tolerance for r in self.rows)

    @property
    def best(self) -> dict:
        return min(self.rows, key=lambda r: r["defect"])


def variational_check(model: SFTModel, phi: LocallyConstant, candidates: dict, pressure: float | None = None,
                      tol: float = 1e-9) -> VariationalReport:
    """For each named candidate ``mu`` compare ``h(mu) + integral(phi)`` against the pressure."""
    P = spectral_pressure(model, phi) if pressure is None else float(pressure)
    rows = []
    for name, mu in candidates.items():
        h = mu.entropy()
        integral = mu.integrate(phi)
        free = h + integral
        rows.append({"candidate": name, "entropy": h, "integral": integral, "free_energy": free,
                     "defect": P - free})
    return VariationalReport(P, tol, rows)
