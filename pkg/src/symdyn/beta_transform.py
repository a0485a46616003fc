"""The map ``f(x) = beta x mod 1`` on ``[0, 1)``: digit coding, cylinder
intervals and separated-set entropy.

Three arithmetic backends carry ``beta``:

* ``RationalArith`` - exact ``Fraction`` arithmetic for rational ``beta``;
* ``AlgebraicArith`` - exact arithmetic in ``Q(beta)`` for algebraic ``beta``
  (elements are coefficient tuples over ``1, beta, ..., beta^{d-1}``), with
  signs decided by refining an isolating interval of ``beta``;
* ``IntervalArith`` - rational intervals with outward dyadic rounding for
  ``beta`` known only up to a radius.

Every digit comes with a certainty flag: a digit is uncertain when the
enclosure of ``beta * x`` touches a discontinuity ``a >= 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy

from .algebraic import AlgebraicReal
from .entropy import GrowthEstimate, growth_from_values
from .errors import ArgumentError, InsufficientDataError
from .words import Word, WordLike, as_word

_X = sympy.Symbol("x")


def _floor_frac(q: Fraction) -> int:
    return q.numerator // q.denominator


class RationalArith:
    exact = True

    def __init__(self, beta: Fraction):
        self.beta = Fraction(beta)

    def const(self, q) -> Fraction:
        return Fraction(q)

    def mul_beta(self, x):
        return x * self.beta

    def div_beta(self, x):
        return x / self.beta

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def sign(self, x) -> int:
        return (x > 0) - (x < 0)

    def floor(self, x) -> tuple[int, bool]:
        """``(floor(x), certain)``; exact backends are always certain about the value."""
        return _floor_frac(x), True

    def is_integer(self, x) -> bool:
        return x.denominator == 1

    def to_float(self, x) -> float:
        return float(x)

    def to_fraction_bounds(self, x) -> tuple[Fraction, Fraction]:
        return x, x


class AlgebraicArith:
    """Exact arithmetic in ``Q(beta)``."""

    exact = True

    def __init__(self, root: AlgebraicReal):
        self.root = root
        coeffs = [Fraction(int(c)) for c in root.poly.all_coeffs()]  # highest first
        lead = coeffs[0]
        monic = [c / lead for c in coeffs]
        self.d = len(monic) - 1
        # beta^d = -sum_{i<d} m_i beta^i with m_i the monic coefficients (lowest first)
        self._low = list(reversed(monic[1:]))
        self.beta = self._basis(1)

    def _basis(self, i: int):
        v = [Fraction(0)] * self.d
        v[i] = Fraction(1)
        return tuple(v)

    def const(self, q):
        v = [Fraction(0)] * self.d
        v[0] = Fraction(q)
        return tuple(v)

    def _reduce(self, poly: list[Fraction]):
        poly = list(poly)
        for k in range(len(poly) - 1, self.d - 1, -1):
            c = poly[k]
            if c:
                poly[k] = Fraction(0)
                for i, m in enumerate(self._low):
                    poly[k - self.d + i] -= c * m
        poly += [Fraction(0)] * (self.d - len(poly))
        return tuple(poly[: self.d])

    def mul(self, x, y):
        out = [Fraction(0)] * (2 * self.d - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        out[i + j] += a * b
        return self._reduce(out)

    def mul_beta(self, x):
        return self._reduce([Fraction(0)] + list(x))

    def div_beta(self, x):
        # beta^{-1} = -(beta^{d-1} + m_{d-1} beta^{d-2} + ... + m_1) / m_0
        m0 = self._low[0]
        inv = [-(self._low[i + 1] if i + 1 < self.d else Fraction(1)) / m0 for i in range(self.d)]
        return self.mul(x, tuple(inv))

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def _bounds(self, x, eps: Fraction) -> tuple[Fraction, Fraction]:
        lo_b, hi_b = self.root.bounds(eps)
        lo = hi = Fraction(0)
        for i, c in enumerate(x):
            if c > 0:
                lo += c * lo_b**i
                hi += c * hi_b**i
            elif c < 0:
                lo += c * hi_b**i
                hi += c * lo_b**i
        return lo, hi

    def sign(self, x) -> int:
        if not any(x):
            return 0
        eps = Fraction(1, 10**6)
        for _ in range(100):
            lo, hi = self._bounds(x, eps)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            eps /= 10**6
        raise ArgumentError("sign of an algebraic number could not be decided")  # pragma: no cover

    def floor(self, x) -> tuple[int, bool]:
        lo, _ = self._bounds(x, Fraction(1, 10**6))
        k = _floor_frac(lo)
        while self.sign(self.sub(x, self.const(k + 1))) >= 0:
            k += 1
        while self.sign(self.sub(x, self.const(k))) < 0:
            k -= 1
        return k, True

    def is_integer(self, x) -> bool:
        return all(c == 0 for c in x[1:]) and x[0].denominator == 1

    def to_float(self, x) -> float:
        lo, hi = self._bounds(x, Fraction(1, 10**20))
        return float((lo + hi) / 2)

    def to_fraction_bounds(self, x) -> tuple[Fraction, Fraction]:
        return self._bounds(x, Fraction(1, 10**30))


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction


class IntervalArith:
    """Rational intervals rounded outward to ``2^-prec`` after every operation."""

    exact = False

    def __init__(self, mid, radius, prec: int = 256):
        mid = Fraction(mid)
        radius = Fraction(radius)
        self.prec = prec
        self.beta = self._round(Interval(mid - radius, mid + radius))
        if self.beta.lo <= 1:
            raise ArgumentError("beta must exceed 1")

    def _round(self, x: Interval) -> Interval:
        s = 1 << self.prec
        lo = Fraction(math.floor(x.lo * s), s)
        hi = Fraction(-math.floor(-x.hi * s), s)
        return Interval(lo, hi)

    def const(self, q) -> Interval:
        q = Fraction(q)
        return Interval(q, q)

    def mul_beta(self, x: Interval) -> Interval:
        cands = [x.lo * self.beta.lo, x.lo * self.beta.hi, x.hi * self.beta.lo, x.hi * self.beta.hi]
        return self._round(Interval(min(cands), max(cands)))

    def div_beta(self, x: Interval) -> Interval:
        cands = [x.lo / self.beta.lo, x.lo / self.beta.hi, x.hi / self.beta.lo, x.hi / self.beta.hi]
        return self._round(Interval(min(cands), max(cands)))

    def add(self, x: Interval, y: Interval) -> Interval:
        return Interval(x.lo + y.lo, x.hi + y.hi)

    def sub(self, x: Interval, y: Interval) -> Interval:
        return Interval(x.lo - y.hi, x.hi - y.lo)

    def sign(self, x: Interval) -> int | None:
        if x.lo > 0:
            return 1
        if x.hi < 0:
            return -1
        if x.lo == x.hi == 0:
            return 0
        return None

    def floor(self, x: Interval) -> tuple[int, bool]:
        a, b = _floor_frac(x.lo), _floor_frac(x.hi)
        if a == b:
            return a, True
        return _floor_frac((x.lo + x.hi) / 2), False

    def is_integer(self, x: Interval) -> bool:
        return x.lo == x.hi and x.lo.denominator == 1

    def touches_integer(self, x: Interval) -> bool:
        return _floor_frac(x.lo) != _floor_frac(x.hi) or x.lo.denominator == 1

    def to_float(self, x: Interval) -> float:
        return float((x.lo + x.hi) / 2)

    def to_fraction_bounds(self, x: Interval) -> tuple[Fraction, Fraction]:
        return x.lo, x.hi


def _parse_beta(beta, radius=None):
    if isinstance(beta, (int, Fraction)):
        return RationalArith(Fraction(beta))
    if isinstance(beta, float):
        r = Fraction(radius) if radius is not None else Fraction(abs(beta)) * Fraction(1, 2**52)
        return IntervalArith(Fraction(beta), r)
    if isinstance(beta, AlgebraicReal):
        q = beta.exact
        return RationalArith(q) if q is not None else AlgebraicArith(beta)
    text = str(beta).strip()
    aliases = {"golden": "(1+sqrt(5))/2", "phi": "(1+sqrt(5))/2"}
    text = aliases.get(text.lower(), text)
    try:
        return RationalArith(Fraction(text))
    except ValueError:
        pass
    try:
        expr = sympy.sympify(text)
    except (sympy.SympifyError, TypeError) as exc:
        raise ArgumentError(f"cannot parse beta {beta!r}") from exc
    if expr.is_Rational:
        return RationalArith(Fraction(int(expr.p), int(expr.q)))
    value = sympy.N(expr, 60)
    if not value.is_real:
        raise ArgumentError(f"beta {beta!r} is not real")
    try:
        poly = sympy.Poly(sympy.minimal_polynomial(expr, _X), _X)
    except (NotImplementedError, ValueError):
        mid = Fraction(str(sympy.N(expr, 80)))
        return IntervalArith(mid, Fraction(1, 10**70))
    for (a, b), _ in poly.intervals():
        if sympy.Rational(a) <= value <= sympy.Rational(b):
            root = AlgebraicReal(poly, Fraction(str(sympy.Rational(a))), Fraction(str(sympy.Rational(b))))
            return AlgebraicArith(root)
    raise ArgumentError(f"could not isolate beta {beta!r}")  # pragma: no cover


class BetaMap:
    """``f(x) = beta x mod 1`` with certified digit coding."""

    def __init__(self, beta, radius=None):
        self.arith = _parse_beta(beta, radius)
        self.spec = beta
        self.value = self.arith.to_float(self.arith.beta)
        if self.value <= 1:
            raise ArgumentError("beta must exceed 1")
        self.n_digits = math.ceil(self.value) if not self._beta_is_integer() else int(round(self.value))

    def _beta_is_integer(self) -> bool:
        return self.arith.is_integer(self.arith.beta)

    @property
    def is_integer(self) -> bool:
        return self._beta_is_integer()

    @property
    def exact(self) -> bool:
        return self.arith.exact

    def point(self, x):
        """Coerce ``x`` into the backend's number type."""
        if isinstance(x, float):
            x = Fraction(x)
        if isinstance(self.arith, IntervalArith):
            if isinstance(x, Interval):
                return x
            return self.arith.const(Fraction(x))
        if isinstance(x, (int, Fraction, str)):
            return self.arith.const(Fraction(x))
        return x

    def f(self, x):
        y = self.arith.mul_beta(self.point(x))
        d, _ = self.arith.floor(y)
        return self.arith.sub(y, self.arith.const(d))

    def code(self, x, n: int) -> tuple[Word, tuple[bool, ...]]:
        """First ``n`` digits of ``x`` with certainty flags.

        A digit is flagged when ``beta f^{k-1}(x)`` may equal or straddle a
        discontinuity ``a >= 1``; after a straddle every later digit is flagged.
        """
        ar = self.arith
        x = self.point(x)
        lo, hi = ar.to_fraction_bounds(x)
        if lo < 0 or hi >= 1:
            raise ArgumentError("x must lie in [0, 1)")
        digits, flags = [], []
        lost = False
        for _ in range(n):
            y = ar.mul_beta(x)
            d, certain = ar.floor(y)
            if isinstance(ar, IntervalArith):
                hit = ar.touches_integer(y) and _floor_frac(y.hi) >= 1
                if not certain:
                    lost = True
                ok = not (hit or lost)
            else:
                ok = not (ar.is_integer(y) and d >= 1)
            digits.append(d)
            flags.append(ok)
            x = ar.sub(y, ar.const(d))
            if isinstance(ar, IntervalArith):
                x = Interval(max(x.lo, Fraction(0)), min(x.hi, Fraction(1)))
        return tuple(digits), tuple(flags)

    def z_digits(self, n: int) -> tuple[Word, tuple[bool, ...]]:
        """Quasi-greedy expansion of 1: ``d_k = ceil(beta r) - 1``, ``r <- beta r - d_k``, from ``r = 1``."""
        ar = self.arith
        r = ar.const(1)
        digits, flags = [], []
        lost = False
        for _ in range(n):
            y = ar.mul_beta(r)
            d, certain = ar.floor(y)
            if ar.exact:
                if ar.is_integer(y):
                    d -= 1
                ok = True
            else:
                # ceil(y) - 1 is ambiguous when the enclosure touches an integer
                ok = not ar.touches_integer(y) and not lost
                if not ok:
                    lost = True
            digits.append(d)
            flags.append(ok)
            r = ar.sub(y, ar.const(d))
        return tuple(digits), tuple(flags)

    def z_prefix(self, n: int, strict: bool = True) -> Word:
        """Certified quasi-greedy z-prefix of length ``n`` (shorter when ``strict=False`` and precision runs out)."""
        digits, flags = self.z_digits(n)
        k = next((i for i, ok in enumerate(flags) if not ok), n)
        if k < n and strict:
            raise InsufficientDataError(f"only {k} digits of the expansion of 1 are certified")
        return digits[:k]

    # -- cylinder intervals ---------------------------------------------------

    def digit_interval(self, a: int):
        """``I_a = [a/beta, (a+1)/beta)``, cut at 1 for the last digit; ``None`` when empty."""
        ar = self.arith
        if not 0 <= a < self.n_digits:
            return None
        lo = ar.div_beta(ar.const(a))
        hi = ar.div_beta(ar.const(a + 1))
        if a == self.n_digits - 1:
            hi = ar.const(1)
        return lo, hi

    def interval_of_word(self, w: WordLike) -> tuple | None:
        """``I(w)`` as ``(lo, hi)`` (half-open) or ``None`` if empty.

        Built backwards: ``J <- ((J cap [0, top(a))) + a) / beta`` with
        ``top(a) = min(1, beta - a)``.
        """
        ar = self.arith
        w = as_word(w)
        if isinstance(ar, RationalArith):
            return self._rational_interval(w)
        lo, hi = ar.const(0), ar.const(1)
        for a in reversed(w):
            if not 0 <= a < self.n_digits:
                return None
            top = ar.sub(ar.beta, ar.const(a))
            if self._sign(ar.sub(top, ar.const(1))) > 0:
                top = ar.const(1)
            if self._sign(ar.sub(hi, top)) > 0:
                hi = top
            if self._sign(ar.sub(hi, lo)) <= 0:
                return None
            lo = ar.div_beta(ar.add(lo, ar.const(a)))
            hi = ar.div_beta(ar.add(hi, ar.const(a)))
        return lo, hi

    def _rational_interval(self, w: Word) -> tuple | None:
        beta = self.arith.beta
        one = Fraction(1)
        lo, hi = Fraction(0), one
        for a in reversed(w):
            if not 0 <= a < self.n_digits:
                return None
            top = min(one, beta - a)
            if hi > top:
                hi = top
            if hi <= lo:
                return None
            lo = (lo + a) / beta
            hi = (hi + a) / beta
        return lo, hi

    def _sign(self, x) -> int:
        s = self.arith.sign(x)
        if s is None:
            raise InsufficientDataError("interval endpoints cannot be ordered at this precision")
        return s

    def interval_length(self, iv) :
        if iv is None:
            return self.arith.const(0)
        return self.arith.sub(iv[1], iv[0])

    def cylinder_image(self, w: WordLike) -> tuple | None:
        """``f^{|w|}(I(w))`` computed forwards: ``J <- beta (J cap I_a) - a``."""
        ar = self.arith
        lo, hi = ar.const(0), ar.const(1)
        for a in as_word(w):
            da = self.digit_interval(a)
            if da is None:
                return None
            if self._sign(ar.sub(da[0], lo)) > 0:
                lo = da[0]
            if self._sign(ar.sub(hi, da[1])) > 0:
                hi = da[1]
            if self._sign(ar.sub(hi, lo)) <= 0:
                return None
            lo = ar.sub(ar.mul_beta(lo), ar.const(a))
            hi = ar.sub(ar.mul_beta(hi), ar.const(a))
        return lo, hi

    def equal(self, x, y) -> bool:
        return self._sign(self.arith.sub(x, y)) == 0


def code(bmap: BetaMap, x, n: int) -> tuple[Word, tuple[bool, ...]]:
    return bmap.code(x, n)


def interval_of_word(bmap: BetaMap, w: WordLike):
    return bmap.interval_of_word(w)


def z_prefix_from_beta(beta, n: int) -> Word:
    return BetaMap(beta).z_prefix(n)


# -- metric structure ------------------------------------------------------------


def circle_distance(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


def locality_ok(beta: float, eps: float, integer: bool) -> bool:
    """Scale condition under which close orbits never straddle the discontinuity at 0."""
    if integer:
        return eps * (beta + 1) < 1
    frac = beta - math.floor(beta)
    return eps * (beta + 1) < min(frac, 1 - frac)


def _cut_points(bmap: BetaMap, depth: int) -> list:
    """Points ``c`` in ``(0, 1)`` with ``f^t(c) = 0`` for some ``1 <= t <= depth``, sorted.

    Exact ``Fraction`` values for rational ``beta``; otherwise high-precision
    rational midpoints.
    """
    ar = bmap.arith
    rational = isinstance(ar, RationalArith)
    beta = ar.beta if rational else None
    frontier = {Fraction(0)} if rational else {ar.const(0)}
    seen: set = set()
    out = []
    for _ in range(depth):
        nxt = set()
        for y in frontier:
            for a in range(bmap.n_digits):
                if rational:
                    c = (y + a) / beta
                    if c >= 1:
                        continue
                    key = c
                else:
                    c = ar.div_beta(ar.add(y, ar.const(a)))
                    if ar.sign(ar.sub(c, ar.const(1))) != -1:
                        continue
                    lo, hi = ar.to_fraction_bounds(c)
                    key = (lo + hi) / 2
                if key == 0 or key in seen:
                    continue
                seen.add(key)
                out.append(key)
                nxt.add(c)
        frontier = nxt
    return sorted(out)


@dataclass
class SeparatedCount:
    n: int
    eps: Fraction
    resolution: Fraction
    count: int
    method: str


def _grid_size(resolution) -> int:
    res = Fraction(resolution)
    inv = 1 / res
    if res <= 0 or inv.denominator != 1:
        raise ArgumentError("grid resolution must be 1/G for a positive integer G")
    return inv.numerator


def separated_count(bmap: BetaMap, eps, n: int, resolution=Fraction(1, 10**9)) -> SeparatedCount:
    """Size of the greedy ``(n, eps)``-separated subset of the grid ``{i/G}``.

    Grid points are scanned in increasing order and accepted when ``d_n``-far
    from everything accepted so far. Under :func:`locality_ok`, points in
    different ``(n-1)``-cylinders are always separated, and inside one cylinder
    two points are separated iff their gap exceeds ``eps * beta^-(n-1)``; so
    the greedy set is counted per cylinder without visiting the grid.
    """
    G = _grid_size(resolution)
    eps_q = Fraction(eps)
    if eps_q * G <= 4:
        raise ArgumentError(f"scale eps={float(eps_q)} is not above the grid resolution 1/{G}")
    if n < 1:
        raise ArgumentError("order n must be at least 1")
    if not locality_ok(bmap.value, float(eps_q), bmap.is_integer):
        raise ArgumentError("scale too large for the cylinder method; use greedy_separated")
    if isinstance(bmap.arith, RationalArith):
        gap = eps_q / bmap.arith.beta ** (n - 1)
    else:
        gap = eps_q / Fraction(bmap.value) ** (n - 1)
    stride = _floor_frac(gap * G) + 1
    if bmap.is_integer or n == 1:
        # one circle segment; drop accepted points that wrap onto the first one
        total = -(-G // stride)
        last = (total - 1) * stride
        while total > 1 and Fraction(G - last, G) <= gap:
            total -= 1
            last -= stride
        return SeparatedCount(n, eps_q, Fraction(1, G), total, "cylinders")
    bounds = [Fraction(0)] + _cut_points(bmap, n - 2) + [Fraction(1)]
    total = 0
    for a, b in zip(bounds, bounds[1:]):
        m = math.ceil(b * G) - math.ceil(a * G)
        if m > 0:
            total += -(-m // stride)
    return SeparatedCount(n, eps_q, Fraction(1, G), total, "cylinders")


def _circle_gap(x: Fraction, y: Fraction) -> Fraction:
    d = abs(x - y) % 1
    return min(d, 1 - d)


def greedy_separated(trajectories: Sequence[Sequence], eps) -> list[int]:
    """Greedy packing over precomputed orbits ``trajectories[i] = (x_i, f x_i, ...)``.

    Returns the indices accepted. Comparison is exhaustive, in whatever number
    type the trajectories carry (``Fraction`` gives exact ties).
    """
    chosen: list[int] = []
    for i, t in enumerate(trajectories):
        if all(max(_circle_gap(a, b) for a, b in zip(t, trajectories[j])) > eps for j in chosen):
            chosen.append(i)
    return chosen


def is_separated(trajectories: Sequence[Sequence], eps) -> bool:
    return all(
        max(_circle_gap(a, b) for a, b in zip(trajectories[i], trajectories[j])) > eps
        for i in range(len(trajectories)) for j in range(i)
    )


def exact_trajectories(bmap: BetaMap, G: int, n: int) -> list[list[Fraction]]:
    """Orbits of length ``n`` of the grid points ``i/G`` under a rational beta map."""
    if not isinstance(bmap.arith, RationalArith):
        raise ArgumentError("exact trajectories need a rational beta")
    out = []
    for i in range(G):
        x = Fraction(i, G)
        row = []
        for _ in range(n):
            row.append(x)
            x = bmap.f(x)
        out.append(row)
    return out


def greedy_count_bruteforce(bmap: BetaMap, eps, n: int, G: int) -> int:
    return len(greedy_separated(exact_trajectories(bmap, G, n), Fraction(eps)))


def separated_entropy(bmap, eps, n_max: int, resolution=Fraction(1, 10**9),
                      window: tuple[int, int] | None = None, orbit: Callable | None = None) -> GrowthEstimate:
    """Growth rate of greedy ``(n, eps)``-separated set sizes, ``n = 1..n_max``.

    These are lower bounds on the maximal separated-set size, and the estimate
    is flagged ``lower_bound_only``. With a :class:`BetaMap` inside the
    locality regime the per-cylinder count is used; otherwise ``orbit(x, n)``
    (or the map's own exact iteration) feeds an exhaustive greedy packing on
    the grid, which must then be small.
    """
    G = _grid_size(resolution)
    if Fraction(eps) * G <= 4:
        raise ArgumentError(f"scale eps={float(eps)} is not above the grid resolution 1/{G}")
    counts = []
    fast = isinstance(bmap, BetaMap) and locality_ok(bmap.value, float(eps), bmap.is_integer)
    for n in range(1, n_max + 1):
        if fast:
            counts.append(separated_count(bmap, eps, n, resolution).count)
            continue
        if G > 5000:
            raise ArgumentError("exhaustive packing needs a grid of at most 5000 points")
        if orbit is None:
            if not isinstance(bmap, BetaMap):
                raise ArgumentError("pass an orbit function for maps other than BetaMap")
            traj = exact_trajectories(bmap, G, n)
        else:
            traj = [orbit(Fraction(i, G), n) for i in range(G)]
        counts.append(len(greedy_separated(traj, Fraction(eps))))
    est = growth_from_values(list(range(1, n_max + 1)), [math.log(c) for c in counts], counts, window,
                             label="separated")
    est.lower_bound_only = True
    return est


def identity_orbit(x, n: int) -> list:
    return [x] * n


def forward_nonexpansive_probe(bmap: BetaMap, x, eps, horizon: int) -> list[Fraction]:
    """Certified outer bounds on the diameter of ``{y : d(f^k y, f^k x) <= eps, k <= T}`` for ``T = 0..horizon``.

    While ``y`` stays in the continuity piece of ``x`` the displacement at time
    ``k`` is ``beta^k (y - x)``; crossing a piece boundary before time ``T``
    forces separation one step later. So the set sits inside
    ``|y - x| <= eps * beta^-T`` intersected with the piece windows of ``x``.
    All bounds use the lower end of ``beta`` and outward endpoints of ``f^k(x)``.
    """
    ar = bmap.arith
    eps = Fraction(eps)
    if not locality_ok(bmap.value, float(eps), bmap.is_integer):
        raise ArgumentError("scale too large for the displacement argument")
    beta_lo = ar.to_fraction_bounds(ar.beta)[0]
    lo, hi = -eps, eps
    out = [hi - lo]
    xk = bmap.point(x)
    scale = Fraction(1)
    for _ in range(horizon):
        if not bmap.is_integer:
            x_lo, x_hi = ar.to_fraction_bounds(xk)
            lo = max(lo, -x_hi / scale)
            hi = min(hi, (1 - x_lo) / scale)
        scale *= beta_lo
        lo = max(lo, -eps / scale)
        hi = min(hi, eps / scale)
        out.append(max(hi - lo, Fraction(0)))
        xk = bmap.f(xk)
        if isinstance(ar, IntervalArith):
            xk = Interval(max(xk.lo, Fraction(0)), min(xk.hi, Fraction(1)))
    return out
