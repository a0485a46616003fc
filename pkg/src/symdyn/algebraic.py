"""Certified real algebraic numbers and Perron-Frobenius data.

Growth constants of shift spaces (Perron roots of integer matrices, roots of
gap-shift series) are algebraic. :class:`AlgebraicReal` keeps such a number
as an irreducible integer polynomial plus an isolating rational interval,
refined on demand, so comparisons against integers are decided exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
import sympy
from scipy.sparse.csgraph import connected_components

from .errors import ArgumentError, ConstructionError

_X = sympy.Symbol("x")


def _frac(q) -> Fraction:
    q = sympy.Rational(q)
    return Fraction(int(q.p), int(q.q))


@dataclass
class AlgebraicReal:
    """A real root of an irreducible integer polynomial, isolated by ``[lo, hi]``."""

    poly: sympy.Poly
    lo: Fraction
    hi: Fraction

    @classmethod
    def rational(cls, value) -> "AlgebraicReal":
        q = Fraction(value)
        poly = sympy.Poly(q.denominator * _X - q.numerator, _X)
        return cls(poly, q, q)

    @classmethod
    def largest_root(cls, poly) -> "AlgebraicReal":
        """Largest real root of ``poly`` (a sympy Poly/expression in ``x`` or a coefficient list, highest first)."""
        if isinstance(poly, (list, tuple)):
            poly = sympy.Poly([int(c) for c in poly], _X)
        elif not isinstance(poly, sympy.Poly):
            poly = sympy.Poly(poly, _X)
        best: AlgebraicReal | None = None
        for factor, _ in sympy.factor_list(poly)[1]:
            if factor.degree() == 0:
                continue
            ivs = factor.intervals()
            if not ivs:
                continue
            (a, b), _ = ivs[-1]
            cand = cls(sympy.Poly(factor, _X), _frac(a), _frac(b))
            if best is None or cand > best:
                best = cand
        if best is None:
            raise ArgumentError("polynomial has no real root")
        return best

    @property
    def is_rational(self) -> bool:
        return self.poly.degree() == 1

    @property
    def exact(self) -> Fraction | None:
        if self.is_rational:
            c1, c0 = self.poly.all_coeffs()
            return Fraction(-int(c0), int(c1))
        return None

    def bounds(self, eps: Fraction | float = Fraction(1, 10**30)) -> tuple[Fraction, Fraction]:
        """Rational ``lo <= value <= hi`` with ``hi - lo <= eps`` (``lo == hi`` when rational)."""
        q = self.exact
        if q is not None:
            return q, q
        eps = Fraction(eps)
        if self.hi - self.lo > eps:
            a, b = self.poly.refine_root(sympy.Rational(self.lo.numerator, self.lo.denominator),
                                         sympy.Rational(self.hi.numerator, self.hi.denominator),
                                         eps=sympy.Rational(eps.numerator, eps.denominator))
            self.lo, self.hi = _frac(a), _frac(b)
        return self.lo, self.hi

    def mp(self, dps: int = 50) -> mpmath.mpf:
        lo, hi = self.bounds(Fraction(1, 10 ** (dps + 5)))
        with mpmath.workdps(dps + 10):
            return (mpmath.mpf(lo.numerator) / lo.denominator + mpmath.mpf(hi.numerator) / hi.denominator) / 2

    def __float__(self) -> float:
        return float(self.mp(30))

    def log(self) -> float:
        with mpmath.workdps(40):
            return float(mpmath.log(self.mp(35)))

    def __gt__(self, other: "AlgebraicReal") -> bool:
        if sympy.Poly(self.poly, _X) == sympy.Poly(other.poly, _X):
            # same irreducible polynomial: isolating intervals of the same root overlap
            if self.lo <= other.hi and other.lo <= self.hi:
                return False
        eps = Fraction(1, 10)
        for _ in range(400):
            a_lo, a_hi = self.bounds(eps)
            b_lo, b_hi = other.bounds(eps)
            if a_lo > b_hi:
                return True
            if a_hi < b_lo:
                return False
            eps /= 1000
        raise ArgumentError("could not separate algebraic numbers")

    def compare_power(self, count: int, n: int, scale: Fraction = Fraction(1)) -> int:
        """Exact sign of ``count - scale * value**n`` (-1, 0, +1)."""
        q = self.exact
        if q is not None:
            diff = Fraction(count) - scale * q**n
            return (diff > 0) - (diff < 0)
        eps = Fraction(1, 10**12)
        for _ in range(200):
            lo, hi = self.bounds(eps)
            if count > scale * hi**n:
                return 1
            if count < scale * lo**n:
                return -1
            eps /= 10**6
        raise ArgumentError("comparison did not terminate")  # pragma: no cover

    def __repr__(self) -> str:
        return f"AlgebraicReal({self.poly.as_expr()} ~ {float(self):.12g})"


def as_matrix(A) -> np.ndarray:
    M = np.asarray(A)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {M.shape}")
    return M


def is_irreducible(A) -> bool:
    M = as_matrix(A)
    if M.shape[0] == 0:
        return False
    n_comp, _ = connected_components((M != 0).astype(np.int8), directed=True, connection="strong")
    if n_comp != 1:
        return False
    # a single vertex without a loop is "strongly connected" but carries no cycle
    return bool(M.shape[0] > 1 or M[0, 0] != 0)


def period(A) -> int:
    """Period of an irreducible nonnegative matrix (gcd of cycle lengths)."""
    M = (as_matrix(A) != 0)
    n = M.shape[0]
    level = {0: 0}
    frontier = [0]
    g = 0
    while frontier:
        nxt = []
        for i in frontier:
            for j in np.flatnonzero(M[i]):
                j = int(j)
                if j not in level:
                    level[j] = level[i] + 1
                    nxt.append(j)
                else:
                    g = math.gcd(g, level[i] + 1 - level[j])
        frontier = nxt
    return g if g else 0


@dataclass
class PerronData:
    value: float
    right: np.ndarray
    left: np.ndarray


def perron_data(A) -> PerronData:
    """Perron root with positive left/right eigenvectors of an irreducible nonnegative matrix."""
    M = np.asarray(as_matrix(A), dtype=float)
    if not is_irreducible(M):
        raise ConstructionError("matrix is reducible; Perron data is not unique")
    n = M.shape[0]
    # I + M is primitive with the same Perron vectors, which avoids periodic ties
    B = M + np.eye(n)
    vals, vecs = np.linalg.eig(B)
    k = int(np.argmax(vals.real))
    r = np.abs(vecs[:, k].real)
    vals_l, vecs_l = np.linalg.eig(B.T)
    kl = int(np.argmax(vals_l.real))
    l = np.abs(vecs_l[:, kl].real)
    lam = float(vals[k].real) - 1.0
    r = r / r.sum()
    l = l / (l @ r)
    return PerronData(lam, r, l)


def perron_root(A) -> AlgebraicReal:
    """Exact Perron root of an integer matrix, as a certified algebraic number."""
    M = as_matrix(A)
    if not np.all(np.equal(np.mod(M, 1), 0)):
        raise ArgumentError("exact Perron root needs an integer matrix")
    sm = sympy.Matrix(M.astype(int).tolist())
    return AlgebraicReal.largest_root(sympy.Poly(sm.charpoly(_X).as_expr(), _X))


def gap_series_root(gaps: Sequence[int]) -> AlgebraicReal:
    """Growth constant of the S-gap shift for finite ``S``: root of ``sum_{s in S} x^-(s+1) = 1``."""
    gaps = sorted(set(int(s) for s in gaps))
    if not gaps:
        raise ArgumentError("empty gap set")
    top = gaps[-1] + 1
    # x^top - sum_s x^(top - s - 1) = 0
    coeffs = [0] * (top + 1)
    coeffs[0] = 1
    for s in gaps:
        coeffs[s + 1] -= 1
    return AlgebraicReal.largest_root(coeffs)
