"""Exact scalar, polynomial, rational-function and series arithmetic.

Everything in this package computes over the exact rationals
(`fractions.Fraction`); no operation ever rounds.  The classes here are the
substrate for the whole engine:

* ``Polynomial``       -- dense univariate polynomials, lowest degree first.
* ``RationalFunction`` -- reduced quotients of polynomials, monic denominator.
* ``LaurentSeries``    -- local expansions about a finite point or infinity,
                          with an explicit truncation order carried through
                          every operation.
* ``TruncatedSeries``  -- power series in a formal parameter, used by the
                          series-mode curve builder.

Expansions about infinity are stored as series in w = 1/z with the same type
(the ``center`` field is the ``INF`` sentinel), so residues at the point at
infinity go through the one code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union


class _Infinity:
    """Sentinel for the point at infinity on the z-sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = _Infinity()

Point = Union[Fraction, _Infinity]


class AlgebraError(ValueError):
    pass


class TruncationError(AlgebraError):
    """A series coefficient beyond the stored truncation order was requested."""


def as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return fraction_from_str(v)
    raise TypeError(f"cannot interpret {v!r} as an exact rational")


def fraction_to_str(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fraction_from_str(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def fraction_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a rational, or None if it is not a perfect square."""
    if q < 0:
        return None
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


# ----------------------------------------------------------------------------
# polynomials
# ----------------------------------------------------------------------------

class Polynomial:
    """Univariate polynomial, coefficients lowest degree first.

    Coefficients are normally ``Fraction``; the arithmetic is duck-typed so a
    polynomial over ``TruncatedSeries`` coefficients also works (used by the
    series-mode curve builder, which skips the division-based operations).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((Fraction(1),))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((as_fraction(c),))

    @classmethod
    def from_values(cls, values) -> "Polynomial":
        return cls(tuple(as_fraction(v) for v in values))

    # -- basic queries ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def leading(self):
        if not self.coeffs:
            raise AlgebraError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coefficient(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_poly(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (Fraction, int)):
            if not other:
                return Polynomial.zero()
            return Polynomial(tuple(c * other for c in self.coeffs))
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Polynomial.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise AlgebraError("negative polynomial power")
        result = Polynomial.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "Polynomial"):
        other = _coerce_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Polynomial.zero(), self
        quo = [Fraction(0)] * (dq + 1)
        lead = other.coeffs[-1]
        for k in range(dq, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Polynomial(quo), Polynomial(rem)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise AlgebraError("inexact polynomial division")
        return q

    # -- analysis ---------------------------------------------------------
    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def __call__(self, value):
        """Horner evaluation; value may be a Fraction, Polynomial,
        RationalFunction or TruncatedSeries."""
        if not self.coeffs:
            return Fraction(0)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * value + c
        return acc

    def shift(self, a) -> "Polynomial":
        """P(z + a)."""
        result = self(Polynomial((as_fraction(a), Fraction(1))))
        if isinstance(result, Fraction):
            return Polynomial((result,))
        return result

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Polynomial(tuple(c / lead for c in self.coeffs))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(fraction_to_str(c))
            elif k == 1:
                parts.append(f"{fraction_to_str(c)}*z")
            else:
                parts.append(f"{fraction_to_str(c)}*z^{k}")
        return "Poly(" + " + ".join(parts) + ")"


def _coerce_poly(v):
    if isinstance(v, Polynomial):
        return v
    if isinstance(v, (int, Fraction)):
        return Polynomial.constant(v)
    return NotImplemented


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero():
        a, b = b, a % b
        if not b.is_zero():
            b = b.monic()  # keeps intermediate coefficients small
    if a.is_zero():
        return a
    return a.monic()


def rational_roots(p: Polynomial):
    """All rational roots of p with multiplicities.

    Returns (roots, remainder): ``roots`` maps each rational root to its
    multiplicity, ``remainder`` is the (rational-root-free) cofactor left
    after deflation.
    """
    if p.is_zero():
        raise AlgebraError("zero polynomial has every root")
    roots: dict = {}
    # strip the root at 0
    cs = list(p.coeffs)
    k = 0
    while not cs[0]:
        cs.pop(0)
        k += 1
    if k:
        roots[Fraction(0)] = k
    p = Polynomial(cs)
    if p.degree == 0:
        return roots, p
    # clear denominators to integers
    den_lcm = 1
    for c in p.coeffs:
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    ints = [int(c * den_lcm) for c in p.coeffs]
    a0, an = abs(ints[0]), abs(ints[-1])
    candidates = set()
    for pnum in _divisors(a0):
        for qden in _divisors(an):
            candidates.add(Fraction(pnum, qden))
            candidates.add(Fraction(-pnum, qden))
    for cand in sorted(candidates):
        while p.degree >= 1 and not p(cand):
            roots[cand] = roots.get(cand, 0) + 1
            p = p.exact_div(Polynomial((-cand, Fraction(1))))
    return roots, p


def _divisors(n: int):
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


# ----------------------------------------------------------------------------
# rational functions
# ----------------------------------------------------------------------------

class RationalFunction:
    """Quotient of polynomials, reduced, denominator monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce: bool = True):
        num = _coerce_poly(num)
        den = Polynomial.one() if den is None else _coerce_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = Polynomial.zero(), Polynomial.one()
            return
        if reduce:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
            lead = den.leading
            if lead != 1:
                num = num * (1 / lead)
                den = den * (1 / lead)
        self.num, self.den = num, den

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls):
        return cls(Polynomial.zero())

    @classmethod
    def z(cls):
        return cls(Polynomial.x())

    @classmethod
    def constant(cls, c):
        return cls(Polynomial.constant(c))

    @classmethod
    def from_coeffs(cls, num, den):
        return cls(Polynomial.from_values(num), Polynomial.from_values(den))

    # -- ring operations -----------------------------------------------------
    def __add__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_rf(other) + (-self)

    def __mul__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce_rf(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction(self.den ** (-n), self.num ** (-n))
        return RationalFunction(self.num ** n, self.den ** n)

    # -- analysis --------------------------------------------------------------
    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den)

    def compose(self, inner: "RationalFunction") -> "RationalFunction":
        """self(inner(z)) as an exact rational function."""
        inner = _coerce_rf(inner)
        a = _poly_at_rf(self.num, inner)
        b = _poly_at_rf(self.den, inner)
        return a / b

    def eval_at(self, v: Fraction) -> Fraction:
        dv = self.den(v)
        if not dv:
            raise ZeroDivisionError(f"pole at z = {fraction_to_str(v)}")
        return self.num(v) / dv

    def value_at(self, p: Point):
        """Value at a point of the sphere; returns a Fraction or INF."""
        if p is INF:
            dn, dd = self.num.degree, self.den.degree
            if self.is_zero():
                return Fraction(0)
            if dn > dd:
                return INF
            if dn < dd:
                return Fraction(0)
            return self.num.leading / self.den.leading
        nv, dv = self.num(p), self.den(p)
        if dv:
            return nv / dv
        return INF  # reduced form: num(p) != 0 whenever den(p) == 0

    def pole_order_at(self, p: Point) -> int:
        if self.is_zero():
            return 0
        if p is INF:
            return max(self.num.degree - self.den.degree, 0)
        root = Polynomial((-as_fraction(p), Fraction(1)))
        order, d = 0, self.den
        while True:
            q, r = divmod(d, root)
            if not r.is_zero():
                return order
            order, d = order + 1, q

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den == Polynomial.one():
            return f"RF({self.num!r})"
        return f"RF({self.num!r} / {self.den!r})"


def _coerce_rf(v):
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, Polynomial):
        return RationalFunction(v, reduce=False)
    if isinstance(v, (int, Fraction)):
        return RationalFunction(Polynomial.constant(v), reduce=False)
    return NotImplemented


def _poly_at_rf(p: Polynomial, v: RationalFunction) -> RationalFunction:
    if not p.coeffs:
        return RationalFunction.zero()
    acc = RationalFunction.constant(p.coeffs[-1])
    for c in reversed(p.coeffs[:-1]):
        acc = acc * v + c
    return acc


# ----------------------------------------------------------------------------
# Laurent series
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentSeries:
    """Exact local expansion about ``center`` (a Fraction, or INF for 1/z).

    ``coeffs[i]`` is the coefficient of (z - center)^(lowest + i); about
    infinity it is the coefficient of z^-(lowest + i).  Coefficients are
    exact from ``lowest`` through ``truncation_order`` inclusive; reading
    beyond the truncation raises, reading below ``lowest`` returns 0.
    """

    center: object
    lowest: int
    coeffs: tuple

    @property
    def truncation_order(self) -> int:
        return self.lowest + len(self.coeffs) - 1

    def coefficient(self, k: int) -> Fraction:
        if k > self.truncation_order:
            raise TruncationError(
                f"order {k} beyond truncation {self.truncation_order}")
        if k < self.lowest:
            return Fraction(0)
        return self.coeffs[k - self.lowest]

    def valuation(self) -> Optional[int]:
        for i, c in enumerate(self.coeffs):
            if c:
                return self.lowest + i
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def residue(self) -> Fraction:
        if self.center is INF:
            raise AlgebraError("use residue_at_infinity for the infinite point")
        return self.coefficient(-1)

    # -- arithmetic (same center) ------------------------------------------
    def _check(self, other: "LaurentSeries"):
        if self.center is INF and other.center is INF:
            return
        if self.center != other.center:
            raise AlgebraError("series centers differ")

    def __add__(self, other: "LaurentSeries"):
        self._check(other)
        lo = min(self.lowest, other.lowest)
        hi = min(self.truncation_order, other.truncation_order)
        out = []
        for k in range(lo, hi + 1):
            a = self.coeffs[k - self.lowest] if self.lowest <= k <= self.truncation_order else Fraction(0)
            b = other.coeffs[k - other.lowest] if other.lowest <= k <= other.truncation_order else Fraction(0)
            out.append(a + b)
        return LaurentSeries(self.center, lo, tuple(out))

    def __neg__(self):
        return LaurentSeries(self.center, self.lowest, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LaurentSeries":
        return LaurentSeries(self.center, self.lowest, tuple(c * a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        lo = self.lowest + other.lowest
        hi = min(self.truncation_order + other.lowest,
                 other.truncation_order + self.lowest)
        n = hi - lo + 1
        if n <= 0:
            raise TruncationError("empty truncation window in series product")
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            jmax = min(len(other.coeffs), n - i)
            for j in range(jmax):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return LaurentSeries(self.center, lo, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("inverting the zero series")
        shift = v - self.lowest
        unit = self.coeffs[shift:]
        inv = _series_inverse(list(unit), len(unit))
        return LaurentSeries(self.center, -v, tuple(inv))

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        # identity carries the full relative precision of self
        result = LaurentSeries(self.center, 0,
                               tuple([Fraction(1)] + [Fraction(0)] * (len(self.coeffs) - 1)))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def truncate(self, order: int) -> "LaurentSeries":
        if order >= self.truncation_order:
            return self
        return LaurentSeries(self.center, self.lowest,
                             self.coeffs[:order - self.lowest + 1])

    def derivative(self) -> "LaurentSeries":
        if self.center is INF:
            raise AlgebraError("derivative not defined on 1/z-chart series")
        out = {}
        for i, c in enumerate(self.coeffs):
            k = self.lowest + i
            if k and c:
                out[k - 1] = k * c
        lo = self.lowest - 1
        hi = self.truncation_order - 1
        return LaurentSeries(self.center, lo,
                             tuple(out.get(k, Fraction(0)) for k in range(lo, hi + 1)))

    def integrate(self) -> "LaurentSeries":
        """Term-by-term primitive with constant 0; requires no 1/(z-a) term."""
        if self.center is INF:
            raise AlgebraError("integration not defined on 1/z-chart series")
        if self.lowest <= -1 and self.coefficient(-1):
            raise AlgebraError("series has a residue; primitive is not a Laurent series")
        out = {}
        for i, c in enumerate(self.coeffs):
            k = self.lowest + i
            if k != -1 and c:
                out[k + 1] = c / (k + 1)
        lo = self.lowest + 1
        hi = self.truncation_order + 1
        return LaurentSeries(self.center, lo,
                             tuple(out.get(k, Fraction(0)) for k in range(lo, hi + 1)))


def _series_inverse(unit: list, length: int) -> list:
    """Reciprocal of a power series with unit[0] != 0, to ``length`` terms."""
    c0 = unit[0]
    if not c0:
        raise ZeroDivisionError("series has zero leading coefficient")
    inv = [Fraction(0)] * length
    inv[0] = 1 / c0
    for k in range(1, length):
        s = Fraction(0)
        for j in range(1, min(k, len(unit) - 1) + 1):
            s += unit[j] * inv[k - j]
        inv[k] = -s / c0
    return inv


def _poly_taylor(p: Polynomial, a: Fraction, nterms: int) -> list:
    """First nterms Taylor coefficients of p about a (exact, zero-padded)."""
    shifted = p.shift(a)
    cs = list(shifted.coeffs) + [Fraction(0)] * nterms
    return cs[:nterms]


def laurent_expand(f: RationalFunction, a: Point, order: int) -> LaurentSeries:
    """Exact Laurent expansion of f about a, through (z-a)^order.

    About infinity the result is a series in w = 1/z and ``order`` counts
    powers of w.  Raises if ``order`` lies below the leading term of the
    expansion (nothing could be represented).
    """
    if f.is_zero():
        return LaurentSeries(a, order, (Fraction(0),))
    if a is INF:
        dn, dd = f.num.degree, f.den.degree
        rev_num = Polynomial(tuple(reversed(f.num.coeffs)))
        rev_den = Polynomial(tuple(reversed(f.den.coeffs)))
        lowest = dd - dn
        if order < lowest:
            raise AlgebraError("requested order below the pole order")
        nterms = order - lowest + 1
        num_c = list(rev_num.coeffs) + [Fraction(0)] * nterms
        inv_d = _series_inverse(list(rev_den.coeffs), nterms)
        out = [Fraction(0)] * nterms
        for i in range(nterms):
            s = Fraction(0)
            for j in range(i + 1):
                s += num_c[j] * inv_d[i - j]
            out[i] = s
        return LaurentSeries(INF, lowest, tuple(out))
    a = as_fraction(a)
    num_u = _poly_taylor(f.num, a, f.num.degree + 1 if f.num.degree >= 0 else 1)
    den_u = _poly_taylor(f.den, a, f.den.degree + 1)
    # strip the u-power from the denominator
    v = 0
    while not den_u[0]:
        den_u.pop(0)
        v += 1
    lowest = -v
    nz = 0
    while nz < len(num_u) and not num_u[nz]:
        nz += 1
    lowest += nz  # leading order of the expansion
    if order < lowest:
        raise AlgebraError("requested order below the pole order")
    nterms = order + v + 1  # series terms of num * den^-1 needed
    num_c = num_u + [Fraction(0)] * max(0, nterms - len(num_u))
    inv_d = _series_inverse(den_u, nterms)
    out = [Fraction(0)] * nterms
    for i in range(nterms):
        s = Fraction(0)
        jmax = min(i, len(num_u) - 1)
        for j in range(jmax + 1):
            if num_c[j]:
                s += num_c[j] * inv_d[i - j]
        out[i] = s
    return LaurentSeries(a, -v, tuple(out))


def residue_at(f: RationalFunction, a: Fraction) -> Fraction:
    """Coefficient of (z-a)^-1 in the expansion of f about the finite point a."""
    a = as_fraction(a)
    if f.is_zero() or f.den(a):
        return Fraction(0)
    return laurent_expand(f, a, 0).coefficient(-1)


def residue_at_infinity(f: RationalFunction) -> Fraction:
    """Res_{z->inf} f(z) dz = -[z^-1] f."""
    if f.is_zero():
        return Fraction(0)
    series = laurent_expand(f, INF, 1)
    return -series.coefficient(1)


def residue(f: RationalFunction, p: Point) -> Fraction:
    if p is INF:
        return residue_at_infinity(f)
    return residue_at(f, p)


# ----------------------------------------------------------------------------
# partial fractions
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PoleDecomposition:
    """f = sum c_{a,k} / (z-a)^k with exact coefficients."""

    terms: tuple  # tuple of ((Fraction a, int k), Fraction coeff), sorted

    def coefficient(self, a: Fraction, k: int) -> Fraction:
        for (pa, pk), c in self.terms:
            if pa == a and pk == k:
                return c
        return Fraction(0)

    def reconstruct(self) -> RationalFunction:
        total = RationalFunction.zero()
        z = Polynomial.x()
        for (a, k), c in self.terms:
            total = total + RationalFunction(Polynomial.constant(c),
                                             (z - Polynomial.constant(a)) ** k)
        return total


def partial_fractions(f: RationalFunction, poles) -> PoleDecomposition:
    """Decompose f over the declared rational poles.

    Requires deg num < deg den and every root of the denominator to appear in
    ``poles``; both conditions are verified exactly.
    """
    poles = [as_fraction(p) for p in poles]
    if f.is_zero():
        return PoleDecomposition(())
    if f.num.degree >= f.den.degree:
        raise AlgebraError("polynomial part nonzero (deg num >= deg den)")
    den = f.den
    mult = {}
    for a in poles:
        root = Polynomial((-a, Fraction(1)))
        m = 0
        while True:
            q, r = divmod(den, root)
            if not r.is_zero():
                break
            den, m = q, m + 1
        if m:
            mult[a] = m
    if den.degree > 0:
        raise AlgebraError("denominator has a pole outside the declared list")
    terms = []
    for a in sorted(mult):
        series = laurent_expand(f, a, -1)
        for k in range(1, mult[a] + 1):
            c = series.coefficient(-k)
            if c:
                terms.append(((a, k), c))
    terms.sort(key=lambda item: (item[0][0], item[0][1]))
    return PoleDecomposition(tuple(terms))


# ----------------------------------------------------------------------------
# truncated power series in a formal parameter
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in a named formal parameter, exact through ``order``.

    ``coeffs`` has length order+1.  Arithmetic between two series truncates
    to the smaller order; division requires an invertible constant term.
    """

    param: str
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, order: int, param: str = "s") -> "TruncatedSeries":
        return cls(param, (as_fraction(value),) + (Fraction(0),) * order)

    @classmethod
    def variable(cls, order: int, param: str = "s") -> "TruncatedSeries":
        if order < 1:
            raise AlgebraError("order too small to hold the variable")
        return cls(param, (Fraction(0), Fraction(1)) + (Fraction(0),) * (order - 1))

    @classmethod
    def monomial(cls, power: int, order: int, param: str = "s") -> "TruncatedSeries":
        if power > order:
            raise AlgebraError("monomial beyond truncation order")
        c = [Fraction(0)] * (order + 1)
        c[power] = Fraction(1)
        return cls(param, tuple(c))

    def coefficient(self, k: int) -> Fraction:
        if k > self.order:
            raise TruncationError(f"order {k} beyond truncation {self.order}")
        return self.coeffs[k]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def _promote(self, other):
        if isinstance(other, TruncatedSeries):
            if other.param != self.param:
                raise AlgebraError("mixing series in different parameters")
            return other
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries.constant(other, self.order, self.param)
        return None

    def __add__(self, other):
        other = self._promote(other)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        return TruncatedSeries(self.param,
                               tuple(self.coeffs[k] + other.coeffs[k] for k in range(n + 1)))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.param, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._promote(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._promote(other)
        if other is None:
            return NotImplemented
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[:n + 1]):
            if not a:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return TruncatedSeries(self.param, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._promote(other)
        if other is None:
            return NotImplemented
        if not other.coeffs[0]:
            raise ZeroDivisionError("series division needs an invertible constant term")
        n = min(self.order, other.order)
        inv = _series_inverse(list(other.coeffs[:n + 1]), n + 1)
        return self * TruncatedSeries(self.param, tuple(inv))

    def __rtruediv__(self, other):
        other = self._promote(other)
        return other / self

    def __pow__(self, n: int):
        result = TruncatedSeries.constant(1, self.order, self.param)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shifted(self, power: int) -> "TruncatedSeries":
        """Multiply by param^power (order unchanged; overflow truncated)."""
        out = [Fraction(0)] * (self.order + 1)
        for k, c in enumerate(self.coeffs):
            if c and k + power <= self.order:
                out[k + power] = c
        return TruncatedSeries(self.param, tuple(out))

    def sqrt(self) -> "TruncatedSeries":
        r0 = fraction_sqrt(self.coeffs[0])
        if r0 is None or not r0:
            raise AlgebraError("series square root needs a nonzero rational-square constant term")
        y = TruncatedSeries.constant(r0, self.order, self.param)
        half = Fraction(1, 2)
        for _ in range(self.order.bit_length() + 1):
            y = (y + self / y) * half
        assert (y * y - self).is_zero()
        return y

    def truncated(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self.param, self.coeffs[:order + 1])

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return (self.param == other.param
                and self.coeffs[:n + 1] == other.coeffs[:n + 1])

    def __hash__(self):
        return hash((self.param, self.coeffs))

    def __repr__(self):
        parts = [f"{fraction_to_str(c)}*{self.param}^{k}"
                 for k, c in enumerate(self.coeffs) if c]
        body = " + ".join(parts) if parts else "0"
        return f"Series({body}; O({self.param}^{self.order + 1}))"
