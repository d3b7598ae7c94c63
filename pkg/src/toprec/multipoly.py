"""Sparse multivariate polynomials over the rationals.

A polynomial in n variables is a dict mapping exponent tuples (one entry per
variable) to Fraction coefficients; zero-coefficient monomials are never
stored.  Just enough structure for the chain determinants and the saddle
elimination: ring arithmetic, substitution and small determinants.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import AlgebraError, Polynomial, as_fraction


class MultiPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            if c:
                clean[tuple(exps)] = c
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> "MultiPoly":
        c = as_fraction(c)
        return cls(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise AlgebraError("variable-count mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.nvars,
                             {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= as_fraction(x) ** k
            total += v
        return total

    def substitute(self, values) -> "MultiPoly":
        """Substitute values[i] (MultiPoly or scalar or None=keep) per variable."""
        subs = []
        for i, v in enumerate(values):
            if v is None:
                subs.append(MultiPoly.var(self.nvars, i))
            elif isinstance(v, MultiPoly):
                subs.append(v)
            else:
                subs.append(MultiPoly.const(self.nvars, v))
        total = MultiPoly.zero(self.nvars)
        for e, c in self.terms.items():
            term = MultiPoly.const(self.nvars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * subs[i] ** k
            total = total + term
        return total

    def to_univariate(self, i: int) -> Polynomial:
        """Convert to a Polynomial in variable i; all others must be absent."""
        coeffs = [Fraction(0)] * (self.degree_in(i) + 1 if self.terms else 0)
        for e, c in self.terms.items():
            if any(k for j, k in enumerate(e) if j != i):
                raise AlgebraError("polynomial involves other variables")
            coeffs[e[i]] += c
        return Polynomial(coeffs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "MPoly(0)"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(f"x{i + 1}^{k}" if k > 1 else f"x{i + 1}"
                            for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return "MPoly(" + " + ".join(parts) + ")"


def from_univariate(p: Polynomial, nvars: int, i: int) -> MultiPoly:
    terms = {}
    for k, c in enumerate(p.coeffs):
        if c:
            e = [0] * nvars
            e[i] = k
            terms[tuple(e)] = c
    return MultiPoly(nvars, terms)


def determinant(matrix) -> MultiPoly:
    """Determinant of a small square matrix of MultiPoly, by cofactor expansion."""
    n = len(matrix)
    if n == 0:
        raise AlgebraError("empty matrix")
    if n == 1:
        return matrix[0][0]
    nvars = matrix[0][0].nvars
    total = MultiPoly.zero(nvars)
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        cof = determinant(minor)
        if j % 2:
            cof = -cof
        total = total + entry * cof
    return total


def poly_matrix_determinant(matrix) -> Polynomial:
    """Determinant of a small square matrix of univariate Polynomial."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = Polynomial.zero()
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        cof = poly_matrix_determinant(minor)
        if j % 2:
            cof = -cof
        total = total + entry * cof
    return total
