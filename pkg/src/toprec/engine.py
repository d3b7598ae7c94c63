"""Residue recursion on a genus-0 spectral curve.

Computes the correlator hierarchy omega_n^(h) and the free energies F^(h)
by summing residues at the branch points, with the recursion kernel

    K(z, z') = dS_{z',sigma(z')}(z) / (2 (y(z') - y(sigma(z'))) dx(z')),
    dS_{z',sigma(z')}(z) = (1/(z - z') - 1/(z - sigma(z'))) dz.

Sign convention: DS_ORIENTATION below fixes the orientation of dS (residue
+1 at z' and -1 at sigma(z')).  Together with omega_1^(0) = +y dx and the
normalization y ~ +t/x at the physical pole, this is the unique choice under
which the Gaussian curve reproduces the Catalan and map-counting moments of
the Wick oracle with positive sign; it also yields the closed forms
omega_3^(0) = -(1/2) prod dz_i/z_i^2 and omega_1^(1) = -(1/16) dz/z^4 on the
curve x = z^2, y = z.

Representation: for 2h + n - 2 >= 1 the correlator is a finite sum

    omega_n^(h) = sum_T c_T prod_i dz_i / (z_i - a_{j_i})^{k_i},

stored as a map from slot tuples ((branch_index, order), ...) to exact
rational coefficients.  Poles occur only at branch points and only with
order >= 2, so residue-freeness is structural (and still re-checked).
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (INF, AlgebraError, LaurentSeries, Polynomial,
                      RationalFunction, TruncationError, as_fraction,
                      fraction_from_str, fraction_to_str, laurent_expand,
                      rational_roots, residue)
from .curve import (CurveValidationError, SpectralCurve, curve_hash,
                    primitive_phi_series)

#: Orientation of the kernel numerator dS; +1 means residue +1 at z'.
#: Pinned by the Gaussian/Catalan acceptance checks (see module docstring).
DS_ORIENTATION = 1


class EngineError(ValueError):
    """Precondition or computation failure inside the engine."""


SlotKey = Tuple[Tuple[int, int], ...]


class Multidifferential:
    """One term of the correlator hierarchy.

    ``kind`` is "ydx" for omega_1^(0) (stored as the density y(z) x'(z) of a
    differential in dz), "bergman" for omega_2^(0), and "tensor" otherwise.
    """

    __slots__ = ("h", "n", "kind", "terms", "density")

    def __init__(self, h: int, n: int, kind: str,
                 terms: Optional[Dict[SlotKey, Fraction]] = None,
                 density: Optional[RationalFunction] = None):
        self.h = h
        self.n = n
        self.kind = kind
        self.terms = dict(terms or {})
        self.density = density

    def max_first_order(self) -> int:
        orders = [key[0][1] for key in self.terms]
        return max(orders) if orders else 0

    def max_order(self) -> int:
        orders = [entry[1] for key in self.terms for entry in key]
        return max(orders) if orders else 0

    def is_permutation_symmetric(self) -> bool:
        if self.kind != "tensor" or self.n == 1:
            return True
        import itertools
        for key, c in self.terms.items():
            for perm in itertools.permutations(key):
                if self.terms.get(perm, Fraction(0)) != c:
                    return False
        return True

    def asymmetric_witness(self):
        import itertools
        for key, c in self.terms.items():
            for perm in itertools.permutations(key):
                if self.terms.get(perm, Fraction(0)) != c:
                    return key, perm
        return None

    def residue_free(self) -> bool:
        return all(entry[1] >= 2 for key in self.terms for entry in key)

    def to_json(self, curve: SpectralCurve) -> dict:
        doc = {"h": self.h, "n": self.n, "kind": self.kind}
        if self.kind == "tensor":
            rows = []
            for key in sorted(self.terms,
                              key=lambda k: [(curve.branch_points[b], o) for b, o in k]):
                rows.append({
                    "slots": [{"branch": fraction_to_str(curve.branch_points[b]),
                               "order": o} for b, o in key],
                    "coeff": fraction_to_str(self.terms[key]),
                })
            doc["terms"] = rows
        elif self.kind == "ydx":
            doc["density"] = {
                "num": [fraction_to_str(c) for c in self.density.num.coeffs],
                "den": [fraction_to_str(c) for c in self.density.den.coeffs],
            }
        return doc

    @classmethod
    def from_json(cls, doc: dict, curve: SpectralCurve) -> "Multidifferential":
        kind = doc["kind"]
        if kind == "tensor":
            index = {a: i for i, a in enumerate(curve.branch_points)}
            terms = {}
            for row in doc["terms"]:
                key = tuple((index[fraction_from_str(s["branch"])], int(s["order"]))
                            for s in row["slots"])
                terms[key] = fraction_from_str(row["coeff"])
            return cls(doc["h"], doc["n"], "tensor", terms)
        if kind == "ydx":
            density = RationalFunction(
                Polynomial.from_values(doc["density"]["num"]),
                Polynomial.from_values(doc["density"]["den"]))
            return cls(0, 1, "ydx", density=density)
        return cls(0, 2, "bergman")


@dataclass
class LoopResidual:
    """Outcome of the loop-equation check for one (h, n)."""

    h: int
    n: int
    is_polynomial: bool
    polynomial: Optional[Polynomial]
    degree_bound: int
    offending_poles: list
    test_points: tuple


@dataclass
class PhiOperatorReport:
    h: int
    n: int
    passed: bool
    factor: Fraction
    discrepancy: dict = field(default_factory=dict)


# ----------------------------------------------------------------------------
# per-branch local expansion data
# ----------------------------------------------------------------------------

class _BranchLocal:
    """Laurent data at one branch point, exact through order ``order``."""

    def __init__(self, engine: "Engine", bi: int, order: int):
        curve = engine.curve
        a = curve.branch_points[bi]
        self.bi = bi
        self.a = a
        self.order = order
        sig = laurent_expand(curve.sigma, a, order + 2)
        # s(u) = sigma(a+u) - a, valuation 1, s'(0) = -1 at a simple branch point
        s_coeffs = [sig.coefficient(k) for k in range(1, order + 3)]
        if sig.coefficient(0) != a:
            raise CurveValidationError("sigma-fixes-branch-points",
                                       f"sigma({a}) != {a}")
        if s_coeffs[0] != -1:
            raise CurveValidationError(
                "local-conjugation", f"sigma'({a}) = {s_coeffs[0]}, expected -1")
        self.s = LaurentSeries(a, 1, tuple(s_coeffs))
        self.sprime = self.s.derivative()
        pref = laurent_expand(engine.inv_delta, a, order)
        if pref.valuation() != -2:
            raise CurveValidationError(
                "kernel-pole-order",
                f"kernel factor has pole order {-(pref.valuation() or 0)} "
                f"at {a} (expected 2)")
        self.prefactor = pref.scale(Fraction(1, 2) * DS_ORIENTATION)
        self._s_pows: Dict[int, LaurentSeries] = {1: self.s}
        self._d_tables: Dict[int, LaurentSeries] = {}
        self._direct: Dict[Tuple[int, int], LaurentSeries] = {}
        self._sigma_evals: Dict[Tuple[int, int], LaurentSeries] = {}

    def s_pow(self, m: int) -> LaurentSeries:
        if m not in self._s_pows:
            self._s_pows[m] = self.s_pow(m - 1) * self.s
        return self._s_pows[m]

    def d_table(self, m: int) -> LaurentSeries:
        """u^m - s(u)^m, the coefficient series of (z-a)^-(m+1) in dS."""
        if m not in self._d_tables:
            if m > self.order:
                raise TruncationError(f"d-table order {m} beyond {self.order}")
            um = LaurentSeries(self.a, m,
                               (Fraction(1),) + (Fraction(0),) * (self.order - m))
            self._d_tables[m] = um - self.s_pow(m)
        return self._d_tables[m]

    def eval_direct(self, entry: Tuple[int, int], branch_points) -> LaurentSeries:
        """Expansion of (z' - b)^-k at z' = a + u."""
        if entry not in self._direct:
            bi2, k = entry
            b = branch_points[bi2]
            if bi2 == self.bi:
                ser = LaurentSeries(self.a, -k,
                                    (Fraction(1),) + (Fraction(0),) * (self.order + k))
            else:
                base = LaurentSeries(self.a, 0,
                                     (self.a - b, Fraction(1))
                                     + (Fraction(0),) * self.order)
                ser = base ** (-k)
            self._direct[entry] = ser
        return self._direct[entry]

    def eval_sigma(self, entry: Tuple[int, int], branch_points) -> LaurentSeries:
        """Expansion of (sigma(z') - b)^-k d sigma / du at z' = a + u."""
        if entry not in self._sigma_evals:
            bi2, k = entry
            b = branch_points[bi2]
            if bi2 == self.bi:
                ser = (self.s ** (-k)) * self.sprime
            else:
                shifted = self.s + LaurentSeries(
                    self.a, 0, (self.a - b,) + (Fraction(0),) * (self.order + 1))
                ser = (shifted ** (-k)) * self.sprime
            self._sigma_evals[entry] = ser
        return self._sigma_evals[entry]

    def bergman_diagonal(self) -> LaurentSeries:
        """B(z', sigma(z')) / (du)^2 = s'(u) / (u - s(u))^2."""
        u = LaurentSeries(self.a, 1,
                          (Fraction(1),) + (Fraction(0),) * (self.order + 1))
        return self.sprime * ((u - self.s) ** (-2))


# ----------------------------------------------------------------------------
# the engine
# ----------------------------------------------------------------------------

class Engine:
    """Memoized residue recursion over one validated exact curve.

    The memo table is the only shared state; a lock makes each (h, n) entry
    get computed exactly once, after which the result is immutable.
    """

    def __init__(self, curve: SpectralCurve, cache_dir: Optional[str] = None):
        if not curve.exact:
            raise EngineError("the recursion engine needs exact rational curve data")
        if not curve.branch_points:
            raise EngineError("curve has no branch points")
        self.curve = curve
        self.xp = curve.x.derivative()
        y_sigma = curve.y.compose(curve.sigma)
        delta = (curve.y - y_sigma) * self.xp
        if delta.is_zero():
            raise EngineError("(y - y o sigma) dx vanishes identically")
        self.inv_delta = RationalFunction.constant(1) / delta
        self._memo: Dict[Tuple[int, int], Multidifferential] = {}
        self._lock = threading.RLock()
        self._locals: Dict[int, _BranchLocal] = {}
        self._phi: Dict[Tuple[int, int], LaurentSeries] = {}
        self._moments: Dict[Tuple[int, int, int], Fraction] = {}
        self._xpows: List[RationalFunction] = [RationalFunction.constant(1)]
        self._hash = curve_hash(curve)
        self.cache_dir = cache_dir
        if cache_dir:
            self._load_cache()

    # -- base cases and dispatch ------------------------------------------
    def omega(self, h: int, n: int) -> Multidifferential:
        if h < 0 or n < 1:
            raise EngineError(f"omega({h}, {n}) is outside the hierarchy")
        if (h, n) == (0, 1):
            return Multidifferential(0, 1, "ydx",
                                     density=self.curve.y * self.xp)
        if (h, n) == (0, 2):
            return Multidifferential(0, 2, "bergman")
        with self._lock:
            if (h, n) not in self._memo:
                self._memo[(h, n)] = self._tensor(h, n)
                if self.cache_dir:
                    self._save_cache()
            return self._memo[(h, n)]

    # -- the recursion -----------------------------------------------------
    def _tensor(self, h: int, n: int) -> Multidifferential:
        nj = n - 1
        sources = []
        if h >= 1:
            sources.append(("diag", self.omega(h - 1, nj + 2), None, None))
        for j in range(h + 1):
            for I in _subsets(nj):
                if (j, len(I)) in ((0, 0), (h, nj)):
                    continue
                rest = tuple(p for p in range(nj) if p not in I)
                a_md = self.omega(j, len(I) + 1)
                b_md = self.omega(h - j, nj - len(I) + 1)
                sources.append(("pair", (a_md, I), (b_md, rest), None))
        need = self._estimate_order(sources)
        terms: Dict[SlotKey, Fraction] = {}
        for bi in range(len(self.curve.branch_points)):
            while True:
                staged: Dict[SlotKey, Fraction] = {}
                try:
                    self._accumulate(staged, bi, nj, sources, need)
                    break
                except TruncationError:
                    need *= 2
                    self._locals.pop(bi, None)
            for k, c in staged.items():
                terms[k] = terms.get(k, Fraction(0)) + c
        terms = {k: c for k, c in terms.items() if c}
        md = Multidifferential(h, n, "tensor", terms)
        if not md.residue_free():
            raise EngineError(f"omega({h},{n}) acquired a first-order pole")
        return md

    def _estimate_order(self, sources) -> int:
        worst = 4
        for src in sources:
            if src[0] == "diag":
                md = src[1]
                if md.kind == "bergman":
                    worst = max(worst, 4)
                else:
                    for key in md.terms:
                        worst = max(worst, key[0][1] + key[1][1] + 2)
            else:
                (a_md, _), (b_md, _) = src[1], src[2]
                pa = 2 if a_md.kind == "bergman" else a_md.max_first_order()
                pb = 2 if b_md.kind == "bergman" else b_md.max_first_order()
                worst = max(worst, pa + pb + 2)
        return worst + 6

    def _local(self, bi: int, need: int) -> _BranchLocal:
        loc = self._locals.get(bi)
        if loc is None or loc.order < need:
            loc = _BranchLocal(self, bi, need)
            self._locals[bi] = loc
        return loc

    def _accumulate(self, terms, bi, nj, sources, need):
        loc = self._local(bi, need)
        bps = self.curve.branch_points
        for src in sources:
            if src[0] == "diag":
                groups_a = self._diag_groups(loc, src[1], bps)
                self._reduce_groups(terms, loc, bi, nj, groups_a)
            else:
                a_md, I = src[1]
                b_md, rest = src[2]
                pa = self._side_max_pole(a_md, bi)
                pb = self._side_max_pole(b_md, bi)
                ga = self._side_groups(loc, a_md, I, bps, direct=True,
                                       partner_pole=pb)
                gb = self._side_groups(loc, b_md, rest, bps, direct=False,
                                       partner_pole=pa)
                self._reduce_pairs(terms, loc, bi, nj, ga, I, gb, rest)

    def _side_max_pole(self, md, bi) -> int:
        if md.kind == "bergman":
            return 0
        return max((key[0][1] for key in md.terms if key[0][0] == bi),
                   default=0)

    def _diag_groups(self, loc, md, bps):
        """Groups for omega_{m}^{(h-1)}(z', sigma(z'), J...)."""
        groups = []
        if md.kind == "bergman":
            groups.append((loc.bergman_diagonal(), [((), Fraction(1))]))
            return groups
        by_pair: Dict[Tuple, List] = {}
        for key, c in md.terms.items():
            by_pair.setdefault((key[0], key[1]), []).append((key[2:], c))
        for (e0, e1), members in sorted(by_pair.items()):
            ser = loc.eval_direct(e0, bps) * loc.eval_sigma(e1, bps)
            groups.append((ser, members))
        return groups

    def _side_groups(self, loc, md, positions, bps, direct, partner_pole):
        """Groups (series, members) for one factor of the quadratic bracket.

        ``positions`` are the target slots this factor's symbolic arguments
        occupy.  For the Bergman factor the slot entry depends on the series
        order m, so one group per m is produced, bounded by the partner's
        pole order (higher m cannot reach the residue).
        """
        groups = []
        if md.kind == "bergman":
            mmax = partner_pole  # pole of P * partner is 2 + partner_pole
            if mmax > loc.order:
                raise TruncationError("bergman order beyond local truncation")
            for m in range(mmax + 1):
                if direct:
                    ser = LaurentSeries(loc.a, m, (Fraction(m + 1),)
                                        + (Fraction(0),) * (loc.order - m))
                else:
                    base = loc.sprime if m == 0 else loc.s_pow(m) * loc.sprime
                    ser = base.scale(Fraction(m + 1))
                groups.append((ser, [(((loc.bi, m + 2),), Fraction(1))]))
            return groups
        by_head: Dict[Tuple[int, int], List] = {}
        for key, c in md.terms.items():
            by_head.setdefault(key[0], []).append((key[1:], c))
        for head, members in sorted(by_head.items()):
            ser = (loc.eval_direct(head, bps) if direct
                   else loc.eval_sigma(head, bps))
            groups.append((ser, members))
        return groups

    def _reduce_groups(self, terms, loc, bi, nj, groups):
        """Diagonal source: members hold all nj slot entries in target order."""
        for ser, members in groups:
            q = loc.prefactor * ser
            res = self._residues(loc, q)
            if not res:
                continue
            for mon, c in members:
                for m, r in res:
                    key = ((bi, m + 1),) + mon
                    terms[key] = terms.get(key, Fraction(0)) + r * c

    def _reduce_pairs(self, terms, loc, bi, nj, groups_a, pos_a, groups_b, pos_b):
        """Pair source: interleave the two factors' slots by target position."""
        for ser_a, members_a in groups_a:
            pa = loc.prefactor * ser_a
            for ser_b, members_b in groups_b:
                q = pa * ser_b
                res = self._residues(loc, q)
                if not res:
                    continue
                for mon_a, ca in members_a:
                    for mon_b, cb in members_b:
                        c = ca * cb
                        slots = [None] * nj
                        for pos, entry in zip(pos_a, mon_a):
                            slots[pos] = entry
                        for pos, entry in zip(pos_b, mon_b):
                            slots[pos] = entry
                        tail = tuple(slots)
                        for m, r in res:
                            key = ((bi, m + 1),) + tail
                            terms[key] = terms.get(key, Fraction(0)) + r * c

    def _residues(self, loc, q: LaurentSeries):
        """[(m, Res[(u^m - s^m) q])] for all contributing m >= 1."""
        val = q.valuation()
        if val is None or val >= -1:
            return []
        p = -val
        out = []
        for m in range(1, p):
            d = loc.d_table(m)
            r = Fraction(0)
            for j in range(m, p):
                dj = d.coefficient(j)
                if dj:
                    r += dj * q.coefficient(-1 - j)
            if r:
                out.append((m, r))
        return out

    # -- physical-pole expansions -------------------------------------------
    def _pole(self):
        p = self.curve.physical_pole
        if p is None:
            raise EngineError("curve declares no physical pole")
        if self.curve.x.pole_order_at(p) != 1:
            raise EngineError("x pole at the physical pole is not simple")
        return p

    def _xpow(self, k: int) -> RationalFunction:
        while len(self._xpows) <= k:
            self._xpows.append(self._xpows[-1] * self.curve.x)
        return self._xpows[k]

    def _slot_moment(self, k: int, entry: Tuple[int, int]) -> Fraction:
        """-Res_{z->pole} x(z)^k (z - a)^-r dz for one tensor slot."""
        key = (k,) + entry
        if key not in self._moments:
            bi, r = entry
            a = self.curve.branch_points[bi]
            root = Polynomial((-a, Fraction(1)))
            f = self._xpow(k) * RationalFunction(Polynomial.one(), root ** r)
            self._moments[key] = -residue(f, self._pole())
        return self._moments[key]

    def _bergman_phi(self, k: int) -> RationalFunction:
        """phi_k(z) = -Res_{z2->pole} x(z2)^k B(z, z2)/dz, a rational function."""
        p = self._pole()
        xk = self._xpow(k)
        if p is INF:
            series = laurent_expand(xk, INF, 0) if k else None
            out = Polynomial.zero()
            if k:
                # coefficient(j) of the 1/z-chart series is [z^-j] x^k
                for m in range(k):
                    c = series.coefficient(-(m + 1))
                    if c:
                        out = out + Polynomial((Fraction(0),) * m + ((m + 1) * c,))
            return RationalFunction(out)
        series = laurent_expand(xk, p, 0)
        total = RationalFunction.zero()
        root = Polynomial((-p, Fraction(1)))
        for m in range(k):
            c = series.coefficient(-1 - m)
            if c:
                total = total - RationalFunction(
                    Polynomial.constant((m + 1) * c), root ** (m + 2))
        return total

    def expand_observable(self, md: Multidifferential, max_order: int):
        """Moment coefficients of prod x_i^-(k_i+1) at the physical pole.

        Returns a dict mapping (k_1, ..., k_n) with 0 <= k_i <= max_order to
        the exact connected correlator coefficient at genus md.h; for
        omega_2^(0) the double-pole part dx dx/(x-x')^2 is subtracted first
        (its iterated residue is an exact differential and drops out).
        """
        p = self._pole()
        if md.kind == "ydx":
            out = {}
            ydx = md.density
            for k in range(max_order + 1):
                out[(k,)] = -residue(self._xpow(k) * ydx, p)
            return out
        if md.kind == "bergman":
            out = {}
            phis = {k: self._bergman_phi(k) for k in range(max_order + 1)}
            for k1 in range(max_order + 1):
                xk1 = self._xpow(k1)
                for k2 in range(max_order + 1):
                    out[(k1, k2)] = -residue(xk1 * phis[k2], p)
            return out
        out = {}
        for K in _grid(md.n, max_order):
            total = Fraction(0)
            for key, c in md.terms.items():
                prod = c
                for k, entry in zip(K, key):
                    prod *= self._slot_moment(k, entry)
                    if not prod:
                        break
                total += prod
            out[K] = total
        return out

    # -- free energy and the Phi-operator identity ---------------------------
    def _phi_series(self, bi: int, order: int) -> LaurentSeries:
        key = (bi, order)
        if key not in self._phi:
            a = self.curve.branch_points[bi]
            self._phi[key] = primitive_phi_series(self.curve, a, order)
        return self._phi[key]

    def free_energy(self, h: int) -> Fraction:
        """F^(h) = 1/(2-2h) sum_i Res_{z->a_i} Phi(z) omega_1^(h)(z), h >= 2."""
        if h < 2:
            raise EngineError("free energy is defined for h >= 2 only")
        md = self.omega(h, 1)
        if not md.residue_free():
            raise EngineError("omega_1^(h) is not residue-free")
        total = Fraction(0)
        for key, c in md.terms.items():
            (bi, k), = key
            phi = self._phi_series(bi, k - 1)
            total += c * phi.coefficient(k - 1)
        return Fraction(1, 2 - 2 * h) * total

    def phi_operator_check(self, h: int, n: int) -> PhiOperatorReport:
        """Check omega_n^(h) = 1/(2-2h-n) sum Res Phi(z) omega_{n+1}^(h)(z, .)."""
        factor_den = 2 - 2 * h - n
        if factor_den >= 0:
            raise EngineError("the Phi-operator identity needs 2 - 2h - n < 0")
        upper = self.omega(h, n + 1)
        rhs: Dict[SlotKey, Fraction] = {}
        factor = Fraction(1, factor_den)
        for key, c in upper.terms.items():
            bi, k = key[0]
            phi = self._phi_series(bi, k - 1)
            val = c * phi.coefficient(k - 1)
            if val:
                tail = key[1:]
                rhs[tail] = rhs.get(tail, Fraction(0)) + val
        rhs = {k: factor * v for k, v in rhs.items() if v}
        lhs = self.omega(h, n).terms
        keys = set(lhs) | set(rhs)
        disc = {}
        for key in keys:
            dv = lhs.get(key, Fraction(0)) - rhs.get(key, Fraction(0))
            if dv:
                disc[key] = dv
        return PhiOperatorReport(h=h, n=n, passed=not disc, factor=factor,
                                 discrepancy=disc)

    # -- loop equations --------------------------------------------------------
    def _w2_diagonal(self) -> RationalFunction:
        """W_2^(0)(x, x) on the curve: -S_x(z) / (6 x'(z)^2), S_x the Schwarzian."""
        xp = self.xp
        xpp = xp.derivative()
        xppp = xpp.derivative()
        sx = xppp / xp - Fraction(3, 2) * (xpp / xp) ** 2
        return -sx / (6 * xp * xp)

    def _w_rf(self, h: int, n: int, pattern) -> RationalFunction:
        """W_n^(h) on the curve with slots at fixed points or the symbol z.

        ``pattern`` entries are either the string "z" or a Fraction; every
        symbolic slot refers to the same variable (used for the x,x diagonal).
        """
        z = RationalFunction.z()
        syms = [i for i, v in enumerate(pattern) if v == "z"]
        if (h, n) == (0, 1):
            if syms:
                return self.curve.y
            return RationalFunction.constant(self.curve.y.eval_at(pattern[0]))
        if (h, n) == (0, 2):
            if len(syms) == 2:
                return self._w2_diagonal()
            if len(syms) == 1:
                zeta = pattern[1 - syms[0]]
                return self._w2_one_fixed(zeta)
            z1, z2 = pattern
            val = (Fraction(1) / ((z1 - z2) ** 2 * self.xp.eval_at(z1)
                                  * self.xp.eval_at(z2))
                   - Fraction(1) / ((self.curve.x.eval_at(z1)
                                     - self.curve.x.eval_at(z2)) ** 2))
            return RationalFunction.constant(val)
        md = self.omega(h, n)
        bps = self.curve.branch_points
        grouped: Dict[Tuple, Fraction] = {}
        for key, c in md.terms.items():
            scalar = c
            subkey = []
            for slot, entry in enumerate(key):
                bi, k = entry
                if slot in syms:
                    subkey.append(entry)
                else:
                    zeta = pattern[slot]
                    scalar *= (zeta - bps[bi]) ** (-k)
            if scalar:
                sk = tuple(subkey)
                grouped[sk] = grouped.get(sk, Fraction(0)) + scalar
        total = RationalFunction.zero()
        for subkey, scalar in sorted(grouped.items()):
            rf = RationalFunction.constant(scalar)
            for bi, k in subkey:
                root = Polynomial((-bps[bi], Fraction(1)))
                rf = rf * RationalFunction(Polynomial.one(), root ** k)
            total = total + rf
        for i, v in enumerate(pattern):
            if v != "z":
                total = total * (Fraction(1) / self.xp.eval_at(v))
        if syms:
            total = total / self.xp ** len(syms)
        return total

    def _w2_one_fixed(self, zeta: Fraction) -> RationalFunction:
        """W_2^(0)(x(z), x(zeta)) as a rational function of z."""
        z = RationalFunction.z()
        xpz = self.xp
        xpv = self.xp.eval_at(zeta)
        xv = self.curve.x.eval_at(zeta)
        first = RationalFunction.constant(Fraction(1, 1) / xpv) / ((z - zeta) ** 2 * xpz)
        second = RationalFunction.constant(1) / ((self.curve.x - xv) ** 2)
        return first - second

    def _w_scalar(self, h: int, n: int, values) -> Fraction:
        rf = self._w_rf(h, n, list(values))
        return rf.num.coefficient(0) / rf.den.coefficient(0) if rf.den.degree == 0 \
            else rf.eval_at(Fraction(0))

    def _w_derivative(self, h: int, n: int, values, j: int) -> Fraction:
        """d/dx_j of W_n^(h) at the fixed points (via d/dz divided by x')."""
        pattern = list(values)
        pattern[j] = "z"
        univ = self._w_rf(h, n, pattern)
        return (univ.derivative() / self.xp).eval_at(values[j])

    def default_test_points(self, count: int):
        """Deterministic generic curve points for loop-equation sampling."""
        out = []
        cand = Fraction(5, 2)
        bps = set(self.curve.branch_points)
        xs = set()
        while len(out) < count:
            ok = (cand not in bps
                  and self.curve.x.den(cand) != 0
                  and self.curve.y.den(cand) != 0
                  and self.xp.eval_at(cand) != 0)
            if ok:
                xv = self.curve.x.eval_at(cand)
                if xv not in xs:
                    xs.add(xv)
                    out.append(cand)
            cand += 1
        return tuple(out)

    def loop_equation_residual(self, V: Polynomial, t, h: int, n: int,
                               points=None) -> LoopResidual:
        """Assemble the (h, n) loop equation on the curve and test that the
        remainder is a polynomial in x of degree <= deg V' - 1.

        The spectator variables are pinned at generic rational curve points;
        the one remaining variable stays symbolic, so the remainder is an
        exact univariate rational function whose polynomiality in x is
        decided by exact interpolation.
        """
        t = as_fraction(t)
        vp = V.derivative()
        d = vp.degree
        if d < 1:
            raise EngineError("potential must have deg V' >= 1")
        if self.curve.t_value is not None and self.curve.t_value != t:
            raise EngineError("t does not match the curve's declared value")
        vpx = _poly_on_curve(vp, self.curve.x)
        if self.curve.y + self.curve.y.compose(self.curve.sigma) != vpx:
            raise EngineError("curve does not satisfy y + y o sigma = V'(x): "
                              "V mismatch")
        if points is None:
            points = self.default_test_points(n)
        points = tuple(as_fraction(p) for p in points)
        if len(points) != n:
            raise EngineError(f"need {n} spectator points, got {len(points)}")
        zvals = list(points)
        lhs = vpx * self._w_rf(h, n + 1, ["z"] + zvals)
        rhs = RationalFunction.zero()
        if h >= 1:
            rhs = rhs + self._w_rf(h - 1, n + 2, ["z", "z"] + zvals)
        for m in range(h + 1):
            for I in _subsets(n):
                a = self._w_rf(m, 1 + len(I), ["z"] + [zvals[i] for i in I])
                rest = [zvals[i] for i in range(n) if i not in I]
                b = self._w_rf(h - m, 1 + n - len(I), ["z"] + rest)
                rhs = rhs + a * b
        for j in range(n):
            others = [zvals[i] for i in range(n) if i != j]
            w_free = self._w_rf(h, n, ["z"] + others)
            w_all = self._w_scalar(h, n, zvals)
            dw = self._w_derivative(h, n, zvals, j)
            xgap = self.curve.x - self.curve.x.eval_at(zvals[j])
            rhs = rhs + (w_free - w_all) / (xgap ** 2) - dw / xgap
        residual = lhs - rhs
        return self._classify_residual(residual, d, h, n, points)

    def _classify_residual(self, residual: RationalFunction, d: int,
                           h: int, n: int, points) -> LoopResidual:
        # sigma-invariance is necessary for being a function of x
        sym_ok = residual.compose(self.curve.sigma) == residual
        poly = self._match_polynomial_in_x(residual, d - 1) if sym_ok else None
        if poly is not None:
            return LoopResidual(h=h, n=n, is_polynomial=True, polynomial=poly,
                                degree_bound=d - 1, offending_poles=[],
                                test_points=points)
        offending = []
        roots, _ = rational_roots(residual.den) if not residual.den.is_zero() else ({}, None)
        for root in sorted(roots):
            offending.append((root, self.curve.x.value_at(root)))
        return LoopResidual(h=h, n=n, is_polynomial=False, polynomial=None,
                            degree_bound=d - 1, offending_poles=offending,
                            test_points=points)

    def _match_polynomial_in_x(self, f: RationalFunction,
                               deg: int) -> Optional[Polynomial]:
        """Exact Q with deg Q <= deg and Q(x(z)) == f(z), or None."""
        if f.is_zero():
            return Polynomial.zero()
        nodes = []
        zs = []
        cand = Fraction(7, 3)
        while len(nodes) < deg + 1:
            if (self.curve.x.den(cand) != 0 and f.den(cand) != 0):
                xv = self.curve.x.eval_at(cand)
                if xv not in [p[0] for p in nodes]:
                    nodes.append((xv, f.eval_at(cand)))
                    zs.append(cand)
            cand += 1
        coeffs = _vandermonde_solve(nodes)
        q = Polynomial(coeffs)
        if _poly_on_curve(q, self.curve.x) == f:
            return q
        return None

    # -- persistence ---------------------------------------------------------
    def _cache_path(self) -> str:
        return os.path.join(self.cache_dir, f"{self._hash}.json")

    def _load_cache(self):
        path = self._cache_path()
        if not os.path.exists(path):
            return
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("curve") != self._hash:
            return
        for key, entry in doc.get("tensors", {}).items():
            h, n = (int(v) for v in key.split(","))
            self._memo[(h, n)] = Multidifferential.from_json(entry, self.curve)

    def _save_cache(self):
        os.makedirs(self.cache_dir, exist_ok=True)
        doc = {"curve": self._hash, "tensors": {}}
        for (h, n), md in sorted(self._memo.items()):
            doc["tensors"][f"{h},{n}"] = md.to_json(self.curve)
        path = self._cache_path()
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
        os.replace(tmp, path)


def _subsets(n: int):
    out = []
    for mask in range(1 << n):
        out.append(tuple(i for i in range(n) if mask >> i & 1))
    return out


def _grid(n: int, max_order: int):
    import itertools
    return list(itertools.product(range(max_order + 1), repeat=n))


def _poly_on_curve(p: Polynomial, x: RationalFunction) -> RationalFunction:
    value = p(x)
    if isinstance(value, RationalFunction):
        return value
    return RationalFunction.constant(value)


def _vandermonde_solve(nodes):
    """Coefficients of the polynomial through (x_i, y_i), exact."""
    m = len(nodes)
    A = [[nodes[i][0] ** j for j in range(m)] + [nodes[i][1]] for i in range(m)]
    for col in range(m):
        piv = next(r for r in range(col, m) if A[r][col])
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [v * inv for v in A[col]]
        for r in range(m):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [v - f * w for v, w in zip(A[r], A[col])]
    return [A[i][m] for i in range(m)]
