"""Spectral curves from matrix-model data.

One-matrix models (V, t) are solved in the one-cut regime through the
Zhukovsky ansatz x(z) = alpha + gamma (z + 1/z), sigma(z) = 1/z, physical
pole at infinity.  Writing V'(x(z)) = sum_k u_k (z^k + z^-k) + u_0, the
resolvent branch with only non-positive powers of z is

    y(z) = u_0/2 + sum_{k>=1} u_k z^-k,

and y -> t/x at infinity pins the two unknowns: u_0(alpha, gamma) = 0 and
gamma * u_1(alpha, gamma) = t.  Exact mode solves that system over the
rationals (resultant elimination + rational root search); series mode solves
it by Newton iteration in a truncated power-series ring after substituting
t = s^m, starting from the t -> 0 saddle (alpha = saddle of V, gamma = 0).

Chains of matrices contribute the tridiagonal f-determinants, the hat-x
elimination sequence, saddle counting, and the fully Gaussian chain curve.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional, Sequence, Tuple, Union

from .algebra import (INF, AlgebraError, Polynomial, RationalFunction,
                      TruncatedSeries, as_fraction, fraction_from_str,
                      fraction_sqrt, fraction_to_str, rational_roots)
from .curve import CurveValidationError, SpectralCurve, validate_curve
from .multipoly import MultiPoly, determinant, from_univariate, poly_matrix_determinant


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class SeriesParameter:
    """Declares the substitution t = param^power, truncated at ``order``."""

    name: str = "s"
    power: int = 2
    order: int = 12


@dataclass(frozen=True)
class OneMatrixModel:
    V: Polynomial
    t: Union[Fraction, SeriesParameter]
    saddle: Optional[Fraction] = None  # expansion point for series mode

    def __post_init__(self):
        if self.V.derivative().degree < 1:
            raise ModelError("potential needs deg V' >= 1")


@dataclass(frozen=True)
class ChainModel:
    potentials: Tuple[Polynomial, ...]
    couplings: Tuple[Fraction, ...]  # c_{k,k+1}, k = 1..m (last couples Lambda)
    lambdas: Tuple[Fraction, ...] = (Fraction(0),)
    weights: Tuple[int, ...] = (1,)

    def __post_init__(self):
        if len(self.couplings) != len(self.potentials):
            raise ModelError("need one coupling c_{k,k+1} per matrix")
        if any(not c for c in self.couplings):
            raise ModelError("all couplings must be nonzero")
        if len(set(self.lambdas)) != len(self.lambdas):
            raise ModelError("external eigenvalues must be distinct (S squarefree)")
        if len(self.weights) != len(self.lambdas):
            raise ModelError("need one multiplicity per eigenvalue")
        for vk in self.potentials:
            if vk.derivative().degree < 1:
                raise ModelError("every potential needs deg V' >= 1")

    @property
    def m(self) -> int:
        return len(self.potentials)

    def s_polynomial(self) -> Polynomial:
        out = Polynomial.one()
        z = Polynomial.x()
        for lam in self.lambdas:
            out = out * (z - Polynomial.constant(lam))
        return out


# ----------------------------------------------------------------------------
# one-cut builder
# ----------------------------------------------------------------------------

def _split_polynomials(vp: Polynomial):
    """u_0 and gamma*u_1 of V'(alpha + gamma(z + 1/z)) as polynomials in
    (alpha, w) with w = gamma^2.

    V'(x(z)) = sum_j V'^(j)(alpha)/j! gamma^j (z + 1/z)^j and
    [z^0](z+1/z)^j = C(j, j/2) for even j, [z^1](z+1/z)^j = C(j, (j+1)/2)
    for odd j; both selections are even in gamma after the gamma*u_1 step.
    """
    derivs = [vp]
    while derivs[-1].degree > 0:
        derivs.append(derivs[-1].derivative())
    u0 = MultiPoly.zero(2)
    gu1 = MultiPoly.zero(2)
    fact = 1
    for j in range(len(derivs)):
        if j:
            fact *= j
        da = from_univariate(derivs[j], 2, 0)  # V'^(j)(alpha)
        if j % 2 == 0:
            c = Fraction(comb(j, j // 2), fact)
            u0 = u0 + da * (MultiPoly.var(2, 1) ** (j // 2)) * c
        else:
            c = Fraction(comb(j, (j + 1) // 2), fact)
            gu1 = gu1 + da * (MultiPoly.var(2, 1) ** ((j + 1) // 2)) * c
    return u0, gu1


def _resolvent_rf(vp: Polynomial, alpha, gamma) -> RationalFunction:
    """y(z) = sum_{k>=1} u_k z^-k for the solved (alpha, gamma)."""
    z = Polynomial.x()
    d = vp.degree
    x = RationalFunction(Polynomial((gamma, alpha, gamma)), z, reduce=False)
    vpx = x.num.is_zero() and None  # placeholder to appease linters
    value = vp(x)
    if isinstance(value, Fraction):
        value = RationalFunction.constant(value)
    # z does not divide gamma z^2 + alpha z + gamma, so the denominator is z^d
    if value.den != z ** d:
        raise ModelError("unexpected cancellation in V'(x(z))")
    u = {k: value.num.coefficient(d + k) for k in range(-d, d + 1)}
    for k in range(1, d + 1):
        if u[k] != u[-k]:
            raise ModelError("split lost the z <-> 1/z symmetry")
    if u[0]:
        raise ModelError("u_0 != 0 after solving; inconsistent solution")
    y_num = Polynomial([u[d - i] for i in range(d)])  # sum_{k>=1} u_k z^(d-k)
    return RationalFunction(y_num, z ** d, reduce=False)


def one_cut_curve(model: OneMatrixModel, mode: str = "auto") -> SpectralCurve:
    """Build the one-cut curve of (V, t); see the module docstring.

    ``mode`` is "exact", "series", or "auto" (decided by the type of t).
    """
    if mode == "auto":
        mode = "series" if isinstance(model.t, SeriesParameter) else "exact"
    if mode == "exact":
        if isinstance(model.t, SeriesParameter):
            raise ModelError("exact mode needs a rational t")
        return _one_cut_exact(model.V, as_fraction(model.t))
    if mode == "series":
        if not isinstance(model.t, SeriesParameter):
            raise ModelError("series mode needs a series substitution for t")
        return _one_cut_series(model.V, model.t, model.saddle)
    raise ModelError(f"unknown mode {mode!r}")


def _one_cut_exact(V: Polynomial, t: Fraction) -> SpectralCurve:
    vp = V.derivative()
    u0, gu1 = _split_polynomials(vp)
    target = gu1 - MultiPoly.const(2, t)
    solutions = _solve_two_polynomials(u0, target)
    if solutions is None:
        raise ModelError("normalization conditions are inconsistent "
                         "(multi-cut potential?)")
    candidates = []
    for alpha, w in solutions:
        if w <= 0:
            continue
        gamma = fraction_sqrt(w)
        if gamma is None:
            continue
        candidates.append((abs(alpha), alpha, gamma))
    if not candidates:
        if solutions:
            raise ModelError("no rational solution in exact mode "
                            "(gamma^2 is not a rational square); use series mode")
        raise ModelError("no rational solution in exact mode")
    candidates.sort()
    _, alpha, gamma = candidates[0]
    y = _resolvent_rf(vp, alpha, gamma)
    x = RationalFunction(Polynomial((gamma, alpha, gamma)), Polynomial.x(),
                         reduce=False)
    sigma = RationalFunction.from_coeffs([1], [0, 1])
    return validate_curve(x, y, sigma, physical_pole=INF, t=t)


def _solve_two_polynomials(p: MultiPoly, q: MultiPoly):
    """Common rational zeros of two polynomials in (alpha, w).

    Eliminates w by a Sylvester resultant over Q[alpha], then walks rational
    alpha-roots; returns a list of (alpha, w) pairs (possibly empty), or None
    when the system is degenerate.
    """
    pa = _as_poly_in_w(p)
    qa = _as_poly_in_w(q)
    res = _resultant(pa, qa)
    if res.is_zero():
        return None
    if res.degree == 0:
        # w-free system: p, q univariate in alpha
        return _solve_univariate_pair(pa, qa)
    roots, _ = rational_roots(res)
    out = []
    for alpha in sorted(roots):
        pu = _eval_alpha(pa, alpha)
        qu = _eval_alpha(qa, alpha)
        for w in _common_roots(pu, qu):
            out.append((alpha, w))
    return out


def _as_poly_in_w(p: MultiPoly):
    """[coeff_0(alpha), coeff_1(alpha), ...] as univariate Polynomials."""
    degw = max((e[1] for e in p.terms), default=0)
    out = [dict() for _ in range(degw + 1)]
    for (ea, ew), c in p.terms.items():
        out[ew][ea] = c
    return [Polynomial([d.get(k, Fraction(0)) for k in range(max(d, default=0) + 1)])
            if d else Polynomial.zero() for d in out]


def _resultant(pa, qa) -> Polynomial:
    """Sylvester resultant in w of two polynomials with Q[alpha] coefficients."""
    while pa and pa[-1].is_zero():
        pa = pa[:-1]
    while qa and qa[-1].is_zero():
        qa = qa[:-1]
    n, m = len(pa) - 1, len(qa) - 1
    if n < 0 or m < 0:
        return Polynomial.zero()
    if n == 0:
        return pa[0] ** m if m >= 0 else Polynomial.one()
    if m == 0:
        return qa[0] ** n
    size = n + m
    rows = []
    for i in range(m):
        row = [Polynomial.zero()] * size
        for j, c in enumerate(reversed(pa)):
            row[i + j] = c
        rows.append(row)
    for i in range(n):
        row = [Polynomial.zero()] * size
        for j, c in enumerate(reversed(qa)):
            row[i + j] = c
        rows.append(row)
    return poly_matrix_determinant(rows)


def _eval_alpha(pw, alpha: Fraction) -> Polynomial:
    return Polynomial([c(alpha) for c in pw])


def _common_roots(p: Polynomial, q: Polynomial):
    if p.is_zero() and q.is_zero():
        return []
    target = q if p.is_zero() else p
    roots, _ = rational_roots(target)
    out = []
    for r in sorted(roots):
        if (p.is_zero() or not p(r)) and (q.is_zero() or not q(r)):
            out.append(r)
    return out


def _solve_univariate_pair(pa, qa):
    p = pa[0] if pa else Polynomial.zero()
    q = qa[0] if qa else Polynomial.zero()
    return [(alpha, Fraction(0)) for alpha in _common_roots(p, q)]


# -- series mode ---------------------------------------------------------------

def _one_cut_series(V: Polynomial, spec: SeriesParameter,
                    saddle: Optional[Fraction]) -> SpectralCurve:
    if spec.power % 2:
        raise ModelError("substitution t = s^m needs even m "
                         "(gamma ~ sqrt(t) would leave the series ring)")
    vp = V.derivative()
    xi = _pick_saddle(vp, saddle)
    vpp_xi = vp.derivative()(xi)
    if not vpp_xi:
        raise ModelError("degenerate saddle: V'' vanishes there")
    order = spec.order
    u0, gu1 = _split_polynomials(vp)
    half = spec.power // 2

    def eval_system(alpha: TruncatedSeries, G: TruncatedSeries):
        # E1 = u0(alpha, s^m G); E2 = gu1(alpha, s^m G)/s^m - 1
        e1 = _eval_mp_series(u0, alpha, G, spec, shift_w=spec.power, divide=0)
        e2 = _eval_mp_series(gu1, alpha, G, spec, shift_w=spec.power,
                             divide=spec.power)
        return e1, e2 - TruncatedSeries.constant(1, order, spec.name)

    alpha = TruncatedSeries.constant(xi, order, spec.name)
    G0 = Fraction(1) / vpp_xi
    G = TruncatedSeries.constant(G0, order, spec.name)
    u0a = _mp_partial(u0, 0)
    u0w = _mp_partial(u0, 1)
    gu1a = _mp_partial(gu1, 0)
    gu1w = _mp_partial(gu1, 1)
    for _ in range(order.bit_length() + 3):
        e1, e2 = eval_system(alpha, G)
        if e1.is_zero() and e2.is_zero():
            break
        j11 = _eval_mp_series(u0a, alpha, G, spec, shift_w=spec.power, divide=0)
        j12 = _eval_mp_series(u0w, alpha, G, spec, shift_w=spec.power,
                              divide=0).shifted(spec.power)
        j21 = _eval_mp_series(gu1a, alpha, G, spec, shift_w=spec.power,
                              divide=spec.power)
        j22 = _eval_mp_series(gu1w, alpha, G, spec, shift_w=spec.power,
                              divide=0)
        det = j11 * j22 - j12 * j21
        if not det.coefficient(0):
            raise ModelError("Newton iteration not contracting "
                             "(singular Jacobian; bad substitution t = s^m?)")
        dalpha = (e1 * j22 - e2 * j12) / det
        dG = (e2 * j11 - e1 * j21) / det
        alpha = alpha - dalpha
        G = G - dG
    e1, e2 = eval_system(alpha, G)
    if not (e1.is_zero() and e2.is_zero()):
        raise ModelError("Newton iteration not contracting within the budget")
    gamma = G.sqrt().shifted(half)
    y = _series_resolvent(vp, alpha, gamma, spec)
    x = RationalFunction(Polynomial((gamma, alpha, gamma)), Polynomial.x(),
                         reduce=False)
    sigma = RationalFunction.from_coeffs([1], [0, 1])
    t_series = TruncatedSeries.monomial(spec.power, order, spec.name)
    # Zhukovsky structure makes the involution and branch data exact:
    # x(1/z) = x(z) termwise, branch points are the z-independent pair +-1.
    return SpectralCurve(x=x, y=y, sigma=sigma,
                         branch_points=(Fraction(-1), Fraction(1)),
                         physical_pole=INF, t_value=t_series)


def _pick_saddle(vp: Polynomial, saddle: Optional[Fraction]) -> Fraction:
    roots, _ = rational_roots(vp)
    simple = sorted(r for r, m in roots.items() if m == 1)
    if saddle is not None:
        saddle = as_fraction(saddle)
        if saddle not in roots:
            raise ModelError("declared saddle is not a zero of V'")
        return saddle
    if not simple:
        raise ModelError("no rational nondegenerate saddle of V'")
    if len(simple) > 1:
        simple.sort(key=lambda r: (abs(r), r))
    return simple[0]


def _eval_mp_series(p: MultiPoly, alpha: TruncatedSeries, G: TruncatedSeries,
                    spec: SeriesParameter, shift_w: int, divide: int) -> TruncatedSeries:
    """p(alpha, w) with w = s^shift_w * G, then divided by s^divide.

    Division is exact by construction (every surviving monomial carries at
    least s^divide); checked, not assumed.
    """
    order = alpha.order
    total = TruncatedSeries.constant(0, order, spec.name)
    apows = {0: TruncatedSeries.constant(1, order, spec.name)}
    gpows = {0: TruncatedSeries.constant(1, order, spec.name)}

    def apow(k):
        if k not in apows:
            apows[k] = apow(k - 1) * alpha
        return apows[k]

    def gpow(k):
        if k not in gpows:
            gpows[k] = gpow(k - 1) * G
        return gpows[k]

    for (ea, ew), c in p.terms.items():
        s_power = ew * shift_w - divide
        if s_power < 0:
            raise ModelError("series division is not exact")
        term = (apow(ea) * gpow(ew) * c).shifted(s_power)
        total = total + term
    return total


def _mp_partial(p: MultiPoly, var: int) -> MultiPoly:
    out = {}
    for e, c in p.terms.items():
        if e[var]:
            ne = list(e)
            ne[var] -= 1
            out[tuple(ne)] = out.get(tuple(ne), Fraction(0)) + c * e[var]
    return MultiPoly(p.nvars, out)


def _series_resolvent(vp: Polynomial, alpha, gamma, spec) -> RationalFunction:
    """y(z) over the series ring, via the same split as the exact path."""
    d = vp.degree + 1
    # u_k(alpha, gamma) by direct expansion of V'(alpha + gamma(z+1/z))
    order = alpha.order
    zero = TruncatedSeries.constant(0, order, spec.name)
    u = [zero] * (d + 1)
    derivs = [vp]
    while derivs[-1].degree > 0:
        derivs.append(derivs[-1].derivative())
    fact = 1
    gpow = {0: TruncatedSeries.constant(1, order, spec.name)}

    def gp(k):
        if k not in gpow:
            gpow[k] = gp(k - 1) * gamma
        return gpow[k]

    for j in range(len(derivs)):
        if j:
            fact *= j
        dval = _poly_at_series(derivs[j], alpha)
        for k in range(j % 2, j + 1, 2):
            if k > d:
                continue
            c = Fraction(comb(j, (j + k) // 2), fact)
            u[k] = u[k] + dval * gp(j) * c
    y_num = Polynomial([u[d - i] for i in range(d)])
    return RationalFunction(y_num, Polynomial.x() ** d, reduce=False)


def _poly_at_series(p: Polynomial, v: TruncatedSeries) -> TruncatedSeries:
    acc = TruncatedSeries.constant(0, v.order, v.param)
    for c in reversed(p.coeffs):
        acc = acc * v + c
    return acc


def one_cut_residuals(curve: SpectralCurve, V: Polynomial, spec: SeriesParameter):
    """(u_0, gamma*u_1 - t) re-evaluated on the solved series; both must vanish."""
    gamma = curve.x.num.coeffs[0]
    alpha = curve.x.num.coeffs[1]
    u0, gu1 = _split_polynomials(V.derivative())
    r1 = _series_eval_direct(u0, alpha, gamma)
    r2 = _series_eval_direct(gu1, alpha, gamma) - TruncatedSeries.monomial(
        spec.power, alpha.order, spec.name)
    return r1, r2


def _series_eval_direct(p: MultiPoly, alpha: TruncatedSeries,
                        gamma: TruncatedSeries) -> TruncatedSeries:
    total = TruncatedSeries.constant(0, alpha.order, alpha.param)
    w = gamma * gamma
    for (ea, ew), c in p.terms.items():
        total = total + (alpha ** ea) * (w ** ew) * c
    return total


# ----------------------------------------------------------------------------
# chain-of-matrices algebra
# ----------------------------------------------------------------------------

def f_chain_polynomial(model: ChainModel, i: int, j: int) -> MultiPoly:
    """Tridiagonal determinant f_{i,j}(x_i..x_j) with diagonal V'_i..V'_j
    and off-diagonal pairs -c_{k,k+1} x_{k+1} / -c_{k,k+1} x_k."""
    m = model.m
    if not (1 <= i <= m) or j > m:
        raise ModelError(f"f indices out of range: i={i}, j={j}, m={m}")
    if j < i - 1:
        return MultiPoly.zero(m)
    if j == i - 1:
        return MultiPoly.const(m, 1)
    size = j - i + 1
    rows = []
    for r in range(size):
        row = []
        k = i + r  # 1-based matrix index of this row
        for cidx in range(size):
            kc = i + cidx
            if cidx == r:
                row.append(from_univariate(model.potentials[k - 1].derivative(),
                                           m, k - 1))
            elif cidx == r + 1:
                row.append(MultiPoly.var(m, kc - 1) * (-model.couplings[k - 1]))
            elif cidx == r - 1:
                row.append(MultiPoly.var(m, kc - 1) * (-model.couplings[kc - 1]))
            else:
                row.append(MultiPoly.zero(m))
        rows.append(row)
    return determinant(rows)


def f_chain_recursion(model: ChainModel, i: int, j: int) -> MultiPoly:
    """Cofactor three-term recursion:
    f_{i,j} = V'_i(x_i) f_{i+1,j} - c_{i,i+1}^2 x_i x_{i+1} f_{i+2,j}."""
    m = model.m
    if j < i - 1:
        return MultiPoly.zero(m)
    if j == i - 1:
        return MultiPoly.const(m, 1)
    head = from_univariate(model.potentials[i - 1].derivative(), m, i - 1)
    tail1 = f_chain_recursion(model, i + 1, j)
    tail2 = f_chain_recursion(model, i + 2, j)
    c = model.couplings[i - 1]
    return head * tail1 - (MultiPoly.var(m, i - 1) * MultiPoly.var(m, i)
                           * (c * c)) * tail2


def hat_x_sequence(model: ChainModel, upto: int):
    """x_hat_1..x_hat_upto as polynomials in (x_1, x_2), by the chain
    recursion c_{i,i+1} x_hat_{i+1} = V'_i(x_hat_i) - c_{i-1,i} x_hat_{i-1}."""
    if upto < 1 or upto > model.m + 1:
        raise ModelError(f"hat-x index out of range: {upto}")
    seq = [MultiPoly.var(2, 0), MultiPoly.var(2, 1)]
    for i in range(2, upto):
        vp = model.potentials[i - 1].derivative()
        vnext = _mp_compose_uni(vp, seq[i - 1])
        prev_c = model.couplings[i - 2]
        new = (vnext - seq[i - 2] * prev_c) * (Fraction(1) / model.couplings[i - 1])
        seq.append(new)
    return seq[:upto]


def _mp_compose_uni(p: Polynomial, inner: MultiPoly) -> MultiPoly:
    acc = MultiPoly.const(inner.nvars, 0)
    for c in reversed(p.coeffs):
        acc = acc * inner + c
    return acc


@dataclass(frozen=True)
class SaddleCount:
    degree: int
    expected: int
    polynomial: Polynomial

    @property
    def generic(self) -> bool:
        return self.degree == self.expected


def saddle_count(model: ChainModel) -> SaddleCount:
    """Eliminate the chain saddle equations down to one variable.

    xi_2 = V'_1(xi_1)/c_{1,2}, then the chain recursion produces xi_{m+1} as
    a polynomial in xi_1; S(xi_{m+1}(xi_1)) = 0 is the elimination
    polynomial, of degree s * d_1 ... d_m for generic data.
    """
    m = model.m
    xi = [Polynomial.x()]
    vp1 = model.potentials[0].derivative()
    xi.append(vp1 * (Fraction(1) / model.couplings[0]))
    for i in range(2, m + 1):
        vp = model.potentials[i - 1].derivative()
        comp = vp(xi[i - 1])
        if isinstance(comp, Fraction):
            comp = Polynomial.constant(comp)
        nxt = (comp - xi[i - 2] * model.couplings[i - 2]) \
            * (Fraction(1) / model.couplings[i - 1])
        xi.append(nxt)
    elim = model.s_polynomial()(xi[m])
    if isinstance(elim, Fraction):
        elim = Polynomial.constant(elim)
    expected = len(model.lambdas)
    for vk in model.potentials:
        expected *= vk.derivative().degree
    result = SaddleCount(degree=elim.degree, expected=expected, polynomial=elim)
    if not result.generic:
        raise ModelError(
            f"degenerate elimination: degree {elim.degree}, expected {expected}")
    return result


def chain_variance(model: ChainModel, t) -> Fraction:
    """gamma^2 of the Gaussian chain with Lambda = 0:
    v_m = t/a_m, v_k = t/(a_k - c_{k,k+1}^2 v_{k+1}/t)."""
    t = as_fraction(t)
    coeffs = []
    for vk in model.potentials:
        a = 2 * vk.coefficient(2)
        if vk != Polynomial((Fraction(0), Fraction(0), a / 2)) or a <= 0:
            raise ModelError("gaussian chain needs every V_k = a_k x^2 / 2, a_k > 0")
        coeffs.append(a)
    if model.lambdas != (Fraction(0),):
        raise ModelError("gaussian chain supports the degenerate external "
                         "matrix Lambda = 0 only")
    v = t / coeffs[-1]
    for k in range(model.m - 2, -1, -1):
        c = model.couplings[k]
        denom = coeffs[k] - c * c * v / t
        if not denom:
            raise ModelError("variance recursion hit a vanishing denominator")
        v = t / denom
    return v


def gaussian_chain_curve(model: ChainModel, t) -> SpectralCurve:
    """Semicircle-type curve of the all-quadratic chain with Lambda = 0.

    When gamma = sqrt(v_1) is rational the engine-ready Zhukovsky form
    x = gamma (z + 1/z), y = (t/gamma)/z is returned.  Otherwise gamma^2 is
    still rational and the curve is returned in the pole chart
    x = z + gamma^2/z, y = t/z, sigma = gamma^2/z: x, y, sigma stay rational
    and all physical-pole expansions work, but the branch points +-gamma are
    irrational and the residue recursion cannot run over the rationals.
    """
    t = as_fraction(t)
    v1 = chain_variance(model, t)
    gamma = fraction_sqrt(v1)
    z = Polynomial.x()
    if gamma is not None:
        x = RationalFunction(Polynomial((gamma, Fraction(0), gamma)), z,
                             reduce=False)
        y = RationalFunction(Polynomial.constant(t / gamma), z, reduce=False)
        sigma = RationalFunction.from_coeffs([1], [0, 1])
        return validate_curve(x, y, sigma, physical_pole=INF, t=t)
    x = RationalFunction(Polynomial((v1, Fraction(0), Fraction(1))), z,
                         reduce=False)
    y = RationalFunction(Polynomial.constant(t), z, reduce=False)
    sigma = RationalFunction.from_coeffs([v1], [0, 1])
    # full validation minus branch-point rationality
    zrf = RationalFunction.z()
    if sigma.compose(sigma) != zrf or x.compose(sigma) != x:
        raise CurveValidationError("involution", "chain curve construction broke")
    if (x * y).value_at(INF) != t:
        raise CurveValidationError("t-normalization", "chain curve t mismatch")
    return SpectralCurve(x=x, y=y, sigma=sigma, branch_points=(),
                         physical_pole=INF, t_value=t)


# ----------------------------------------------------------------------------
# JSON interface
# ----------------------------------------------------------------------------

def one_matrix_model_from_json(doc: dict) -> OneMatrixModel:
    V = Polynomial.from_values([fraction_from_str(str(c))
                                for c in doc["potential"]])
    t = doc["t"]
    if isinstance(t, dict):
        t = SeriesParameter(name=t.get("series_param", "s"),
                            power=int(t["substitution_power"]),
                            order=int(t.get("order", 12)))
    else:
        t = fraction_from_str(str(t))
    saddle = doc.get("saddle")
    if saddle is not None:
        saddle = fraction_from_str(str(saddle))
    return OneMatrixModel(V=V, t=t, saddle=saddle)


def one_matrix_model_to_json(model: OneMatrixModel) -> dict:
    doc = {"potential": [fraction_to_str(c) for c in model.V.coeffs]}
    if isinstance(model.t, SeriesParameter):
        doc["t"] = {"series_param": model.t.name,
                    "substitution_power": model.t.power,
                    "order": model.t.order}
    else:
        doc["t"] = fraction_to_str(model.t)
    if model.saddle is not None:
        doc["saddle"] = fraction_to_str(model.saddle)
    return doc


def chain_model_from_json(doc: dict) -> ChainModel:
    pots = tuple(Polynomial.from_values([fraction_from_str(str(c)) for c in row])
                 for row in doc["potentials"])
    coups = tuple(fraction_from_str(str(c)) for c in doc["couplings"])
    ext = doc.get("external", {"lambdas": ["0"], "weights": [1]})
    lams = tuple(fraction_from_str(str(v)) for v in ext["lambdas"])
    weights = tuple(int(w) for w in ext.get("weights", [1] * len(lams)))
    return ChainModel(potentials=pots, couplings=coups, lambdas=lams,
                      weights=weights)
