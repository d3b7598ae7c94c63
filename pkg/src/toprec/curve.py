"""Validated genus-0 spectral curves.

A curve is the triple (x, y, sigma) of rational functions of the uniformizing
coordinate z, together with its branch points (the finite simple zeros of
x'(z)), the physical pole where x blows up, and optionally the expected
leading coefficient t of y ~ t/x there.  ``sigma`` is the global sheet
involution: x(sigma(z)) = x(z), sigma(sigma(z)) = z, and sigma fixes every
branch point.

The Bergman kernel is fixed to dz1 dz2 / (z1 - z2)^2 (genus 0), so the
kernel numerator between conjugate points is

    dS_{z',sigma(z')}(z) = (1/(z - z') - 1/(z - sigma(z'))) dz.

Everything here is exact; a curve whose branch points are irrational is
rejected (re-parameterize z so that all data becomes rational).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .algebra import (INF, AlgebraError, LaurentSeries, Point, Polynomial,
                      RationalFunction, as_fraction, fraction_sqrt,
                      fraction_from_str, fraction_to_str, laurent_expand,
                      rational_roots, residue)


class CurveValidationError(ValueError):
    """A curve invariant failed; ``invariant`` names which one."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


@dataclass(frozen=True)
class SpectralCurve:
    x: RationalFunction
    y: RationalFunction
    sigma: RationalFunction
    branch_points: tuple
    physical_pole: Optional[Point]
    t_value: object = None  # Fraction, TruncatedSeries, or None

    @property
    def exact(self) -> bool:
        """True when every coefficient is a plain Fraction."""
        for rf in (self.x, self.y, self.sigma):
            for poly in (rf.num, rf.den):
                if any(not isinstance(c, Fraction) for c in poly.coeffs):
                    return False
        return True

    def x_prime(self) -> RationalFunction:
        return self.x.derivative()


def find_branch_points(x: RationalFunction):
    """Finite zeros of dx/dz, each verified simple, all verified rational."""
    if x.is_zero() or (x.num.degree <= 0 and x.den.degree <= 0):
        raise CurveValidationError("nonconstant-x", "x(z) is constant")
    xp = x.derivative()
    if xp.is_zero():
        raise CurveValidationError("nonconstant-x", "dx/dz vanishes identically")
    roots, rest = rational_roots(xp.num)
    if rest.degree > 0:
        raise CurveValidationError(
            "rational-branch-points",
            f"dx has irrational zeros (unfactored part of degree {rest.degree})")
    for a, m in roots.items():
        if m > 1:
            raise CurveValidationError(
                "simple-branch-points",
                f"dx has a zero of order {m} at z = {fraction_to_str(a)}")
    return tuple(sorted(roots))


def validate_curve(x: RationalFunction, y: RationalFunction,
                   sigma: RationalFunction, physical_pole: Optional[Point] = None,
                   t=None, branch_points=None) -> SpectralCurve:
    """Check every curve invariant exactly; raise naming the violated one."""
    z = RationalFunction.z()
    if sigma.compose(sigma) != z:
        raise CurveValidationError("involution", "sigma(sigma(z)) != z")
    if sigma == z:
        raise CurveValidationError("involution", "sigma is the identity")
    if x.compose(sigma) != x:
        raise CurveValidationError("x-symmetric", "x(sigma(z)) != x(z)")
    if y.compose(sigma) == y:
        raise CurveValidationError(
            "sheet-distinguishing", "y(z) - y(sigma(z)) vanishes identically")
    computed = find_branch_points(x)
    if branch_points is not None:
        declared = tuple(sorted(as_fraction(a) for a in branch_points))
        if declared != computed:
            raise CurveValidationError(
                "branch-points",
                f"declared {list(map(fraction_to_str, declared))} != computed "
                f"{list(map(fraction_to_str, computed))}")
    for a in computed:
        if sigma.value_at(a) != a:
            raise CurveValidationError(
                "sigma-fixes-branch-points",
                f"sigma({fraction_to_str(a)}) != {fraction_to_str(a)}")
    if physical_pole is not None:
        order = x.pole_order_at(physical_pole)
        if order == 0:
            raise CurveValidationError(
                "physical-pole", "x has no pole at the declared physical pole")
        if t is not None:
            if order != 1:
                raise CurveValidationError(
                    "physical-pole-simple",
                    f"x pole order {order} at the physical pole (needs 1)")
            limit = (x * y).value_at(physical_pole)
            if limit is INF or limit != as_fraction(t):
                raise CurveValidationError(
                    "t-normalization",
                    f"y*x -> {limit} at the physical pole, expected {fraction_to_str(as_fraction(t))}")
    return SpectralCurve(x=x, y=y, sigma=sigma, branch_points=computed,
                         physical_pole=physical_pole,
                         t_value=as_fraction(t) if t is not None else None)


# ----------------------------------------------------------------------------
# local data at branch points
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelData:
    """Laurent data at a branch point consumed by the recursion.

    ``factor`` is the expansion of 1 / ((y(z') - y(sigma(z'))) * x'(z')) at
    z' = a (double pole for a simple branch point); the overall 1/2 of the
    kernel is applied by the engine.  ``sigma_series`` expands sigma about a
    (so sigma(a + u) = a + s(u) with s'(0) = -1).
    """

    branch_point: Fraction
    factor: LaurentSeries
    sigma_series: LaurentSeries
    truncation_order: int


def kernel_data(curve: SpectralCurve, a, order: int) -> KernelData:
    a = as_fraction(a)
    if a not in curve.branch_points:
        raise CurveValidationError("branch-point", f"{fraction_to_str(a)} is not a branch point")
    y_sigma = curve.y.compose(curve.sigma)
    delta = (curve.y - y_sigma) * curve.x_prime()
    if delta.is_zero():
        raise CurveValidationError("sheet-distinguishing",
                                   "(y - y∘sigma)·x' vanishes identically")
    factor = laurent_expand(RationalFunction.constant(1) / delta, a, order)
    sigma_series = laurent_expand(curve.sigma, a, order + 2)
    return KernelData(branch_point=a, factor=factor,
                      sigma_series=sigma_series, truncation_order=order)


def primitive_phi_series(curve: SpectralCurve, a, order: int) -> LaurentSeries:
    """Taylor series at the branch point of a primitive of y dx, constant 0."""
    a = as_fraction(a)
    ydx = curve.y * curve.x_prime()
    if ydx.is_zero():
        return LaurentSeries(a, 0, (Fraction(0),) * (order + 1))
    if ydx.pole_order_at(a) > 0:
        raise CurveValidationError(
            "phi-regular", f"y dx has a pole at z = {fraction_to_str(a)}")
    expansion = laurent_expand(ydx, a, order - 1 if order >= 1 else 0)
    return expansion.integrate().truncate(order)


def ydx_expansion_at_pole(curve: SpectralCurve, order: int) -> LaurentSeries:
    """Expansion of y as a series in 1/x at the physical pole.

    The coefficient of x^-(k+1) equals -Res_{z->pole} x^k y dx; the leading
    coefficient (order 1) is the extracted t.  Returned as a LaurentSeries in
    the variable 1/x (center INF).
    """
    p = curve.physical_pole
    if p is None:
        raise CurveValidationError("physical-pole", "curve declares no physical pole")
    if curve.x.pole_order_at(p) != 1:
        raise CurveValidationError(
            "physical-pole-simple", "x pole at the physical pole is not simple")
    ydx = curve.y * curve.x_prime()
    coeffs = []
    xpow = RationalFunction.constant(1)
    for _ in range(order + 1):
        coeffs.append(-residue(xpow * ydx, p))
        xpow = xpow * curve.x
    return LaurentSeries(INF, 1, tuple(coeffs))


def extracted_t(curve: SpectralCurve) -> Fraction:
    return ydx_expansion_at_pole(curve, 0).coefficient(1)


# ----------------------------------------------------------------------------
# JSON interface
# ----------------------------------------------------------------------------

def _poly_to_json(p: Polynomial):
    return [fraction_to_str(c) for c in p.coeffs]


def _poly_from_json(data) -> Polynomial:
    return Polynomial.from_values([fraction_from_str(str(c)) for c in data])


def _rf_to_json(rf: RationalFunction):
    return {"num": _poly_to_json(rf.num), "den": _poly_to_json(rf.den)}


def _rf_from_json(data) -> RationalFunction:
    return RationalFunction(_poly_from_json(data["num"]), _poly_from_json(data["den"]))


def _point_to_json(p) -> str:
    return "inf" if p is INF else fraction_to_str(p)


def _point_from_json(s: str):
    return INF if s == "inf" else fraction_from_str(s)


def curve_to_json(curve: SpectralCurve) -> dict:
    doc = {
        "x": _rf_to_json(curve.x),
        "y": _rf_to_json(curve.y),
        "sigma": _rf_to_json(curve.sigma),
        "branch_points": [fraction_to_str(a) for a in curve.branch_points],
    }
    if curve.physical_pole is not None:
        doc["physical_pole"] = _point_to_json(curve.physical_pole)
    if curve.t_value is not None and isinstance(curve.t_value, Fraction):
        doc["t"] = fraction_to_str(curve.t_value)
    return doc


def curve_from_json(doc: dict) -> SpectralCurve:
    x = _rf_from_json(doc["x"])
    y = _rf_from_json(doc["y"])
    sigma = _rf_from_json(doc["sigma"])
    pole = _point_from_json(doc["physical_pole"]) if "physical_pole" in doc else None
    t = fraction_from_str(doc["t"]) if "t" in doc else None
    declared = doc.get("branch_points")
    return validate_curve(x, y, sigma, physical_pole=pole, t=t,
                          branch_points=declared)


def curve_hash(curve: SpectralCurve) -> str:
    payload = json.dumps(curve_to_json(curve), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


# ----------------------------------------------------------------------------
# stock curves used across the test suites
# ----------------------------------------------------------------------------

def airy_curve() -> SpectralCurve:
    """x = z^2, y = z, sigma = -z; single branch point at 0."""
    x = RationalFunction.from_coeffs([0, 0, 1], [1])
    y = RationalFunction.from_coeffs([0, 1], [1])
    sigma = RationalFunction.from_coeffs([0, -1], [1])
    return validate_curve(x, y, sigma, physical_pole=INF)


def gaussian_curve(t=Fraction(1)) -> SpectralCurve:
    """x = g(z + 1/z), y = (t/g)/z with g = sqrt(t); needs t a rational square."""
    t = as_fraction(t)
    g = fraction_sqrt(t)
    if g is None:
        raise AlgebraError("gaussian curve needs t to be a rational square")
    x = RationalFunction.from_coeffs([g, 0, g], [0, 1])
    y = RationalFunction.from_coeffs([t / g], [0, 1])
    sigma = RationalFunction.from_coeffs([1], [0, 1])
    return validate_curve(x, y, sigma, physical_pole=INF, t=t)
