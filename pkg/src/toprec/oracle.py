"""Independent ground truth for the recursion engine.

Two oracles, deliberately built from different mathematics:

* exact Wick/fatgraph enumeration -- Gaussian moments of traces are summed
  over perfect matchings of half-edges, with the power of N read off from
  the face count of the fatgraph (cycles of matching . rotation); and

* the classical one-point recurrence for the number eps_g(k) of genus-g
  gluings of a 2k-gon, which never touches the matching code.

The propagator normalization is <M_ij M_kl> = (t/N) d_il d_jk, so a matching
with P pairs and F faces carries weight t^P N^(F-P); the connected part of a
correlator of n traces collects N^(2-2h-n) by genus h.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import AlgebraError, Polynomial, as_fraction

MAX_HALF_EDGES = 18
DEFAULT_VERTEX_CAP = 10


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class WickModel:
    t: Fraction = Fraction(1)
    quadratic_coefficient: Fraction = Fraction(1)  # V = (a/2) x^2

    def __post_init__(self):
        if not self.t:
            raise OracleError("t must be nonzero")
        if not self.quadratic_coefficient:
            raise OracleError("degenerate quadratic part")


@dataclass
class MomentResult:
    """Exact N-graded Gaussian moment of a product of traces.

    ``full``/``connected`` map the exponent of N to a Fraction (t included);
    ``by_genus`` grades the connected part by 2-2h-n.
    """

    powers: Tuple[int, ...]
    full: Dict[int, Fraction] = field(default_factory=dict)
    connected: Dict[int, Fraction] = field(default_factory=dict)
    by_genus: Dict[int, Fraction] = field(default_factory=dict)

    def total_pairings(self) -> int:
        total = sum(self.powers)
        if total % 2:
            return 0
        return _double_factorial(total - 1)


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def all_pairings(items: Sequence[int]):
    """Yield all perfect matchings of the given items as lists of pairs."""
    items = list(items)
    if not items:
        yield []
        return
    first = items.pop(0)
    for i in range(len(items)):
        rest = items[:i] + items[i + 1:]
        for sub in all_pairings(rest):
            yield [(first, items[i])] + sub


def _rotation(powers: Sequence[int]) -> List[int]:
    """next-half-edge permutation: cyclic within each trace."""
    rot = []
    offset = 0
    for k in powers:
        for j in range(k):
            rot.append(offset + (j + 1) % k)
        offset += k
    return rot


def _face_count(rot: List[int], pairing) -> int:
    match = list(range(len(rot)))
    for a, b in pairing:
        match[a], match[b] = b, a
    seen = [False] * len(rot)
    faces = 0
    for start in range(len(rot)):
        if seen[start]:
            continue
        faces += 1
        h = start
        while not seen[h]:
            seen[h] = True
            h = rot[match[h]]
    return faces


def _trace_of(powers: Sequence[int], half_edge: int) -> int:
    offset = 0
    for t, k in enumerate(powers):
        if half_edge < offset + k:
            return t
        offset += k
    raise IndexError(half_edge)


def _is_connected(powers: Sequence[int], pairing) -> bool:
    n = len(powers)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairing:
        ra, rb = find(_trace_of(powers, a)), find(_trace_of(powers, b))
        parent[ra] = rb
    return len({find(i) for i in range(n)}) == 1


def gaussian_mixed_moment(model: WickModel, powers: Sequence[int]) -> MomentResult:
    """<prod_i Tr M^{k_i}> by exact Wick summation, full and connected parts.

    Each matching of the sum(k_i) half-edges is weighted
    (t/(a N))^P N^F with P pairs and F fatgraph faces, where a is the
    quadratic coefficient of the potential.
    """
    powers = tuple(int(k) for k in powers)
    if any(k < 1 for k in powers):
        raise OracleError("trace powers must be >= 1")
    result = MomentResult(powers=powers)
    total = sum(powers)
    if total % 2:
        return result
    if total > MAX_HALF_EDGES:
        raise OracleError(f"{total} half-edges exceeds the desk-scale cap ({MAX_HALF_EDGES})")
    rot = _rotation(powers)
    n = len(powers)
    weight_pair = model.t / model.quadratic_coefficient
    pair_count = total // 2
    w = weight_pair ** pair_count
    for pairing in all_pairings(range(total)):
        faces = _face_count(rot, pairing)
        expo = faces - pair_count
        result.full[expo] = result.full.get(expo, Fraction(0)) + w
        if _is_connected(powers, pairing):
            result.connected[expo] = result.connected.get(expo, Fraction(0)) + w
            h2 = 2 - n - expo
            if h2 % 2:
                raise OracleError("parity violation in the genus grading")
            result.by_genus[h2 // 2] = result.by_genus.get(h2 // 2, Fraction(0)) + w
    return result


def connected_moment_by_genus(model: WickModel, powers: Sequence[int],
                              h: int) -> Fraction:
    """Coefficient of (N/t)^(2-2h-n) in <prod Tr M^{k_i}>_c (pure Gaussian)."""
    res = gaussian_mixed_moment(model, powers)
    n = len(powers)
    return res.by_genus.get(h, Fraction(0)) * model.t ** (2 - 2 * h - n)


# ----------------------------------------------------------------------------
# Harer-Zagier one-point recurrence (second, independent oracle)
# ----------------------------------------------------------------------------

_hz_cache: Dict[Tuple[int, int], Fraction] = {}


def harer_zagier_one_point(h: int, k: int) -> int:
    """Number of genus-h gluings of a 2k-gon, via the one-point recurrence

        (k+1) e_h(k) = (4k-2) e_h(k-1) + (2k-1)(k-1)(2k-3) e_{h-1}(k-2)

    with e_0(0) = 1.  Independent of the Wick enumeration above.
    """
    if h < 0 or k < 0:
        return 0
    if k == 0:
        return 1 if h == 0 else 0
    key = (h, k)
    if key not in _hz_cache:
        val = (Fraction(4 * k - 2) * harer_zagier_one_point(h, k - 1)
               + Fraction((2 * k - 1) * (k - 1) * (2 * k - 3))
               * harer_zagier_one_point(h - 1, k - 2)) / (k + 1)
        if val.denominator != 1:
            raise OracleError("one-point recurrence produced a non-integer")
        _hz_cache[key] = val
    return int(_hz_cache[key])


def gaussian_one_point(model: WickModel, h: int, k2: int) -> Fraction:
    """Genus-h coefficient of <Tr M^{2k}> from the one-point recurrence."""
    if k2 % 2:
        return Fraction(0)
    k = k2 // 2
    eps = harer_zagier_one_point(h, k)
    v = model.t / model.quadratic_coefficient
    return eps * v ** k * model.t ** (1 - 2 * h)


# ----------------------------------------------------------------------------
# perturbed potentials
# ----------------------------------------------------------------------------

def connected_correlator_series(V: Polynomial, t, h: int, n: int,
                                orders: Sequence[Sequence[int]],
                                max_vertices: int = DEFAULT_VERTEX_CAP):
    """Connected genus-h correlators of the formal one-matrix integral.

    ``orders`` lists the requested multi-indices (k_1..k_n).  The result maps
    each multi-index to a dict {t_exponent: coefficient}: for a purely
    quadratic potential the dict has a single entry (the correlator is an
    exact monomial in t); higher vertices contribute one entry per
    perturbative order, enumerated through ``max_vertices`` insertions of
    the non-Gaussian part of exp(-(N/t) Tr V(M)).
    """
    t = as_fraction(t)
    if not t:
        raise OracleError("t must be nonzero")
    a = 2 * V.coefficient(2)
    if not a:
        raise OracleError("potential has a degenerate quadratic part")
    if V.coefficient(1):
        raise OracleError("potential must have its saddle at 0 (no linear term)")
    vertex_terms = [(q, V.coefficient(q)) for q in range(3, V.degree + 1)
                    if V.coefficient(q)]
    model = WickModel(t=t, quadratic_coefficient=a)
    out = {}
    for K in orders:
        K = tuple(int(k) for k in K)
        if len(K) != n:
            raise OracleError(f"multi-index {K} does not have n = {n} entries")
        out[K] = _correlator_t_series(model, vertex_terms, K, h, max_vertices)
    return out


def _correlator_t_series(model: WickModel, vertex_terms, K, h, max_vertices):
    series: Dict[int, Fraction] = {}
    base = 2 - 2 * h - len(K)
    for v in range(0, max_vertices + 1):
        if v and not vertex_terms:
            break
        for combo in itertools.combinations_with_replacement(vertex_terms, v):
            degs = tuple(q for q, _ in combo)
            coupling = Fraction(1)
            for _, c in combo:
                coupling *= -c
            # multiset -> number of ordered tuples / v!
            perm_weight = Fraction(_multiset_permutations(degs))
            for fac in range(2, v + 1):
                perm_weight /= fac
            total_edges = sum(K) + sum(degs)
            if total_edges % 2:
                continue
            if total_edges > MAX_HALF_EDGES:
                raise OracleError(
                    f"requested order needs {total_edges} half-edges "
                    f"(cap {MAX_HALF_EDGES}); reduce the order or raise the cap")
            powers = K + degs
            res = gaussian_mixed_moment(model, powers)
            # each vertex carries one factor of N/t, shifting the N-grading
            amount = res.connected.get(base - v, Fraction(0))
            if not amount:
                continue
            # amount sums (t/a)^P over matchings; re-express against pure t^e
            P = total_edges // 2
            c = coupling * perm_weight * amount / model.t ** P
            e = P - v + base
            series[e] = series.get(e, Fraction(0)) + c
    return {e: c for e, c in series.items() if c}


def _multiset_permutations(degs) -> int:
    import math
    out = math.factorial(len(degs))
    for q in set(degs):
        out //= math.factorial(degs.count(q))
    return out


def evaluate_t_series(series: Dict[int, Fraction], t) -> Fraction:
    t = as_fraction(t)
    return sum((c * t ** e for e, c in series.items()), Fraction(0))


# ----------------------------------------------------------------------------
# two-matrix (chain) cross-check
# ----------------------------------------------------------------------------

def chain_effective_variance(quadratic_coeffs: Sequence[Fraction],
                             couplings: Sequence[Fraction], t) -> Fraction:
    """t * (K^-1)_{11} for the chain quadratic form K (tridiagonal).

    K has the a_k on the diagonal and -c_{k,k+1} off it; solved by exact
    Gaussian elimination, independent of the curve builders.
    """
    t = as_fraction(t)
    m = len(quadratic_coeffs)
    a = [as_fraction(v) for v in quadratic_coeffs]
    c = [as_fraction(v) for v in couplings]
    K = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        K[i][i] = a[i]
        if i + 1 < m:
            K[i][i + 1] = -c[i]
            K[i + 1][i] = -c[i]
    rhs = [Fraction(1 if i == 0 else 0) for i in range(m)]
    for col in range(m):
        piv = next((r for r in range(col, m) if K[r][col]), None)
        if piv is None:
            raise OracleError("chain quadratic form is singular")
        K[col], K[piv] = K[piv], K[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = 1 / K[col][col]
        K[col] = [v * inv for v in K[col]]
        rhs[col] *= inv
        for r in range(m):
            if r != col and K[r][col]:
                f = K[r][col]
                K[r] = [v - f * w for v, w in zip(K[r], K[col])]
                rhs[r] -= f * rhs[col]
    return t * rhs[0]


def chain_one_point(quadratic_coeffs, couplings, t, h: int, k2: int) -> Fraction:
    """Genus-h coefficient of <Tr M_1^{2k}> for the Gaussian chain.

    The M_1 pair weight is the effective variance v/N, so the fatgraph count
    is the one-matrix one with v in place of t; graded in powers of N/t.
    """
    t = as_fraction(t)
    if k2 % 2:
        return Fraction(0)
    k = k2 // 2
    v = chain_effective_variance(quadratic_coeffs, couplings, t)
    return harer_zagier_one_point(h, k) * v ** k * t ** (1 - 2 * h)


# ----------------------------------------------------------------------------
# side-by-side comparison against the engine
# ----------------------------------------------------------------------------

@dataclass
class ComparisonRow:
    index: Tuple[int, ...]
    engine: Fraction
    oracle: Fraction

    @property
    def ok(self) -> bool:
        return self.engine == self.oracle


@dataclass
class ComparisonReport:
    h: int
    n: int
    rows: List[ComparisonRow]

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def first_mismatch(self) -> Optional[ComparisonRow]:
        for r in self.rows:
            if not r.ok:
                return r
        return None


def compare_with_engine(engine, V: Polynomial, t, h: int, n: int,
                        orders: Sequence[Sequence[int]]) -> ComparisonReport:
    """Exact coefficient-by-coefficient comparison, engine vs Wick oracle.

    Only purely quadratic potentials admit an exact closed comparison; for
    fixed non-quadratic couplings the formal correlator is an infinite series
    in t and no finite Wick sum reproduces it.
    """
    t = as_fraction(t)
    if any(V.coefficient(q) for q in range(3, V.degree + 1)):
        raise OracleError("oracle comparison requires a purely quadratic potential")
    oracle_vals = connected_correlator_series(V, t, h, n, orders)
    md = engine.omega(h, n)
    max_k = max(max(K) for K in orders)
    engine_vals = engine.expand_observable(md, max_k)
    rows = []
    for K in orders:
        K = tuple(int(k) for k in K)
        rows.append(ComparisonRow(index=K,
                                  engine=engine_vals.get(K, Fraction(0)),
                                  oracle=evaluate_t_series(oracle_vals[K], t)))
    return ComparisonReport(h=h, n=n, rows=rows)
