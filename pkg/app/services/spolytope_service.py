"""
S-Polytope Service - estimates of the limit body S_P of dilated staircases.

Supports:
- Dilate reports: exact r, s of d·P ∩ Z^2 and the estimates (r-1)/d, s/d
- Inner hull A_{P,d} = hull(E/d) and the outer region B_{P,d}
- Certified brackets for v_P and w_P at a given dilate, and along a schedule
- Exact S_P of a triangle from a witness (and the horizontal-chord case)
- Exact S_P for the lex order in the plane
- Weighted projective plane triangles and Seshadri constant brackets

B_{P,d} is the set of e >= 0 with vol(hull(A ∪ {e})) <= vol(P). For A two
dimensional the added double area is the sum of the edge functionals
l_i(e) over the edges visible from e, a contiguous arc of the boundary, so
B is cut out by one linear inequality per contiguous arc.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, List, Optional, Sequence, Tuple

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from app.errors import InputError, WitnessInsufficientError
from app.services.staircase_service import staircase_service
from app.utils.finite_functions import FiniteFn, PointSet, Staircase, finite_fn, newton_polygon
from app.utils.lattice_geometry import (
    Polygon,
    clip,
    convex_hull,
    double_area,
    halfplane_polygon,
    halfplanes,
    horizontal_chord,
    l_ratio,
    lattice_points_dilate,
    row_extent,
)
from app.utils.linear_algebra import RatMatrix, solve, to_rat
from app.utils.monomial_orders import deglex

logger = logging.getLogger(__name__)

Rat = Fraction


# =============================================================================
# RESULT TYPES
# =============================================================================

@dataclass(frozen=True)
class DilateReport:
    """r, s and their scaled estimates for one dilate; r, s are None when d·P ∩ Z^2 is empty."""
    d: Fraction
    point_count: int
    r: Optional[int]
    s: Optional[int]
    v_est: Optional[Fraction]
    w_est: Optional[Fraction]

    @property
    def is_empty(self) -> bool:
        return self.point_count == 0


@dataclass(frozen=True)
class SPBracket:
    """A_{P,d} ⊆ S_P ⊆ B_{P,d}; an upper bound of None means the B region is unbounded."""
    d: Fraction
    A_poly: Optional[Polygon]
    vol_target: Fraction
    v_lo: Optional[Fraction]
    v_hi: Optional[Fraction]
    w_lo: Optional[Fraction]
    w_hi: Optional[Fraction]
    B_region: Optional[Polygon] = None


@dataclass(frozen=True)
class ScheduleEntry:
    """One dilate of a schedule with running (monotone) bracket columns."""
    report: DilateReport
    bracket: SPBracket
    v_lo_run: Optional[Fraction]
    w_lo_run: Optional[Fraction]
    v_hi_run: Optional[Fraction]
    w_hi_run: Optional[Fraction]


@dataclass(frozen=True)
class TriangleSP:
    """Exact S_P of a triangle: hull{(0,0), (v,0), e, (0,v)} with v·w = 2·vol(P)."""
    shape: str
    vertices: Tuple[Tuple[Fraction, Fraction], ...]
    v: Fraction
    w: Fraction
    e: Tuple[Fraction, Fraction]

    @property
    def polygon(self) -> Polygon:
        return convex_hull(self.vertices)


@dataclass(frozen=True)
class WeightedTriangle:
    """P = ρ(P') for the weights (a, b, c) and the construction used for ρ."""
    weights: Tuple[int, int, int]
    polygon: Polygon
    basis: Tuple[Tuple[int, int, int], Tuple[int, int, int]]
    anchor: Tuple[int, int, int]
    variant: int = 0


@dataclass(frozen=True)
class SeshadriBracket:
    """[lo, hi] around the Seshadri constant; hi is None while w_lo is 0 or undefined."""
    weights: Tuple[int, int, int]
    lo: Fraction
    hi: Optional[Fraction]
    entries: Tuple[ScheduleEntry, ...] = field(default_factory=tuple)


# =============================================================================
# HELPERS
# =============================================================================

def _require_area(P: Polygon):
    if P.dim != 2:
        raise InputError(f"{P!r} does not have positive area")


def _positive(d) -> Fraction:
    d = to_rat(d)
    if d <= 0:
        raise InputError(f"dilation factor must be positive, got {d}")
    return d


@lru_cache(maxsize=128)
def _dilate_staircase(P: Polygon, d: Fraction) -> Optional[Tuple[PointSet, Staircase]]:
    points = lattice_points_dilate(P, d)
    if not points:
        return None
    A = PointSet(2, tuple(points))
    logger.debug(f"dilate d={d}: {len(A)} lattice points")
    return A, staircase_service.compute_E(A, deglex(2))


def _arc_constraints(A: Polygon, slack) -> List[Tuple]:
    """One inequality per contiguous proper arc of A's edges."""
    edges = [(a, b, c) for a, b, c in halfplanes(A)]
    k = len(edges)
    out = []
    for start in range(k):
        a = b = c = 0
        for length in range(1, k):
            ea, eb, ec = edges[(start + length - 1) % k]
            a, b, c = a + ea, b + eb, c + ec
            out.append((a, b, c + slack))
    return out


def _running(values, better):
    out, current = [], None
    for value in values:
        if value is not None:
            current = value if current is None else better(current, value)
        out.append(current)
    return out


def parse_schedule(spec: str) -> List[Fraction]:
    """ "1,2,4,8" -> [1, 2, 4, 8]; entries may be "num/den"."""
    parts = [p for p in (s.strip() for s in spec.split(",")) if p]
    if not parts:
        raise InputError(f"empty d schedule {spec!r}")
    return [_positive(p) for p in parts]


def _is_certified(certificate: Any) -> bool:
    if isinstance(certificate, bool):
        return certificate
    return getattr(certificate, "status", None) == "irreducible"


def _triangle(P: Polygon):
    if P.dim != 2 or len(P.vertices) != 3:
        raise InputError(f"{P!r} is not a nondegenerate triangle")


def _column_lengths(P: Polygon):
    swapped = convex_hull((y, x) for x, y in P.vertices)
    xs = sorted({Fraction(x) for x, _ in P.vertices})
    lengths = []
    for x in xs:
        extent = row_extent(swapped, x)
        lengths.append(extent[1] - extent[0] if extent else Fraction(0))
    return xs, lengths


def _superlevel_measure(xs, lengths, t: Fraction) -> Fraction:
    """Measure of {x : L(x) >= t} for the piecewise linear L through (xs, lengths)."""
    total = Fraction(0)
    for (x0, l0), (x1, l1) in zip(zip(xs, lengths), zip(xs[1:], lengths[1:])):
        if l0 >= t and l1 >= t:
            total += x1 - x0
        elif l0 >= t or l1 >= t:
            crossing = x0 + (t - l0) * (x1 - x0) / (l1 - l0)
            total += (crossing - x0) if l0 >= t else (x1 - crossing)
    return total


def _check_weights(a: int, b: int, c: int):
    if min(a, b, c) <= 0:
        raise InputError(f"weights must be positive, got {(a, b, c)}")
    if math.gcd(a, b, c) != 1:
        raise InputError(f"weights {(a, b, c)} are not coprime")


def weighted_monomial_count(a: int, b: int, c: int, d: int) -> int:
    """#{(i, j, k) in N^3 : a·i + b·j + c·k = d}."""
    count = 0
    for i in range(d // a + 1):
        rest = d - a * i
        for j in range(rest // b + 1):
            if (rest - b * j) % c == 0:
                count += 1
    return count


def _lattice_data(a: int, b: int, c: int, variant: int):
    s, t, g = (int(x) for x in igcdex(a, b))
    m, n, _ = (int(x) for x in igcdex(g, c))
    u1 = (b // g, -a // g, 0)
    u2 = (-c * s, -c * t, g)
    anchor = (s * m, t * m, n)
    if variant == 0:
        return (u1, u2), anchor
    if variant == 1:
        shifted = tuple(x + y for x, y in zip(u1, u2))
        return (u2, shifted), tuple(x + y for x, y in zip(anchor, u1))
    raise InputError(f"unknown weighted-triangle variant {variant}")


class SPolytopeService:
    """Brackets and exact shapes of the limit body S_P of dilated staircases."""

    # ===== DILATES =====

    def dilate_staircase(self, P: Polygon, d) -> Optional[Tuple[PointSet, Staircase]]:
        """(d·P ∩ Z^2, its deglex staircase), or None when there are no lattice points."""
        return _dilate_staircase(P, _positive(d))

    def dilate_report(self, P: Polygon, d) -> DilateReport:
        _require_area(P)
        d = _positive(d)
        found = self.dilate_staircase(P, d)
        if found is None:
            return DilateReport(d, 0, None, None, None, None)
        A, E = found
        r = staircase_service.r_value(A, E)
        s = staircase_service.s_value(A, E)
        return DilateReport(d, len(A), r, s, Fraction(r - 1) / d, Fraction(s) / d)

    def a_lower(self, P: Polygon, d) -> Optional[Polygon]:
        """hull(E_{d·P ∩ Z^2} / d); None when the dilate holds no lattice point."""
        _require_area(P)
        d = _positive(d)
        found = self.dilate_staircase(P, d)
        if found is None:
            return None
        _, E = found
        return convex_hull((Fraction(e[0]) / d, Fraction(e[1]) / d) for e in E.elements)

    def b_contains(self, P: Polygon, d, e: Sequence) -> bool:
        """vol(hull(A_{P,d} ∪ {e})) <= vol(P), exactly."""
        point = (to_rat(e[0]), to_rat(e[1]))
        if point[0] < 0 or point[1] < 0:
            raise InputError(f"B region lives in the positive quadrant, got {point}")
        A = self.a_lower(P, d)
        if A is None:
            return True
        return double_area(convex_hull(list(A.vertices) + [point])) <= double_area(P)

    def b_region(self, P: Polygon, A: Polygon) -> Optional[Polygon]:
        """Exact B region for a two-dimensional inner hull A; None if unbounded."""
        if A is None or A.dim < 2:
            return None
        slack = double_area(P) - double_area(A)
        single = [(a, b, c + slack) for a, b, c in halfplanes(A)] + [(-1, 0, 0), (0, -1, 0)]
        region = halfplane_polygon(single)
        for constraint in _arc_constraints(A, slack):
            if region is None:
                break
            region = clip(region, constraint)
        return region

    def bracket(self, P: Polygon, d) -> SPBracket:
        _require_area(P)
        d = _positive(d)
        report = self.dilate_report(P, d)
        vol = Fraction(double_area(P)) / 2
        if report.is_empty:
            return SPBracket(d, None, vol, None, None, None, None)
        A = self.a_lower(P, d)
        region = self.b_region(P, A)
        v_hi = w_hi = None
        if region is not None:
            w_hi = max(Fraction(x + y) for x, y in region.vertices)
            along_x = row_extent(region, 0)
            swapped = convex_hull((y, x) for x, y in region.vertices)
            along_y = row_extent(swapped, 0)
            v_hi = min(along_x[1], along_y[1])
        return SPBracket(d, A, vol, report.v_est, v_hi, report.w_est, w_hi, region)

    def dilate_schedule(self, P: Polygon, schedule: Sequence) -> List[ScheduleEntry]:
        """Brackets for each d, sorted by d, with running max of lower and min of upper bounds."""
        ds = sorted({_positive(d) for d in schedule})
        reports = [self.dilate_report(P, d) for d in ds]
        brackets = [self.bracket(P, d) for d in ds]
        v_lo = _running([b.v_lo for b in brackets], max)
        w_lo = _running([b.w_lo for b in brackets], max)
        v_hi = _running([b.v_hi for b in brackets], min)
        w_hi = _running([b.w_hi for b in brackets], min)
        entries = [
            ScheduleEntry(rep, br, vl, wl, vh, wh)
            for rep, br, vl, wl, vh, wh in zip(reports, brackets, v_lo, w_lo, v_hi, w_hi)
        ]
        logger.info(f"schedule of {len(entries)} dilates done for {P!r}")
        return entries

    # ===== EXACT S_P FOR TRIANGLES =====

    def triangle_sp_exact(self, P: Polygon, witness: FiniteFn, witness_irreducible: Any) -> TriangleSP:
        """
        S_P = hull{(0,0), (v,0), e, (0,v)} where e = sm(f)/l_{P,f}, w = |e| and
        v = 2·vol(P)/w, valid when f is irreducible and w^2 >= 2·vol(P).
        """
        _triangle(P)
        if not _is_certified(witness_irreducible):
            raise InputError("witness is not certified irreducible")
        exponent = staircase_service.sm(witness, deglex(2))
        scale_factor = Fraction(l_ratio(P, newton_polygon(witness)))
        if scale_factor == 0:
            raise InputError("witness is a unit; its support is a single point")
        e = (exponent[0] / scale_factor, exponent[1] / scale_factor)
        w = e[0] + e[1]
        two_vol = Fraction(double_area(P))
        if w * w < two_vol:
            raise WitnessInsufficientError(f"w = {w} with w^2 < 2vol(P) = {two_vol}")
        v = two_vol / w
        hull = convex_hull([(0, 0), (v, 0), e, (0, v)])
        shape = "quadrilateral" if len(hull.vertices) == 4 else "triangle"
        return TriangleSP(shape, tuple((Fraction(x), Fraction(y)) for x, y in hull.vertices), v, w, e)

    def horizontal_chord_sp(self, P: Polygon) -> TriangleSP:
        """S_P = hull{(0,0), (w,0), (0,height)} when the longest horizontal chord w reaches sqrt(2vol)."""
        _triangle(P)
        w, _ = horizontal_chord(P)
        if Fraction(w) ** 2 < double_area(P):
            raise WitnessInsufficientError(f"horizontal chord {w} is shorter than sqrt(2vol(P))")
        unit = finite_fn({(1, 0): 1, (0, 0): -1})
        return self.triangle_sp_exact(P, unit, True)

    # ===== LEX S_P IN THE PLANE =====

    def lex_sp_2d(self, P: Polygon) -> Polygon:
        """
        S_P for lex with X1 < X2: {(e1, e2) : measure{x : L(x) >= e2} >= e1} where
        L(x) is the length of the vertical fiber of P over x.
        """
        if P.dim != 2:
            raise InputError(f"{P!r} is degenerate")
        xs, lengths = _column_lengths(P)
        levels = sorted(set(lengths) | {Fraction(0)})
        top = max(lengths)
        points = [(Fraction(0), Fraction(0)), (Fraction(0), top)]
        points += [(_superlevel_measure(xs, lengths, t), t) for t in levels]
        return convex_hull(points)

    # ===== WEIGHTED PROJECTIVE PLANES =====

    def weighted_triangle(self, a: int, b: int, c: int, variant: int = 0) -> WeightedTriangle:
        """
        Rational triangle ρ(P') with P' = hull{(1/a,0,0), (0,1/b,0), (0,0,1/c)}.
        ρ(x) is the coordinate vector of x - (a·x) p0 in a basis of the rank-two
        lattice {a x + b y + c z = 0}, p0 an integer point of weighted degree one,
        so ρ maps the monomials of weighted degree d onto d·P ∩ Z^2.
        """
        _check_weights(a, b, c)
        basis, anchor = _lattice_data(a, b, c, variant)
        weights = (a, b, c)
        if sum(w * p for w, p in zip(weights, anchor)) != 1:
            raise ArithmeticError(f"anchor {anchor} does not have weighted degree 1")
        columns = RatMatrix.from_rows([[basis[0][i], basis[1][i]] for i in range(3)], 2)

        def rho(x):
            level = sum(w * xi for w, xi in zip(weights, x))
            target = [x[i] - level * anchor[i] for i in range(3)]
            coords = solve(columns, target)
            if coords is None:
                raise ArithmeticError(f"{target} is not in the weight lattice")
            return coords

        corners = [
            (Fraction(1, a), 0, 0),
            (0, Fraction(1, b), 0),
            (0, 0, Fraction(1, c)),
        ]
        polygon = convex_hull(rho(x) for x in corners)
        return WeightedTriangle(weights, polygon, basis, anchor, variant)

    def seshadri_bracket(self, a: int, b: int, c: int, d_schedule: Sequence, variant: int = 0) -> SeshadriBracket:
        """[1/w_hi, 1/w_lo] intersected over the schedule."""
        triangle = self.weighted_triangle(a, b, c, variant)
        entries = self.dilate_schedule(triangle.polygon, d_schedule)
        lo, hi = Fraction(0), None
        for entry in entries:
            br = entry.bracket
            if br.w_hi:
                lo = max(lo, 1 / br.w_hi)
            if br.w_lo:
                hi = 1 / br.w_lo if hi is None else min(hi, 1 / br.w_lo)
        logger.info(f"seshadri bracket for P({a},{b},{c}): [{lo}, {hi}]")
        return SeshadriBracket((a, b, c), lo, hi, tuple(entries))

    def seshadri_brackets_agree(self, a: int, b: int, c: int, d_schedule: Sequence) -> bool:
        """
        The two ρ constructions bracket a common value. On integer dilates the
        two triangles differ by a unimodular map and a lattice translation, so
        the upper ends (from s) are equal; the lower ends come from B regions
        and may differ at finite d.
        """
        first = self.seshadri_bracket(a, b, c, d_schedule, 0)
        second = self.seshadri_bracket(a, b, c, d_schedule, 1)
        if all(to_rat(d).denominator == 1 for d in d_schedule) and first.hi != second.hi:
            return False
        his = [h for h in (first.hi, second.hi) if h is not None]
        return max(first.lo, second.lo) <= min(his) if his else True


# Singleton
spolytope_service = SPolytopeService()
