"""
Exact planar geometry for lattice and rational polygons.

Polygons are immutable values holding their extreme points in canonical order:
counterclockwise starting from the lowest (then leftmost) vertex. Coordinates
are ints for lattice polygons and Fractions for rational ones; nothing here
touches floating point.

Main entry points:
- convex_hull, double_area, boundary_count, lattice_points(_dilate)
- minkowski_sum, mixed_volume_2x, minkowski_decompositions
- unimodular_canonical, enumerate_polygons
- l_ratio, horizontal_chord
- halfplane_polygon / clip for regions cut out by linear inequalities
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from app.errors import InputError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]
Point = Tuple[Number, Number]
Constraint = Tuple[Number, Number, Number]  # a*x + b*y <= c


# =============================================================================
# POLYGON VALUE
# =============================================================================

@dataclass(frozen=True)
class Polygon:
    """Convex hull of finitely many points; dim is 0, 1 or 2."""
    vertices: Tuple[Point, ...]
    dim: int

    @property
    def is_lattice(self) -> bool:
        return all(_is_integral(c) for v in self.vertices for c in v)

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self):
        corners = ", ".join(f"({_fmt(x)},{_fmt(y)})" for x, y in self.vertices)
        return f"<Polygon dim={self.dim} [{corners}]>"


LatticePolygon = Polygon
RatPolygon = Polygon


def _fmt(c: Number) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _is_integral(c: Number) -> bool:
    return Fraction(c).denominator == 1


def _normalize(c: Number) -> Number:
    """Fractions with denominator 1 become ints."""
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def cross(o: Point, a: Point, b: Point) -> Number:
    """(a - o) x (b - o)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _det(u: Point, v: Point) -> Number:
    return u[0] * v[1] - u[1] * v[0]


def _yx(p: Point) -> Tuple[Number, Number]:
    return (p[1], p[0])


# =============================================================================
# HULL, AREA, BOUNDARY
# =============================================================================

def convex_hull(points: Iterable[Sequence[Number]]) -> Polygon:
    """Extreme points in canonical counterclockwise order (monotone chain)."""
    pts = sorted({(_normalize(p[0]), _normalize(p[1])) for p in points})
    if not pts:
        raise InputError("convex hull of an empty point set")
    if len(pts) == 1:
        return Polygon((pts[0],), 0)

    def chain(seq):
        out: List[Point] = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) <= 2 or all(cross(hull[0], hull[1], p) == 0 for p in hull):
        ends = sorted((pts[0], pts[-1]), key=_yx)
        return Polygon(tuple(ends), 1)
    start = min(range(len(hull)), key=lambda i: _yx(hull[i]))
    return Polygon(tuple(hull[start:] + hull[:start]), 2)


def double_area(P: Polygon) -> Number:
    """2 x Euclidean area (shoelace); 0 for dim <= 1."""
    if P.dim < 2:
        return 0
    v = P.vertices
    total = sum(_det(v[i], v[(i + 1) % len(v)]) for i in range(len(v)))
    return _normalize(total)


def edge_vectors(P: Polygon) -> List[Point]:
    """Directed boundary edges; a segment contributes both orientations."""
    v = P.vertices
    if P.dim == 0:
        return []
    if P.dim == 1:
        d = (v[1][0] - v[0][0], v[1][1] - v[0][1])
        return [d, (-d[0], -d[1])]
    return [
        (v[(i + 1) % len(v)][0] - v[i][0], v[(i + 1) % len(v)][1] - v[i][1])
        for i in range(len(v))
    ]


def _require_lattice(P: Polygon):
    if not P.is_lattice:
        raise InputError(f"{P!r} is not a lattice polygon")


def boundary_count(P: Polygon) -> int:
    """Sum of gcds of the directed edge vectors (segments counted twice)."""
    _require_lattice(P)
    return sum(math.gcd(int(dx), int(dy)) for dx, dy in edge_vectors(P))


def count_lattice_points(P: Polygon) -> int:
    """|P ∩ Z^2| through Pick's formula."""
    _require_lattice(P)
    return (int(double_area(P)) + boundary_count(P)) // 2 + 1


def edge_gcds(P: Polygon) -> List[int]:
    _require_lattice(P)
    return sorted(math.gcd(int(dx), int(dy)) for dx, dy in edge_vectors(P))


# =============================================================================
# HALF-PLANES AND LATTICE POINT SWEEPS
# =============================================================================

def halfplanes(P: Polygon) -> List[Constraint]:
    """Inequalities a*x + b*y <= c cutting out a two-dimensional P."""
    if P.dim != 2:
        raise InputError("half-plane description needs a two-dimensional polygon")
    out = []
    v = P.vertices
    for i, p in enumerate(v):
        q = v[(i + 1) % len(v)]
        a = q[1] - p[1]
        b = -(q[0] - p[0])
        out.append((a, b, a * p[0] + b * p[1]))
    return out


def contains_point(P: Polygon, point: Sequence[Number]) -> bool:
    x, y = point
    if P.dim == 2:
        return all(a * x + b * y <= c for a, b, c in halfplanes(P))
    if P.dim == 1:
        p, q = P.vertices
        if cross(p, q, (x, y)) != 0:
            return False
        return min(p[0], q[0]) <= x <= max(p[0], q[0]) and min(p[1], q[1]) <= y <= max(p[1], q[1])
    return (x, y) == P.vertices[0]


def is_subset(inner: Polygon, outer: Polygon) -> bool:
    return all(contains_point(outer, v) for v in inner.vertices)


def _row_sweep(constraints: Sequence[Constraint], y_lo: Number, y_hi: Number) -> List[Tuple[int, int]]:
    points = []
    for y in range(math.ceil(y_lo), math.floor(y_hi) + 1):
        lo: Optional[int] = None
        hi: Optional[int] = None
        feasible = True
        for a, b, c in constraints:
            rest = c - b * y
            if a > 0:
                bound = math.floor(Fraction(rest) / a)
                hi = bound if hi is None else min(hi, bound)
            elif a < 0:
                bound = math.ceil(Fraction(rest) / a)
                lo = bound if lo is None else max(lo, bound)
            elif rest < 0:
                feasible = False
                break
        if not feasible or lo is None or hi is None:
            continue
        points.extend((x, y) for x in range(lo, hi + 1))
    return points


def scale(P: Polygon, d: Number) -> Polygon:
    d = Fraction(d)
    if d <= 0:
        raise InputError(f"dilation factor must be positive, got {d}")
    return convex_hull((d * x, d * y) for x, y in P.vertices)


def translate(P: Polygon, v: Sequence[Number]) -> Polygon:
    return convex_hull((x + v[0], y + v[1]) for x, y in P.vertices)


def transform(P: Polygon, U: Sequence[Sequence[int]], t: Sequence[Number] = (0, 0)) -> Polygon:
    """Image under x -> U x + t."""
    return convex_hull(
        (U[0][0] * x + U[0][1] * y + t[0], U[1][0] * x + U[1][1] * y + t[1]) for x, y in P.vertices
    )


def lattice_points_dilate(P: Polygon, d: Number = 1) -> List[Tuple[int, int]]:
    """Lattice points of d·P, ordered lex by (y, x)."""
    Q = scale(P, d) if d != 1 else P
    if Q.dim == 0:
        x, y = Q.vertices[0]
        return [(int(x), int(y))] if _is_integral(x) and _is_integral(y) else []
    if Q.dim == 1:
        (px, py), (qx, qy) = Q.vertices
        if py == qy:
            if not _is_integral(py):
                return []
            return [(x, int(py)) for x in range(math.ceil(min(px, qx)), math.floor(max(px, qx)) + 1)]
        points = []
        for y in range(math.ceil(min(py, qy)), math.floor(max(py, qy)) + 1):
            x = Fraction(px) + (y - py) * Fraction(qx - px) / (qy - py)
            if x.denominator == 1:
                points.append((x.numerator, y))
        return points
    ys = [v[1] for v in Q.vertices]
    return _row_sweep(halfplanes(Q), min(ys), max(ys))


def lattice_points(P: Polygon) -> List[Tuple[int, int]]:
    return lattice_points_dilate(P, 1)


def halfplane_polygon(constraints: Sequence[Constraint]) -> Optional[Polygon]:
    """Bounded region {a*x + b*y <= c}; None when empty. Vertex enumeration."""
    vertices = []
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(constraints, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        x = Fraction(c1 * b2 - c2 * b1) / det
        y = Fraction(a1 * c2 - a2 * c1) / det
        if all(a * x + b * y <= c for a, b, c in constraints):
            vertices.append((x, y))
    if not vertices:
        return None
    return convex_hull(vertices)


def clip(P: Polygon, constraint: Constraint) -> Optional[Polygon]:
    """P ∩ {a*x + b*y <= c} (Sutherland-Hodgman on one edge)."""
    a, b, c = constraint
    pts = list(P.vertices)
    out = []
    for i, p in enumerate(pts):
        q = pts[(i + 1) % len(pts)]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = Fraction(fp) / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    if not out:
        return None
    return convex_hull(out)


# =============================================================================
# MINKOWSKI SUMS AND MIXED VOLUMES
# =============================================================================

def _half(v: Point) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _angle_cmp(u: Point, v: Point) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    d = _det(u, v)
    return -1 if d > 0 else (1 if d < 0 else 0)


def minkowski_sum(P: Polygon, Q: Polygon) -> Polygon:
    """P + Q by merging edge vectors in angular order."""
    start = (P.vertices[0][0] + Q.vertices[0][0], P.vertices[0][1] + Q.vertices[0][1])
    merged = sorted(edge_vectors(P) + edge_vectors(Q), key=cmp_to_key(_angle_cmp))
    points = [start]
    x, y = start
    for dx, dy in merged:
        x, y = x + dx, y + dy
        points.append((x, y))
    return convex_hull(points)


def mixed_volume_2x(P: Polygon, Q: Polygon) -> Number:
    """2·vol(P,Q) = vol(P+Q) - vol(P) - vol(Q)."""
    total = Fraction(double_area(minkowski_sum(P, Q)) - double_area(P) - double_area(Q), 2)
    return _normalize(total)


def edge_sequence(P: Polygon) -> List[Tuple[Tuple[int, int], int]]:
    """(primitive direction, lattice length) per edge, in boundary order."""
    _require_lattice(P)
    out = []
    for dx, dy in edge_vectors(P):
        g = math.gcd(int(dx), int(dy))
        out.append(((int(dx) // g, int(dy) // g), g))
    return out


def minkowski_decompositions(P: Polygon) -> List[Tuple[Polygon, Polygon]]:
    """
    Unordered pairs (Q1, Q2) of lattice polygons with at least two lattice
    points each and Q1 + Q2 = P. Each edge's lattice length is split between
    the summands; a split is admissible when the first summand's edges close up.
    """
    _require_lattice(P)
    if P.dim == 0:
        return []
    seq = edge_sequence(P)
    lengths = tuple(g for _, g in seq)
    pairs = []
    for split in itertools.product(*(range(g + 1) for g in lengths)):
        rest = tuple(g - j for g, j in zip(lengths, split))
        if not any(split) or not any(rest) or split > rest:
            continue
        sx = sum(j * u[0] for j, (u, _) in zip(split, seq))
        sy = sum(j * u[1] for j, (u, _) in zip(split, seq))
        if sx or sy:
            continue
        q1 = _walk(P.vertices[0], seq, split)
        q2 = _walk((0, 0), seq, rest)
        pairs.append((q1, q2))
    return pairs


def _walk(start: Point, seq, multiplicities) -> Polygon:
    x, y = start
    points = [(x, y)]
    for (u, _), j in zip(seq, multiplicities):
        x, y = x + j * u[0], y + j * u[1]
        points.append((x, y))
    return convex_hull(points)


# =============================================================================
# UNIMODULAR NORMAL FORM
# =============================================================================

def _normal_image(vertices: Sequence[Point], i: int, step: int) -> Tuple[Point, ...]:
    """
    Image of the polygon under the unimodular map that sends vertex i to the
    origin, the primitive edge towards vertex i+step to (1, 0), puts the
    polygon in the upper half plane and reduces the other neighbor's x
    coordinate modulo its height.
    """
    n = len(vertices)
    o = vertices[i]
    nxt = vertices[(i + step) % n]
    other = vertices[(i - step) % n]
    dx, dy = nxt[0] - o[0], nxt[1] - o[1]
    g = math.gcd(dx, dy)
    p, q = dx // g, dy // g
    s, t, h = (int(x) for x in igcdex(p, q))
    if h < 0:
        s, t = -s, -t

    def image(pt):
        x, y = pt[0] - o[0], pt[1] - o[1]
        return (s * x + t * y, -q * x + p * y)

    mapped = [image(pt) for pt in vertices]
    ox, oy = image(other)
    if oy < 0:
        mapped = [(x, -y) for x, y in mapped]
        oy = -oy
    k = ox // oy
    mapped = [(x - k * y, y) for x, y in mapped]
    return convex_hull(mapped).vertices


def unimodular_canonical(P: Polygon) -> Polygon:
    """Canonical representative of P under x -> Ux + t, det U = ±1, t ∈ Z^2."""
    _require_lattice(P)
    if P.dim == 0:
        return Polygon(((0, 0),), 0)
    if P.dim == 1:
        (px, py), (qx, qy) = P.vertices
        return Polygon(((0, 0), (math.gcd(qx - px, qy - py), 0)), 1)
    vertices = [(int(x), int(y)) for x, y in P.vertices]
    best = min(
        _normal_image(vertices, i, step)
        for i in range(len(vertices))
        for step in (1, -1)
    )
    return Polygon(best, 2)


def unimodular_equivalent(P: Polygon, Q: Polygon) -> bool:
    return unimodular_canonical(P) == unimodular_canonical(Q)


# =============================================================================
# BOUNDED-AREA ENUMERATION
# =============================================================================

def segment(length: int) -> Polygon:
    return Polygon(((0, 0), (length, 0)), 1)


def _children(Q: Polygon, max_double_area: int) -> Iterable[Polygon]:
    """
    Polygons hull(Q ∪ {v}) with double area <= bound that contain exactly one
    lattice point more than Q. Every dim-2 lattice polygon arises this way from
    the hull of its lattice points minus one vertex.
    """
    count = count_lattice_points(Q)
    if Q.dim == 1:
        length = Q.vertices[1][0]
        for height in range(1, max_double_area // length + 1):
            for x in range(height):
                P = convex_hull([(0, 0), (length, 0), (x, height)])
                if count_lattice_points(P) == count + 1:
                    yield P
        return

    slack = max_double_area - int(double_area(Q))
    constraints = [(a, b, c + slack) for a, b, c in halfplanes(Q)]
    region = halfplane_polygon(constraints)
    ys = [v[1] for v in region.vertices]
    own = halfplanes(Q)
    for v in _row_sweep(constraints, min(ys), max(ys)):
        added = sum(max(0, a * v[0] + b * v[1] - c) for a, b, c in own)
        if added == 0 or added > slack:
            continue
        P = convex_hull(list(Q.vertices) + [v])
        if count_lattice_points(P) == count + 1:
            yield P


def _fits_box(P: Polygon, size: int) -> bool:
    xs = [v[0] for v in P.vertices]
    ys = [v[1] for v in P.vertices]
    return max(xs) - min(xs) <= size and max(ys) - min(ys) <= size


def enumerate_polygons(max_double_area: int, box_factor: int = 4) -> List[Polygon]:
    """
    One canonical representative per unimodular class of lattice polygons of
    dimension 1 or 2 with double area <= bound. Segments of lattice length
    1..max(1, bound) stand for the dimension-1 classes.
    """
    if max_double_area < 0:
        raise InputError("max_double_area must be nonnegative")
    bound = max_double_area
    levels: Dict[int, Set[Polygon]] = {a: set() for a in range(bound + 1)}
    for length in range(1, max(1, bound) + 1):
        levels[0].add(segment(length))

    box = box_factor * max(1, bound)
    outside = 0
    for a in range(bound + 1):
        logger.debug(f"enumeration level 2vol={a}: {len(levels[a])} classes")
        for Q in sorted(levels[a], key=lambda p: p.vertices):
            for P in _children(Q, bound):
                canonical = unimodular_canonical(P)
                if not _fits_box(canonical, box):
                    outside += 1
                levels[int(double_area(canonical))].add(canonical)
    if outside:
        logger.warning(f"{outside} polygons lie outside the normalization box [0,{box}]^2; kept as enumerated")

    result = [P for a in range(bound + 1) for P in levels[a]]
    result.sort(key=lambda p: (double_area(p), p.dim, p.vertices))
    logger.info(f"enumerated {len(result)} polygon classes with 2vol <= {bound}")
    return result


# =============================================================================
# TRIANGLE RATIOS AND CHORDS
# =============================================================================

def l_ratio(P: Polygon, A: Union[Polygon, Iterable[Sequence[Number]]]) -> Number:
    """Smallest l >= 0 such that A fits in l·P + v for a nondegenerate triangle P."""
    if P.dim != 2 or len(P.vertices) != 3:
        raise InputError("l_ratio needs a nondegenerate triangle")
    points = list(A.vertices) if isinstance(A, Polygon) else [tuple(p) for p in A]
    if not points:
        raise InputError("l_ratio of an empty set")
    p0, p1, p2 = P.vertices
    m00, m01 = p1[0] - p0[0], p2[0] - p0[0]
    m10, m11 = p1[1] - p0[1], p2[1] - p0[1]
    det = Fraction(m00 * m11 - m01 * m10)

    def to_standard(pt):
        x, y = pt[0] - p0[0], pt[1] - p0[1]
        return ((m11 * x - m01 * y) / det, (-m10 * x + m00 * y) / det)

    images = [to_standard(pt) for pt in points]
    value = max(x + y for x, y in images) - min(x for x, _ in images) - min(y for _, y in images)
    return _normalize(value)


def row_extent(P: Polygon, y: Number) -> Optional[Tuple[Fraction, Fraction]]:
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for a, b, c in halfplanes(P):
        rest = Fraction(c - b * y)
        if a > 0:
            hi = rest / a if hi is None else min(hi, rest / a)
        elif a < 0:
            lo = rest / a if lo is None else max(lo, rest / a)
        elif rest < 0:
            return None
    if lo is None or hi is None or lo > hi:
        return None
    return lo, hi


def horizontal_chord(P: Polygon) -> Tuple[Number, Number]:
    """(longest horizontal segment in P, vertical height of P)."""
    if P.dim != 2:
        raise InputError("horizontal_chord needs a two-dimensional polygon")
    best = Fraction(0)
    for _, y in P.vertices:
        extent = row_extent(P, y)
        if extent:
            best = max(best, extent[1] - extent[0])
    ys = [v[1] for v in P.vertices]
    return _normalize(best), _normalize(max(ys) - min(ys))
