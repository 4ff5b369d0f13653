"""
Finite point sets, finitely supported functions and staircases.

Value types shared by the services, plus the pure operations on them: the
pairing <f, X^e>, convolution, Newton polygons and the binomial evaluation
rows used by the staircase scan.
"""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from app.errors import InputError
from app.utils.lattice_geometry import Polygon, convex_hull
from app.utils.linear_algebra import RatMatrix, to_rat
from app.utils.monomial_orders import Exponent, MonomialOrder, degree, is_lower_set

IntPoint = Tuple[int, ...]


def point_key(p: Sequence[int]) -> Tuple[int, ...]:
    """Point order: lexicographic with the last coordinate most significant, (y, x) in the plane."""
    return tuple(reversed(p))


# =============================================================================
# VALUE TYPES
# =============================================================================

@dataclass(frozen=True)
class PointSet:
    """Finite set of distinct integer points of common arity, kept in point order."""
    n: int
    points: Tuple[IntPoint, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"arity must be positive, got {self.n}")
        for p in self.points:
            if len(p) != self.n:
                raise InputError(f"point {p} does not have arity {self.n}")
        if len(set(self.points)) != len(self.points):
            raise InputError("point set contains duplicates")
        ordered = tuple(sorted(self.points, key=point_key))
        object.__setattr__(self, "points", ordered)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in set(self.points)

    def lower_corner(self) -> IntPoint:
        return tuple(min(p[i] for p in self.points) for i in range(self.n))

    def extents(self) -> Tuple[int, ...]:
        """Per-axis (max - min); the cap of ascending scans."""
        lo = self.lower_corner()
        return tuple(max(p[i] for p in self.points) - lo[i] for i in range(self.n))

    def translate(self, v: Sequence[int]) -> "PointSet":
        return PointSet(self.n, tuple(tuple(a + b for a, b in zip(p, v)) for p in self.points))


def point_set(points: Iterable[Sequence[int]], n: Optional[int] = None) -> PointSet:
    pts = tuple(tuple(int(c) for c in p) for p in points)
    if n is None:
        if not pts:
            raise InputError("cannot infer the arity of an empty point set")
        n = len(pts[0])
    return PointSet(n, pts)


@dataclass(frozen=True)
class FiniteFn:
    """Finitely supported function Z^n -> Q; zero values are never stored."""
    n: int
    terms: Tuple[Tuple[IntPoint, Fraction], ...]

    def __post_init__(self):
        merged: Dict[IntPoint, Fraction] = {}
        for p, c in self.terms:
            if len(p) != self.n:
                raise InputError(f"point {p} does not have arity {self.n}")
            if p in merged:
                raise InputError(f"point {p} listed twice")
            merged[tuple(p)] = to_rat(c)
        ordered = tuple(sorted(((p, c) for p, c in merged.items() if c != 0), key=lambda t: point_key(t[0])))
        object.__setattr__(self, "terms", ordered)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def mapping(self) -> Dict[IntPoint, Fraction]:
        return dict(self.terms)

    def support(self) -> PointSet:
        return PointSet(self.n, tuple(p for p, _ in self.terms))

    def value(self, p: Sequence[int]) -> Fraction:
        return self.mapping.get(tuple(p), Fraction(0))

    def scaled(self, c: Union[int, Fraction]) -> "FiniteFn":
        return FiniteFn(self.n, tuple((p, v * c) for p, v in self.terms))

    def translate(self, v: Sequence[int]) -> "FiniteFn":
        return FiniteFn(self.n, tuple((tuple(a + b for a, b in zip(p, v)), c) for p, c in self.terms))

    def transform(self, U: Sequence[Sequence[int]], t: Sequence[int]) -> "FiniteFn":
        """Push forward along the affine map x -> U x + t (U invertible over Z)."""
        def image(p):
            return tuple(sum(U[i][j] * p[j] for j in range(self.n)) + t[i] for i in range(self.n))
        return FiniteFn(self.n, tuple((image(p), c) for p, c in self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self):
        return f"<FiniteFn n={self.n} terms={len(self.terms)}>"


def finite_fn(values: Union[Mapping, Iterable], n: Optional[int] = None) -> FiniteFn:
    """Build from {point: value} or an iterable of (point, value) pairs."""
    items = list(values.items()) if isinstance(values, Mapping) else list(values)
    terms = tuple((tuple(int(c) for c in p), to_rat(v)) for p, v in items)
    if n is None:
        if not terms:
            raise InputError("cannot infer the arity of an empty function")
        n = len(terms[0][0])
    return FiniteFn(n, terms)


def delta(p: Sequence[int]) -> FiniteFn:
    """Indicator function of a single point."""
    return finite_fn({tuple(p): 1})


@dataclass(frozen=True)
class Staircase:
    """Lower set E_A for a given order, elements kept in ascending order."""
    order: MonomialOrder
    elements: Tuple[Exponent, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e) -> bool:
        return tuple(e) in self.as_set()

    def as_set(self) -> frozenset:
        return frozenset(self.elements)

    def max_degree(self) -> int:
        return max(degree(e) for e in self.elements)

    def degree_counts(self) -> Counter:
        return Counter(degree(e) for e in self.elements)

    def is_lower(self) -> bool:
        return is_lower_set(self.elements)




# =============================================================================
# PURE OPERATIONS
# =============================================================================

def monomial_value(a: Sequence[int], e: Sequence[int]) -> int:
    """a^e with 0^0 = 1."""
    value = 1
    for x, k in zip(a, e):
        value *= x ** k
    return value


def pairing(f: FiniteFn, e: Sequence[int]) -> Fraction:
    """<f, X^e> = sum_a f(a) a^e."""
    if len(e) != f.n:
        raise InputError(f"exponent {tuple(e)} does not match arity {f.n}")
    return sum((c * monomial_value(a, e) for a, c in f.terms), Fraction(0))


def binomial_row(A: PointSet, e: Sequence[int], corner: Sequence[int]) -> List[int]:
    """C(a - corner, e) over the points of A; zero wherever a - corner < e in some coordinate."""
    row = []
    for a in A.points:
        value = 1
        for x, t, k in zip(a, corner, e):
            value *= math.comb(x - t, k)
            if not value:
                break
        row.append(value)
    return row


def evaluation_matrix(A: PointSet, exponents: Iterable[Sequence[int]]) -> RatMatrix:
    """Columns X^e evaluated on A (rows in point order)."""
    exponents = list(exponents)
    return RatMatrix.from_rows(
        [[monomial_value(a, e) for e in exponents] for a in A.points], len(exponents)
    )


def convolve(f: FiniteFn, g: FiniteFn) -> FiniteFn:
    """(f * g)(c) = sum_{a + b = c} f(a) g(b)."""
    if f.n != g.n:
        raise InputError(f"arity mismatch: {f.n} vs {g.n}")
    out: Dict[IntPoint, Fraction] = defaultdict(Fraction)
    for a, x in f.terms:
        for b, y in g.terms:
            out[tuple(i + j for i, j in zip(a, b))] += x * y
    return FiniteFn(f.n, tuple(out.items()))


def newton_polygon(f: FiniteFn) -> Polygon:
    """NP(f) = hull(supp f) for planar f."""
    if f.n != 2:
        raise InputError(f"Newton polygons are planar; function has arity {f.n}")
    if f.is_zero:
        raise InputError("Newton polygon of the zero function")
    return convex_hull(p for p, _ in f.terms)
