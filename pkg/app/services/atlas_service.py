"""
Atlas Service - large irreducible functions and their Newton polygons.

Supports:
- Maximal-vanishing witnesses on a lattice polygon (order m = s of P ∩ Z^2)
- Largeness test m^2 > 2·vol(NP(f)) and an exact irreducibility decision
- Certificates for user-supplied functions
- The atlas of polygon classes carrying a large irreducible, up to a 2vol bound
- Verification of the triangles P_r = hull{(0,0), (r,0), (-1,r+2)}
- The relatively-prime inequality as an exact check

Decision procedure. A factorization f = g * h gives a Minkowski decomposition
NP(g) + NP(h) = NP(f) with |sm g| + |sm h| = m, so a decomposition whose
summands have s-values summing to at least m is necessary. When the order-m
space on P is one-dimensional it is also sufficient: maximal witnesses g, h on
the summands convolve to a function of order m supported in P, hence to a
multiple of f.

Atlas membership. If f is large and irreducible with NP(f) = P, any function
supported in P that f does not divide has order at most 2·vol(P)/m < m. So the
order-m space is spanned by f: it is one-dimensional and its witness has
Newton polygon P. Classes failing either condition are excluded outright.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Iterable, List, Optional, Sequence, Tuple

from app.config import settings
from app.errors import InputError, VerificationError
from app.schemas import finite_fn_json, polygon_json
from app.services.staircase_service import staircase_service
from app.utils.finite_functions import FiniteFn, PointSet, binomial_row, newton_polygon
from app.utils.lattice_geometry import (
    Polygon,
    convex_hull,
    count_lattice_points,
    double_area,
    enumerate_polygons,
    lattice_points,
    minkowski_decompositions,
    mixed_volume_2x,
    unimodular_canonical,
)
from app.utils.linear_algebra import RatMatrix, kernel_basis
from app.utils.monomial_orders import deglex, degree, graded_stream

logger = logging.getLogger(__name__)


# =============================================================================
# REFERENCE DATA: published polygon classes with (|sm(f)|, 2vol(P))
# =============================================================================

TABLE_1 = [
    (((0, 0), (1, 0)), 1, 0),
    (((0, 0), (1, 0), (2, 3)), 2, 3),
    (((0, 0), (1, 0), (1, 1), (-4, 3)), 3, 8),
    (((0, 0), (1, 0), (3, 8)), 3, 8),
    (((0, 0), (1, 0), (1, 1), (-10, 4)), 4, 15),
    (((0, 0), (1, 0), (1, 1), (-9, 4), (-7, 3)), 4, 15),
    (((0, 0), (1, 0), (1, 1), (-8, 6)), 4, 15),
    (((0, 0), (1, 0), (1, 2), (-3, 7)), 4, 15),
    (((0, 0), (1, 0), (3, 5), (4, 10)), 4, 15),
    (((0, 0), (1, 0), (4, 15)), 4, 15),
    (((0, 0), (1, 0), (1, 1), (-17, 5), (-7, 2)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-16, 5), (-10, 3)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-11, 8), (-10, 7), (-3, 2)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-11, 8), (-6, 4)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-9, 7), (-10, 7)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-7, 3), (-16, 5)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-7, 6), (-11, 8)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-7, 12), (-6, 10), (-2, 3)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-6, 11), (-7, 12), (-3, 5)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-4, 3), (-12, 5)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-4, 9), (-2, 2)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-3, 2), (-16, 5), (-13, 4)), 5, 24),
    (((0, 0), (1, 0), (1, 1), (-2, 5), (-4, 2)), 5, 24),
    (((0, 0), (1, 0), (1, 2), (-8, 6)), 5, 24),
    (((0, 0), (1, 0), (1, 2), (-6, 5), (-7, 5)), 5, 24),
    (((0, 0), (1, 0), (1, 2), (-4, 14)), 5, 24),
    (((0, 0), (1, 0), (1, 3), (-4, 9)), 5, 24),
    (((0, 0), (1, 0), (2, 3), (-3, 6)), 5, 24),
    (((0, 0), (1, 0), (3, 3), (5, 12)), 5, 24),
    (((0, 0), (1, 0), (5, 24)), 5, 24),
    (((0, 0), (1, 0), (10, 24)), 5, 24),
]


# =============================================================================
# RESULT TYPES
# =============================================================================

@dataclass(frozen=True)
class Witness:
    """Maximal-order function on P ∩ Z^2; space_dim is the dimension of the order-m space."""
    polygon: Polygon
    f: FiniteFn
    m: int
    space_dim: int


@dataclass(frozen=True)
class Verdict:
    status: str  # irreducible | reducible | inconclusive
    decomposition: Optional[Tuple[Polygon, Polygon]] = None
    s_values: Optional[Tuple[int, int]] = None
    reason: Optional[str] = None

    @property
    def is_irreducible(self) -> bool:
        return self.status == "irreducible"


@dataclass(frozen=True)
class AtlasRow:
    vertices: Tuple[Tuple[int, int], ...]
    m: int
    double_area: int
    witness: Optional[Witness] = field(default=None, compare=False)

    @property
    def corners(self) -> str:
        return ", ".join(f"({x},{y})" for x, y in self.vertices)


@dataclass(frozen=True)
class InconclusiveEntry:
    vertices: Tuple[Tuple[int, int], ...]
    reason: str


@dataclass
class AtlasReport:
    max_double_area: int
    rows: List[AtlasRow]
    inconclusive: List[InconclusiveEntry]
    classes_examined: int = 0
    excluded: int = 0


@dataclass
class PrReport:
    """Outcome of the P_r checks; clauses maps clause name to pass/fail."""
    r: int
    m: int
    double_area: int
    staircase: Tuple[Tuple[int, int], ...]
    clauses: dict


# =============================================================================
# HELPERS
# =============================================================================

def _normalize_last(vector: Sequence) -> Tuple:
    last = next((x for x in reversed(vector) if x != 0), None)
    if last is None:
        return tuple(vector)
    return tuple(x / last for x in vector)


def _segment_verdict(P: Polygon) -> Verdict:
    (px, py), (qx, qy) = P.vertices
    k = gcd(qx - px, qy - py)
    if k == 1:
        return Verdict("irreducible")
    u = ((qx - px) // k, (qy - py) // k)
    unit = convex_hull([(px, py), (px + u[0], py + u[1])])
    rest = convex_hull([(0, 0), ((k - 1) * u[0], (k - 1) * u[1])])
    return Verdict("reducible", (unit, rest), (1, k - 1))


def _s_of(Q: Polygon) -> int:
    A = PointSet(2, tuple(lattice_points(Q)))
    return staircase_service.s_value(A, staircase_service.compute_E(A, deglex(2)))


def _classify(P: Polygon):
    """(row, inconclusive entry); both None when the class is excluded."""
    if count_lattice_points(P) < 2:
        return None, None
    W = atlas_service.max_order_witness(P)
    dA = int(double_area(P))
    if W.m * W.m <= dA:
        return None, None
    if W.space_dim != 1 or newton_polygon(W.f) != P:
        return None, None
    verdict = atlas_service.decide_irreducible(W)
    if verdict.status == "inconclusive":
        return None, InconclusiveEntry(P.vertices, verdict.reason)
    if verdict.status == "reducible":
        return None, None
    return AtlasRow(P.vertices, W.m, dA, W), None


def table_classes(max_double_area: int) -> List[Tuple[Tuple, int, int]]:
    """Published rows up to the bound as (canonical vertices, m, 2vol)."""
    return sorted(
        (unimodular_canonical(convex_hull(corners)).vertices, m, dA)
        for corners, m, dA in TABLE_1
        if dA <= max_double_area
    )


def format_atlas_csv(report: AtlasReport) -> str:
    """corners;sm;two_vol rows, inconclusive classes as trailing '#' comments."""
    lines = ["corners;sm;two_vol"]
    lines += [f"{row.corners};{row.m};{row.double_area}" for row in report.rows]
    for entry in report.inconclusive:
        corners = ", ".join(f"({x},{y})" for x, y in entry.vertices)
        lines.append(f"# inconclusive: {corners}: {entry.reason}")
    return "\n".join(lines) + "\n"


def witness_json(W: Witness) -> dict:
    return {
        "polygon": polygon_json(W.polygon)["vertices"],
        "m": W.m,
        "space_dim": W.space_dim,
        "f": finite_fn_json(W.f),
    }


def p_r(r: int) -> Polygon:
    return convex_hull([(0, 0), (r, 0), (-1, r + 2)])


def _expected_staircase(r: int) -> frozenset:
    simplex = {(i, j) for i in range(r + 1) for j in range(r + 1 - i)}
    return frozenset(simplex | {(r + 1, 0)})


class AtlasService:
    """Maximal-order witnesses, irreducibility verdicts, the atlas search and the P_r checks."""

    # ===== WITNESSES =====

    def max_order_witness(self, P: Polygon) -> Witness:
        """
        Kernel of the order-< m conditions on P ∩ Z^2 with m = s(P ∩ Z^2). A
        one-dimensional kernel gives its generator; otherwise the sum of the
        kernel basis is reported. Values are scaled so that the last nonzero value
        in point order is 1.
        """
        points = lattice_points(P)
        if len(points) < 2:
            raise InputError(f"{P!r} has fewer than two lattice points")
        A = PointSet(2, tuple(points))
        m = staircase_service.s_value(A, staircase_service.compute_E(A, deglex(2)))
        corner = A.lower_corner()
        rows = [binomial_row(A, e, corner) for e in graded_stream(2, m - 1)]
        basis = kernel_basis(RatMatrix.from_rows(rows, len(A)))
        if not basis:
            raise ArithmeticError(f"no function of order {m} on {P!r}")
        if len(basis) == 1:
            vector = basis[0]
        else:
            vector = tuple(sum(column) for column in zip(*basis))
        values = _normalize_last(vector)
        f = FiniteFn(2, tuple(zip(A.points, values)))
        logger.debug(f"witness on {P!r}: m={m}, space_dim={len(basis)}, {len(f)} terms")
        return Witness(P, f, m, len(basis))

    def is_large(self, W: Witness) -> bool:
        """m^2 > 2·vol(NP(f))."""
        return W.m * W.m > double_area(newton_polygon(W.f))

    # ===== IRREDUCIBILITY =====

    def decide_irreducible(self, W: Witness) -> Verdict:
        P = W.polygon
        if P.dim == 1:
            return _segment_verdict(P)
        if newton_polygon(W.f) != P:
            return Verdict("inconclusive", reason="Newton polygon of the witness is smaller than the polygon")
        decompositions = minkowski_decompositions(P)
        if not decompositions:
            return Verdict("irreducible")
        if W.space_dim != 1:
            return Verdict("inconclusive", reason=f"order-{W.m} space has dimension {W.space_dim}")
        for Q1, Q2 in decompositions:
            s1, s2 = _s_of(Q1), _s_of(Q2)
            if s1 + s2 >= W.m:
                return Verdict("reducible", (Q1, Q2), (s1, s2))
        return Verdict("irreducible")

    def certify_irreducible(self, f: FiniteFn) -> Verdict:
        """Irreducibility certificate for a given function."""
        if f.is_zero:
            raise InputError("cannot certify the zero function")
        NP = newton_polygon(f)
        if NP.dim == 0:
            return Verdict("inconclusive", reason="single-point support is a unit")
        if NP.dim == 2 and not minkowski_decompositions(NP):
            return Verdict("irreducible")
        W = self.max_order_witness(NP)
        if staircase_service.vanishing_order(f) != W.m or W.space_dim != 1:
            return Verdict("inconclusive", reason="function is not the unique maximal-order function of its Newton polygon")
        return self.decide_irreducible(Witness(NP, f, W.m, 1))

    def check_rel_prime_inequality(self, f1: FiniteFn, f2: FiniteFn, coprime_certificate: Any) -> bool:
        """|sm f1|·|sm f2| <= 2·vol(NP f1, NP f2); coprimality is the caller's claim."""
        if not coprime_certificate:
            raise InputError("relatively-prime inequality needs a coprimality certificate")
        lhs = degree(staircase_service.sm(f1, deglex(2))) * degree(staircase_service.sm(f2, deglex(2)))
        rhs = mixed_volume_2x(newton_polygon(f1), newton_polygon(f2))
        return lhs <= rhs

    # ===== ATLAS =====

    def atlas_search(self, max_double_area: int, workers: Optional[int] = None, box_factor: Optional[int] = None) -> AtlasReport:
        """Polygon classes with 2vol <= bound that are Newton polygons of large irreducibles."""
        workers = workers or settings.atlas_workers
        box_factor = box_factor or settings.normalization_box_factor
        classes = enumerate_polygons(max_double_area, box_factor)
        logger.info(f"atlas: classifying {len(classes)} classes (workers={workers})")

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_classify, classes, chunksize=8))
        else:
            results = [_classify(P) for P in classes]

        rows = sorted((r for r, _ in results if r), key=lambda r: (r.double_area, r.m, r.vertices))
        inconclusive = sorted((i for _, i in results if i), key=lambda i: i.vertices)
        for entry in inconclusive:
            logger.warning(f"atlas: inconclusive {entry.vertices}: {entry.reason}")
        excluded = len(classes) - len(rows) - len(inconclusive)
        logger.info(f"atlas: {len(rows)} rows, {len(inconclusive)} inconclusive, {excluded} excluded")
        return AtlasReport(max_double_area, rows, inconclusive, len(classes), excluded)

    # ===== THE P_r FAMILY =====

    def verify_pr(self, r: int) -> PrReport:
        """Check the staircase, largeness, irreducibility and the mixed-volume equality for P_r."""
        if r < 1:
            raise InputError(f"r must be a positive integer, got {r}")
        P = p_r(r)
        A = PointSet(2, tuple(lattice_points(P)))
        E = staircase_service.compute_E(A, deglex(2))
        W = self.max_order_witness(P)
        dA = int(double_area(P))
        support = set(W.f.mapping)
        W_next = self.max_order_witness(p_r(r + 1))

        clauses = {}
        clauses["staircase"] = E.as_set() == _expected_staircase(r)
        clauses["order"] = W.m == r + 1 and staircase_service.vanishing_order(W.f) == r + 1
        clauses["double_area"] = dA == r * (r + 2)
        clauses["large"] = W.m * W.m > dA
        clauses["unique"] = W.space_dim == 1
        clauses["corners_in_support"] = {(0, 0), (r, 0), (-1, r + 2)} <= support
        clauses["irreducible"] = self.decide_irreducible(W).is_irreducible
        mixed = mixed_volume_2x(P, p_r(r + 1))
        clauses["mixed_volume"] = mixed == (r + 2) * (r + 1) == W.m * W_next.m

        for name, ok in clauses.items():
            if not ok:
                logger.error(f"P_{r}: clause {name} failed")
                raise VerificationError(name, f"r={r}")
        logger.info(f"P_{r}: all {len(clauses)} clauses hold")
        return PrReport(r, W.m, dA, tuple(sorted(E.elements)), clauses)

    def verify_pr_range(self, rs: Iterable[int]) -> List[PrReport]:
        return [self.verify_pr(r) for r in rs]


# Singleton
atlas_service = AtlasService()
