"""
Property Service - seeded randomized checks of the library's invariants.

Each check draws its cases from random.Random(seed) and returns the first
counterexample it meets. The suite is deterministic for a given seed; varying
the seed changes the cases, never the expected outcome.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from app.config import settings
from app.errors import WitnessInsufficientError
from app.services.atlas_service import atlas_service
from app.services.spolytope_service import spolytope_service
from app.services.staircase_service import staircase_service
from app.utils.finite_functions import FiniteFn, PointSet, Staircase, convolve, evaluation_matrix, newton_polygon
from app.utils.lattice_geometry import (
    Polygon,
    convex_hull,
    count_lattice_points,
    double_area,
    lattice_points,
    minkowski_sum,
    mixed_volume_2x,
    scale,
)
from app.utils.linear_algebra import rank
from app.utils.monomial_orders import MonomialOrder, add, deglex, graded_stream, lex, q_count

logger = logging.getLogger(__name__)

Tamper = Callable[[Staircase], Staircase]


@dataclass
class PropertyResult:
    name: str
    passed: bool
    cases: int
    detail: str = ""


@dataclass
class CheckReport:
    seed: int
    results: List[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[PropertyResult]:
        return [r for r in self.results if not r.passed]


# =============================================================================
# RANDOM INSTANCES
# =============================================================================

def random_point_set(rng: random.Random, n: int, size: int, span: int = 3) -> PointSet:
    box = list(itertools.product(range(-span, span + 1), repeat=n))
    return PointSet(n, tuple(rng.sample(box, min(size, len(box)))))


def random_lattice_polygon(rng: random.Random, span: int = 3, count: int = 4) -> Polygon:
    """Hull of a few random points; redrawn until two dimensional."""
    while True:
        P = convex_hull((rng.randint(0, span), rng.randint(0, span)) for _ in range(count))
        if P.dim == 2:
            return P


def random_unimodular(rng: random.Random, steps: int = 3) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """Product of random shears and an optional reflection (det ±1)."""
    a, b, c, d = 1, 0, 0, 1
    for _ in range(steps):
        k = rng.randint(-2, 2)
        if rng.random() < 0.5:
            a, b, c, d = a + k * c, b + k * d, c, d
        else:
            a, b, c, d = a, b, c + k * a, d + k * b
    if rng.random() < 0.5:
        a, b = -a, -b
    return (a, b), (c, d)


def random_function(rng: random.Random, size: int = 4, span: int = 2) -> FiniteFn:
    points = random_point_set(rng, 2, size, span).points
    values = [Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)) for _ in points]
    return FiniteFn(2, tuple(zip(points, values)))


def random_rational_polygon(rng: random.Random, corners: int = 3, span: int = 4) -> Polygon:
    """Polygon with exactly `corners` vertices at half-integer coordinates in [0, span]^2."""
    while True:
        P = convex_hull(
            (Fraction(rng.randint(0, 2 * span), 2), Fraction(rng.randint(0, 2 * span), 2)) for _ in range(corners)
        )
        if P.dim == 2 and len(P.vertices) == corners:
            return P


def _apply(U, t, p):
    return (U[0][0] * p[0] + U[0][1] * p[1] + t[0], U[1][0] * p[0] + U[1][1] * p[1] + t[1])


# =============================================================================
# SUITE
# =============================================================================

class PropertyService:
    """Runs the invariant checks; `tamper` rewrites staircases before the size check."""

    def __init__(self):
        self.tamper: Optional[Tamper] = None

    def run(self, seed: Optional[int] = None, cases: Optional[int] = None, tamper: Optional[Tamper] = None) -> CheckReport:
        seed = settings.check_seed if seed is None else seed
        cases = cases or settings.check_cases
        self.tamper = tamper
        report = CheckReport(seed)
        for name, check in self.checks().items():
            rng = random.Random(f"{seed}:{name}")
            try:
                detail = check(rng, cases)
            except Exception as e:
                detail = f"raised {type(e).__name__}: {e}"
            passed = detail is None
            report.results.append(PropertyResult(name, passed, cases, detail or ""))
            if passed:
                logger.debug(f"check {name}: ok")
            else:
                logger.error(f"check {name} failed: {detail}")
        self.tamper = None
        logger.info(f"property suite seed={seed}: {len(report.failures)} failures")
        return report

    def checks(self) -> Dict[str, Callable[[random.Random, int], Optional[str]]]:
        return {
            "staircase_size": self.check_staircase_size,
            "lower_set": self.check_lower_set,
            "translation_invariance": self.check_translation,
            "monotonicity": self.check_monotonicity,
            "superadditivity": self.check_superadditivity,
            "lower_set_fixed": self.check_lower_set_fixed,
            "lex_recursion": self.check_lex_recursion,
            "degree_count": self.check_degree_count,
            "convolution": self.check_convolution,
            "vanishing_order_invariance": self.check_vanishing_order_invariance,
            "witness_sm": self.check_witness_sm,
            "q_count": self.check_q_count,
            "pick": self.check_pick,
            "minkowski_count": self.check_minkowski_count,
            "parallelogram_law": self.check_parallelogram_law,
            "brunn_minkowski": self.check_brunn_minkowski,
            "s_value_invariance": self.check_s_value_invariance,
            "bracket_soundness": self.check_brackets,
            "doubling_chain": self.check_doubling_chain,
            "triangle_scaling": self.check_triangle_scaling,
            "rel_prime_inequality": self.check_rel_prime,
        }

    # ----- staircases -----

    def _staircase(self, A: PointSet, order=None) -> Staircase:
        E = staircase_service.compute_E(A, order or deglex(A.n))
        return self.tamper(E) if self.tamper else E

    def check_staircase_size(self, rng, cases):
        for _ in range(cases):
            n = rng.choice([2, 3])
            A = random_point_set(rng, n, rng.randint(1, 8))
            E = self._staircase(A)
            if len(E) != len(A):
                return f"|E_A| = {len(E)} but |A| = {len(A)} for {A.points}"
        return None

    def check_lower_set(self, rng, cases):
        for _ in range(cases):
            A = random_point_set(rng, rng.choice([2, 3]), rng.randint(1, 8))
            for order in (deglex(A.n), lex(A.n)):
                if not staircase_service.compute_E(A, order).is_lower():
                    return f"staircase of {A.points} under {order} is not a lower set"
        return None

    def check_translation(self, rng, cases):
        for _ in range(cases):
            A = random_point_set(rng, 2, rng.randint(1, 8))
            v = (rng.randint(-5, 5), rng.randint(-5, 5))
            if staircase_service.compute_E(A).as_set() != staircase_service.compute_E(A.translate(v)).as_set():
                return f"E changes under translation by {v} for {A.points}"
        return None

    def check_monotonicity(self, rng, cases):
        for _ in range(cases):
            B = random_point_set(rng, 2, rng.randint(2, 8))
            A = PointSet(2, tuple(rng.sample(B.points, rng.randint(1, len(B)))))
            if not staircase_service.compute_E(A).as_set() <= staircase_service.compute_E(B).as_set():
                return f"E_A not inside E_B for A={A.points}, B={B.points}"
        return None

    def check_superadditivity(self, rng, cases):
        for _ in range(cases):
            n = rng.choice([2, 3])
            A = random_point_set(rng, n, rng.randint(1, 3), 2)
            B = random_point_set(rng, n, rng.randint(1, 3), 2)
            AB = PointSet(n, tuple({add(a, b) for a in A for b in B}))
            sums = {add(e, f) for e in staircase_service.compute_E(A) for f in staircase_service.compute_E(B)}
            if not sums <= staircase_service.compute_E(AB).as_set():
                return f"E_A + E_B not inside E_(A+B) for A={A.points}, B={B.points}"
        return None

    def check_lower_set_fixed(self, rng, cases):
        for _ in range(cases):
            heights = sorted((rng.randint(1, 4) for _ in range(rng.randint(1, 4))), reverse=True)
            cells = {(x, y) for x, h in enumerate(heights) for y in range(h)}
            A = PointSet(2, tuple(cells))
            if staircase_service.compute_E(A).as_set() != frozenset(cells):
                return f"E_A != A for the lower set {sorted(cells)}"
        return None

    def check_lex_recursion(self, rng, cases):
        for _ in range(cases):
            n = rng.choice([1, 2, 3])
            A = random_point_set(rng, n, rng.randint(1, 8))
            priority = tuple(rng.sample(range(n), n))
            order = MonomialOrder("lex", priority)
            if staircase_service.compute_E(A, order).as_set() != staircase_service.compute_E_lex(A, order).as_set():
                return f"lex scan and fiber recursion disagree on {A.points} ({order})"
        return None

    def check_degree_count(self, rng, cases):
        for _ in range(cases):
            A = random_point_set(rng, 2, rng.randint(1, 8))
            counts = staircase_service.compute_E(A).degree_counts()
            for t in range(4):
                below = sum(c for k, c in counts.items() if k <= t)
                if below != rank(evaluation_matrix(A, graded_stream(2, t))):
                    return f"degree count mismatch at t={t} for {A.points}"
        return None

    def check_convolution(self, rng, cases):
        for _ in range(cases):
            f, g = random_function(rng), random_function(rng)
            h = convolve(f, g)
            sm_f, sm_g, sm_h = (staircase_service.sm(x) for x in (f, g, h))
            if sm_h != add(sm_f, sm_g):
                return f"sm not additive: {sm_h} vs {sm_f} + {sm_g}"
            if newton_polygon(h) != minkowski_sum(newton_polygon(f), newton_polygon(g)):
                return "Newton polygon not additive under convolution"
        return None

    def check_vanishing_order_invariance(self, rng, cases):
        for _ in range(cases):
            f = random_function(rng)
            U = random_unimodular(rng)
            t = (rng.randint(-3, 3), rng.randint(-3, 3))
            if staircase_service.vanishing_order(f) != staircase_service.vanishing_order(f.transform(U, t)):
                return f"vanishing order changes under U={U}, t={t}"
        return None

    def check_witness_sm(self, rng, cases):
        for _ in range(cases):
            A = random_point_set(rng, 2, rng.randint(1, 6))
            for e in staircase_service.compute_E(A):
                if staircase_service.sm(staircase_service.witness(A, None, e)) != e:
                    return f"sm(witness(A, {e})) != {e} for {A.points}"
        return None

    def check_q_count(self, rng, cases):
        order = deglex(2)
        exponents = list(graded_stream(2, 12))
        for e in exponents:
            brute = sum(1 for other in exponents if order.key(other) < order.key(e))
            if q_count(e) != brute:
                return f"q_count{e} = {q_count(e)}, enumeration gives {brute}"
        return None

    # ----- lattice geometry -----

    def check_pick(self, rng, cases):
        for _ in range(cases):
            P = random_lattice_polygon(rng, 5, rng.randint(3, 6))
            if len(lattice_points(P)) != count_lattice_points(P):
                return f"Pick count disagrees with the sweep for {P!r}"
        return None

    def check_minkowski_count(self, rng, cases):
        for _ in range(cases):
            P, Q = random_lattice_polygon(rng), random_lattice_polygon(rng)
            lhs = len(lattice_points(minkowski_sum(P, Q)))
            rhs = len(lattice_points(P)) + len(lattice_points(Q)) + mixed_volume_2x(P, Q) - 1
            if lhs != rhs:
                return f"|(P+Q) ∩ Z^2| = {lhs}, expected {rhs} for {P!r}, {Q!r}"
        return None

    def check_parallelogram_law(self, rng, cases):
        for _ in range(cases):
            U, P1, P2 = (random_lattice_polygon(rng, 2, 3) for _ in range(3))

            def count(poly):
                return len(lattice_points(poly))

            lhs = (
                count(minkowski_sum(minkowski_sum(U, P1), P2))
                - count(minkowski_sum(U, P1))
                - count(minkowski_sum(U, P2))
                + count(U)
            )
            if lhs != mixed_volume_2x(P1, P2):
                return f"parallelogram law fails: {lhs} vs {mixed_volume_2x(P1, P2)}"
        return None

    def check_brunn_minkowski(self, rng, cases):
        for _ in range(cases):
            P, Q = random_lattice_polygon(rng), random_lattice_polygon(rng)
            if mixed_volume_2x(P, Q) ** 2 < double_area(P) * double_area(Q):
                return f"Brunn-Minkowski fails for {P!r}, {Q!r}"
        return None

    def check_s_value_invariance(self, rng, cases):
        for _ in range(cases):
            P = random_lattice_polygon(rng, 3, rng.randint(3, 5))
            U = random_unimodular(rng)
            t = (rng.randint(-3, 3), rng.randint(-3, 3))
            A = PointSet(2, tuple(lattice_points(P)))
            B = PointSet(2, tuple(_apply(U, t, p) for p in A.points))
            if staircase_service.s_value(A) != staircase_service.s_value(B):
                return f"s-value changes under U={U} for {P!r}"
        return None

    # ----- S_P brackets -----

    def check_brackets(self, rng, cases):
        for i in range(max(1, cases // 3)):
            P = random_rational_polygon(rng, 3 + i % 2)
            previous = None
            for d in (1, 2, 4):
                br = spolytope_service.bracket(P, d)
                if br.v_lo is None:
                    continue
                if br.v_lo * br.w_lo > 2 * br.vol_target:
                    return f"v_lo·w_lo > 2vol for {P!r} at d={d}"
                if br.v_hi is not None and not (br.v_lo <= br.v_hi and br.w_lo <= br.w_hi):
                    return f"bracket inverted for {P!r} at d={d}"
                if previous and (br.v_lo < previous.v_lo or br.w_lo < previous.w_lo):
                    return f"lower estimates decrease along doubling for {P!r}"
                inner = spolytope_service.a_lower(P, d)
                if not all(spolytope_service.b_contains(P, d, v) for v in inner.vertices):
                    return f"A_(P,{d}) leaves the B region for {P!r}"
                previous = br
        return None

    def check_doubling_chain(self, rng, cases):
        for i in range(max(1, cases // 3)):
            P = random_rational_polygon(rng, 3 + i % 2)
            d = 1
            for _ in range(2):
                small, large = spolytope_service.dilate_staircase(P, d), spolytope_service.dilate_staircase(P, 2 * d)
                if small is not None:
                    doubled = {(2 * x, 2 * y) for x, y in small[1]}
                    if not doubled <= large[1].as_set():
                        return f"E/{d} not inside E/{2 * d} for {P!r}"
                d *= 2
        return None

    def check_triangle_scaling(self, rng, cases):
        unit = FiniteFn(2, (((0, 0), Fraction(-1)), ((1, 0), Fraction(1))))
        for _ in range(cases):
            P = random_lattice_polygon(rng, 4, 3)
            if len(P.vertices) != 3:
                continue
            k = rng.randint(2, 3)
            try:
                base = spolytope_service.triangle_sp_exact(P, unit, True)
            except WitnessInsufficientError:
                continue
            scaled = spolytope_service.triangle_sp_exact(scale(P, k), unit, True)
            if scaled.polygon != scale(base.polygon, k):
                return f"S_(kP) != k·S_P for k={k}, {P!r}"
        return None

    def check_rel_prime(self, rng, cases):
        rows = atlas_service.atlas_search(8).rows
        witnesses = [row.witness.f for row in rows]
        for f1, f2 in itertools.combinations(witnesses, 2):
            if not atlas_service.check_rel_prime_inequality(f1, f2, True):
                return "relatively-prime inequality violated on atlas witnesses"
        return None


property_service = PropertyService()
