"""
Staircase Service - standard monomials of vanishing ideals of lattice point sets.

Supports:
- The smallest monomial sm(f) not annihilated by a finitely supported f
- Staircases E_A by ascending independence (any order) and by fiber recursion (lex)
- r/s invariants of a staircase
- Witnesses f supported on A with sm(f) = e

Evaluation vectors are built in the translated binomial basis
C(a - t, e) = prod_i C(a_i - t_i, e_i), t the lower corner of A. Each binomial
is X^e/e! plus coordinatewise smaller monomials, so every initial segment of
the ascending stream spans the same functions on A as the plain monomials and
the greedy selection is unchanged, while the integers stay small.
"""

import logging
import math
from collections import Counter, defaultdict
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

from app.errors import InputError, StaircaseError
from app.utils.finite_functions import (
    FiniteFn,
    IntPoint,
    PointSet,
    Staircase,
    binomial_row,
    monomial_value,
    pairing,
)
from app.utils.linear_algebra import RatMatrix, independence_oracle, solve
from app.utils.monomial_orders import Exponent, MonomialOrder, ascending_stream, deglex, degree, lex

logger = logging.getLogger(__name__)


def _check_arity(order: MonomialOrder, n: int):
    if order.n != n:
        raise InputError(f"order {order.spec()} has arity {order.n}, data has arity {n}")


def _has_rejected_divisor(e: Exponent, accepted: set) -> bool:
    """Some e - u_i leaves the staircase, so e cannot enter it."""
    for i, k in enumerate(e):
        if k and e[:i] + (k - 1,) + e[i + 1:] not in accepted:
            return True
    return False


@lru_cache(maxsize=256)
def _staircase(A: PointSet, order: MonomialOrder) -> Staircase:
    corner = A.lower_corner()
    # Columns in order of a - corner: the row of e then tends to lead at corner + e.
    columns = sorted(range(len(A)), key=lambda j: order.key(tuple(x - t for x, t in zip(A.points[j], corner))))
    oracle = independence_oracle(len(A))
    accepted: List[Exponent] = []
    members = set()
    fed = 0
    for e in ascending_stream(order, A.extents()):
        if _has_rejected_divisor(e, members):
            continue
        fed += 1
        row = binomial_row(A, e, corner)
        if oracle.feed([row[j] for j in columns]):
            accepted.append(e)
            members.add(e)
            if len(accepted) == len(A):
                break
    if len(accepted) != len(A):
        raise StaircaseError(
            f"ascending scan exhausted the cap {A.extents()} after {len(accepted)} of {len(A)} elements"
        )
    logger.debug(
        f"staircase of {len(A)} points under {order.spec()}: "
        f"{fed} candidates fed, max degree {max(map(degree, accepted))}"
    )
    return Staircase(order, tuple(accepted))


def _lex_recursive(points: List[IntPoint]) -> List[Exponent]:
    if len(points[0]) == 1:
        return [(k,) for k in range(len(points))]
    fibers: Dict[int, List[IntPoint]] = defaultdict(list)
    for p in points:
        fibers[p[0]].append(p[1:])
    counts: Counter = Counter()
    for fiber in fibers.values():
        counts.update(_lex_recursive(fiber))
    return [(e1,) + tail for tail, c in counts.items() for e1 in range(c)]


class StaircaseService:
    """Staircases, smallest monomials and witnesses of finite point sets."""

    # ===== SMALLEST MONOMIALS =====

    def sm(self, f: FiniteFn, order: Optional[MonomialOrder] = None) -> Exponent:
        """Smallest e with <f, X^e> != 0."""
        order = order or deglex(f.n)
        _check_arity(order, f.n)
        if f.is_zero:
            raise InputError("sm of the zero function")
        for e in ascending_stream(order, f.support().extents()):
            if pairing(f, e) != 0:
                return e
        raise StaircaseError("sm search exhausted the bounding box of the support")

    def vanishing_order(self, f: FiniteFn) -> int:
        """Order of vanishing of sum f(a) X^a at the all-ones point."""
        return degree(self.sm(f, deglex(f.n)))

    # ===== STAIRCASES =====

    def compute_E(self, A: PointSet, order: Optional[MonomialOrder] = None) -> Staircase:
        """Standard monomials of the vanishing ideal of A."""
        if not len(A):
            raise InputError("staircase of an empty point set")
        order = order or deglex(A.n)
        _check_arity(order, A.n)
        return _staircase(A, order)

    def compute_E_lex(self, A: PointSet, order: Optional[MonomialOrder] = None) -> Staircase:
        """
        Lex staircase by recursion over the fibers of the smallest variable:
        e is in E_A iff more than e_1 fibers have (e_2, ..., e_n) in their staircase.
        Other variable priorities are handled by relabeling coordinates.
        """
        if not len(A):
            raise InputError("staircase of an empty point set")
        order = order or lex(A.n)
        _check_arity(order, A.n)
        if order.kind != "lex":
            raise InputError(f"fiber recursion needs a lex order, got {order.spec()}")
        relabeled = [tuple(p[i] for i in order.priority) for p in A.points]
        elements = []
        for e in _lex_recursive(relabeled):
            original = [0] * A.n
            for j, i in enumerate(order.priority):
                original[i] = e[j]
            elements.append(tuple(original))
        return Staircase(order, tuple(sorted(elements, key=order.key)))

    def r_value(self, A: PointSet, staircase: Optional[Staircase] = None) -> int:
        """Smallest degree of a monomial outside the deglex staircase."""
        E = staircase or self.compute_E(A, deglex(A.n))
        counts = E.degree_counts()
        t = 0
        while counts.get(t, 0) == math.comb(t + A.n - 1, A.n - 1):
            t += 1
        return t

    def s_value(self, A: PointSet, staircase: Optional[Staircase] = None) -> int:
        """Largest degree in the deglex staircase."""
        E = staircase or self.compute_E(A, deglex(A.n))
        return E.max_degree()

    # ===== WITNESSES =====

    def witness(self, A: PointSet, order: Optional[MonomialOrder], e: Sequence[int]) -> FiniteFn:
        """
        f supported in A with sm(f) = e. Only the staircase monomials below e are
        imposed as constraints: any smaller monomial agrees on A with a combination
        of smaller staircase monomials, so it is annihilated as well.
        """
        order = order or deglex(A.n)
        E = self.compute_E(A, order)
        e = tuple(e)
        if e not in E:
            raise InputError(f"{e} is not in the staircase of the point set")
        corner = A.lower_corner()
        below = [s for s in E.elements if order.key(s) < order.key(e)]
        rows = [binomial_row(A, s, corner) for s in below]
        rows.append([monomial_value(a, e) for a in A.points])
        rhs = [0] * len(below) + [1]
        solution = solve(RatMatrix.from_rows(rows, len(A)), rhs)
        if solution is None:
            raise StaircaseError(f"no witness for {e}; staircase and constraints disagree")
        f = FiniteFn(A.n, tuple(zip(A.points, solution)))
        logger.debug(f"witness for {e}: {len(f)} terms")
        return f


# Singleton
staircase_service = StaircaseService()
