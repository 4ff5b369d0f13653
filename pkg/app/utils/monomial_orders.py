"""
Exponent vectors and the two shipped monomial orders.

An order is described by its kind ("deglex" or "lex") and a variable priority:
the tuple of variable indices from the smallest variable to the largest. The
order spec string "deglex:x1<x2" is priority (0, 1); "lex:x2<x1" is (1, 0).
Comparison goes through a sort key, so sorting a set of exponents by
`order.key` is the same as sorting by `cmp`.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Sequence, Set, Tuple

from app.errors import InputError, UnsupportedError

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]

ORDER_KINDS = ("deglex", "lex")

_ORDER_PATTERN = re.compile(r"^(deglex|lex):(x\d+(?:<x\d+)*)$")


@dataclass(frozen=True)
class MonomialOrder:
    """Graded-lex or pure-lex order with a variable priority permutation."""
    kind: str
    priority: Tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise InputError(f"unknown order kind {self.kind!r}")
        if sorted(self.priority) != list(range(len(self.priority))):
            raise InputError(f"priority {self.priority} is not a permutation")

    @property
    def n(self) -> int:
        return len(self.priority)

    @property
    def is_graded(self) -> bool:
        return self.kind == "deglex"

    def key(self, e: Sequence[int]) -> Tuple:
        """Sort key; ties at equal degree break on the largest variable first."""
        tail = tuple(e[i] for i in reversed(self.priority))
        if self.kind == "deglex":
            return (sum(e),) + tail
        return tail

    def spec(self) -> str:
        return f"{self.kind}:" + "<".join(f"x{i + 1}" for i in self.priority)

    def __str__(self) -> str:
        return self.spec()


def deglex(n: int = 2) -> MonomialOrder:
    return MonomialOrder("deglex", tuple(range(n)))


def lex(n: int = 2) -> MonomialOrder:
    return MonomialOrder("lex", tuple(range(n)))


def parse_order(spec: str) -> MonomialOrder:
    """Parse "deglex:x1<x2", "lex:x2<x1<x3", ..."""
    match = _ORDER_PATTERN.match(spec.strip().replace(" ", ""))
    if not match:
        raise InputError(f"bad order spec {spec!r}; expected e.g. 'deglex:x1<x2'")
    variables = [int(v[1:]) - 1 for v in match.group(2).split("<")]
    if min(variables) < 0:
        raise InputError(f"variables are numbered from x1: {spec!r}")
    return MonomialOrder(match.group(1), tuple(variables))


def _check_arity(order: MonomialOrder, *exponents: Sequence[int]):
    for e in exponents:
        if len(e) != order.n:
            raise InputError(f"exponent {tuple(e)} has arity {len(e)}, order has {order.n}")


def cmp(order: MonomialOrder, a: Sequence[int], b: Sequence[int]) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    _check_arity(order, a, b)
    ka, kb = order.key(a), order.key(b)
    return (ka > kb) - (ka < kb)


def degree(e: Sequence[int]) -> int:
    return sum(e)


def add(a: Sequence[int], b: Sequence[int]) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def divides(a: Sequence[int], b: Sequence[int]) -> bool:
    """a ≼ b coordinatewise."""
    return all(x <= y for x, y in zip(a, b))


def ascending_stream(order: MonomialOrder, cap: Sequence[int]) -> Iterator[Exponent]:
    """All e ≼ cap in strictly increasing order."""
    _check_arity(order, cap)
    if any(c < 0 for c in cap):
        raise InputError(f"cap {tuple(cap)} has a negative coordinate")
    box = itertools.product(*(range(c + 1) for c in cap))
    yield from sorted(box, key=order.key)


def graded_stream(n: int, max_degree: int) -> Iterator[Exponent]:
    """All exponents of total degree ≤ max_degree, by degree then deglex."""
    order = deglex(n)
    for t in range(max_degree + 1):
        layer = [e for e in itertools.product(range(t + 1), repeat=n) if sum(e) == t]
        yield from sorted(layer, key=order.key)


def q_count(e: Sequence[int], order: MonomialOrder = None) -> int:
    """Number of monomials strictly below X^e (n = 2, deglex x1<x2 only)."""
    order = order or deglex(2)
    if order != deglex(2) or len(e) != 2:
        raise UnsupportedError("q_count is defined for deglex x1<x2 in two variables")
    if min(e) < 0:
        raise InputError(f"negative exponent {tuple(e)}")
    return comb(sum(e) + 1, 2) + e[1]


def is_lower_set(elements: Iterable[Sequence[int]]) -> bool:
    """True iff the set is downward closed in N^n."""
    members: Set[Exponent] = {tuple(e) for e in elements}
    for e in members:
        if any(x < 0 for x in e):
            return False
        for i, x in enumerate(e):
            if x > 0 and e[:i] + (x - 1,) + e[i + 1:] not in members:
                return False
    return True
