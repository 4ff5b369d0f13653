"""
Exact rational linear algebra.

Scalars are fractions.Fraction (always reduced, zero is 0/1). Dense matrices
are immutable RatMatrix values; rref and kernels run through sympy's
DomainMatrix over QQ. The IndependenceOracle is the incremental rank test used
by the staircase scan: it keeps a sparse fraction-free integer echelon basis,
and a vector only meets the rows leading at its own nonzero entries.
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from app.errors import InputError

logger = logging.getLogger(__name__)

Rat = Fraction
Number = Union[int, Fraction]

_RAT_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


# =============================================================================
# SCALARS
# =============================================================================

def to_rat(value: Union[int, str, Fraction]) -> Fraction:
    """Coerce an int, Fraction or "num/den" string to a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        match = _RAT_PATTERN.match(value)
        if not match:
            raise InputError(f"not a rational: {value!r}")
        den = int(match.group(2)) if match.group(2) else 1
        if den == 0:
            raise InputError(f"zero denominator: {value!r}")
        return Fraction(int(match.group(1)), den)
    raise InputError(f"not a rational: {value!r}")


def format_rat(value: Number) -> str:
    """Serialize as "num/den", or "num" when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# =============================================================================
# MATRICES
# =============================================================================

@dataclass(frozen=True)
class RatMatrix:
    """Dense row-major rational matrix."""
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0 or len(self.entries) != self.rows * self.cols:
            raise InputError(
                f"matrix of shape {self.rows}x{self.cols} cannot hold {len(self.entries)} entries"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Number]], cols: Optional[int] = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise InputError("ragged matrix rows")
        return cls(len(rows), cols, tuple(Fraction(x) for r in rows for x in r))

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def row_lists(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def apply(self, vector: Sequence[Number]) -> Tuple[Fraction, ...]:
        """Matrix-vector product M·v."""
        if len(vector) != self.cols:
            raise InputError(f"vector of length {len(vector)} for {self.cols} columns")
        return tuple(
            sum((a * Fraction(b) for a, b in zip(self.row(i), vector)), Fraction(0))
            for i in range(self.rows)
        )


def _to_domain(m: RatMatrix) -> DomainMatrix:
    rows = [[QQ(v.numerator, v.denominator) for v in r] for r in m.row_lists()]
    return DomainMatrix(rows, (m.rows, m.cols), QQ)


def _from_domain(dm: DomainMatrix) -> RatMatrix:
    nrows, ncols = dm.shape
    sm = dm.to_Matrix()
    entries = tuple(
        Fraction(int(sm[i, j].p), int(sm[i, j].q)) for i in range(nrows) for j in range(ncols)
    )
    return RatMatrix(nrows, ncols, entries)


def rref(m: RatMatrix) -> Tuple[RatMatrix, List[int], int]:
    """Reduced row-echelon form, pivot columns and rank (exact)."""
    if m.rows == 0 or m.cols == 0:
        return m, [], 0
    reduced, pivots = _to_domain(m).rref()
    pivots = [int(p) for p in pivots]
    return _from_domain(reduced), pivots, len(pivots)


def rank(m: RatMatrix) -> int:
    return rref(m)[2]


def _normalize_first_nonzero(vector: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    lead = next((x for x in vector if x != 0), None)
    if lead is None:
        return tuple(vector)
    return tuple(x / lead for x in vector)


def kernel_basis(m: RatMatrix) -> List[Tuple[Fraction, ...]]:
    """Basis of the right null space; each vector's first nonzero entry is 1."""
    if m.cols == 0:
        return []
    if m.rows == 0:
        return [tuple(Fraction(int(i == j)) for j in range(m.cols)) for i in range(m.cols)]
    basis = _from_domain(_to_domain(m).nullspace())
    vectors = [_normalize_first_nonzero(basis.row(i)) for i in range(basis.rows)]
    for v in vectors:
        if any(x != 0 for x in m.apply(v)):
            raise ArithmeticError("nullspace vector not annihilated")
    return vectors


def solve(m: RatMatrix, rhs: Sequence[Number]) -> Optional[Tuple[Fraction, ...]]:
    """One solution x of M·x = rhs (free variables 0), or None if inconsistent."""
    if len(rhs) != m.rows:
        raise InputError("right-hand side length does not match row count")
    augmented = RatMatrix.from_rows(
        [list(m.row(i)) + [Fraction(rhs[i])] for i in range(m.rows)], m.cols + 1
    )
    reduced, pivots, _ = rref(augmented)
    if m.cols in pivots:
        return None
    solution = [Fraction(0)] * m.cols
    for i, p in enumerate(pivots):
        solution[p] = reduced[i, m.cols]
    return tuple(solution)


# =============================================================================
# INCREMENTAL INDEPENDENCE
# =============================================================================

def _integer_row(vector: Iterable[Number]) -> List[int]:
    values = [Fraction(x) for x in vector]
    denom = 1
    for x in values:
        denom = denom * x.denominator // math.gcd(denom, x.denominator)
    return [int(x * denom) for x in values]


class IndependenceOracle:
    """
    Accepts a vector iff it is linearly independent of the vectors accepted so far.

    Rows are kept sparse, as primitive integer vectors keyed by their leading
    (smallest nonzero) index, one row per leading index. A new vector is
    reduced at its leading index while some stored row leads there; it is
    dependent iff it reduces to zero.
    """

    def __init__(self, dim: Optional[int] = None):
        self.dim = dim
        self._rows: Dict[int, Dict[int, int]] = {}
        self.accepted: List[Tuple[Fraction, ...]] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, work: Dict[int, int]) -> Dict[int, int]:
        while work:
            lead = min(work)
            row = self._rows.get(lead)
            if row is None:
                break
            c, p = work[lead], row[lead]
            g = math.gcd(c, p)
            a, b = p // g, c // g
            merged = {i: a * x for i, x in work.items()}
            for i, y in row.items():
                merged[i] = merged.get(i, 0) - b * y
            work = {i: x for i, x in merged.items() if x}
            if work:
                h = math.gcd(*work.values())
                if h > 1:
                    work = {i: x // h for i, x in work.items()}
        return work

    def feed(self, vector: Sequence[Number]) -> bool:
        if self.dim is None:
            self.dim = len(vector)
        elif len(vector) != self.dim:
            raise InputError(f"vector of length {len(vector)} fed to oracle of dimension {self.dim}")
        if self.rank == self.dim:
            return False

        work = self._reduce({i: x for i, x in enumerate(_integer_row(vector)) if x})
        if not work:
            return False
        self._rows[min(work)] = work
        self.accepted.append(tuple(Fraction(x) for x in vector))
        return True


def independence_oracle(dim: Optional[int] = None) -> IndependenceOracle:
    return IndependenceOracle(dim)
