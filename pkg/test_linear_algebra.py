"""Exact rational linear algebra and monomial orders."""

from fractions import Fraction

import pytest

from app.errors import InputError, UnsupportedError
from app.utils.linear_algebra import (
    RatMatrix,
    format_rat,
    independence_oracle,
    kernel_basis,
    rank,
    rref,
    solve,
    to_rat,
)
from app.utils.monomial_orders import (
    ascending_stream,
    cmp,
    deglex,
    is_lower_set,
    lex,
    parse_order,
    q_count,
)


def M(rows):
    return RatMatrix.from_rows(rows)


# ===== RATIONALS =====

def test_rational_text():
    assert to_rat("3/6") == Fraction(1, 2)
    assert to_rat("-4") == -4
    assert format_rat(Fraction(8, 3)) == "8/3"
    assert format_rat(Fraction(6, 3)) == "2"
    with pytest.raises(InputError):
        to_rat("1/0")
    with pytest.raises(InputError):
        to_rat(0.5)


# ===== ELIMINATION =====

def test_rref_identity():
    reduced, pivots, r = rref(M([[1, 0], [0, 1]]))
    assert reduced.row_lists() == [[1, 0], [0, 1]]
    assert pivots == [0, 1]
    assert r == 2


def test_rref_dependent_rows():
    reduced, pivots, r = rref(M([[1, 2], [2, 4]]))
    assert reduced.row_lists() == [[1, 2], [0, 0]]
    assert r == 1


def test_rref_swapped_rows():
    reduced, _, r = rref(M([[0, 1], [1, 0]]))
    assert reduced.row_lists() == [[1, 0], [0, 1]]
    assert r == 2


def test_kernel_basis():
    assert kernel_basis(M([[1, 0], [0, 1]])) == []
    assert kernel_basis(M([[1, 1]])) == [(1, -1)]
    m = M([[1, 2, 3]])
    basis = kernel_basis(m)
    assert len(basis) == 2
    for v in basis:
        assert m.apply(v) == (0,)


def test_solve():
    m = M([[2, 1], [1, 3]])
    x = solve(m, [3, 4])
    assert m.apply(x) == (3, 4)
    assert solve(M([[1, 1], [1, 1]]), [1, 2]) is None
    with pytest.raises(InputError):
        solve(m, [1])


def test_ragged_rows_rejected():
    with pytest.raises(InputError):
        M([[1, 2], [3]])


# ===== INDEPENDENCE ORACLE =====

def test_oracle_feeds():
    oracle = independence_oracle(2)
    assert oracle.feed((1, 0))
    assert not oracle.feed((2, 0))
    assert oracle.feed((0, 1))
    assert oracle.rank == 2


def test_oracle_zero_and_mismatch():
    oracle = independence_oracle(3)
    assert not oracle.feed((0, 0, 0))
    with pytest.raises(InputError):
        oracle.feed((1, 0))


def test_oracle_invertible_matrix():
    rows = [[2, 1, 0], [1, 3, 1], [0, 1, Fraction(1, 2)]]
    assert rank(M(rows)) == 3
    oracle = independence_oracle()
    assert [oracle.feed(r) for r in rows] == [True, True, True]


def test_oracle_shared_leading_entries():
    oracle = independence_oracle(4)
    assert oracle.feed((2, 3, 0, 0))
    assert oracle.feed((4, 0, 5, 0))
    assert not oracle.feed((0, 6, -5, 0))
    assert oracle.feed((6, 1, 0, 7))
    assert not oracle.feed((12, 4, 5, 7))
    assert oracle.rank == 3
    assert oracle.accepted[1] == (4, 0, 5, 0)


# ===== MONOMIAL ORDERS =====

def test_parse_order():
    order = parse_order("lex:x2<x1")
    assert order.kind == "lex"
    assert order.priority == (1, 0)
    assert parse_order("deglex:x1<x2") == deglex(2)
    with pytest.raises(InputError):
        parse_order("degrevlex:x1<x2")


def test_ascending_streams():
    assert list(ascending_stream(deglex(2), (1, 1))) == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert list(ascending_stream(lex(2), (2, 1))) == [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]
    assert list(ascending_stream(deglex(2), (0, 0))) == [(0, 0)]


def test_order_compare():
    assert cmp(deglex(2), (2, 0), (0, 1)) > 0
    assert cmp(lex(2), (2, 0), (0, 1)) < 0
    assert cmp(deglex(2), (1, 1), (1, 1)) == 0


def test_q_count():
    assert q_count((0, 0)) == 0
    assert q_count((2, 1)) == 7
    assert q_count((0, 2)) == 5
    assert q_count((0, 2)) == list(ascending_stream(deglex(2), (2, 2))).index((0, 2))
    with pytest.raises(UnsupportedError):
        q_count((1, 0), lex(2))


def test_is_lower_set():
    assert is_lower_set([(0, 0), (1, 0), (0, 1)])
    assert not is_lower_set([(1, 0)])
