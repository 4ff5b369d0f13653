"""Staircases, smallest monomials, witnesses and convolution."""

import itertools
import random
from fractions import Fraction

import pytest

from app.errors import InputError
from app.services import atlas_service as atlas_module
from app.services import spolytope_service as spolytope_module
from app.services.staircase_service import StaircaseService, staircase_service
from app.utils.finite_functions import (
    convolve,
    delta,
    evaluation_matrix,
    finite_fn,
    monomial_value,
    newton_polygon,
    pairing,
    point_set,
)
from app.utils.lattice_geometry import convex_hull, lattice_points
from app.utils.linear_algebra import independence_oracle, rank
from app.utils.monomial_orders import ascending_stream, deglex, lex, parse_order

EXAMPLE_VALUES = {
    (0, 0): -1, (1, 1): 4, (2, 1): -1, (2, 2): -6, (3, 2): 4, (4, 2): -1, (2, 3): 1,
}


def example_fn():
    return finite_fn(EXAMPLE_VALUES)


def box(xs, ys):
    return point_set(itertools.product(xs, ys))


def random_set(rng, size, side=5):
    return point_set(rng.sample(list(itertools.product(range(side), range(side))), size))


def plain_greedy(A, order):
    oracle = independence_oracle(len(A))
    chosen = set()
    for e in ascending_stream(order, A.extents()):
        if oracle.feed([monomial_value(a, e) for a in A.points]):
            chosen.add(e)
            if len(chosen) == len(A):
                break
    return chosen


# ===== PAIRING AND sm =====

def test_pairing_delta():
    assert pairing(delta((0, 0)), (0, 0)) == 1
    assert pairing(delta((0, 0)), (1, 2)) == 0
    assert pairing(finite_fn({(1, 0): 1, (0, 0): -1}), (1, 0)) == 1


def test_sm_of_example():
    f = example_fn()
    assert staircase_service.sm(f) == (2, 1)
    assert staircase_service.vanishing_order(f) == 3
    for e in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)]:
        assert pairing(f, e) == 0
    assert pairing(f, (2, 1)) != 0


def test_sm_small_cases():
    step = finite_fn({(1, 0): 1, (0, 0): -1})
    assert staircase_service.sm(step) == (1, 0)
    assert staircase_service.sm(convolve(step, step)) == (2, 0)
    assert staircase_service.vanishing_order(delta((3, 5))) == 0
    with pytest.raises(InputError):
        staircase_service.sm(finite_fn({(0, 0): 0}, n=2))


# ===== STAIRCASES =====

def test_box_staircase():
    A = box(range(3), range(2))
    E = staircase_service.compute_E(A)
    assert E.as_set() == set(A.points)
    assert staircase_service.r_value(A, E) == 2
    assert staircase_service.s_value(A, E) == 3


def test_lower_set_is_its_own_staircase():
    A = point_set([(0, 0), (1, 0), (0, 1)])
    assert staircase_service.compute_E(A).as_set() == set(A.points)
    assert staircase_service.compute_E(A, lex(2)).as_set() == set(A.points)


def test_example_triangle_staircase():
    A = point_set(lattice_points(convex_hull([(0, 0), (4, 2), (2, 3)])))
    E = staircase_service.compute_E(A, parse_order("deglex:x1<x2"))
    assert E.elements[-1] == (2, 1)
    assert E.as_set() == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1)}
    assert E.is_lower()


def test_p2_staircase():
    A = point_set(lattice_points(convex_hull([(0, 0), (2, 0), (-1, 4)])))
    E = staircase_service.compute_E(A)
    simplex = {(i, j) for i in range(3) for j in range(3 - i)}
    assert E.as_set() == simplex | {(3, 0)}
    assert staircase_service.r_value(A, E) == 3
    assert staircase_service.s_value(A, E) == 3


def test_single_point():
    A = point_set([(7, -2)])
    assert staircase_service.compute_E(A).elements == ((0, 0),)
    assert staircase_service.r_value(A) == 1
    assert staircase_service.s_value(A) == 0


def test_lex_product_set():
    A = box(range(2), [0, 2, 5])
    expected = set(itertools.product(range(2), range(3)))
    assert staircase_service.compute_E(A, lex(2)).as_set() == expected
    assert staircase_service.compute_E_lex(A).as_set() == expected


def test_lex_distinct_first_coordinates():
    A = point_set([(0, 4), (1, -3), (5, 0), (9, 9)])
    assert staircase_service.compute_E_lex(A).as_set() == {(0, 0), (1, 0), (2, 0), (3, 0)}


def test_lex_recursion_matches_scan():
    rng = random.Random(11)
    for _ in range(5):
        pts = rng.sample(list(itertools.product(range(4), range(4))), 6)
        A = point_set(pts)
        for spec in ("lex:x1<x2", "lex:x2<x1"):
            order = parse_order(spec)
            assert staircase_service.compute_E_lex(A, order).as_set() == staircase_service.compute_E(A, order).as_set()


def test_pruned_scan_matches_plain_greedy():
    rng = random.Random(5)
    for _ in range(6):
        A = random_set(rng, rng.randint(4, 9))
        for spec in ("deglex:x1<x2", "deglex:x2<x1", "lex:x1<x2"):
            order = parse_order(spec)
            assert staircase_service.compute_E(A, order).as_set() == plain_greedy(A, order)


def test_staircase_degrees_match_layer_ranks():
    rng = random.Random(9)
    for _ in range(4):
        A = random_set(rng, 8)
        E = staircase_service.compute_E(A, deglex(2))
        counts = E.degree_counts()
        for t in range(E.max_degree() + 1):
            monomials = [(i, k - i) for k in range(t + 1) for i in range(k + 1)]
            assert rank(evaluation_matrix(A, monomials)) == sum(counts.get(k, 0) for k in range(t + 1))


def test_staircase_rejects_bad_input():
    with pytest.raises(InputError):
        point_set([(0, 0), (0, 0)])
    with pytest.raises(InputError):
        staircase_service.compute_E(point_set([(0, 0, 1)]), deglex(2))
    with pytest.raises(InputError):
        staircase_service.compute_E_lex(point_set([(0, 0)]), deglex(2))


# ===== WITNESSES =====

def test_witness_on_segment():
    A = point_set([(0, 0), (1, 0)])
    f = staircase_service.witness(A, deglex(2), (1, 0))
    assert f.mapping == {(1, 0): 1, (0, 0): -1}


def test_witness_on_example_triangle():
    A = point_set(EXAMPLE_VALUES)
    f = staircase_service.witness(A, deglex(2), (2, 1))
    assert staircase_service.sm(f) == (2, 1)
    g = example_fn()
    ratio = Fraction(f.value((2, 3)), g.value((2, 3)))
    assert f == g.scaled(ratio)


def test_witness_sm_on_random_sets():
    rng = random.Random(13)
    for _ in range(4):
        A = random_set(rng, rng.randint(3, 7), 4)
        for e in staircase_service.compute_E(A):
            assert staircase_service.sm(staircase_service.witness(A, None, e)) == e


def test_witness_outside_staircase():
    A = point_set([(0, 0), (1, 0)])
    with pytest.raises(InputError):
        staircase_service.witness(A, deglex(2), (0, 1))


# ===== CONVOLUTION =====

def test_convolution():
    f = finite_fn({(1, 0): 1, (0, 0): -1})
    g = finite_fn({(0, 1): 1, (0, 0): -1})
    h = convolve(f, g)
    assert len(h) == 4
    assert staircase_service.sm(h) == (1, 1)
    assert newton_polygon(h) == convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)])


# ===== SERVICES =====

def test_services_share_one_staircase_service():
    assert isinstance(staircase_service, StaircaseService)
    assert spolytope_module.staircase_service is staircase_service
    assert atlas_module.staircase_service is staircase_service
    assert isinstance(atlas_module.atlas_service, atlas_module.AtlasService)
    assert isinstance(spolytope_module.spolytope_service, spolytope_module.SPolytopeService)
