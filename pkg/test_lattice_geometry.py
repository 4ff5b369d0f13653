"""Polygon geometry: hulls, counts, Minkowski sums, normal forms, enumeration."""

from fractions import Fraction

import pytest

from app.errors import InputError
from app.utils.lattice_geometry import (
    boundary_count,
    convex_hull,
    count_lattice_points,
    double_area,
    enumerate_polygons,
    horizontal_chord,
    l_ratio,
    lattice_points,
    lattice_points_dilate,
    minkowski_decompositions,
    minkowski_sum,
    mixed_volume_2x,
    segment,
    transform,
    translate,
    unimodular_canonical,
    unimodular_equivalent,
)

EXAMPLE = convex_hull([(0, 0), (4, 2), (2, 3)])
EXAMPLE_SUPPORT = [(0, 0), (1, 1), (2, 1), (2, 2), (3, 2), (4, 2), (2, 3)]
UNIT_SQUARE = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)])


def p_r(r):
    return convex_hull([(0, 0), (r, 0), (-1, r + 2)])


# ===== HULLS =====

def test_hull_dimensions():
    point = convex_hull([(0, 0)])
    assert point.dim == 0 and point.vertices == ((0, 0),)
    line = convex_hull([(0, 0), (2, 0), (1, 0)])
    assert line.dim == 1 and line.vertices == ((0, 0), (2, 0))
    assert convex_hull(EXAMPLE_SUPPORT) == EXAMPLE
    assert EXAMPLE.vertices == ((0, 0), (4, 2), (2, 3))
    with pytest.raises(InputError):
        convex_hull([])


def test_double_area():
    assert double_area(convex_hull([(0, 0), (1, 0), (2, 3)])) == 3
    assert double_area(segment(1)) == 0
    assert double_area(EXAMPLE) == 8


def test_boundary_count():
    assert boundary_count(segment(3)) == 6
    assert boundary_count(convex_hull([(5, 5)])) == 0
    assert boundary_count(EXAMPLE) == 4


# ===== LATTICE POINTS =====

def test_lattice_point_counts():
    assert count_lattice_points(EXAMPLE) == 7
    assert sorted(lattice_points(EXAMPLE)) == sorted(EXAMPLE_SUPPORT)
    assert count_lattice_points(UNIT_SQUARE) == 4
    assert count_lattice_points(p_r(2)) == 7
    assert len(lattice_points(p_r(2))) == 7


def test_dilate_points():
    assert len(lattice_points_dilate(UNIT_SQUARE, 2)) == 9
    assert sorted(lattice_points_dilate(EXAMPLE, Fraction(1, 2))) == [(0, 0), (1, 1), (2, 1)]
    direct = lattice_points(convex_hull([(0, 0), (8, 4), (4, 6)]))
    assert sorted(lattice_points_dilate(EXAMPLE, 2)) == sorted(direct)
    assert len(direct) == (32 + 8) // 2 + 1


# ===== MINKOWSKI SUMS =====

def test_minkowski_sum():
    horizontal = segment(1)
    vertical = convex_hull([(0, 0), (0, 1)])
    assert minkowski_sum(horizontal, vertical) == UNIT_SQUARE
    assert minkowski_sum(EXAMPLE, convex_hull([(3, -1)])) == translate(EXAMPLE, (3, -1))
    assert mixed_volume_2x(horizontal, vertical) == 1


def test_mixed_volume_p_family():
    P1, P2 = p_r(1), p_r(2)
    total = double_area(minkowski_sum(P1, P2))
    assert total == double_area(P1) + double_area(P2) + 2 * mixed_volume_2x(P1, P2)
    assert mixed_volume_2x(P1, P2) == 6


def test_decompositions():
    assert minkowski_decompositions(EXAMPLE) == []
    pairs = minkowski_decompositions(segment(2))
    assert len(pairs) == 1
    assert all(unimodular_equivalent(Q, segment(1)) for Q in pairs[0])
    (q1, q2), = minkowski_decompositions(UNIT_SQUARE)
    assert {q1.dim, q2.dim} == {1}
    assert minkowski_sum(q1, q2) == UNIT_SQUARE


# ===== NORMAL FORMS =====

def test_canonical_form_orbit():
    T = convex_hull([(0, 0), (1, 0), (2, 3)])
    canonical = unimodular_canonical(T)
    for U, t in [
        (((1, 1), (0, 1)), (5, -2)),
        (((2, 1), (1, 1)), (0, 0)),
        (((0, 1), (1, 0)), (1, 1)),
        (((1, 0), (0, -1)), (0, 3)),
    ]:
        assert unimodular_canonical(transform(T, U, t)) == canonical


def test_canonical_segment_and_point():
    assert unimodular_canonical(convex_hull([(1, 1), (5, 3)])) == segment(2)
    assert unimodular_canonical(convex_hull([(4, 7)])).vertices == ((0, 0),)


def test_canonical_coordinates_are_plain_ints():
    T = convex_hull([(0, 0), (3, 1), (1, 4)])
    for P in [unimodular_canonical(T)] + enumerate_polygons(4):
        assert all(type(x) is int for v in P.vertices for x in v)
    assert hash(unimodular_canonical(T)) == hash(unimodular_canonical(translate(T, (2, -1))))


def test_enumerate_small_bound():
    classes = enumerate_polygons(1)
    assert len(classes) == 2
    assert classes[0] == segment(1)
    assert double_area(classes[1]) == 1


def test_enumerate_unique_classes():
    classes = enumerate_polygons(4)
    canon = [unimodular_canonical(P) for P in classes]
    assert len(set(canon)) == len(classes)
    assert all(double_area(P) <= 4 for P in classes)


def test_enumerate_box_only_counts_overflows():
    reference = enumerate_polygons(6)
    tight = enumerate_polygons(6, box_factor=1)
    assert len(tight) == len(reference)
    assert set(tight) == set(reference)


# ===== TRIANGLE RATIOS =====

def test_l_ratio():
    standard = convex_hull([(0, 0), (1, 0), (0, 1)])
    assert l_ratio(EXAMPLE, EXAMPLE) == 1
    assert l_ratio(standard, [(0, 0), (2, 1)]) == 3
    with pytest.raises(InputError):
        l_ratio(UNIT_SQUARE, [(0, 0)])


def test_horizontal_chord():
    assert horizontal_chord(convex_hull([(0, 0), (3, 0), (0, 2)])) == (3, 2)
