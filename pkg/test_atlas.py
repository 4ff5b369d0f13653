"""Maximal-order witnesses, irreducibility verdicts, the atlas and the P_r family."""

import pytest

from app.errors import InputError
from app.services.atlas_service import TABLE_1, atlas_service, format_atlas_csv, p_r, table_classes, witness_json
from app.services.staircase_service import staircase_service
from app.utils.finite_functions import convolve, finite_fn, newton_polygon
from app.utils.lattice_geometry import convex_hull, double_area, segment

EXAMPLE = convex_hull([(0, 0), (4, 2), (2, 3)])
EXAMPLE_VALUES = {
    (0, 0): -1, (1, 1): 4, (2, 1): -1, (2, 2): -6, (3, 2): 4, (4, 2): -1, (2, 3): 1,
}


def rows_of(report):
    return sorted((row.vertices, row.m, row.double_area) for row in report.rows)


# ===== WITNESSES =====

def test_unit_segment_witness():
    W = atlas_service.max_order_witness(segment(1))
    assert W.m == 1
    assert W.space_dim == 1
    assert W.f.mapping == {(0, 0): -1, (1, 0): 1}
    assert atlas_service.is_large(W)


def test_example_triangle_witness():
    W = atlas_service.max_order_witness(EXAMPLE)
    assert W.m == 3
    assert W.space_dim == 1
    assert W.f.mapping == EXAMPLE_VALUES
    assert newton_polygon(W.f) == EXAMPLE
    assert atlas_service.is_large(W)


def test_p_r_witness_support():
    for r in (1, 2, 3):
        W = atlas_service.max_order_witness(p_r(r))
        assert W.m == r + 1
        assert {(0, 0), (r, 0), (-1, r + 2)} <= set(W.f.mapping)


def test_small_lattice_polygon_rejected():
    with pytest.raises(InputError):
        atlas_service.max_order_witness(convex_hull([(0, 0)]))


# ===== VERDICTS =====

def test_example_is_irreducible():
    assert atlas_service.decide_irreducible(atlas_service.max_order_witness(EXAMPLE)).is_irreducible


def test_double_segment_is_reducible():
    verdict = atlas_service.decide_irreducible(atlas_service.max_order_witness(segment(2)))
    assert verdict.status == "reducible"
    assert sum(verdict.s_values) == 2


def test_unit_square_is_reducible():
    W = atlas_service.max_order_witness(convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)]))
    assert W.m == 2
    assert atlas_service.decide_irreducible(W).status == "reducible"


def test_certify_user_function():
    assert atlas_service.certify_irreducible(finite_fn(EXAMPLE_VALUES)).is_irreducible
    step = finite_fn({(1, 0): 1, (0, 0): -1})
    assert atlas_service.certify_irreducible(step).is_irreducible
    assert atlas_service.certify_irreducible(convolve(step, step)).status == "reducible"
    assert atlas_service.certify_irreducible(finite_fn({(3, 3): 2})).status == "inconclusive"


def test_rel_prime_inequality():
    f = finite_fn({(1, 0): 1, (0, 0): -1})
    g = finite_fn({(0, 1): 1, (0, 0): -1})
    assert atlas_service.check_rel_prime_inequality(f, g, True)
    assert atlas_service.check_rel_prime_inequality(finite_fn(EXAMPLE_VALUES), f, True)
    with pytest.raises(InputError):
        atlas_service.check_rel_prime_inequality(f, g, None)


# ===== ATLAS =====

def test_table_reference_data():
    assert len(TABLE_1) == 31
    assert all(m * m == dA + 1 for _, m, dA in TABLE_1)
    assert all(double_area(convex_hull(corners)) == dA for corners, _, dA in TABLE_1)


def test_atlas_bound_3():
    report = atlas_service.atlas_search(3)
    assert len(report.rows) == 2
    assert rows_of(report) == table_classes(3)
    assert report.inconclusive == []


def test_atlas_bound_8():
    report = atlas_service.atlas_search(8)
    assert len(report.rows) == 4
    assert rows_of(report) == table_classes(8)
    assert all(row.m * row.m > row.double_area for row in report.rows)


def test_atlas_bound_15():
    report = atlas_service.atlas_search(15)
    assert len(report.rows) == 10
    assert rows_of(report) == table_classes(15)
    assert sum(1 for row in report.rows if row.double_area == 15) == 6


def test_atlas_csv():
    text = format_atlas_csv(atlas_service.atlas_search(3))
    lines = text.splitlines()
    assert lines[0] == "corners;sm;two_vol"
    assert lines[1] == "(0,0), (1,0);1;0"
    assert len(lines) == 3
    assert lines[2].endswith(";2;3")


def test_witness_json():
    payload = witness_json(atlas_service.max_order_witness(EXAMPLE))
    assert payload["m"] == 3
    assert {"p": [2, 3], "c": "1"} in payload["f"]["terms"]


# ===== THE P_r FAMILY =====

def test_verify_pr_small_range():
    reports = atlas_service.verify_pr_range(range(1, 6))
    assert [p.m for p in reports] == [2, 3, 4, 5, 6]
    assert all(all(p.clauses.values()) for p in reports)


def test_verify_pr_range_six_to_ten():
    reports = atlas_service.verify_pr_range(range(6, 11))
    assert [p.m for p in reports] == [7, 8, 9, 10, 11]
    assert all(all(p.clauses.values()) for p in reports)


def test_verify_pr_values():
    report = atlas_service.verify_pr(2)
    assert report.double_area == 8
    assert set(report.staircase) == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)}
    assert staircase_service.vanishing_order(atlas_service.max_order_witness(p_r(2)).f) == 3


def test_verify_pr_rejects_bad_r():
    with pytest.raises(InputError):
        atlas_service.verify_pr(0)
