import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from collinear.errors import RetryExhausted, ValidationError
from collinear.grid import grid_points
from collinear.projection import (AXIS_ONLY, PlanarLine, PlanarPoint, apply_certificate_map,
                                  check_product_grid, collinear_triples,
                                  collinear_triples_bruteforce, concurrent, designated_triples,
                                  dual_line, dual_point, dualize, generic_product_grid,
                                  lift_products, project_generic)

pt = PlanarPoint.of
coords = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def test_lift():
    assert lift_products((1, 2, 3)) == (1, 2, 3, 2, 3, 6, 6)
    assert lift_products((1, 1)) == (1, 1, 1)
    assert lift_products((2, 3)) == (2, 3, 6)
    with pytest.raises(ValidationError):
        lift_products((0, 2))


def test_project_cube_corners():
    S = [p for p in grid_points(2, 3)]
    img, cert = project_generic(S, seed=1)
    assert len(img) == 8 and cert.ok and cert.image_triples == 0


def test_project_333():
    img, cert = project_generic(list(grid_points(3, 3)), seed=1)
    assert cert.ok and cert.image_triples == 49
    assert len(collinear_triples_bruteforce(img)) == 49


def test_project_axis_only():
    img, cert = project_generic(list(grid_points(3, 2)), AXIS_ONLY, seed=1)
    assert cert.ok and cert.image_triples == 6
    assert len(collinear_triples_bruteforce(img)) == 6


def test_retry_exhausted_on_bad_range():
    # coefficients all equal to 1 collapse distinct points
    with pytest.raises(RetryExhausted):
        project_generic([(1, 2), (2, 1), (3, 3)], coeff_range=1, max_attempts=2)


@given(st.lists(st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5)),
                min_size=3, max_size=30, unique=True), st.integers(0, 2 ** 32))
def test_projection_preserves_exactly(S, seed):
    img, cert = project_generic(S, seed=seed)
    assert collinear_triples_bruteforce(img) == designated_triples(S, "full-line")


@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)),
                min_size=3, max_size=30, unique=True), st.integers(0, 2 ** 32))
def test_axis_projection_exact(S, seed):
    img, cert = project_generic(S, AXIS_ONLY, seed=seed)
    assert collinear_triples_bruteforce(img) == designated_triples(S, AXIS_ONLY)
    again = apply_certificate_map(cert, S)
    assert again == img


@given(st.lists(st.tuples(coords, coords), min_size=3, max_size=14, unique=True))
def test_slope_hash_matches_determinants(raw):
    pts = [PlanarPoint(x, y) for x, y in raw]
    assert collinear_triples(pts) == collinear_triples_bruteforce(pts)


def test_product_grid():
    assert check_product_grid([[1, 5], [2, 9]])["ok"]
    rep = check_product_grid([[1, 2, 3], [1, 2, 3]])
    assert not rep["ok"] and rep["non_axis_triples"] == 2
    g = generic_product_grid(3, 2, seed=0, alphabets=[[1, 2, 3], [1, 2, 3]])
    assert g["attempts"] >= 2 and len(g["rejected"]) >= 1
    assert g["collinear_triples"] == 6 == g["axis_triples"]


def test_duality_examples():
    lines = dualize([pt(1, 0), pt(2, 0), pt(3, 0)])
    assert lines == [PlanarLine.slope_form(k, 0) for k in (1, 2, 3)]
    assert concurrent(lines) == pt(0, 0)
    assert dual_line(pt(0, 0)) == PlanarLine.slope_form(0, 0)
    with pytest.raises(ValidationError, match="outside duality chart"):
        dual_point(PlanarLine.from_coeffs(1, 0, -3))


@given(coords, coords)
def test_duality_involution(x, y):
    p = PlanarPoint(x, y)
    assert dual_point(dual_line(p)) == p


@given(coords, coords, coords, coords)
def test_duality_preserves_incidence(a, b, m, c):
    p = PlanarPoint(a, b)
    line = PlanarLine.slope_form(m, c)
    assert line.contains(p) == dual_line(p).contains(dual_point(line))
