import itertools
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from collinear.budget import Budget
from collinear.errors import BudgetExceeded, ValidationError
from collinear.exact import frac_binomial, primitive
from collinear.grid import (AXIS, FULL, axis_line_groups, bucket_line_census, canonical_line,
                            claim_bounds, codegree_profile, collinear_edges, compute_delta,
                            count_collinear_tuples, DegreeProfile, enumerate_rich_lines,
                            grid_points, hypergraph_summary, index_point, line_census,
                            line_groups, point_index, progression_witness, tuples_from_census)
from collinear.hypergraph import Hypergraph, codegree_scan

from conftest import brute_collinear_tuples, brute_lines


def test_canonical_line_examples():
    l = canonical_line((1, 1, 1), (3, 5, 7), 8)
    assert (l.dir, l.base, l.count) == ((1, 2, 3), (1, 1, 1), 3)
    l = canonical_line((2, 2), (1, 1), 3)
    assert (l.dir, l.base, l.count) == ((1, 1), (1, 1), 3)
    l = canonical_line((1, 1), (1, 3), 3)
    assert (l.dir, l.base, l.count) == ((0, 1), (1, 1), 3)
    with pytest.raises(ValidationError, match="degenerate pair"):
        canonical_line((1, 2), (1, 2), 3)


@given(st.integers(2, 7), st.integers(1, 3), st.data())
def test_canonical_line_invariants(n, k, data):
    coord = st.tuples(*[st.integers(1, n)] * k)
    p = data.draw(coord)
    q = data.draw(coord.filter(lambda x: x != p))
    l = canonical_line(p, q, n)
    assert primitive(l.dir) == l.dir
    pts = l.points()
    assert p in pts and q in pts
    assert all(all(1 <= c <= n for c in x) for x in pts)
    before = tuple(b - v for b, v in zip(l.base, l.dir))
    after = tuple(b + l.count * v for b, v in zip(l.base, l.dir))
    assert not all(1 <= c <= n for c in before)
    assert not all(1 <= c <= n for c in after)
    # either endpoint pair gives the same representation
    assert canonical_line(q, p, n) == l


def test_rich_line_counts():
    assert len(list(enumerate_rich_lines(3, 2, 3))) == 8
    assert len(list(enumerate_rich_lines(3, 3, 3))) == 49
    assert len(list(enumerate_rich_lines(3, 2, 3, AXIS))) == 6


@pytest.mark.parametrize("a,d", [(3, 2), (4, 2), (3, 3), (5, 2)])
def test_lines_match_pair_oracle(a, d):
    pts = list(grid_points(a, d))
    got = {frozenset(l.points()) for l in enumerate_rich_lines(a, d, 3)}
    assert got == brute_lines(pts, 3)


def test_tuple_counts():
    assert count_collinear_tuples(3, 2, 3) == 8
    assert count_collinear_tuples(4, 2, 3) == 44
    assert count_collinear_tuples(2, 5, 3) == 0
    assert count_collinear_tuples(2, 5, 3, AXIS) == 0


@pytest.mark.parametrize("a,d,r", [(3, 2, 3), (4, 2, 3), (4, 2, 4), (3, 3, 3), (5, 2, 4)])
def test_tuple_counts_match_brute_force(a, d, r):
    pts = list(grid_points(a, d))
    assert count_collinear_tuples(a, d, r) == brute_collinear_tuples(pts, r)


def test_axis_closed_form_small():
    for a in range(2, 6):
        for d in range(1, 4):
            for r in range(2, a + 1):
                assert count_collinear_tuples(a, d, r, AXIS) == d * comb(a, r) * a ** (d - 1)


def test_bucket_census():
    assert bucket_line_census(3, 2).buckets == {1: 8}
    # 10 four-point lines and 4 three-point diagonals, all with 2 < points <= 4
    assert bucket_line_census(4, 2).buckets == {1: 14}
    assert bucket_line_census(2, 2).buckets == {}


def test_bucket_census_matches_census():
    cen = line_census(9, 2, 3)
    b = bucket_line_census(9, 2)
    assert sum(b.buckets.values()) == sum(cen.values())
    for ell, n in cen.items():
        t = (ell - 1).bit_length() - 1
        assert 2 ** t < ell <= 2 ** (t + 1)


def test_codegree_examples():
    p = codegree_profile(3, 2, 3)
    assert p.delta == {2: 1, 3: 1}
    p = codegree_profile(4, 2, 3)
    assert p.delta[2] == 2
    assert p.d == Fraction(3 * 44, 16)
    p = codegree_profile(2, 3, 3)
    assert p.d == 0 and all(v == 0 for v in p.delta.values())


@pytest.mark.parametrize("a,d,r,mode", [(3, 2, 3, FULL), (4, 2, 3, FULL), (4, 2, 4, FULL),
                                        (3, 3, 3, FULL), (4, 3, 3, AXIS), (5, 2, 3, AXIS)])
def test_codegree_matches_scan(a, d, r, mode):
    h = Hypergraph(a ** d, tuple(collinear_edges(a, d, r, mode)), r)
    scan = codegree_scan(h)
    prof = codegree_profile(a, d, r, mode)
    assert scan.delta == prof.delta
    assert scan.d == prof.d and scan.n_edges == prof.n_edges
    assert all(prof.delta[j] >= prof.delta[j + 1] for j in range(2, r))


def test_compute_delta_examples():
    prof = DegreeProfile(3, 0, 0, Fraction(2), {2: 1, 3: 1})
    assert compute_delta(prof, 3, Fraction(1, 2)) == 8
    prof = DegreeProfile(3, 0, 0, Fraction(5), {2: 0, 3: 0})
    assert compute_delta(prof, 3, Fraction(1, 10)) == 0
    prof = DegreeProfile(4, 0, 0, Fraction(10), {2: 1, 3: 1, 4: 1})
    assert compute_delta(prof, 4, Fraction(1, 2)) == 16
    with pytest.raises(ValidationError, match="empty hypergraph"):
        compute_delta(DegreeProfile(3, 4, 0, Fraction(0), {2: 0, 3: 0}), 3, Fraction(1, 2))


def test_budget_error():
    with pytest.raises(BudgetExceeded, match="instance too large"):
        list(enumerate_rich_lines(100, 4, 3, budget=Budget(max_points=1000)))


@given(st.integers(2, 6), st.integers(1, 3), st.integers(2, 5))
def test_census_identity(a, d, r):
    cen = line_census(a, d, 2)
    assert tuples_from_census(cen, r) == count_collinear_tuples(a, d, r)


@given(st.integers(2, 6), st.integers(1, 3))
def test_point_index_roundtrip(a, d):
    for i, p in enumerate(grid_points(a, d)):
        assert point_index(p, a) == i
        assert index_point(i, a, d) == p


def test_line_groups_match_lines():
    pts = list(grid_points(3, 3))
    g = line_groups(pts, 3)
    assert len(g) == 49
    assert {frozenset(pts[i] for i in idx) for idx in g.values()} == brute_lines(pts, 3)
    ax = axis_line_groups(list(grid_points(3, 2)), 3)
    assert len(ax) == 6


@given(st.lists(st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6)),
                min_size=3, max_size=25, unique=True))
def test_line_groups_triples_oracle(pts):
    groups = line_groups(pts, 3)
    triples = sum(comb(len(v), 3) for v in groups.values())
    assert triples == brute_collinear_tuples(pts, 3)


def test_progression_witness_and_bounds():
    assert progression_witness(9, 2, 3) == 3 ** 4
    rep = claim_bounds(6, 2, 3)
    assert rep["edge_count"] == count_collinear_tuples(6, 2, 3)
    assert rep["premise"].startswith("premise unmet")


def test_summary_shape():
    s = hypergraph_summary(3, 2, 3)
    assert s["edge_count"] == 8 and s["vertex_count"] == 9
    assert s["census"] == [{"points": 3, "lines": 8}]


@given(st.fractions(min_value=0, max_value=20), st.integers(1, 5))
def test_frac_binomial_convex_extension(x, r):
    v = frac_binomial(x, r)
    assert v >= 0
    if x.denominator == 1:
        assert v == comb(int(x), r)
