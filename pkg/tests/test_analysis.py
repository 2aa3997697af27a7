import itertools
from fractions import Fraction
from math import e

import pytest
from hypothesis import given, strategies as st

from collinear.analysis import (check_eps_net, complement_has_rich_line, has_three_collinear,
                                incidence_degree_check, lll_check, max_general_position,
                                min_hitting_set, min_hitting_set_bruteforce, rich_lines,
                                switching_transform, two_color_bruteforce, two_color_cover,
                                weak_candidates)
from collinear.errors import ValidationError
from collinear.grid import grid_points
from collinear.projection import (AXIS_ONLY, IdealPoint, PlanarPoint, apply_certificate_map,
                                  project_generic)

G32 = list(grid_points(3, 2))


@pytest.fixture(scope="module")
def img():
    return project_generic(G32, seed=1)[0]


@pytest.fixture(scope="module")
def img_axis():
    return project_generic(G32, AXIS_ONLY, seed=1)[0]


def collinear_brute(points, k):
    lines = set()
    for combo in itertools.combinations(range(len(points)), 3):
        p, q, s = (points[i] for i in combo)
        if (q.x - p.x) * (s.y - p.y) == (q.y - p.y) * (s.x - p.x):
            lines.add(frozenset(i for i in range(len(points))
                                if (q.x - p.x) * (points[i].y - p.y) == (q.y - p.y) * (points[i].x - p.x)))
    return {l for l in lines if len(l) >= k}


def test_rich_lines(img, img_axis):
    assert len(rich_lines(img, 3)) == 8
    assert {frozenset(i) for _, i in rich_lines(img, 3).lines} == collinear_brute(img, 3)
    assert len(rich_lines(img, 10)) == 0
    assert len(rich_lines(img_axis, 3)) == 6
    rl = rich_lines(img, 1)
    assert rl.threshold == 2 and rl.notes


def test_general_position(img):
    rep = max_general_position(img)
    assert rep.size == 6 and rep.optimal
    assert not has_three_collinear([img[i] for i in rep.witness])
    # exhaustive: no 7-subset is triple-free
    assert all(has_three_collinear([img[i] for i in c]) for c in itertools.combinations(range(9), 7))
    four = [PlanarPoint.of(k, 0) for k in range(4)]
    assert max_general_position(four).size == 2
    free = [PlanarPoint.of(0, 0), PlanarPoint.of(1, 0), PlanarPoint.of(0, 1)]
    assert max_general_position(free).size == 3


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=11, unique=True))
def test_general_position_oracle(raw):
    pts = [PlanarPoint.of(x, y) for x, y in raw]
    rep = max_general_position(pts)
    best = max(k for k in range(len(pts) + 1)
               if any(not has_three_collinear([pts[i] for i in c])
                      for c in itertools.combinations(range(len(pts)), k)))
    assert rep.size == best
    assert not has_three_collinear([pts[i] for i in rep.witness])


def test_greedy_mode_bounds(img):
    rep = max_general_position(img, exact_budget=3)
    assert rep.size <= 6 <= rep.upper_bound and not rep.witness == []


def test_check_net(img):
    T = [img[G32.index(p)] for p in [(1, 1), (2, 2), (3, 3)]]
    assert check_eps_net(img, T, Fraction(1, 3)).verdict
    assert not check_eps_net(img, [], Fraction(1, 3)).verdict
    assert check_eps_net(img, [], Fraction(2)).verdict
    with pytest.raises(ValidationError):
        check_eps_net(img, [PlanarPoint.of(10 ** 9, 1)], Fraction(1, 3))


def test_min_hitting(img, img_axis):
    rep = min_hitting_set(img, Fraction(1, 3))
    assert rep.size == 3 and rep.optimal
    assert min_hitting_set_bruteforce(img, 3) == 3
    line = [PlanarPoint.of(k, 2 * k) for k in range(4)]
    assert min_hitting_set(line, threshold=3).size == 1
    # the product lift gives each row its own direction, so no two candidates suffice
    rep = min_hitting_set(img_axis, threshold=3, weak=True, projective=True)
    assert rep.verdict and rep.optimal and rep.size == 3
    rl = rich_lines(img_axis, 3)
    cands = weak_candidates(img_axis, rl, projective=True)
    lines = [l for l, _ in rl.lines]
    assert not any(all(l.contains(c1) or l.contains(c2) for l in lines)
                   for c1, c2 in itertools.combinations(cands, 2))


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=12, unique=True),
       st.integers(2, 4))
def test_min_hitting_oracle(raw, thr):
    pts = [PlanarPoint.of(x, y) for x, y in raw]
    rep = min_hitting_set(pts, threshold=thr)
    assert rep.verdict
    if rep.optimal:
        assert rep.size == min_hitting_set_bruteforce(pts, thr)


def test_complement_duality(img):
    r = 3
    for k in range(0, 5):
        for T in itertools.combinations(img, k):
            hits = check_eps_net(img, list(T), threshold=r).verdict
            assert hits == (not complement_has_rich_line(img, list(T), r))


def test_weak_candidates_and_switching(img_axis):
    S, cert = project_generic([(1, 1), (1, 2), (1, 3), (2, 1), (3, 1), (2, 3), (3, 2)], AXIS_ONLY, seed=2)
    weak = min_hitting_set(S, threshold=3, weak=True)
    assert weak.verdict
    grid_img = apply_certificate_map(cert, G32)
    sw = switching_transform(S, weak.net, 3, grid_img, t=2)
    assert sw["passes"] and sw["within_bound"]


def test_two_color(img):
    lines = [idx for _, idx in rich_lines(img, 3).lines]
    rep = two_color_cover(img, lines)
    assert rep.sat and rep.verified
    assert two_color_cover([PlanarPoint.of(0, 0)], [[0]]).sat is False
    assert two_color_cover(img, []).sat


@given(st.integers(2, 12), st.lists(st.lists(st.integers(0, 11), min_size=1, max_size=4), max_size=10))
def test_two_color_oracle(n, raw):
    edges = [sorted({v % n for v in e}) for e in raw]
    rep = two_color_cover(list(range(n)), edges)
    assert rep.sat == two_color_bruteforce(n, edges)
    if rep.sat:
        assert rep.verified


def test_incidence_degree(img):
    lines = [l for l, _ in rich_lines(img, 3).lines]
    assert incidence_degree_check(img, lines, 3)["ok"]
    assert not incidence_degree_check(img, lines, 2)["ok"]


def test_lll():
    assert lll_check(2, 4)["holds"] is False
    assert lll_check(2, 5)["holds"] is True
    assert lll_check(2 ** 20, 2)["holds"] is False


@given(st.integers(1, 10 ** 6), st.integers(1, 40))
def test_lll_matches_float(T, r):
    lhs, rhs = e * (T + 1), 2 ** (r - 1)
    if abs(lhs - rhs) > 1e-6 * rhs:
        assert lll_check(T, r)["holds"] == (lhs < rhs)
