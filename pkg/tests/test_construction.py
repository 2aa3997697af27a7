import itertools
from fractions import Fraction
from math import sqrt

import mpmath
import pytest
from hypothesis import given, strategies as st

from collinear.construction import (delete_excess_tuples, derive_params, first_moment_check,
                                    make_rng, p_random_subset, remove_heavy_points, star_sparsen,
                                    verify_clean, verify_no_star)
from collinear.errors import ValidationError
from collinear.grid import AXIS, grid_points

from conftest import brute_collinear_tuples


def test_derive_gp():
    cfg = derive_params("gp-3and4", {"n": 4096})
    assert cfg.theory["p"]["formula"] == "1/(4096*sqrt(12))"
    assert mpmath.almosteq(mpmath.mpf(cfg.theory["p"]["approx"]), 1 / (4096 * mpmath.sqrt(12)), 1e-10)
    assert cfg.full_scale_infeasible


def test_derive_eps_net():
    cfg = derive_params("eps-net", {"n": 1000, "r": 5})
    assert cfg.p == Fraction(1, 4000)
    assert cfg.theory["eps"]["exact"] == "1/" + str(10 ** 25)


def test_derive_weak_net():
    cfg = derive_params("weak-net", {"r": 3})
    assert cfg.theory["k"]["exact"] == str(2 ** 81)
    assert cfg.theory["n"]["log2"].startswith("243")
    assert cfg.full_scale_infeasible
    exps = cfg.theory["r_exponents"]
    assert mpmath.almosteq(mpmath.mpf(exps["log2 n ^ (1/5)"]), 3)
    assert mpmath.almosteq(mpmath.mpf(exps["log2 k ^ (1/4)"]), 3)


def test_derive_cover_and_override():
    cfg = derive_params("cover-decomp", {"r": 2}, {"a": 4, "d": 3, "p": "1/2", "T": 3})
    assert cfg.theory["T_full"]["exact"] == str(2 ** 20)
    assert (cfg.a, cfg.d, cfg.p, cfg.T) == (4, 3, Fraction(1, 2), 3)
    with pytest.raises(ValidationError):
        derive_params("nonsense")


def test_random_subset_extremes():
    assert p_random_subset(4, 2, 1, 5) == list(grid_points(4, 2))
    assert p_random_subset(4, 2, 0, 5) == []
    with pytest.raises(ValidationError):
        make_rng(-1)


def test_random_subset_statistics():
    sizes = [len(p_random_subset(16, 3, Fraction(1, 4), s)) for s in range(200)]
    mean = sum(sizes) / len(sizes)
    sigma = sqrt(4096 * 0.25 * 0.75)
    assert abs(mean - 1024) < 3 * sigma


def test_random_subset_deterministic():
    assert p_random_subset(8, 3, Fraction(1, 3), 42) == p_random_subset(8, 3, Fraction(1, 3), 42)
    assert p_random_subset(8, 3, Fraction(1, 3), 42) != p_random_subset(8, 3, Fraction(1, 3), 43)


def test_delete_examples():
    c = delete_excess_tuples([(1, 1), (2, 2), (3, 3), (4, 4)], 4, 2, 3)
    assert c.removed == 1 and len(c.points) == 3
    S = [(1, 1), (1, 2), (2, 1)]
    c = delete_excess_tuples(S, 4, 2, 3)
    assert c.removed == 0 and c.points == S
    c = delete_excess_tuples(list(grid_points(4, 2)), 4, 2, 3)
    assert c.certificate["ok"]
    assert brute_collinear_tuples(c.points, 4) == 0


@given(st.integers(0, 2 ** 32), st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]),
       st.integers(2, 3))
def test_delete_soundness_and_thrift(seed, p, r):
    S = p_random_subset(5, 3, p, seed)
    c = delete_excess_tuples(S, 5, 3, r)
    assert brute_collinear_tuples(c.points, r + 1) == 0
    assert c.certificate["ok"]
    assert c.removed <= c.violating_lines_seen
    assert set(c.points) | set(c.removed_excess) == set(S)


@given(st.integers(0, 2 ** 32))
def test_delete_axis_mode(seed):
    S = p_random_subset(5, 3, Fraction(2, 3), seed)
    c = delete_excess_tuples(S, 5, 3, 3, AXIS)
    assert verify_clean(c.points, 5, 3, 3, AXIS)["ok"]


def test_verify_clean_detects():
    rep = verify_clean(list(grid_points(4, 2)), 4, 2, 3)
    assert not rep["ok"] and rep["max_points_on_line"] == 4


def test_star_examples():
    S = [(1, 2), (3, 2), (2, 1), (2, 3)]
    assert not verify_no_star(S, 3, 2, 2, 2)["ok"]
    c = star_sparsen(S, 3, 2, 2, 2)
    assert c.removed == 1 and c.certificate["ok"]
    assert verify_no_star(c.points, 3, 2, 2, 2)["ok"]
    # no r-full line: nothing to do
    c = star_sparsen([(1, 1), (2, 2)], 3, 2, 2, 2)
    assert c.removed == 0
    # t = 1: every r-full line through a point outside S loses a point
    c = star_sparsen([(1, 1), (1, 2)], 3, 2, 2, 1)
    assert c.removed == 1


@given(st.integers(0, 2 ** 32), st.integers(1, 3))
def test_star_soundness(seed, t):
    S = p_random_subset(4, 3, Fraction(1, 2), seed)
    c = star_sparsen(S, 4, 3, 2, t)
    assert verify_no_star(c.points, 4, 3, 2, t)["ok"]
    assert set(c.points) <= set(S)


def test_heavy_points():
    S = list(grid_points(3, 3))
    c = remove_heavy_points(S, 3, 3, 3, 2)
    assert c.certificate["ok"]


def test_first_moment_examples():
    rep = first_moment_check(10, 100, 50, Fraction(1, 2))
    expected = 10 + 50 * mpmath.log(mpmath.e * 2, 2) - 50
    assert mpmath.almosteq(mpmath.mpf(rep["log2_bound"]), expected, 1e-15)
    assert rep["bound_below_one"] is False
    tiny = first_moment_check(10, 100, 50, Fraction(1, 10 ** 9))
    assert tiny["bound_below_one"]
    vac = first_moment_check(10, 10, 50, Fraction(1, 2))
    assert vac["bound_below_one"] and "vacuous" in vac["note"]


def test_first_moment_full_regime():
    n, f = mpmath.mpf(10) ** 6, mpmath.mpf("0.1")
    lg = mpmath.log(n, 2)
    rep = first_moment_check(12 / f * 10 ** 7 * n ** (mpmath.mpf(5) / 3) * lg ** 2,
                             n ** (mpmath.mpf(8) / 3 + f), n ** (mpmath.mpf(5) / 3 + f),
                             1 / (n * mpmath.sqrt(lg)))
    # the m log(e / sqrt(log n)) term dominates at this scale
    assert rep["log2_bound"] is not None
    assert isinstance(rep["bound_below_one"], bool)


def test_cleaned_set_deterministic():
    S = p_random_subset(16, 3, Fraction(1, 16), 9)
    a = delete_excess_tuples(S, 16, 3, 3).to_json()
    b = delete_excess_tuples(S, 16, 3, 3).to_json()
    assert a == b
