from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collinear.construction import p_random_subset
from collinear.errors import DegenerateFamily, ValidationError
from collinear.families import (build_family_3d, build_family_general, family_lines,
                                incidence_average_bound, point_major_incidences,
                                primes_in_range, verify_family)
from collinear.grid import grid_points


def test_primes():
    assert primes_in_range(10, 20) == [11, 13, 17, 19]
    assert primes_in_range(2, 3) == [3]
    assert primes_in_range(24, 28) == []


@given(st.integers(0, 300), st.integers(0, 300))
def test_primes_oracle(lo, hi):
    def isprime(p):
        return p > 1 and all(p % q for q in range(2, int(p ** 0.5) + 1))
    assert primes_in_range(lo, hi) == [p for p in range(lo + 1, hi + 1) if isprime(p)]


def test_family_3d_examples():
    F = build_family_3d(64, 0, t=8)
    assert F.primes == [11, 13]
    rep = verify_family(F)
    assert rep["max_points_on_line"] <= 8 and rep["ok"]
    with pytest.raises(DegenerateFamily, match="degenerate"):
        build_family_3d(16, 0, t=16)


def test_family_general_examples():
    F = build_family_general(10 ** 6, 3, 1)
    assert F.theory_t == "1920"
    F = build_family_general(32, 2, 1, t=4)
    assert F.primes == [11, 13]
    assert all(abs(v[1]) <= v[0] for v in F.directions())
    with pytest.raises(ValidationError):
        build_family_general(32, 3, Fraction(1, 20))


def test_verify_32():
    rep = verify_family(build_family_3d(32, 0, t=8))
    assert rep["ok"]
    assert rep["cover_count"]["min"] >= rep["cover_count"]["nonneg_directions"]


def test_lines_are_progressions():
    F = build_family_3d(16, 0, t=4)
    pts = set(grid_points(16, 3))
    for base, v, count in list(family_lines(F))[::97]:
        # the base may sit outside the grid; the line is u + j v for j >= 0
        on = [q for q in (tuple(b + j * c for b, c in zip(base, v)) for j in range(17)) if q in pts]
        assert len(on) == count <= 4


def test_incidence_full_and_empty():
    F = build_family_3d(16, 0, t=4)
    full = incidence_average_bound(list(grid_points(16, 3)), F, 3)
    assert full.holds
    empty = incidence_average_bound([], F, 3)
    assert empty.incidences == 0 and empty.lower_bound == 0


def test_incidence_half():
    F = build_family_3d(32, 0, t=8)
    S = p_random_subset(32, 3, Fraction(1, 2), 11)
    rep = incidence_average_bound(S, F, 3)
    assert rep.holds
    assert rep.incidences == point_major_incidences(S, F)
    assert rep.exact_tuples == sum(comb(c, 3) * m for c, m in rep.line_counts.items())
