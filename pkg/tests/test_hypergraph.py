import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collinear.errors import ValidationError
from collinear.grid import collinear_edges
from collinear.hypergraph import Hypergraph, from_edges, mask_of, members, random_hypergraph


def brute_maximal(h, vertices=None):
    sets = list(h.independent_sets(vertices))
    return {s for s in sets if not any(t != s and t & s == s for t in sets)}


def test_rejects_non_uniform():
    with pytest.raises(ValidationError, match="non-uniform"):
        Hypergraph(4, ((0, 1, 2), (1, 2)), 3)


def test_small_example_maximal_sets():
    # vertices 1..5 as 0..4, edges {1,2,3} and {3,4,5}
    h = from_edges([(0, 1, 2), (2, 3, 4)], 5)
    mis = set(h.maximal_independent_sets())
    assert mis == brute_maximal(h)
    assert len(mis) == 5


def test_grid_maximal_sets():
    h = Hypergraph(9, tuple(collinear_edges(3, 2, 3)), 3)
    mis = list(h.maximal_independent_sets())
    assert len(mis) == 23
    assert max(bin(m).count("1") for m in mis) == 6


@given(st.integers(3, 10), st.integers(0, 12), st.integers(2, 3), st.integers(0, 2 ** 32))
def test_maximal_sets_oracle(n, m, r, seed):
    h = random_hypergraph(n, m, r, np.random.default_rng(seed))
    assert set(h.maximal_independent_sets()) == brute_maximal(h)


def test_masks():
    assert members(mask_of([0, 3, 5])) == [0, 3, 5]
    h = from_edges([(0, 1, 2)])
    assert h.closes_edge(2, mask_of([0, 1]))
    assert not h.closes_edge(2, mask_of([0]))
    assert h.fingerprint() == from_edges([(2, 1, 0)]).fingerprint()
