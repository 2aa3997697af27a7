"""Explicit uniform hypergraphs on vertices 0..n-1 with bitmask vertex sets."""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded, ValidationError
from .grid import DegreeProfile


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass
class Hypergraph:
    n: int
    edges: Tuple[Tuple[int, ...], ...]
    r: int
    edge_masks: List[int] = field(init=False, repr=False)
    _rests: List[List[int]] = field(init=False, repr=False)

    def __post_init__(self):
        edges = tuple(sorted(set(tuple(sorted(e)) for e in self.edges)))
        for e in edges:
            if len(e) != self.r or len(set(e)) != self.r:
                raise ValidationError(f"non-uniform edge {e} (r={self.r})")
            if e[0] < 0 or e[-1] >= self.n:
                raise ValidationError(f"edge {e} outside vertex range 0..{self.n - 1}")
        self.edges = edges
        self.edge_masks = [mask_of(e) for e in edges]
        rests: List[List[int]] = [[] for _ in range(self.n)]
        for e, m in zip(edges, self.edge_masks):
            for v in e:
                rests[v].append(m & ~(1 << v))
        self._rests = rests

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def e(self) -> int:
        return len(self.edges)

    def spanned(self, mask: int) -> int:
        return sum(1 for m in self.edge_masks if m & ~mask == 0)

    def degrees(self, mask: Optional[int] = None) -> List[int]:
        mask = self.full if mask is None else mask
        deg = [0] * self.n
        for e, m in zip(self.edges, self.edge_masks):
            if m & ~mask == 0:
                for v in e:
                    deg[v] += 1
        return deg

    def is_independent(self, mask: int) -> bool:
        return all(m & ~mask for m in self.edge_masks)

    def closes_edge(self, v: int, chosen: int) -> bool:
        """Would adding v to ``chosen`` complete an edge?"""
        return any(rest & ~chosen == 0 for rest in self._rests[v])

    def rests(self, v: int) -> List[int]:
        return self._rests[v]

    def induced(self, mask: int) -> "Hypergraph":
        """Sub-hypergraph on the same vertex labels keeping edges inside mask."""
        return Hypergraph(self.n, tuple(e for e, m in zip(self.edges, self.edge_masks)
                                        if m & ~mask == 0), self.r)

    def fingerprint(self) -> str:
        h = hashlib.sha256(f"{self.n}:{self.r}:".encode())
        for e in self.edges:
            h.update((",".join(map(str, e)) + ";").encode())
        return h.hexdigest()[:16]

    def maximal_independent_sets(self, vertices: Optional[int] = None,
                                 node_budget: Optional[int] = None) -> Iterator[int]:
        """All maximal independent subsets of ``vertices`` (default: all), as masks."""
        vertices = self.full if vertices is None else vertices
        order = members(vertices)
        nodes = 0

        def blockable(v: int, out: int) -> bool:
            return any(rest & out == 0 and rest & ~vertices == 0 for rest in self._rests[v])

        def rec(i: int, chosen: int, out: int, pending: Tuple[int, ...]):
            nonlocal nodes
            nodes += 1
            if node_budget is not None and nodes > node_budget:
                raise BudgetExceeded(f"independent-set enumeration exceeded {node_budget} nodes")
            if i == len(order):
                # every excluded vertex must be blocked by the chosen set
                for v in pending:
                    if not self.closes_edge(v, chosen):
                        return
                yield chosen
                return
            v = order[i]
            bit = 1 << v
            if not self.closes_edge(v, chosen):
                yield from rec(i + 1, chosen | bit, out, pending)
                out2 = out | bit
                still = tuple(u for u in pending + (v,) if blockable(u, out2))
                if len(still) == len(pending) + 1:
                    yield from rec(i + 1, chosen, out2, still)
            else:
                out2 = out | bit
                # v is already blocked; drop pending vertices that lost their last chance
                kept = []
                for u in pending:
                    if self.closes_edge(u, chosen) or blockable(u, out2):
                        kept.append(u)
                    else:
                        return
                yield from rec(i + 1, chosen, out2, tuple(kept))

        yield from rec(0, 0, 0, ())

    def independent_sets(self, vertices: Optional[int] = None) -> Iterator[int]:
        """Every independent subset (brute force over subsets; tiny inputs only)."""
        vertices = self.full if vertices is None else vertices
        vs = members(vertices)
        for k in range(len(vs) + 1):
            for combo in itertools.combinations(vs, k):
                m = mask_of(combo)
                if self.is_independent(m):
                    yield m


def codegree_scan(h: Hypergraph) -> DegreeProfile:
    """Brute-force co-degree profile: counts edges over every j-subset of every edge."""
    delta = {}
    for j in range(2, h.r + 1):
        counts = {}
        for e in h.edges:
            for s in itertools.combinations(e, j):
                counts[s] = counts.get(s, 0) + 1
        delta[j] = max(counts.values(), default=0)
    d = Fraction(h.r * h.e(), h.n) if h.n else Fraction(0)
    return DegreeProfile(h.r, h.n, h.e(), d, delta)


def random_hypergraph(n: int, m: int, r: int, rng) -> Hypergraph:
    """m distinct random r-subsets of n vertices (fewer if m exceeds C(n, r))."""
    from math import comb
    m = min(m, comb(n, r))
    edges = set()
    while len(edges) < m:
        edges.add(tuple(sorted(rng.choice(n, size=r, replace=False).tolist())))
    return Hypergraph(n, tuple(edges), r)


def from_edges(edges: Sequence[Sequence[int]], n: Optional[int] = None,
               r: Optional[int] = None) -> Hypergraph:
    edges = [tuple(e) for e in edges]
    if r is None:
        if not edges:
            raise ValidationError("cannot infer uniformity of an empty edge list")
        r = len(edges[0])
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Hypergraph(n, tuple(edges), r)
