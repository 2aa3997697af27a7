"""Collinear structure of the integer grid [a]^d.

Points are tuples of ints in ``1..a``.  A :class:`GridLine` is stored through
its extremal base point and primitive direction so each line has one
representation.  Two modes are supported: ``full-line`` (every lattice line)
and ``axis-parallel`` (lines varying in exactly one coordinate).
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, gcd, log2
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .budget import Budget, default_budget
from .errors import ValidationError
from .exact import binom, primitive

FULL = "full-line"
AXIS = "axis-parallel"
MODES = (FULL, AXIS)

Point = Tuple[int, ...]


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True, order=True)
class GridLine:
    dir: Point
    base: Point
    count: int = field(compare=False)

    def points(self) -> List[Point]:
        return [
            tuple(b + j * v for b, v in zip(self.base, self.dir)) for j in range(self.count)
        ]

    def to_json(self) -> dict:
        return {"base": list(self.base), "dir": list(self.dir), "points": self.count}


@dataclass
class DegreeProfile:
    """Average degree ``d`` and maximum co-degrees ``delta[j]`` for j = 2..r."""

    r: int
    n_vertices: int
    n_edges: int
    d: Fraction
    delta: Dict[int, int]

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "vertex_count": self.n_vertices,
            "edge_count": self.n_edges,
            "average_degree": str(self.d),
            "delta": [self.delta[j] for j in range(2, self.r + 1)],
        }


def in_grid(p: Sequence[int], n: int) -> bool:
    return all(1 <= c <= n for c in p)


def point_index(p: Sequence[int], a: int) -> int:
    """Lexicographic index of a grid point (coordinates 1..a)."""
    idx = 0
    for c in p:
        idx = idx * a + (c - 1)
    return idx


def index_point(idx: int, a: int, d: int) -> Point:
    out = []
    for _ in range(d):
        idx, c = divmod(idx, a)
        out.append(c + 1)
    return tuple(reversed(out))


def grid_points(a: int, d: int) -> Iterator[Point]:
    return itertools.product(range(1, a + 1), repeat=d)


def _steps(p: Sequence[int], v: Sequence[int], n: int) -> int:
    """How many times v can be added to p while staying in [1, n]^k."""
    best = None
    for c, dv in zip(p, v):
        if dv > 0:
            s = (n - c) // dv
        elif dv < 0:
            s = (c - 1) // (-dv)
        else:
            continue
        best = s if best is None else min(best, s)
    return best


def canonical_line(p: Sequence[int], q: Sequence[int], n: int) -> GridLine:
    p, q = tuple(p), tuple(q)
    if len(p) != len(q):
        raise ValidationError("points of different dimension")
    if not (in_grid(p, n) and in_grid(q, n)):
        raise ValidationError(f"points must lie in [1,{n}]^{len(p)}")
    if p == q:
        raise ValidationError("degenerate pair")
    v = primitive([b - a for a, b in zip(p, q)])
    back = _steps(p, [-c for c in v], n)
    base = tuple(c - back * dv for c, dv in zip(p, v))
    return GridLine(v, base, _steps(base, v, n) + 1)


def _direction_space(a: int, d: int, min_pts: int, mode: str, budget: Budget) -> List[Point]:
    if mode == AXIS:
        if a < min_pts:
            return []
        return sorted(tuple(int(i == j) for j in range(d)) for i in range(d))
    m = (a - 1) // (min_pts - 1)
    if m == 0:
        return []
    budget.check_directions((2 * m + 1) ** d)
    dirs = []
    for v in itertools.product(range(-m, m + 1), repeat=d):
        first = next((c for c in v if c != 0), 0)
        if first <= 0:
            continue
        g = 0
        for c in v:
            g = gcd(g, c)
        if g == 1:
            dirs.append(v)
    return dirs


def _bases_for_direction(a: int, v: Point, min_pts: int) -> Tuple[np.ndarray, np.ndarray]:
    """Extremal bases (lexicographic) and point counts of lines along v."""
    ranges = []
    for dv in v:
        if dv > 0:
            ranges.append(np.arange(1, a - (min_pts - 1) * dv + 1))
        elif dv < 0:
            ranges.append(np.arange(1 + (min_pts - 1) * (-dv), a + 1))
        else:
            ranges.append(np.arange(1, a + 1))
    d = len(v)
    if any(len(r) == 0 for r in ranges):
        return np.empty((0, d), dtype=np.int64), np.empty(0, dtype=np.int64)
    mesh = np.meshgrid(*ranges, indexing="ij")
    cols = [m.ravel() for m in mesh]
    extremal = np.zeros(cols[0].shape, dtype=bool)
    steps = None
    for c, dv in zip(cols, v):
        if dv == 0:
            continue
        if dv > 0:
            extremal |= c <= dv
            s = (a - c) // dv
        else:
            extremal |= c > a + dv
            s = (c - 1) // (-dv)
        steps = s if steps is None else np.minimum(steps, s)
    bases = np.stack(cols, axis=1)[extremal]
    return bases, steps[extremal] + 1


def line_arrays(a: int, d: int, min_pts: int = 2, mode: str = FULL,
                budget: Optional[Budget] = None) -> Iterator[Tuple[Point, np.ndarray, np.ndarray]]:
    """Yield (direction, bases, counts) per direction, directions in lex order."""
    _check_mode(mode)
    if min_pts < 2:
        raise ValidationError("min_pts must be >= 2")
    if a < 1 or d < 1:
        raise ValidationError("alphabet and dimension must be positive")
    budget = budget or default_budget()
    budget.check_points(a ** d)
    for v in _direction_space(a, d, min_pts, mode, budget):
        if mode == AXIS:
            i = v.index(1)
            ranges = [np.arange(1, a + 1) if j != i else np.array([1]) for j in range(d)]
            mesh = np.meshgrid(*ranges, indexing="ij")
            bases = np.stack([m.ravel() for m in mesh], axis=1)
            counts = np.full(len(bases), a, dtype=np.int64)
        else:
            bases, counts = _bases_for_direction(a, v, min_pts)
        if len(bases):
            yield v, bases, counts


def enumerate_rich_lines(a: int, d: int, min_pts: int = 2, mode: str = FULL,
                         budget: Optional[Budget] = None) -> Iterator[GridLine]:
    for v, bases, counts in line_arrays(a, d, min_pts, mode, budget):
        for b, c in zip(bases.tolist(), counts.tolist()):
            yield GridLine(v, tuple(b), c)


def line_census(a: int, d: int, min_pts: int = 2, mode: str = FULL,
                budget: Optional[Budget] = None) -> Dict[int, int]:
    """Map point count -> number of lines with exactly that many grid points."""
    census: Counter = Counter()
    for _, _, counts in line_arrays(a, d, min_pts, mode, budget):
        vals, freq = np.unique(counts, return_counts=True)
        for ell, f in zip(vals.tolist(), freq.tolist()):
            census[ell] += f
    return dict(sorted(census.items()))


def tuples_from_census(census: Dict[int, int], r: int) -> int:
    return sum(lines * comb(ell, r) for ell, lines in census.items())


def count_collinear_tuples(a: int, d: int, r: int, mode: str = FULL,
                           budget: Optional[Budget] = None) -> int:
    if r < 2:
        raise ValidationError("r must be >= 2")
    total = tuples_from_census(line_census(a, d, r, mode, budget), r)
    if mode == AXIS:
        closed = d * binom(a, r) * a ** (d - 1)
        assert total == closed, (total, closed)
    return total


def axis_edge_count(a: int, d: int, r: int) -> int:
    return d * binom(a, r) * a ** (d - 1)


@dataclass
class BucketCensus:
    alphabet: int
    dimension: int
    r: Optional[int]
    buckets: Dict[int, int]
    tuples: Dict[int, int]
    theory_bound: Dict[int, Fraction]
    flagged: List[int]
    premise_met: bool

    def to_json(self) -> dict:
        return {
            "alphabet": self.alphabet,
            "dimension": self.dimension,
            "uniformity": self.r,
            "buckets": [
                {"t": t, "lines": self.buckets[t], "tuples": self.tuples.get(t),
                 "theory_bound": str(self.theory_bound[t]), "flagged": t in self.flagged}
                for t in sorted(self.buckets)
            ],
            "premise": "met" if self.premise_met else "premise unmet - informational",
        }


def claim_premise(a: int, d: int, r: int) -> bool:
    """Whether r, d <= 0.01 log2(a), the range in which the edge-count bounds are claimed."""
    return a > 1 and max(r, d) <= 0.01 * log2(a)


def bucket_line_census(a: int, d: int, r: Optional[int] = None,
                       budget: Optional[Budget] = None) -> BucketCensus:
    """Group lines with more than two grid points by 2^t < points <= 2^(t+1)."""
    census = line_census(a, d, 3, FULL, budget)
    buckets: Counter = Counter()
    tuples: Counter = Counter()
    for ell, lines in census.items():
        t = (ell - 1).bit_length() - 1
        buckets[t] += lines
        if r is not None:
            tuples[t] += lines * comb(ell, r)
    bound = {
        t: Fraction(2 ** d) * Fraction(a, 2 ** t) ** d * d * Fraction(a ** d, 2 ** t)
        for t in buckets
    }
    flagged = sorted(t for t in buckets if buckets[t] > bound[t])
    return BucketCensus(a, d, r, dict(sorted(buckets.items())), dict(sorted(tuples.items())),
                        bound, flagged, claim_premise(a, d, r or 3))


def codegree_profile(a: int, d: int, r: int, mode: str = FULL,
                     budget: Optional[Budget] = None) -> DegreeProfile:
    census = line_census(a, d, r, mode, budget)
    edges = tuples_from_census(census, r)
    n_vertices = a ** d
    if edges == 0:
        return DegreeProfile(r, n_vertices, 0, Fraction(0), {j: 0 for j in range(2, r + 1)})
    # j >= 2 points pin down the line, so the co-degree is C(points - j, r - j)
    longest = max(census)
    delta = {j: comb(longest - j, r - j) for j in range(2, r + 1)}
    return DegreeProfile(r, n_vertices, edges, Fraction(r * edges, n_vertices), delta)


def compute_delta(profile: DegreeProfile, r: int, tau) -> Fraction:
    """The weighted co-degree functional Delta(H, tau) in exact arithmetic."""
    tau = Fraction(tau)
    if not 0 < tau < 1:
        raise ValidationError("tau must lie in (0, 1)")
    if profile.d == 0:
        raise ValidationError("empty hypergraph")
    total = Fraction(0)
    for j in range(2, r + 1):
        total += Fraction(profile.delta.get(j, 0)) / (
            profile.d * tau ** (j - 1) * 2 ** comb(j - 1, 2))
    return 2 ** (comb(r, 2) - 1) * total


def collinear_edges(a: int, d: int, r: int, mode: str = FULL,
                    budget: Optional[Budget] = None) -> List[Tuple[int, ...]]:
    """Explicit edge list (sorted vertex-index tuples) of the collinear r-tuple hypergraph."""
    budget = budget or default_budget()
    census = line_census(a, d, r, mode, budget)
    budget.check_edges(tuples_from_census(census, r))
    edges = []
    for line in enumerate_rich_lines(a, d, r, mode, budget):
        idx = sorted(point_index(p, a) for p in line.points())
        edges.extend(itertools.combinations(idx, r))
    edges.sort()
    return edges


def progression_witness(a: int, d: int, r: int) -> int:
    """Check every (u, v) in [a//r]^d x [a//r]^d spans an in-grid collinear r-tuple.

    Returns the number of distinct tuples produced; this is the lower bound
    (a//r)^(2d) on the edge count.
    """
    m = a // r
    seen = set()
    for u in itertools.product(range(1, m + 1), repeat=d):
        for v in itertools.product(range(1, m + 1), repeat=d):
            pts = [tuple(ui + j * vi for ui, vi in zip(u, v)) for j in range(r)]
            if not all(in_grid(p, a) for p in pts):
                raise AssertionError(f"progression leaves the grid: {pts}")
            line = canonical_line(pts[0], pts[1], a)
            on = set(line.points())
            if not all(p in on for p in pts):
                raise AssertionError(f"progression not collinear: {pts}")
            seen.add(tuple(pts))
    return len(seen)


def claim_bounds(a: int, d: int, r: int, budget: Optional[Budget] = None) -> dict:
    """Exact edge count next to the asymptotic lower/upper bounds (informational)."""
    exact = count_collinear_tuples(a, d, r, FULL, budget)
    lg = log2(a) if a > 1 else 0.0
    c = Fraction(d * 2 ** (r + d), factorial(r))
    if r <= d:
        case, lower, upper = "i", Fraction(a ** (2 * d), r ** (2 * d)), c * a ** (2 * d)
    elif r == d + 1:
        case, lower, upper = "ii", Fraction(a ** (2 * d), r ** (2 * d)), c * a ** (2 * d) * Fraction(lg)
    elif r <= 2 * d:
        case = "iii"
        lower = Fraction(d * comb(a, r) * a ** (d - 1))
        upper = 2 * c * a ** (r + d - 1)
    else:
        case, lower, upper = None, None, None
    premise = claim_premise(a, d, r)
    out = {
        "alphabet": a, "dimension": d, "uniformity": r, "edge_count": exact,
        "case": case,
        "premise": "met" if premise else "premise unmet - informational",
    }
    if case:
        out.update(lower=str(lower), upper=str(upper),
                   lower_holds=exact >= lower, upper_holds=exact <= upper)
    return out


def hypergraph_summary(a: int, d: int, r: int, mode: str = FULL,
                       budget: Optional[Budget] = None) -> dict:
    census = line_census(a, d, r, mode, budget)
    prof = codegree_profile(a, d, r, mode, budget)
    return {
        "alphabet": a,
        "dimension": d,
        "uniformity": r,
        "mode": mode,
        "vertex_count": a ** d,
        "edge_count": prof.n_edges,
        "census": [{"points": ell, "lines": n} for ell, n in census.items()],
        "delta": [prof.delta[j] for j in range(2, r + 1)],
        "average_degree": str(prof.d),
    }


def line_groups(points, min_size: int = 2) -> Dict[tuple, List[int]]:
    """Group integer points of Z^k by the lines they span.

    Returns {line key: sorted point indices} for every line holding at least
    ``min_size`` of the points (min_size >= 2).  The key is the primitive
    direction plus the unique lattice point of the line whose coordinate at
    the direction's first nonzero position lies in [0, that entry).
    """
    P = np.asarray(points, dtype=np.int64)
    m = len(P)
    if m < 2:
        return {}
    i, j = np.triu_indices(m, 1)
    diff = P[j] - P[i]
    g = np.gcd.reduce(np.abs(diff), axis=1)
    dirs = diff // g[:, None]
    lead = np.argmax(dirs != 0, axis=1)
    sign = np.sign(dirs[np.arange(len(dirs)), lead])
    dirs *= sign[:, None]
    lead_val = dirs[np.arange(len(dirs)), lead]
    shift = np.floor_divide(P[i][np.arange(len(dirs)), lead], lead_val)
    base = P[i] - shift[:, None] * dirs
    keys = np.concatenate([dirs, base], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    groups: Dict[int, set] = {}
    for g_id, a, b in zip(inverse.tolist(), i.tolist(), j.tolist()):
        s = groups.setdefault(g_id, set())
        s.add(a)
        s.add(b)
    out = {}
    for g_id, idx in groups.items():
        if len(idx) >= min_size:
            out[tuple(uniq[g_id].tolist())] = sorted(idx)
    return dict(sorted(out.items()))


def axis_line_groups(points, min_size: int = 1) -> Dict[tuple, List[int]]:
    """Group points by axis-parallel lines: key (axis, coordinates with that axis blanked)."""
    out: Dict[tuple, List[int]] = {}
    for idx, p in enumerate(points):
        p = tuple(p)
        for ax in range(len(p)):
            key = (ax,) + p[:ax] + (0,) + p[ax + 1:]
            out.setdefault(key, []).append(idx)
    return {k: v for k, v in sorted(out.items()) if len(v) >= min_size}
