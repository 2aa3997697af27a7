"""Explicit supersaturation line families on [n]^k.

A family is given by generators: directions v whose first coordinate is a
prime in (n/t, 2n/t] and dominates the others in absolute value, and for
each direction the bases u with 1 <= u_1 <= v_1 and |u_j| <= n.  A family
line is the progression u, u + v, u + 2v, ... intersected with the grid.

Bases run up to v_1 rather than n/t in the first coordinate: with the
shorter box, grid points whose first coordinate is congruent mod v_1 to a
value in (n/t, v_1] lie on no family line, and the coverage property fails.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from sympy import primerange

from .budget import Budget, default_budget
from .errors import DegenerateFamily, ValidationError
from .exact import as_fraction, decimal_str, frac_binomial, log2, rational_str


def primes_in_range(lo: int, hi: int) -> List[int]:
    """Primes p with lo < p <= hi, ascending."""
    if lo > hi:
        return []
    return [int(p) for p in primerange(lo + 1, hi + 1)]


@dataclass
class SupersatFamily:
    n: int
    k: int
    t: Fraction
    theory_t: Optional[str] = None
    primes: List[int] = field(default_factory=list)

    @property
    def window(self) -> Tuple[Fraction, Fraction]:
        return Fraction(self.n) / self.t, 2 * Fraction(self.n) / self.t

    def directions(self) -> Iterator[Tuple[int, ...]]:
        """Every direction in lexicographic order."""
        for p in self.primes:
            for rest in itertools.product(range(-p, p + 1), repeat=self.k - 1):
                yield (p,) + rest

    def direction_count(self) -> int:
        return sum((2 * p + 1) ** (self.k - 1) for p in self.primes)

    def nonneg_direction_count(self) -> int:
        return sum((p + 1) ** (self.k - 1) for p in self.primes)

    def descriptor(self) -> dict:
        lo, hi = self.window
        return {
            "n": self.n,
            "k": self.k,
            "t": rational_str(self.t),
            "theory_t": self.theory_t,
            "prime_window": {"open_lo": rational_str(lo), "closed_hi": rational_str(hi),
                             "primes": self.primes},
            "U_box": {"first": "1 <= u_1 <= v_1", "others": [-self.n, self.n],
                      "theory_first": f"1 <= u_1 <= {rational_str(lo)}"},
            "domination_rule": "|v_j| <= v_1 for all j >= 2",
            "direction_count": self.direction_count(),
        }


def _make_family(n: int, k: int, t, theory_t: Optional[str]) -> SupersatFamily:
    t = as_fraction(t)
    if t <= 0:
        raise ValidationError("t must be positive")
    if Fraction(n) / t < 2:
        raise DegenerateFamily(
            f"family degenerate at this scale: n/t = {rational_str(Fraction(n) / t)} < 2")
    lo, hi = Fraction(n) / t, 2 * Fraction(n) / t
    primes = primes_in_range(lo.numerator // lo.denominator, hi.numerator // hi.denominator)
    if not primes:
        raise DegenerateFamily(
            f"family degenerate at this scale: no prime in ({rational_str(lo)}, {rational_str(hi)}]")
    return SupersatFamily(n, k, t, theory_t, primes)


def _real(x):
    x = as_fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def build_family_3d(n: int, s=0, t=None) -> SupersatFamily:
    """Family for subsets of [n]^3 of size n^(3-s); the default t is 2000 n^s."""
    s = as_fraction(s)
    if not 0 <= s < 1:
        raise ValidationError("s must lie in [0, 1)")
    default = 2000 * mpmath.power(n, _real(s))
    if t is None:
        t = as_fraction(str(default)) if s else Fraction(2000)
    return _make_family(n, 3, t, decimal_str(default))


def build_family_general(n: int, k: int, gamma, t=None) -> SupersatFamily:
    """Family for subsets of [n]^k of size gamma n^k; the default t is 10 * 4^k * k / gamma."""
    gamma = as_fraction(gamma)
    if not Fraction(1, 10) < gamma <= 1:
        raise ValidationError("gamma must lie in (0.1, 1]")
    if k < 2:
        raise ValidationError("k must be at least 2")
    default = Fraction(10 * 2 ** (2 * k) * k) / gamma
    return _make_family(n, k, default if t is None else t, rational_str(default))


def _grid(n: int, k: int) -> np.ndarray:
    mesh = np.meshgrid(*[np.arange(1, n + 1)] * k, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1).astype(np.int64)


def _bases(F: SupersatFamily, pts: np.ndarray, v: Sequence[int]):
    """Base of the family line through each point and whether it lies in the box."""
    v = np.asarray(v, dtype=np.int64)
    steps = (pts[:, 0] - 1) // v[0]
    base = pts - steps[:, None] * v[None, :]
    inbox = np.all(np.abs(base[:, 1:]) <= F.n, axis=1)
    return base, inbox


def _keys(F: SupersatFamily, base: np.ndarray) -> np.ndarray:
    width = 2 * F.n + 1
    key = base[:, 0].copy()
    for j in range(1, F.k):
        key = key * width + (base[:, j] + F.n)
    return key


def _check_budget(F: SupersatFamily, budget: Budget) -> None:
    budget.check_points(F.n ** F.k)
    budget.check_directions(F.direction_count())


def family_lines(F: SupersatFamily, budget: Optional[Budget] = None) -> Iterator[Tuple[tuple, tuple, int]]:
    """Materialize (base, direction, in-grid point count) for lines meeting the grid."""
    budget = budget or default_budget()
    _check_budget(F, budget)
    pts = _grid(F.n, F.k)
    for v in F.directions():
        base, inbox = _bases(F, pts, v)
        uniq, idx, counts = np.unique(_keys(F, base[inbox]), return_index=True, return_counts=True)
        b = base[inbox][idx]
        for row, c in zip(b.tolist(), counts.tolist()):
            yield tuple(row), v, c


def _log2_ratio(n, t) -> mpmath.mpf:
    return log2(Fraction(n) / as_fraction(t))


def asymptotic_reference(F: SupersatFamily) -> dict:
    n, k, t = F.n, F.k, F.t
    lg = _log2_ratio(n, t)
    tr = _real(t)
    if k == 3:
        return {
            "max_line_points": rational_str(t),
            "family_size_upper": decimal_str(300 * mpmath.mpf(n) ** 6 / (tr ** 4 * lg)),
            "cover_lower": decimal_str(mpmath.mpf(n) ** 3 / (tr ** 3 * lg)),
            "cover_upper": decimal_str(50 * mpmath.mpf(n) ** 3 / (tr ** 3 * lg)),
            "note": "asymptotic reference values, reported not asserted",
        }
    return {
        "max_line_points": rational_str(t),
        "family_size_upper": decimal_str(mpmath.mpf(2) ** (3 * k) * mpmath.mpf(n) ** (2 * k)
                                         / (tr ** (k + 1) * lg)),
        "cover_lower": decimal_str(mpmath.mpf(2) ** k * mpmath.mpf(n) ** k / (tr ** k * lg)),
        "cover_upper": decimal_str(mpmath.mpf(4) ** (k + 1) * mpmath.mpf(n) ** k / (tr ** k * lg)),
        "note": "asymptotic reference values, reported not asserted; k-dimensional cover "
                "property follows the evident generalization of the 3-dimensional argument",
    }


def verify_family(F: SupersatFamily, budget: Optional[Budget] = None) -> dict:
    """Exact structural checks: prime window, domination, per-line cap, coverage."""
    budget = budget or default_budget()
    _check_budget(F, budget)
    lo, hi = F.window
    pts = _grid(F.n, F.k)
    cover = np.zeros(len(pts), dtype=np.int64)
    violations: Dict[str, list] = {"prime": [], "domination": [], "line_cap": [], "coverage": []}
    n_lines = 0
    max_points = 0
    nonneg = 0
    for v in F.directions():
        a1 = v[0]
        if not (lo < a1 <= hi) or a1 not in F.primes:
            violations["prime"].append(list(v))
        if any(abs(c) > a1 for c in v[1:]):
            violations["domination"].append(list(v))
        base, inbox = _bases(F, pts, v)
        cover += inbox
        _, counts = np.unique(_keys(F, base[inbox]), return_counts=True)
        n_lines += len(counts)
        if len(counts):
            top = int(counts.max())
            max_points = max(max_points, top)
            if top > F.t:
                violations["line_cap"].append({"dir": list(v), "points": top})
        if all(c >= 0 for c in v):
            nonneg += 1
            if not inbox.all():
                missing = pts[~inbox][0].tolist()
                violations["coverage"].append({"dir": list(v), "uncovered": missing})
    total = F.direction_count()
    cmin, cmax = int(cover.min()), int(cover.max())
    cover_ok = cmin >= nonneg and cmax <= total
    return {
        "family": F.descriptor(),
        "lines_meeting_grid": n_lines,
        "max_points_on_line": max_points,
        "line_cap_ok": not violations["line_cap"],
        "prime_ok": not violations["prime"],
        "domination_ok": not violations["domination"],
        "coverage_ok": not violations["coverage"],
        "cover_count": {"min": cmin, "max": cmax, "nonneg_directions": nonneg,
                        "directions": total, "ok": cover_ok},
        "violations": violations,
        "asymptotic_reference": asymptotic_reference(F),
        "ok": not any(violations.values()) and cover_ok,
    }


@dataclass
class IncidenceReport:
    family_size: int
    incidences: int
    average: Fraction
    r: int
    lower_bound: Fraction
    exact_tuples: int
    line_counts: Dict[int, int]

    @property
    def holds(self) -> bool:
        return self.lower_bound <= self.exact_tuples

    def to_json(self) -> dict:
        return {
            "family_size": self.family_size,
            "incidences": self.incidences,
            "average_points_per_line": rational_str(self.average),
            "r": self.r,
            "lower_bound": rational_str(self.lower_bound),
            "lower_bound_decimal": decimal_str(self.lower_bound),
            "exact_tuples_on_family_lines": self.exact_tuples,
            "bound_holds": self.holds,
            "line_count_histogram": [{"points": c, "lines": m}
                                     for c, m in sorted(self.line_counts.items())],
        }


def _mask_array(S: Iterable[Sequence[int]], n: int, k: int) -> np.ndarray:
    mask = np.zeros((n,) * k, dtype=bool)
    for p in S:
        p = tuple(p)
        if len(p) != k or not all(1 <= c <= n for c in p):
            raise ValidationError(f"point {p} outside [1,{n}]^{k}")
        mask[tuple(c - 1 for c in p)] = True
    return mask.ravel()


def incidence_average_bound(S, F: SupersatFamily, r: int,
                            budget: Optional[Budget] = None) -> IncidenceReport:
    """Averaging lower bound on r-tuples of S along family lines, with the exact count.

    The family size counts lines meeting the grid; the bound is
    |L| * C(I / |L|, r) using the convex extension of the binomial.
    """
    budget = budget or default_budget()
    _check_budget(F, budget)
    pts = _grid(F.n, F.k)
    inS = S if isinstance(S, np.ndarray) and S.dtype == bool else _mask_array(S, F.n, F.k)
    n_lines = 0
    incidences = 0
    exact = 0
    hist: Dict[int, int] = {}
    for v in F.directions():
        base, inbox = _bases(F, pts, v)
        keys = _keys(F, base[inbox])
        uniq, inverse = np.unique(keys, return_inverse=True)
        n_lines += len(uniq)
        per_line = np.bincount(inverse, weights=inS[inbox], minlength=len(uniq)).astype(np.int64)
        incidences += int(per_line.sum())
        vals, freq = np.unique(per_line, return_counts=True)
        for c, m in zip(vals.tolist(), freq.tolist()):
            hist[c] = hist.get(c, 0) + m
            exact += m * comb(c, r)
    if n_lines == 0:
        raise ValidationError("empty family")
    avg = Fraction(incidences, n_lines)
    bound = n_lines * frac_binomial(avg, r)
    return IncidenceReport(n_lines, incidences, avg, r, bound, exact, hist)


def point_major_incidences(S, F: SupersatFamily) -> int:
    """Incidences counted per point of S: directions whose family line through it exists."""
    pts = np.asarray(sorted(tuple(p) for p in S), dtype=np.int64).reshape(-1, F.k)
    if len(pts) == 0:
        return 0
    total = 0
    for v in F.directions():
        _, inbox = _bases(F, pts, v)
        total += int(inbox.sum())
    return total
