"""Checks on concrete planar sets: rich lines, general position, nets, two-colourings, LLL."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .budget import Budget, default_budget
from .errors import BudgetExceeded, ValidationError
from .exact import as_fraction, decimal_str, orient, rational_str
from .projection import (IdealPoint, PlanarLine, PlanarPoint, concurrent,
                         planar_line_groups)

Candidate = Union[PlanarPoint, IdealPoint]


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# ---------------------------------------------------------------------------
# rich lines
# ---------------------------------------------------------------------------

@dataclass
class RichLineSet:
    threshold: int
    lines: List[Tuple[PlanarLine, List[int]]]
    notes: List[str] = field(default_factory=list)

    def __len__(self):
        return len(self.lines)

    def masks(self) -> List[int]:
        return [sum(1 << i for i in idx) for _, idx in self.lines]

    def to_json(self) -> dict:
        return {"threshold": self.threshold, "count": len(self.lines),
                "lines": [{"line": l.to_json(), "points": idx} for l, idx in self.lines],
                "notes": self.notes}


def _clamp(threshold: int, notes: List[str]) -> int:
    if threshold < 2:
        notes.append(f"threshold {threshold} clamped to 2")
        return 2
    return threshold


def rich_lines(S: Sequence[PlanarPoint], threshold: int) -> RichLineSet:
    """All lines through at least ``threshold`` points of S, each once, with sorted point indices."""
    notes: List[str] = []
    threshold = _clamp(int(threshold), notes)
    if threshold > len(S):
        return RichLineSet(threshold, [], notes)
    groups = planar_line_groups(S, threshold)
    return RichLineSet(threshold, [(l, sorted(idx)) for l, idx in groups.items()], notes)


def eps_threshold(eps, n: int) -> int:
    return ceil(as_fraction(eps) * n)


# ---------------------------------------------------------------------------
# general position
# ---------------------------------------------------------------------------

@dataclass
class GeneralPositionReport:
    size: int
    witness: List[int]
    optimal: bool
    upper_bound: int
    nodes: int
    method: str

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _packing_bound(avail: int, line_masks: Sequence[int]) -> int:
    """Upper bound on a triple-free subset of ``avail``: pack disjoint lines, 2 points each."""
    bound = 0
    rest = avail
    for m in line_masks:
        inter = m & rest
        c = _popcount(inter)
        if c >= 3:
            bound += 2
            rest &= ~inter
    return bound + _popcount(rest)


def _triple_free(chosen: int, line_masks: Sequence[int]) -> bool:
    return all(_popcount(m & chosen) <= 2 for m in line_masks)


def max_general_position(S: Sequence[PlanarPoint], exact_budget: Optional[int] = None,
                         budget: Optional[Budget] = None) -> GeneralPositionReport:
    """Largest subset of S with no three points on a line.

    Exact branch and bound when |S| <= exact_budget; otherwise greedy plus
    one-swap local search, with the line-packing upper bound.
    """
    budget = budget or default_budget()
    exact_budget = budget.exact_points if exact_budget is None else exact_budget
    n = len(S)
    lines = [sum(1 << i for i in idx) for _, idx in rich_lines(S, 3).lines] if n >= 3 else []
    lines.sort(key=lambda m: -_popcount(m))
    full = (1 << n) - 1
    ub = _packing_bound(full, lines)
    if not lines:
        return GeneralPositionReport(n, list(range(n)), True, n, 0, "trivial")
    through = [[m for m in lines if m >> v & 1] for v in range(n)]
    if n > exact_budget:
        chosen = _greedy_gp(n, through, lines)
        return GeneralPositionReport(_popcount(chosen), _bits(chosen), _popcount(chosen) == ub,
                                     ub, 0, "greedy+local")
    best = [_greedy_gp(n, through, lines)]
    nodes = 0
    order = sorted(range(n), key=lambda v: (-len(through[v]), v))

    def rec(i: int, chosen: int, avail: int):
        nonlocal nodes
        nodes += 1
        if nodes > budget.search_nodes:
            raise BudgetExceeded("general-position search exceeded node budget")
        if _popcount(chosen) + _packing_bound(avail, lines) <= _popcount(best[0]):
            return
        if i == len(order):
            best[0] = chosen
            return
        v = order[i]
        bit = 1 << v
        if not avail & bit:
            rec(i + 1, chosen, avail)
            return
        # take v: anything completing a line with two chosen points becomes unavailable
        ch2 = chosen | bit
        av2 = avail & ~bit
        ok = True
        for m in through[v]:
            if _popcount(m & ch2) >= 2:
                if _popcount(m & ch2) > 2:
                    ok = False
                    break
                av2 &= ~(m & ~ch2)
        if ok:
            rec(i + 1, ch2, av2)
        rec(i + 1, chosen, avail & ~bit)

    try:
        rec(0, 0, full)
    except BudgetExceeded:
        b = best[0]
        return GeneralPositionReport(_popcount(b), _bits(b), False, ub, nodes, "branch-and-bound (budget hit)")
    b = best[0]
    assert _triple_free(b, lines)
    return GeneralPositionReport(_popcount(b), _bits(b), True, _popcount(b), nodes, "branch-and-bound")


def _greedy_gp(n: int, through, lines) -> int:
    order = sorted(range(n), key=lambda v: (len(through[v]), v))
    chosen = 0
    for v in order:
        if all(_popcount(m & chosen) < 2 for m in through[v]):
            chosen |= 1 << v
    improved = True
    while improved:
        # a 1-for-2 swap: drop one point, add two
        improved = False
        outside = [v for v in range(n) if not chosen >> v & 1]
        for u in _bits(chosen):
            base = chosen & ~(1 << u)
            free = [v for v in outside if all(_popcount(m & base) < 2 for m in through[v])]
            for v, w in itertools.combinations(free, 2):
                cand = base | 1 << v | 1 << w
                if _triple_free(cand, lines):
                    chosen = cand
                    improved = True
                    break
            if improved:
                break
    return chosen


def has_three_collinear(points: Sequence[PlanarPoint]) -> bool:
    return any(orient((p.x, p.y), (q.x, q.y), (s.x, s.y)) == 0
               for p, q, s in itertools.combinations(points, 3))


# ---------------------------------------------------------------------------
# nets
# ---------------------------------------------------------------------------

@dataclass
class NetReport:
    threshold: int
    weak: bool
    net: List[Candidate]
    verdict: bool
    rich_line_count: int
    unhit: List[list] = field(default_factory=list)
    optimal: Optional[bool] = None
    lower_bound: Optional[int] = None
    nodes: int = 0
    notes: List[str] = field(default_factory=list)
    switching: Optional[dict] = None

    @property
    def size(self) -> int:
        return len(self.net)

    def to_json(self) -> dict:
        return {"threshold": self.threshold, "weak": self.weak, "size": self.size,
                "net": [p.to_json() for p in self.net], "verdict": self.verdict,
                "rich_line_count": self.rich_line_count, "unhit": self.unhit,
                "optimal": self.optimal, "lower_bound": self.lower_bound, "nodes": self.nodes,
                "notes": self.notes, "switching": self.switching}


def _hits(line: PlanarLine, idx: Sequence[int], S, p: Candidate, weak: bool) -> bool:
    if weak:
        return line.contains(p)
    return any(S[i] == p for i in idx)


def check_eps_net(S: Sequence[PlanarPoint], T: Sequence[Candidate], eps=None, weak: bool = False,
                  threshold: Optional[int] = None) -> NetReport:
    """Does T meet every line carrying >= ceil(eps |S|) points of S?"""
    notes: List[str] = []
    if threshold is None:
        if eps is None:
            raise ValidationError("give eps or threshold")
        threshold = eps_threshold(eps, len(S))
    threshold = _clamp(threshold, notes)
    T = list(T)
    if not weak:
        members = set(S)
        if any(not isinstance(p, PlanarPoint) or p not in members for p in T):
            raise ValidationError("strong net must be a subset of S")
    rl = rich_lines(S, threshold)
    notes += rl.notes
    unhit = [l.to_json() for l, idx in rl.lines if not any(_hits(l, idx, S, p, weak) for p in T)]
    return NetReport(threshold, weak, T, not unhit, len(rl), unhit, notes=notes)


def weak_candidates(S: Sequence[PlanarPoint], rl: RichLineSet, projective: bool = False) -> List[Candidate]:
    """S, pairwise intersections of rich lines, and (projective) one ideal point per direction."""
    cands = set(S)
    lines = [l for l, _ in rl.lines]
    for l1, l2 in itertools.combinations(lines, 2):
        p = concurrent([l1, l2])
        if p is not None:
            cands.add(p)
    out: List[Candidate] = sorted(cands)
    if projective:
        out += sorted({IdealPoint(*l.direction) for l in lines})
    return out


def _set_cover(cover: List[int], universe: int, node_budget: int):
    """Minimum number of candidate masks covering ``universe``.

    Returns (chosen indices, optimal flag, lower bound, nodes).
    """
    # one representative (lowest index) per mask; drop masks strictly inside another
    first: Dict[int, int] = {}
    for c, m in enumerate(cover):
        m &= universe
        if m and m not in first:
            first[m] = c
    masks = sorted(first, key=lambda m: first[m])
    keep = [m for m in masks if not any(m != o and m & ~o == 0 for o in masks)]
    idx = [first[m] for m in keep]
    n_lines = universe.bit_length()
    by_line = [[k for k, m in enumerate(keep) if m >> j & 1] for j in range(n_lines)]
    line_union = [sum(1 << k for k in by_line[j]) for j in range(n_lines)]
    pack_order = sorted(range(n_lines), key=lambda j: (len(by_line[j]), j))

    def lower(unc: int) -> int:
        # lines pairwise without a common candidate need distinct candidates
        lb = 0
        used = 0
        for j in pack_order:
            if unc >> j & 1 and not line_union[j] & used:
                lb += 1
                used |= line_union[j]
        widest = max(_popcount(m & unc) for m in keep)
        return max(lb, -(-_popcount(unc) // widest))

    greedy = []
    unc = universe
    while unc:
        k = max(range(len(keep)), key=lambda k: (_popcount(keep[k] & unc), -idx[k]))
        if not keep[k] & unc:
            raise ValidationError("some rich line cannot be hit by any candidate")
        greedy.append(k)
        unc &= ~keep[k]
    best = [greedy]
    nodes = 0
    root_lb = lower(universe)
    seen: Dict[int, int] = {}

    def rec(unc: int, chosen: List[int]):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded("hitting-set search exceeded node budget")
        if not unc:
            if len(chosen) < len(best[0]):
                best[0] = list(chosen)
            return
        if seen.get(unc, len(chosen) + 1) <= len(chosen):
            return
        seen[unc] = len(chosen)
        if len(chosen) + lower(unc) >= len(best[0]):
            return
        j = min(_bits(unc), key=lambda j: (len(by_line[j]), j))
        for k in by_line[j]:
            rec(unc & ~keep[k], chosen + [k])

    def result(ks):
        return sorted(idx[k] for k in ks)

    try:
        rec(universe, [])
    except BudgetExceeded:
        return result(best[0]), False, root_lb, nodes
    return result(best[0]), True, len(best[0]), nodes


def min_hitting_set(S: Sequence[PlanarPoint], eps=None, weak: bool = False, projective: bool = False,
                    threshold: Optional[int] = None, budget: Optional[Budget] = None) -> NetReport:
    """Smallest (strong or weak) net for the rich lines of S; exact when the search completes."""
    budget = budget or default_budget()
    notes: List[str] = []
    if threshold is None:
        threshold = eps_threshold(eps, len(S))
    threshold = _clamp(threshold, notes)
    rl = rich_lines(S, threshold)
    if not rl.lines:
        return NetReport(threshold, weak, [], True, 0, optimal=True, lower_bound=0, notes=notes)
    cands: List[Candidate] = weak_candidates(S, rl, projective) if weak else list(S)
    cover = []
    for p in cands:
        m = 0
        for j, (l, idx) in enumerate(rl.lines):
            if _hits(l, idx, S, p, weak):
                m |= 1 << j
        cover.append(m)
    universe = (1 << len(rl.lines)) - 1
    if len(rl.lines) > budget.exact_lines:
        notes.append(f"{len(rl.lines)} rich lines exceed the exact budget; greedy only")
        node_budget = 0
    else:
        node_budget = budget.search_nodes
    chosen, optimal, lb, nodes = _set_cover(cover, universe, max(node_budget, 1))
    if node_budget == 0:
        optimal = False
    net = [cands[c] for c in chosen]
    rep = check_eps_net(S, net, weak=weak, threshold=threshold)
    rep.optimal, rep.lower_bound, rep.nodes = optimal, lb, nodes
    rep.notes = notes + rep.notes
    if not optimal:
        rep.notes.append("heuristic: size is an upper bound only")
    return rep


def min_hitting_set_bruteforce(S: Sequence[PlanarPoint], threshold: int) -> int:
    """Smallest strong net by plain subset enumeration (oracle for tiny instances)."""
    rl = rich_lines(S, threshold)
    masks = rl.masks()
    for k in range(len(S) + 1):
        for combo in itertools.combinations(range(len(S)), k):
            t = sum(1 << i for i in combo)
            if all(m & t for m in masks):
                return k
    raise AssertionError("unreachable")


def complement_has_rich_line(S: Sequence[PlanarPoint], T: Sequence[PlanarPoint], r: int) -> bool:
    """Does S \\ T still contain r points on a common line?"""
    keep = [p for p in S if p not in set(T)]
    return bool(rich_lines(keep, r).lines) if len(keep) >= r else False


def switching_transform(S: Sequence[PlanarPoint], T: Sequence[Candidate], threshold: int,
                        grid_image: Iterable[PlanarPoint] = (), t: int = 1) -> dict:
    """Turn a weak net into a strong one by replacing each outside point with one point per line it hits.

    T is split into T_s (in S), T_w (images of grid points outside S) and T_g
    (everything else); the replacement is compared with 2|T_g| + t|T_w| + |T_s|.
    """
    Sset = set(S)
    grid = set(grid_image)
    rl = rich_lines(S, threshold)
    T_s = [p for p in T if isinstance(p, PlanarPoint) and p in Sset]
    T_w = [p for p in T if isinstance(p, PlanarPoint) and p not in Sset and p in grid]
    T_g = [p for p in T if p not in Sset and (not isinstance(p, PlanarPoint) or p not in grid)]
    new = set(T_s)
    per_point = {}
    for p in T_w + T_g:
        hit = [(l, idx) for l, idx in rl.lines if l.contains(p)]
        per_point[str(p.to_json())] = len(hit)
        for l, idx in hit:
            if not any(S[i] in new for i in idx):
                new.add(S[min(idx)])
    strong = sorted(new)
    bound = 2 * len(T_g) + t * len(T_w) + len(T_s)
    check = check_eps_net(S, strong, weak=False, threshold=threshold)
    return {"T_s": len(T_s), "T_w": len(T_w), "T_g": len(T_g), "t": t,
            "strong_net": strong, "size": len(strong), "bound": bound,
            "within_bound": len(strong) <= bound, "passes": check.verdict,
            "lines_per_replaced_point": per_point}


# ---------------------------------------------------------------------------
# two-colourings
# ---------------------------------------------------------------------------

@dataclass
class ColoringReport:
    sat: Optional[bool]
    part1: List[int]
    part2: List[int]
    nodes: int
    edges: int
    verified: bool
    note: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


def incidence_edges(P: Sequence[PlanarPoint], L: Sequence) -> List[List[int]]:
    """Per line, the sorted indices of P on it (lines may already be index lists)."""
    out = []
    for l in L:
        if isinstance(l, PlanarLine):
            out.append([i for i, p in enumerate(P) if l.contains(p)])
        else:
            out.append(sorted(int(i) for i in l))
    return out


def _bicolored(edges, colour) -> bool:
    return all(any(colour[v] for v in e) and not all(colour[v] for v in e) for e in edges)


def two_color_cover(P: Sequence, L: Sequence, node_budget: Optional[int] = None) -> ColoringReport:
    """Split P into two parts so every line of L meets both, or prove no split exists."""
    node_budget = node_budget or default_budget().search_nodes
    n = len(P)
    edges = [e for e in incidence_edges(P, L)]
    if any(len(e) < 2 for e in edges):
        return ColoringReport(False, [], [], 0, len(edges), True, "an edge with fewer than 2 points")
    inc = [[k for k, e in enumerate(edges) if v in e] for v in range(n)]
    colour: List[Optional[bool]] = [None] * n
    nodes = 0

    def propagate(trail: List[int]) -> bool:
        queue = list(trail)
        while queue:
            v = queue.pop()
            for k in inc[v]:
                e = edges[k]
                free = [u for u in e if colour[u] is None]
                cols = {colour[u] for u in e if colour[u] is not None}
                if len(cols) == 2:
                    continue
                if not free:
                    return False
                if len(free) == 1:
                    u = free[0]
                    colour[u] = not cols.pop()
                    trail.append(u)
                    queue.append(u)
        return True

    def rec() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded("two-colouring search exceeded node budget")
        free = [v for v in range(n) if colour[v] is None]
        if not free:
            return True
        v = max(free, key=lambda u: (len(inc[u]), -u))
        for c in (True, False):
            colour[v] = c
            trail = [v]
            if propagate(trail) and rec():
                return True
            for u in trail:
                colour[u] = None
        return False

    try:
        if n == 0:
            ok = not edges
        else:
            # colour symmetry: the first vertex goes to part 1
            colour[0] = True
            trail = [0]
            ok = propagate(trail) and rec()
    except BudgetExceeded:
        return ColoringReport(None, [], [], nodes, len(edges), False, "inconclusive: budget exceeded")
    if not ok:
        return ColoringReport(False, [], [], nodes, len(edges), True, "search exhausted")
    colour = [bool(c) if c is not None else True for c in colour]
    p1 = [v for v in range(n) if colour[v]]
    p2 = [v for v in range(n) if not colour[v]]
    return ColoringReport(True, p1, p2, nodes, len(edges), _bicolored(edges, colour))


def two_color_bruteforce(n: int, edges: Sequence[Sequence[int]]) -> bool:
    for bits in range(1 << n):
        colour = [bool(bits >> v & 1) for v in range(n)]
        if _bicolored(edges, colour):
            return True
    return False


def incidence_degree_check(P: Sequence, L: Sequence, T: int) -> dict:
    """For every point p and every line through p: at most T points of P on that line."""
    edges = incidence_edges(P, L)
    worst = max((len(e) for e in edges if e), default=0)
    bad = [k for k, e in enumerate(edges) if e and len(e) > T]
    return {"T": T, "max_points_on_incident_line": worst, "ok": not bad, "violating_lines": bad[:10],
            "interpretation": "for each p in P and line l through p, |l meets P| <= T"}


# ---------------------------------------------------------------------------
# LLL
# ---------------------------------------------------------------------------

def e_bounds(terms: int) -> Tuple[Fraction, Fraction]:
    """Rational lo < e < hi from the series with its tail bound 1/(N! N)."""
    s = Fraction(0)
    for k in range(terms + 1):
        s += Fraction(1, factorial(k))
    return s, s + Fraction(1, factorial(terms) * terms)


def lll_check(T: int, r: int) -> dict:
    """Exact verdict on e (T + 1) < 2^(r-1), widening the bracket for e until decisive."""
    if T < 1 or r < 1:
        raise ValidationError("T and r must be positive")
    rhs = Fraction(2 ** (r - 1))
    terms = 4
    while True:
        lo, hi = e_bounds(terms)
        if hi * (T + 1) < rhs:
            verdict = True
            break
        if lo * (T + 1) >= rhs:
            verdict = False
            break
        terms *= 2
    return {"T": T, "r": r, "holds": verdict, "lhs_bracket": [rational_str(lo * (T + 1)), rational_str(hi * (T + 1))],
            "lhs_approx": decimal_str(lo * (T + 1), 15), "rhs": rational_str(rhs), "terms": terms}
