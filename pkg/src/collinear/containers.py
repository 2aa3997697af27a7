"""Hypergraph containers: a deterministic max-degree scythe, hypothesis checks,
the iteration driver, and exhaustive verification.

The builder does not try to reach the asymptotic bound on the number of
containers; it guarantees the two checkable properties: every independent
set lies in some container and every container spans at most eps * e(H)
edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Optional, Sequence

import mpmath

from .budget import Budget, default_budget
from .errors import BudgetExceeded, NonContracting, ValidationError
from .exact import as_fraction, decimal_str, log2
from .grid import DegreeProfile, compute_delta
from .hypergraph import Hypergraph, members


@dataclass
class ContainerParams:
    r: int
    tau: Fraction
    eps: Fraction
    label: tuple = (0, 0)

    def __post_init__(self):
        self.tau = as_fraction(self.tau)
        self.eps = as_fraction(self.eps)
        if not 0 < self.tau < Fraction(1, 2):
            raise ValidationError("tau must lie in (0, 1/2)")
        if not 0 < self.eps < Fraction(1, 2):
            raise ValidationError("eps must lie in (0, 1/2)")

    @property
    def tau_ok(self) -> bool:
        return self.tau < Fraction(1, 200 * self.r * factorial(self.r) ** 2)

    def to_json(self) -> dict:
        return {"r": self.r, "tau": str(self.tau), "eps": str(self.eps),
                "label": list(self.label), "tau_condition": self.tau_ok}


def count_budget_log2(r: int, n_vertices: int, tau, eps) -> mpmath.mpf:
    """c N tau log(1/eps) log(1/tau) with c = 1000 r r!^3 (base-2 logs)."""
    c = 1000 * r * factorial(r) ** 3
    tau, eps = as_fraction(tau), as_fraction(eps)
    return c * n_vertices * mpmath.mpf(tau.numerator) / tau.denominator * log2(1 / eps) * log2(1 / tau)


def check_hypotheses(profile: DegreeProfile, params: ContainerParams) -> dict:
    if profile.d == 0:
        raise ValidationError("empty hypergraph")
    r = params.r
    tau_bound = Fraction(1, 200 * r * factorial(r) ** 2)
    delta = compute_delta(profile, r, params.tau)
    delta_bound = params.eps / (12 * factorial(r))
    budget = count_budget_log2(r, profile.n_vertices, params.tau, params.eps)
    return {
        "params": params.to_json(),
        "tau_bound": str(tau_bound),
        "tau_condition": params.tau < tau_bound,
        "delta": str(delta),
        "delta_decimal": decimal_str(delta),
        "delta_bound": str(delta_bound),
        "delta_condition": delta <= delta_bound,
        "hypotheses_hold": params.tau < tau_bound and delta <= delta_bound,
        "log2_count_budget": decimal_str(budget),
        "count_budget_note": "reference value only (existence bound)",
    }


@dataclass
class ContainerFamily:
    n_vertices: int
    containers: List[int]
    edge_counts: List[int]
    eps: Fraction
    parent_edges: int
    hypergraph_id: str
    trace: List[dict] = field(default_factory=list)
    rounds: List[dict] = field(default_factory=list)

    def __len__(self):
        return len(self.containers)

    def vertex_lists(self) -> List[List[int]]:
        return [members(c) for c in self.containers]

    def to_json(self, with_trace: bool = False) -> dict:
        out = {
            "header": {
                "eps": str(self.eps),
                "hypergraph_hash": self.hypergraph_id,
                "vertex_count": self.n_vertices,
                "parent_edges": self.parent_edges,
                "rounds": len(self.rounds),
                "family_size": len(self.containers),
            },
            "containers": [
                {"vertices": vs, "edges": e}
                for vs, e in zip(self.vertex_lists(), self.edge_counts)
            ],
        }
        if self.rounds:
            out["round_log"] = self.rounds
        if with_trace:
            out["trace"] = self.trace
        return out


def _canonical(masks: Sequence[int], drop_subsumed: bool = True) -> List[int]:
    uniq = sorted(set(masks), key=lambda m: (-bin(m).count("1"), members(m)))
    if not drop_subsumed:
        return sorted(uniq, key=members)
    kept: List[int] = []
    for m in uniq:
        if not any(m & ~k == 0 for k in kept):
            kept.append(m)
    return sorted(kept, key=members)


def build_containers(h: Hypergraph, eps, vertices: Optional[int] = None,
                     budget: Optional[Budget] = None, drop_subsumed: bool = True,
                     keep_trace: bool = False) -> ContainerFamily:
    """Max-degree scythe on H[vertices].

    Branch on the vertex of maximum degree in the current candidate set
    (ties: smallest index).  Out-branch deletes it; in-branch adds it to the
    fingerprint and deletes every vertex that would close an edge with the
    fingerprint.  A candidate set spanning at most eps * e(H[vertices]) edges
    becomes a leaf.
    """
    eps = as_fraction(eps)
    if eps < 0:
        raise ValidationError("eps must be non-negative")
    budget = budget or default_budget()
    vertices = h.full if vertices is None else vertices
    sub_masks = [m for m in h.edge_masks if m & ~vertices == 0]
    e_total = len(sub_masks)
    target = eps * e_total
    hid = h.fingerprint()
    if e_total == 0:
        return ContainerFamily(h.n, [vertices], [0], eps, 0, hid,
                               [{"path": "", "fingerprint": []}] if keep_trace else [])

    leaves: List[int] = []
    trace: List[dict] = []
    nodes = 0
    stack = [(vertices, 0, "")]
    while stack:
        cand, fp, path = stack.pop()
        nodes += 1
        if nodes > budget.search_nodes:
            raise BudgetExceeded(f"container search exceeded {budget.search_nodes} nodes")
        live = [m for m in sub_masks if m & ~cand == 0]
        if len(live) <= target:
            leaves.append(cand)
            if keep_trace:
                trace.append({"path": path, "fingerprint": members(fp)})
            continue
        deg: Dict[int, int] = {}
        for m in live:
            free = m & ~fp
            while free:
                low = free & -free
                v = low.bit_length() - 1
                deg[v] = deg.get(v, 0) + 1
                free ^= low
        v = min(deg, key=lambda u: (-deg[u], u))
        bit = 1 << v
        fp_in = fp | bit
        cand_in = cand
        for w in members(cand & ~fp_in):
            if any(rest & ~fp_in == 0 for rest in h.rests(w) if rest & ~vertices == 0):
                cand_in &= ~(1 << w)
        # push in-branch last so it is explored first
        stack.append((cand & ~bit, fp, path + f"-{v}"))
        stack.append((cand_in, fp_in, path + f"+{v}"))

    if keep_trace:
        pairs = sorted(zip(leaves, trace), key=lambda p: members(p[0]))
        trace = [t for _, t in pairs]
    family = _canonical(leaves, drop_subsumed)
    counts = [sum(1 for m in sub_masks if m & ~c == 0) for c in family]
    return ContainerFamily(h.n, family, counts, eps, e_total, hid, trace)


def find_uncovered(h: Hypergraph, containers: Sequence[int], vertices: Optional[int] = None,
                   node_budget: Optional[int] = None):
    """Search for an independent subset of ``vertices`` inside no container.

    At each node take the compatible container C missing the fewest still
    reachable vertices; if it misses none the whole subtree is covered,
    otherwise any uncovered extension must pick one of the missed vertices,
    so branch on them in turn (excluding earlier ones).  Exact and
    independent of how the family was built.  Returns
    ``(witness_mask_or_None, nodes)``; a witness is greedily extended to a
    maximal independent set.
    """
    vertices = h.full if vertices is None else vertices
    nodes = 0
    containers = list(containers)

    def rec(chosen: int, avail: int, compatible: List[int]):
        nonlocal nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise BudgetExceeded(f"coverage search exceeded {node_budget} nodes")
        if not compatible:
            return chosen
        reach = chosen | avail
        best = min(compatible, key=lambda c: bin(reach & ~c).count("1"))
        missed = reach & ~best
        if not missed:
            return None
        for u in members(missed):
            bit = 1 << u
            avail &= ~bit
            nxt = chosen | bit
            sub = 0
            for w in members(avail):
                if not h.closes_edge(w, nxt):
                    sub |= 1 << w
            found = rec(nxt, sub, [c for c in compatible if c & bit])
            if found is not None:
                return found
        return None

    start = 0
    for v in members(vertices):
        if not h.closes_edge(v, 0):
            start |= 1 << v
    witness = rec(0, start, containers)
    if witness is not None:
        for v in members(vertices):
            if not witness >> v & 1 and not h.closes_edge(v, witness):
                witness |= 1 << v
    return witness, nodes


def verify_containers(h: Hypergraph, family: ContainerFamily, eps=None,
                      vertices: Optional[int] = None, tau=None,
                      budget: Optional[Budget] = None) -> dict:
    budget = budget or default_budget()
    vertices = h.full if vertices is None else vertices
    eps = family.eps if eps is None else as_fraction(eps)
    n_sub = bin(vertices).count("1")
    sub_edges = [m for m in h.edge_masks if m & ~vertices == 0]
    limit = eps * len(sub_edges)
    edge_violations = []
    for c in family.containers:
        spanned = sum(1 for m in sub_edges if m & ~c == 0)
        if spanned > limit:
            edge_violations.append({"container": members(c), "edges": spanned})
    report = {
        "eps": str(eps),
        "edge_limit": str(limit),
        "edge_check": not edge_violations,
        "edge_violations": edge_violations,
        "family_size": len(family.containers),
    }
    if n_sub <= budget.exhaustive_vertices:
        witness, nodes = find_uncovered(h, family.containers, vertices, budget.search_nodes)
        report["coverage_check"] = witness is None
        report["coverage_witness"] = None if witness is None else members(witness)
        report["coverage_nodes"] = nodes
    else:
        report["coverage_check"] = None
        report["coverage_note"] = (
            f"unverified: {n_sub} vertices exceeds exhaustive budget {budget.exhaustive_vertices}")
    if tau is not None:
        report["log2_family_size"] = decimal_str(mpmath.log(max(len(family.containers), 1), 2))
        report["log2_count_budget"] = decimal_str(
            count_budget_log2(h.r, n_sub, tau, eps if eps > 0 else Fraction(1, 2)))
    report["ok"] = report["edge_check"] and report["coverage_check"] is not False
    return report


def theory_round_params(n: int, s: float, f: float, dim: int = 3) -> dict:
    """tau = n^(s-4/3) and eps = n^(s-1/3+f/2) for the [n]^3 iteration (reals)."""
    n = mpmath.mpf(n)
    return {
        "tau": n ** (mpmath.mpf(s) - mpmath.mpf(4) / 3),
        "eps": n ** (mpmath.mpf(s) - mpmath.mpf(1) / 3 + mpmath.mpf(f) / 2),
        "stop_size": n ** (dim - mpmath.mpf(1) / 3 + f),
    }


def _s_value(size: int, a: int, dim: int) -> float:
    if size <= 1 or a <= 1:
        return float(dim)
    return dim - math.log(size) / math.log(a)


def iterate_containers(h: Hypergraph, f, stop_size: int, eps=Fraction(1, 4),
                       alphabet: Optional[int] = None, dimension: Optional[int] = None,
                       max_rounds: Optional[int] = None,
                       budget: Optional[Budget] = None) -> ContainerFamily:
    """Re-apply the builder inside each container until all have <= stop_size vertices.

    The round cap defaults to ceil(12 / f).  A container that spans no edges
    yet exceeds the stop size cannot shrink, which raises NonContracting.
    """
    f = as_fraction(f)
    if f <= 0:
        raise ValidationError("f must be positive")
    eps = as_fraction(eps)
    cap = math.ceil(12 / f) if max_rounds is None else max_rounds
    a = alphabet or 2
    dim = dimension or 1
    active = [h.full]
    final: List[int] = []
    rounds: List[dict] = []
    for i in range(cap + 1):
        todo = []
        for c in active:
            (final if bin(c).count("1") <= stop_size else todo).append(c)
        if not todo:
            break
        if i == cap:
            raise NonContracting(f"iteration did not contract within {cap} rounds", rounds)
        log = {"round": i + 1, "eps": str(eps), "entries": []}
        children = []
        for c in todo:
            size = bin(c).count("1")
            e_c = h.spanned(c)
            if e_c == 0:
                log["entries"].append({"size": size, "edges": 0})
                rounds.append(log)
                raise NonContracting(
                    f"iteration did not contract: container of size {size} spans no edges "
                    f"but exceeds stop size {stop_size}", rounds)
            fam = build_containers(h, eps, vertices=c, budget=budget)
            worst = max(fam.edge_counts)
            log["entries"].append({
                "size": size,
                "s": round(_s_value(size, a, dim), 6),
                "edges": e_c,
                "children": len(fam),
                "max_child_edges": worst,
                "shrink": str(Fraction(worst, e_c)),
            })
            children.extend(fam.containers)
        rounds.append(log)
        active = _canonical(children)
    family = _canonical(final)
    counts = [h.spanned(c) for c in family]
    return ContainerFamily(h.n, family, counts, eps, h.e(), h.fingerprint(), [], rounds)
