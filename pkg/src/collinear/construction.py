"""Randomized point-set constructions on grids and the cleaning passes.

Randomness comes from numpy's PCG64 generator seeded with a 64-bit integer,
so a (config, seed) pair always produces the same set on every platform.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import ceil, comb, factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .budget import Budget, default_budget
from .errors import ValidationError
from .exact import as_fraction, decimal_str, log2, rational_str, real
from .grid import (AXIS, FULL, Point, _check_mode, axis_line_groups, grid_points,
                   line_arrays, line_groups)

REGIMES = ("gp-3and4", "eps-net", "weak-net", "cover-decomp")


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= int(seed) < 2 ** 64:
        raise ValidationError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(int(seed)))


# ---------------------------------------------------------------------------
# parameter derivation
# ---------------------------------------------------------------------------

def _num(x) -> dict:
    """Render a number: exact when rational, 50-digit decimal plus log2 otherwise."""
    if isinstance(x, int):
        out = {"exact": str(x)} if x.bit_length() <= 256 else {}
        out["log2"] = decimal_str(log2(x)) if x > 0 else None
        return out
    if isinstance(x, Fraction):
        out = {"exact": rational_str(x)} if max(x.numerator.bit_length(),
                                                  x.denominator.bit_length()) <= 256 else {}
        out["approx"] = decimal_str(x)
        out["log2"] = decimal_str(log2(x)) if x > 0 else None
        return out
    x = mpmath.mpf(x)
    return {"approx": decimal_str(x), "log2": decimal_str(mpmath.log(x, 2)) if x > 0 else None}


@dataclass
class ConstructionConfig:
    regime: str
    a: Optional[int] = None
    d: Optional[int] = None
    r: Optional[int] = None
    p: Optional[Fraction] = None
    seed: int = 0
    f: Optional[Fraction] = None
    gamma: Optional[Fraction] = None
    t: Optional[int] = None
    T: Optional[int] = None
    theory: dict = field(default_factory=dict)
    full_scale_infeasible: bool = False
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            if isinstance(v, Fraction):
                v = rational_str(v)
            out[k] = v
        return out

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _gp_params(n: int, f, s) -> dict:
    f, s = as_fraction(f), as_fraction(s)
    ln = mpmath.log(n, 2)
    nn = mpmath.mpf(n)
    p = 1 / (nn * mpmath.sqrt(ln))
    lg = int(ln) if mpmath.almosteq(ln, int(ln)) and 2 ** int(ln) == n else None
    return {
        "p": dict(_num(p), formula=f"1/({n}*sqrt({lg}))" if lg is not None else "1/(n*sqrt(log2 n))"),
        "tau": _num(nn ** (real(s) - mpmath.mpf(4) / 3)),
        "eps": _num(nn ** (real(s) - mpmath.mpf(1) / 3 + real(f) / 2)),
        "stop_size": _num(nn ** (mpmath.mpf(8) / 3 + real(f))),
        "m": _num(nn ** (mpmath.mpf(5) / 3 + real(f))),
        "log2_container_count": _num((12 / real(f)) * 10 ** 7 * nn ** (mpmath.mpf(5) / 3) * ln ** 2),
        "round_cap": ceil(12 / f),
        "expected_points": _num(p * nn ** 3),
        "expected_4tuples_upper": _num(100 * p ** 4 * ln * nn ** 6),
        "final_size_range": [_num(nn ** 2 / (2 * mpmath.sqrt(ln))), _num(2 * nn ** 2 / mpmath.sqrt(ln))],
    }


def _epsnet_params(n: int, r: int) -> dict:
    nn = mpmath.mpf(n)
    p = Fraction(r, 20 * n)
    v = n ** r
    return {
        "p": dict(_num(p), formula="r/(20n)"),
        "tau": _num(nn ** (-1 - mpmath.mpf(9) / (10 * (r - 1)))),
        "eps": _num(Fraction(1, 10 ** (r * r))),
        "delta": [comb(n - i, r - i) for i in range(2, r + 1)],
        "m": _num(Fraction(45, 100) * p * v),
        "container_size": _num(Fraction(v, 10)),
        "vertex_count": _num(v),
    }


def _weaknet_params(r: int, k: Optional[int] = None, n: Optional[int] = None) -> dict:
    k = 2 ** (r ** 4) if k is None else k
    n = k ** r if n is None else n
    kk, nn, rr = mpmath.mpf(k), mpmath.mpf(n), mpmath.mpf(r)
    n_root = nn ** (1 / (rr - 1))
    p = rr ** (4 * rr) * nn ** (1 / (2 * rr ** 2)) / (kk * n_root)
    t = mpmath.sqrt(rr)
    log2_v = nn * mpmath.log(kk, 2)
    return {
        "k": _num(k),
        "n": _num(n),
        "t": _num(t),
        "p": dict(_num(p), formula="r^(4r) n^(1/(2r^2)) / (k n^(1/(r-1)))"),
        "eps": _num(Fraction(1, 10 ** (r + 1))),
        "tau": _num(rr * 2 ** rr / (kk * n_root)),
        "log2_vertex_count": _num(log2_v),
        "edge_count_formula": "n C(k, r) k^(n-1)",
        "delta": "C(k - i, r - i)",
        "condition_r_plus_1": {"p_upper": _num(rr / kk ** 2), "holds": bool(p < rr / kk ** 2)},
        "condition_star": {
            "p_upper": _num(1 / (kk ** (1 + 1 / (rr * t - 1)) * nn ** (t / (rr * t - 1)))),
            "holds": bool(p < 1 / (kk ** (1 + 1 / (rr * t - 1)) * nn ** (t / (rr * t - 1)))),
        },
        "condition_containers": {"p_lower": _num(rr ** (4 * rr) / (n_root * kk)),
                                 "holds": bool(p > rr ** (4 * rr) / (n_root * kk))},
        "r_exponents": {"log2 n ^ (1/5)": decimal_str(mpmath.log(nn, 2) ** (mpmath.mpf(1) / 5)),
                        "log2 k ^ (1/4)": decimal_str(mpmath.log(kk, 2) ** (mpmath.mpf(1) / 4))},
    }


def _cover_params(r: int, gamma, n: Optional[int] = None) -> dict:
    gamma = as_fraction(gamma)
    n = 2 ** (r ** 4) if n is None else n
    nn, rr = mpmath.mpf(n), mpmath.mpf(r)
    p = rr ** (4 * rr) / nn ** (1 + 1 / (rr - 1))
    return {
        "n": _num(n),
        "eps": _num(Fraction(1, 2) * gamma ** r),
        "tau": _num(rr * 2 ** rr / nn ** (1 + 1 / (rr - 1))),
        "p": dict(_num(p), formula="r^(4r) / n^(1 + 1/(r-1))"),
        "m": _num(10 * real(gamma) * p * nn ** nn) if n < 2 ** 20 else
             {"log2": decimal_str(mpmath.log(10 * real(gamma) * p, 2) + nn * mpmath.log(nn, 2))},
        "T_cleaning": _num(r ** (5 * r * r - 1)),
        "T_full": _num(r ** (5 * r * r)),
        "degree": "r C(n, r)",
        "delta": "C(n - i, r - i)",
    }


def derive_params(regime: str, scale: Optional[dict] = None, override: Optional[dict] = None,
                  budget: Optional[Budget] = None) -> ConstructionConfig:
    """Evaluate the regime's formulas and attach a desk-scale configuration.

    ``scale`` holds the regime inputs (gp-3and4: n, f, s; eps-net: n, r;
    weak-net: r and optionally k, n; cover-decomp: r, gamma).  ``override``
    sets the desk instance (a, d, r, p, t, T, seed); full-scale instances
    beyond the point budget are flagged, never run.
    """
    if regime not in REGIMES:
        raise ValidationError(f"regime must be one of {REGIMES}")
    scale = dict(scale or {})
    override = dict(override or {})
    budget = budget or default_budget()
    cfg = ConstructionConfig(regime=regime)
    if regime == "gp-3and4":
        n = int(scale.get("n", 16))
        f = as_fraction(scale.get("f", Fraction(1, 10)))
        cfg.theory = _gp_params(n, f, scale.get("s", 0))
        cfg.a, cfg.d, cfg.r, cfg.f = n, 3, 3, f
        cfg.p = as_fraction(cfg.theory["p"]["approx"])
        cfg.full_scale_infeasible = n ** 3 > budget.max_points
    elif regime == "eps-net":
        n, r = int(scale.get("n", 8)), int(scale.get("r", 3))
        cfg.theory = _epsnet_params(n, r)
        cfg.a, cfg.d, cfg.r = n, r, r
        cfg.p = Fraction(r, 20 * n)
        cfg.full_scale_infeasible = n ** r > budget.max_points
    elif regime == "weak-net":
        r = int(scale.get("r", 3))
        cfg.theory = _weaknet_params(r, scale.get("k"), scale.get("n"))
        cfg.r = r
        cfg.t = max(1, int(mpmath.floor(mpmath.sqrt(r))))
        cfg.full_scale_infeasible = True
        cfg.notes.append("r = (log2 n)^(1/5) = (log2 k)^(1/4) with k = 2^(r^4), n = k^r; "
                         "both exponents agree")
    else:
        r = int(scale.get("r", 2))
        gamma = as_fraction(scale.get("gamma", Fraction(1, 2)))
        cfg.theory = _cover_params(r, gamma, scale.get("n"))
        cfg.r, cfg.gamma = r, gamma
        cfg.T = r ** (5 * r * r - 1)
        cfg.full_scale_infeasible = True
    if cfg.full_scale_infeasible:
        cfg.notes.append("full-scale parameters are infeasible; only the override instance runs")
    for key in ("a", "d", "r", "t", "T", "seed"):
        if key in override and override[key] is not None:
            setattr(cfg, key, int(override[key]))
    if override.get("p") is not None:
        cfg.p = as_fraction(override["p"])
    if cfg.p is not None and not 0 <= cfg.p <= 1:
        raise ValidationError("p must lie in [0, 1]")
    return cfg


# ---------------------------------------------------------------------------
# random subsets and cleaning
# ---------------------------------------------------------------------------

def p_random_subset(a: int, d: int, p, seed: int,
                    budget: Optional[Budget] = None) -> List[Point]:
    """Keep each point of [a]^d independently with probability p (lexicographic draw order)."""
    budget = budget or default_budget()
    budget.check_points(a ** d)
    p = as_fraction(p)
    if not 0 <= p <= 1:
        raise ValidationError("p must lie in [0, 1]")
    draws = make_rng(seed).random(a ** d)
    keep = draws < float(p)
    pts = list(grid_points(a, d))
    return [pt for pt, k in zip(pts, keep.tolist()) if k]


@dataclass
class CleanedSet:
    points: List[Point]
    a: int
    d: int
    mode: str
    max_on_line: Optional[int]
    removed_excess: List[Point] = field(default_factory=list)
    removed_star: List[Point] = field(default_factory=list)
    removed_heavy: List[Point] = field(default_factory=list)
    violating_lines_seen: int = 0
    certificate: dict = field(default_factory=dict)

    @property
    def removed(self) -> int:
        return len(self.removed_excess) + len(self.removed_star) + len(self.removed_heavy)

    def to_json(self) -> dict:
        return {
            "alphabet": self.a,
            "dimension": self.d,
            "mode": self.mode,
            "max_on_line": self.max_on_line,
            "points": [list(p) for p in self.points],
            "removal_ledger": {
                "excess": [list(p) for p in self.removed_excess],
                "star": [list(p) for p in self.removed_star],
                "heavy": [list(p) for p in self.removed_heavy],
            },
            "violating_lines_seen": self.violating_lines_seen,
            "certificate": self.certificate,
        }


def _groups(points: Sequence[Point], mode: str, min_size: int) -> Dict[tuple, List[int]]:
    if mode == AXIS:
        return axis_line_groups(points, min_size)
    return line_groups(points, max(2, min_size))


def delete_excess_tuples(S: Iterable[Sequence[int]], a: int, d: int, max_on_line: int,
                         mode: str = FULL, budget: Optional[Budget] = None) -> CleanedSet:
    """Remove points until no line carries more than ``max_on_line`` of them.

    Lines are visited in canonical order; on a violating line the point lying
    on the most violating lines goes (ties: lexicographically smallest).
    """
    _check_mode(mode)
    if max_on_line < 1:
        raise ValidationError("max_on_line must be >= 1")
    pts = sorted(set(tuple(p) for p in S))
    for p in pts:
        if len(p) != d or not all(1 <= c <= a for c in p):
            raise ValidationError(f"point {p} outside [1,{a}]^{d}")
    alive = [True] * len(pts)
    groups = _groups(pts, mode, max_on_line + 1)
    removed: List[Point] = []
    seen = 0
    while True:
        live = {k: [i for i in idx if alive[i]] for k, idx in groups.items()}
        bad = [k for k, idx in live.items() if len(idx) > max_on_line]
        if not bad:
            break
        through: Dict[int, int] = {}
        for k in bad:
            for i in live[k]:
                through[i] = through.get(i, 0) + 1
        for k in bad:
            idx = [i for i in live[k] if alive[i]]
            if len(idx) <= max_on_line:
                continue
            seen += 1
            victim = min(idx, key=lambda i: (-through[i], i))
            alive[victim] = False
            removed.append(pts[victim])
    survivors = [p for p, ok in zip(pts, alive) if ok]
    out = CleanedSet(survivors, a, d, mode, max_on_line, removed_excess=removed,
                     violating_lines_seen=seen)
    out.certificate = verify_clean(survivors, a, d, max_on_line, mode, budget)
    return out


def verify_clean(S: Iterable[Sequence[int]], a: int, d: int, max_on_line: int,
                 mode: str = FULL, budget: Optional[Budget] = None) -> dict:
    """Re-enumerate every grid line with > max_on_line grid points and count S on it."""
    mask = np.zeros((a,) * d, dtype=bool)
    for p in S:
        mask[tuple(c - 1 for c in p)] = True
    flat = mask.ravel()
    strides = np.array([a ** (d - 1 - i) for i in range(d)], dtype=np.int64)
    worst = 0
    offenders = []
    lines_checked = 0
    for v, bases, counts in line_arrays(a, d, max_on_line + 1, mode, budget):
        step = int(np.dot(v, strides))
        start = (bases - 1) @ strides
        on = np.zeros(len(bases), dtype=np.int64)
        for j in range(int(counts.max())):
            valid = j < counts
            on[valid] += flat[start[valid] + j * step]
        lines_checked += len(bases)
        if len(on):
            worst = max(worst, int(on.max()))
            for row in np.nonzero(on > max_on_line)[0][:5].tolist():
                offenders.append({"dir": list(v), "base": bases[row].tolist(), "points": int(on[row])})
    return {"lines_checked": lines_checked, "max_points_on_line": worst,
            "limit": max_on_line, "ok": not offenders, "offenders": offenders}


def _axis_counts(mask: np.ndarray) -> List[np.ndarray]:
    """Per axis, the number of set points on the axis line through every grid point."""
    return [np.broadcast_to(mask.sum(axis=ax, keepdims=True), mask.shape) for ax in range(mask.ndim)]


def star_sparsen(S: Iterable[Sequence[int]], a: int, d: int, r: int, t: int,
                 seed: Optional[int] = None) -> CleanedSet:
    """Break every star: a grid point outside S on >= t axis lines holding exactly r points of S.

    Centers are visited lexicographically; from the first t full lines through
    a center the point lying on the most full lines through star centers is
    removed (ties: lexicographically smallest, or seeded shuffle when a seed
    is given).
    """
    if t < 1 or r < 1:
        raise ValidationError("t and r must be positive")
    mask = np.zeros((a,) * d, dtype=bool)
    for p in S:
        mask[tuple(c - 1 for c in p)] = True
    rng = make_rng(seed) if seed is not None else None
    removed: List[Point] = []
    while True:
        full = [c == r for c in _axis_counts(mask)]
        star_deg = np.sum(full, axis=0) * ~mask
        centers = np.argwhere(star_deg >= t)
        if len(centers) == 0:
            break
        c = tuple(centers[0].tolist())
        lines = [ax for ax in range(d) if full[ax][c]][:t]
        cand = []
        for ax in lines:
            for x in range(a):
                q = c[:ax] + (x,) + c[ax + 1:]
                if mask[q]:
                    cand.append(q)
        weight = {}
        for q in cand:
            weight[q] = sum(int(full[ax][q]) for ax in range(d))
        order = sorted(cand)
        if rng is not None:
            rng.shuffle(order)
        victim = max(order, key=lambda q: weight[q])
        mask[victim] = False
        removed.append(tuple(x + 1 for x in victim))
    survivors = [tuple(x + 1 for x in q) for q in np.argwhere(mask).tolist()]
    out = CleanedSet(sorted(survivors), a, d, AXIS, None, removed_star=removed)
    out.certificate = verify_no_star(survivors, a, d, r, t)
    return out


def verify_no_star(S: Iterable[Sequence[int]], a: int, d: int, r: int, t: int) -> dict:
    """Plain scan over grid points: count r-full axis lines through each point outside S."""
    inS = set(tuple(p) for p in S)
    worst = 0
    offenders = []
    for c in grid_points(a, d):
        if c in inS:
            continue
        fulls = 0
        for ax in range(d):
            on = sum(1 for x in range(1, a + 1) if c[:ax] + (x,) + c[ax + 1:] in inS)
            fulls += on == r
        worst = max(worst, fulls)
        if fulls >= t and len(offenders) < 5:
            offenders.append({"center": list(c), "full_lines": fulls})
    return {"max_full_lines_at_center": worst, "t": t, "r": r,
            "ok": worst < t, "offenders": offenders}


def remove_heavy_points(S: Iterable[Sequence[int]], a: int, d: int, r: int, T: int) -> CleanedSet:
    """Drop points of S lying on more than T axis lines that hold at least r points of S."""
    pts = sorted(set(tuple(p) for p in S))
    mask = np.zeros((a,) * d, dtype=bool)
    for p in pts:
        mask[tuple(c - 1 for c in p)] = True
    removed = []
    while True:
        rich = np.sum([c >= r for c in _axis_counts(mask)], axis=0) * mask
        heavy = np.argwhere(rich > T)
        if len(heavy) == 0:
            break
        q = tuple(heavy[0].tolist())
        mask[q] = False
        removed.append(tuple(x + 1 for x in q))
    survivors = [tuple(x + 1 for x in q) for q in np.argwhere(mask).tolist()]
    out = CleanedSet(sorted(survivors), a, d, AXIS, None, removed_heavy=removed)
    rich = np.sum([c >= r for c in _axis_counts(mask)], axis=0) * mask
    out.certificate = {"max_rich_lines_at_point": int(rich.max()) if rich.size else 0,
                       "T": T, "ok": int(rich.max() if rich.size else 0) <= T}
    return out


def first_moment_check(container_count_log2, container_size, m, p) -> dict:
    """log2 of 2^{log|C|} * C(size, m) * p^m using C(a, b) <= (e a / b)^b."""
    lc = mpmath.mpf(container_count_log2) if not isinstance(container_count_log2, Fraction) \
        else real(container_count_log2)
    size = real(as_fraction(container_size)) if isinstance(container_size, (int, Fraction, str)) \
        else mpmath.mpf(container_size)
    mm = real(as_fraction(m)) if isinstance(m, (int, Fraction, str)) else mpmath.mpf(m)
    pp = real(as_fraction(p)) if isinstance(p, (int, Fraction, str)) else mpmath.mpf(p)
    out = {"stirling": "C(a, b) <= (e a / b)^b",
           "inputs": {"log2_containers": decimal_str(lc), "container_size": decimal_str(size),
                      "m": decimal_str(mm), "p": decimal_str(pp)}}
    if mm <= 0 or size <= 0 or pp < 0:
        raise ValidationError("inputs must be positive")
    if mm > size:
        out.update(log2_bound=None, bound_below_one=True,
                   note="vacuous: m exceeds the container size, so the bound is 0")
        return out
    if pp == 0:
        out.update(log2_bound=None, bound_below_one=True, note="p = 0, bound is 0")
        return out
    val = lc + mm * mpmath.log(mpmath.e * size / mm, 2) + mm * mpmath.log(pp, 2)
    out.update(log2_bound=decimal_str(val, 20), bound_below_one=bool(val < 0))
    return out
