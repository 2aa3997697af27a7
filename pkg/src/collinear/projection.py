"""Exact planar images of grid sets: generic projections, the product lift, duality.

Everything here is integer/rational; collinearity is always a vanishing
determinant, never a tolerance test.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import RetryExhausted, ValidationError
from .exact import as_fraction, orient, primitive, rational_str
from .grid import AXIS, FULL, axis_line_groups, line_groups

AXIS_ONLY = "axis-only"
Triple = Tuple[int, int, int]


@dataclass(frozen=True, order=True)
class PlanarPoint:
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x, y) -> "PlanarPoint":
        return cls(as_fraction(x), as_fraction(y))

    def to_json(self):
        return [rational_str(self.x), rational_str(self.y)]


@dataclass(frozen=True, order=True)
class IdealPoint:
    """A point at infinity: the class of lines with direction (dx, dy)."""
    dx: int
    dy: int

    def to_json(self):
        return {"infinity": [self.dx, self.dy]}


@dataclass(frozen=True, order=True)
class PlanarLine:
    """A*x + B*y + C = 0 with coprime integers, first nonzero of (A, B) positive."""
    A: int
    B: int
    C: int

    @classmethod
    def through(cls, p: PlanarPoint, q: PlanarPoint) -> "PlanarLine":
        if p == q:
            raise ValidationError("degenerate pair")
        return cls.from_coeffs(q.y - p.y, p.x - q.x, q.x * p.y - p.x * q.y)

    @classmethod
    def from_coeffs(cls, A, B, C) -> "PlanarLine":
        A, B, C = (as_fraction(v) for v in (A, B, C))
        if A == 0 and B == 0:
            raise ValidationError("not a line")
        den = lcm(A.denominator, B.denominator, C.denominator)
        ints = [int(v * den) for v in (A, B, C)]
        g = gcd(*ints)
        ints = [v // g for v in ints]
        if ints[0] < 0 or (ints[0] == 0 and ints[1] < 0):
            ints = [-v for v in ints]
        return cls(*ints)

    @classmethod
    def slope_form(cls, m, c) -> "PlanarLine":
        """y = m x + c."""
        return cls.from_coeffs(as_fraction(m), -1, as_fraction(c))

    @property
    def vertical(self) -> bool:
        return self.B == 0

    @property
    def direction(self) -> Tuple[int, int]:
        return primitive((-self.B, self.A))

    def contains(self, p) -> bool:
        if isinstance(p, IdealPoint):
            return primitive((p.dx, p.dy)) == self.direction
        return self.A * p.x + self.B * p.y + self.C == 0

    def to_json(self):
        return [self.A, self.B, self.C]


def ideal_point(direction: Sequence[int]) -> IdealPoint:
    return IdealPoint(*primitive(direction))


# ---------------------------------------------------------------------------
# collinear triples of planar sets
# ---------------------------------------------------------------------------

def _integerize(points: Sequence[PlanarPoint]) -> List[Tuple[int, int]]:
    den = 1
    for p in points:
        den = lcm(den, p.x.denominator, p.y.denominator)
    return [(int(p.x * den), int(p.y * den)) for p in points]


def planar_line_groups(points: Sequence[PlanarPoint], min_size: int = 2) -> Dict[PlanarLine, List[int]]:
    """Every line through >= min_size of the points, via per-point slope buckets."""
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise ValidationError("repeated point")
    P = _integerize(pts)
    seen: Set[Tuple[int, int]] = set()
    out: Dict[PlanarLine, List[int]] = {}
    for i, (xi, yi) in enumerate(P):
        buckets: Dict[Tuple[int, int], List[int]] = {}
        for j in range(i + 1, len(P)):
            if (i, j) in seen:
                continue
            d = primitive((P[j][0] - xi, P[j][1] - yi))
            buckets.setdefault(d, []).append(j)
        for d, js in buckets.items():
            idx = [i] + js
            for a, b in itertools.combinations(idx, 2):
                seen.add((a, b))
            if len(idx) >= min_size:
                out[PlanarLine.through(pts[i], pts[js[0]])] = idx
    return dict(sorted(out.items()))


def triples_of_groups(groups: Iterable[Sequence[int]]) -> Set[Triple]:
    out: Set[Triple] = set()
    for idx in groups:
        out.update(itertools.combinations(sorted(idx), 3))
    return out


def collinear_triples(points: Sequence[PlanarPoint]) -> Set[Triple]:
    return triples_of_groups(planar_line_groups(points, 3).values())


def collinear_triples_bruteforce(points: Sequence[PlanarPoint]) -> Set[Triple]:
    """O(m^3) determinant scan; the certifying oracle for small sets."""
    return {t for t in itertools.combinations(range(len(points)), 3)
            if orient(*((points[k].x, points[k].y) for k in t)) == 0}


def designated_triples(S: Sequence[Sequence[int]], mode: str) -> Set[Triple]:
    """Index triples of S lying on a common line (full) or common axis line (axis-only)."""
    if mode in (AXIS_ONLY, AXIS):
        return triples_of_groups(axis_line_groups(S, 3).values())
    if mode == FULL:
        return triples_of_groups(line_groups(S, 3).values())
    raise ValidationError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# the product lift and generic maps
# ---------------------------------------------------------------------------

def lift_products(p: Sequence[int]) -> Tuple[int, ...]:
    """All products over nonempty coordinate subsets: singletons, pairs (lex), ..., full product."""
    k = len(p)
    if k < 2:
        raise ValidationError("lift needs at least two coordinates")
    if any(c == 0 for c in p):
        raise ValidationError("zero coordinate: the lift needs non-zero entries")
    out = []
    for s in range(1, k + 1):
        for sub in itertools.combinations(range(k), s):
            v = 1
            for i in sub:
                v *= p[i]
            out.append(v)
    return tuple(out)


@dataclass
class ProjectionCertificate:
    mode: str
    source_triples: int
    image_triples: int
    preserved: int
    created: int
    lost: int
    attempts: int
    coefficient_range: int
    oracle: str
    injective: bool = True
    retries: List[dict] = field(default_factory=list)
    rows: List[List[int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.injective and self.created == 0 and self.lost == 0

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "source_triples": self.source_triples,
            "image_triples": self.image_triples,
            "preserved": self.preserved,
            "created": self.created,
            "lost": self.lost,
            "attempts": self.attempts,
            "coefficient_range": self.coefficient_range,
            "oracle": self.oracle,
            "injective": self.injective,
            "ok": self.ok,
            "retries": self.retries,
            "map_rows": self.rows,
        }


def _apply(rows: Sequence[Sequence[int]], pts: Sequence[Sequence[int]]) -> List[PlanarPoint]:
    a, b = rows
    return [PlanarPoint(Fraction(sum(x * c for x, c in zip(p, a))),
                        Fraction(sum(x * c for x, c in zip(p, b)))) for p in pts]


def project_generic(S: Sequence[Sequence[int]], mode: str = FULL, seed: int = 0,
                    max_attempts: int = 20, coeff_range: Optional[int] = None,
                    oracle_limit: int = 60) -> Tuple[List[PlanarPoint], ProjectionCertificate]:
    """Send S to the plane by a random integer linear map, keeping exactly the designated collinearities.

    mode "full-line" keeps every collinear triple of S; "axis-only" first lifts
    through :func:`lift_products` so that only axis-parallel triples survive.
    The image follows the order of S.  Sets with at most ``oracle_limit``
    points are also certified by the cubic determinant scan.
    """
    from .construction import make_rng
    if mode == AXIS:
        mode = AXIS_ONLY
    if mode not in (FULL, AXIS_ONLY):
        raise ValidationError(f"unknown mode {mode!r}")
    S = [tuple(int(c) for c in p) for p in S]
    if len(set(S)) != len(S):
        raise ValidationError("repeated point in S")
    if not S:
        return [], ProjectionCertificate(mode, 0, 0, 0, 0, 0, 0, 0, "none")
    dim = len(S[0])
    want = designated_triples(S, mode)
    src = [lift_products(p) for p in S] if mode == AXIS_ONLY else S
    width = len(src[0])
    R = coeff_range or max(2 ** 32, len(S) ** 6)
    rng = make_rng(seed)
    retries = []
    for attempt in range(1, max_attempts + 1):
        rows = [[int(v) for v in rng.integers(1, R, size=width, endpoint=True, dtype="uint64")]
                for _ in range(2)]
        image = _apply(rows, src)
        injective = len(set(image)) == len(image)
        got = collinear_triples(image) if injective else set()
        oracle = "slope-hash"
        if injective and len(image) <= oracle_limit:
            if collinear_triples_bruteforce(image) != got:
                raise AssertionError("slope hashing disagrees with the determinant oracle")
            oracle = "slope-hash+determinant"
        created = got - want
        lost = want - got
        cert = ProjectionCertificate(mode, len(want), len(got), len(want & got), len(created),
                                     len(lost), attempt, R, oracle, injective, retries, rows)
        if cert.ok:
            return image, cert
        bad = min(created) if created else (min(lost) if lost else None)
        retries.append({"attempt": attempt, "injective": injective,
                        "created": len(created), "lost": len(lost),
                        "triple": [list(S[k]) for k in bad] if bad else None})
    raise RetryExhausted(f"no admissible projection after {max_attempts} attempts",
                         retries[-1]["triple"])


def apply_certificate_map(cert: ProjectionCertificate, pts: Sequence[Sequence[int]],
                          mode: Optional[str] = None) -> List[PlanarPoint]:
    """Send further points through the map recorded in a certificate (lifting in axis-only mode)."""
    mode = mode or cert.mode
    src = [lift_products(p) for p in pts] if mode in (AXIS_ONLY, AXIS) else [tuple(p) for p in pts]
    return _apply(cert.rows, src)


def generic_product_grid(a: int, d: int, seed: int = 0, alphabets=None,
                         coeff_range: int = 2 ** 20, max_attempts: int = 20) -> dict:
    """Random integer alphabets whose Cartesian product has only axis-parallel collinear triples."""
    from .construction import make_rng
    if a < 1 or d < 1:
        raise ValidationError("alphabet and dimension must be positive")
    rng = make_rng(seed)
    rejected = []
    current = [sorted(int(x) for x in al) for al in alphabets] if alphabets is not None else None
    for attempt in range(1, max_attempts + 1):
        if current is None:
            current = [sorted(int(x) for x in rng.choice(coeff_range, size=a, replace=False) + 1)
                       for _ in range(d)]
        rep = check_product_grid(current)
        if rep["ok"]:
            rep.update(attempts=attempt, rejected=rejected)
            return rep
        rejected.append({"alphabets": current, "non_axis_triples": rep["non_axis_triples"]})
        current = None
    raise RetryExhausted(f"no generic alphabets after {max_attempts} attempts", rejected[-1])


def check_product_grid(alphabets: Sequence[Sequence[int]]) -> dict:
    """Count collinear triples in the product of the alphabets, split into axis and non-axis."""
    if any(len(set(al)) != len(al) for al in alphabets):
        raise ValidationError("alphabet entries must be distinct")
    pts = list(itertools.product(*alphabets))
    everything = triples_of_groups(line_groups(pts, 3).values()) if len(pts) >= 3 else set()
    axis = designated_triples(pts, AXIS) if len(pts) >= 3 else set()
    extra = everything - axis
    return {"alphabets": [list(al) for al in alphabets], "points": len(pts),
            "collinear_triples": len(everything), "axis_triples": len(axis),
            "non_axis_triples": len(extra), "ok": not extra,
            "example": [list(pts[k]) for k in min(extra)] if extra else None}


# ---------------------------------------------------------------------------
# point-line duality: (a, b) <-> y = a x - b
# ---------------------------------------------------------------------------

def dual_line(p: PlanarPoint) -> PlanarLine:
    return PlanarLine.slope_form(p.x, -p.y)


def dual_point(line: PlanarLine) -> PlanarPoint:
    if line.vertical:
        raise ValidationError("outside duality chart: vertical line")
    m = Fraction(-line.A, line.B)
    c = Fraction(-line.C, line.B)
    return PlanarPoint(m, -c)


def dualize(objs):
    """Points become lines and (non-vertical) lines become points, element-wise."""
    out = []
    for o in objs:
        if isinstance(o, PlanarPoint):
            out.append(dual_line(o))
        elif isinstance(o, PlanarLine):
            out.append(dual_point(o))
        else:
            raise ValidationError(f"cannot dualize {o!r}")
    return out


def concurrent(lines: Sequence[PlanarLine]) -> Optional[PlanarPoint]:
    """Common point of the lines, or None (parallel families or no common point)."""
    if len(lines) < 2:
        raise ValidationError("need at least two lines")
    l1, l2 = lines[0], lines[1]
    det = l1.A * l2.B - l2.A * l1.B
    if det == 0:
        return None
    x = Fraction(l1.B * l2.C - l2.B * l1.C, det)
    y = Fraction(l2.A * l1.C - l1.A * l2.C, det)
    p = PlanarPoint(x, y)
    return p if all(l.contains(p) for l in lines) else None
