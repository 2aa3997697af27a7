"""Exact arithmetic helpers shared across modules."""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial, gcd
from typing import Sequence

import mpmath

REAL_DIGITS = 50
mpmath.mp.dps = REAL_DIGITS


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # decimal reading: 0.1 means 1/10, not the nearest binary double
        return Fraction(repr(x))
    return Fraction(x)


def frac_binomial(x, r: int) -> Fraction:
    """Convex extension of C(x, r) to rational x.

    x(x-1)...(x-r+1)/r! for x >= r-1 and 0 below; agrees with math.comb on
    non-negative integers.
    """
    x = as_fraction(x)
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0:
        return Fraction(1)
    if x < r - 1:
        return Fraction(0)
    num = Fraction(1)
    for i in range(r):
        num *= x - i
    return num / factorial(r)


def binom(n: int, k: int) -> int:
    if k < 0 or n < k:
        return 0
    return comb(n, k)


def primitive(vec: Sequence[int]) -> tuple:
    """Divide by the gcd and flip so the first nonzero entry is positive."""
    g = 0
    for v in vec:
        g = gcd(g, v)
    if g == 0:
        raise ValueError("zero vector has no direction")
    out = [v // g for v in vec]
    for v in out:
        if v != 0:
            if v < 0:
                out = [-w for w in out]
            break
    return tuple(out)


def collinear_int(p: Sequence[int], q: Sequence[int], s: Sequence[int]) -> bool:
    """True iff three points of Z^k lie on one line (all 2x2 minors vanish)."""
    u = [b - a for a, b in zip(p, q)]
    v = [b - a for a, b in zip(p, s)]
    k = len(u)
    for i in range(k):
        for j in range(i + 1, k):
            if u[i] * v[j] != u[j] * v[i]:
                return False
    return True


def orient(p, q, s):
    """Twice the signed area of the planar triangle pqs (exact)."""
    return (q[0] - p[0]) * (s[1] - p[1]) - (q[1] - p[1]) * (s[0] - p[0])


def rational_str(x) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_str(x, digits: int = 12) -> str:
    if isinstance(x, Fraction):
        x = mpmath.mpf(x.numerator) / x.denominator
    return mpmath.nstr(mpmath.mpf(x), digits)


def log2(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.log(mpmath.mpf(x.numerator), 2) - mpmath.log(mpmath.mpf(x.denominator), 2)
    return mpmath.log(mpmath.mpf(x), 2)


def real(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)
