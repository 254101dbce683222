"""Bessel functions and angular-momentum coupling coefficients.

Bessel J_0..J_2 and K_0..K_2 are thin wrappers over scipy.special (Cephes)
with the derivative identities needed by the guided-mode equations.
Wigner 3-j / 6-j symbols use the Racah sums evaluated in exact rational
arithmetic and are rounded to float only at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Real

import numpy as np
from scipy import special

__all__ = [
    "HalfInteger",
    "bessel_j",
    "bessel_k",
    "bessel_j_prime",
    "bessel_k_prime",
    "wigner_3j",
    "wigner_6j",
    "clebsch_gordan",
]


@dataclass(frozen=True, order=True)
class HalfInteger:
    """An integer or half-integer stored exactly as twice its value."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, (int, np.integer)) or isinstance(self.twice_value, bool):
            raise TypeError("twice_value must be an integer")
        object.__setattr__(self, "twice_value", int(self.twice_value))

    @classmethod
    def of(cls, value) -> "HalfInteger":
        return cls(twice(value))

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self):
        return self.twice_value / 2

    def __int__(self):
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.twice_value // 2

    def __neg__(self):
        return HalfInteger(-self.twice_value)

    def __add__(self, other):
        return HalfInteger(self.twice_value + twice(other))

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInteger(self.twice_value - twice(other))

    def __rsub__(self, other):
        return HalfInteger(twice(other) - self.twice_value)

    def __abs__(self):
        return HalfInteger(abs(self.twice_value))

    def __eq__(self, other):
        try:
            return self.twice_value == twice(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(("HalfInteger", self.twice_value))

    def __str__(self):
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"

    def __repr__(self):
        return f"HalfInteger({self})"


def twice(value) -> int:
    """Return 2*value as an exact int; reject values that are not multiples of 1/2."""
    if isinstance(value, HalfInteger):
        return value.twice_value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return 2 * int(value)
    if isinstance(value, Fraction):
        t = 2 * value
        if t.denominator != 1:
            raise ValueError(f"{value} is not a multiple of 1/2")
        return int(t)
    if isinstance(value, Real):
        t = 2.0 * float(value)
        r = round(t)
        if abs(t - r) > 1e-9:
            raise ValueError(f"{value} is not a multiple of 1/2")
        return int(r)
    raise TypeError(f"cannot interpret {value!r} as an angular momentum")


# ---------------------------------------------------------------------------
# Bessel functions

_J = {0: special.j0, 1: special.j1, 2: lambda x: special.jv(2, x)}
_K = {0: special.k0, 1: special.k1, 2: lambda x: special.kn(2, x)}


def _check_order(order):
    if order not in (0, 1, 2):
        raise ValueError(f"Bessel order {order!r} not supported (0, 1 or 2)")


def bessel_j(order: int, x):
    """Bessel function of the first kind J_order(x) for order 0, 1, 2."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_j requires x >= 0")
    out = _J[order](x)
    return out[()] if out.ndim == 0 else out


def bessel_k(order: int, x):
    """Modified Bessel function of the second kind K_order(x), x > 0."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bessel_k requires x > 0")
    out = _K[order](x)
    return out[()] if out.ndim == 0 else out


def bessel_j_prime(order: int, x):
    """dJ_order/dx via recurrences; J_1'(0) = 1/2 is taken as the series limit."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_j_prime requires x >= 0")
    if order == 0:
        out = -special.j1(x)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            if order == 1:
                out = np.where(x == 0, 0.5, special.j0(x) - special.j1(x) / x)
            else:
                out = np.where(x == 0, 0.0, special.j1(x) - 2.0 * special.jv(2, x) / x)
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out


def bessel_k_prime(order: int, x):
    """dK_order/dx; K_1' uses -(K_0 + K_2)/2."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("bessel_k_prime requires x > 0")
    if order == 0:
        out = -special.k1(x)
    elif order == 1:
        out = -0.5 * (special.k0(x) + special.kn(2, x))
    else:
        out = -special.k1(x) - 2.0 * special.kn(2, x) / x
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Angular momentum algebra. Arguments may be ints, floats, Fractions or
# HalfInteger; internally everything is a doubled integer.


def _fact(n2: int) -> int:
    # factorial of n2/2 where n2 is an even non-negative doubled integer
    return math.factorial(n2 // 2)


def _triangle_ok(a2: int, b2: int, c2: int) -> bool:
    if (a2 + b2 + c2) % 2:
        return False
    return abs(a2 - b2) <= c2 <= a2 + b2


def _delta_sq(a2: int, b2: int, c2: int) -> Fraction:
    return Fraction(
        _fact(a2 + b2 - c2) * _fact(a2 - b2 + c2) * _fact(-a2 + b2 + c2),
        _fact(a2 + b2 + c2 + 2),
    )


def _signed_sqrt(s: Fraction, p: Fraction) -> float:
    # s * sqrt(p) with one final rounding
    if s == 0 or p == 0:
        return 0.0
    mag = math.sqrt(s * s * p)
    return mag if s > 0 else -mag


@lru_cache(maxsize=65536)
def _threej2(j1, j2, j3, m1, m2, m3) -> float:
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if j < 0:
            raise ValueError("angular momenta must be non-negative")
        if abs(m) > j:
            raise ValueError(f"|m| > j in 3-j symbol: j={j / 2}, m={m / 2}")
        if (j - m) % 2:
            raise ValueError(f"j and m must be both integer or both half-integer: j={j / 2}, m={m / 2}")
    if m1 + m2 + m3 != 0 or not _triangle_ok(j1, j2, j3):
        return 0.0

    pref = _delta_sq(j1, j2, j3) * (
        _fact(j1 + m1) * _fact(j1 - m1) * _fact(j2 + m2) * _fact(j2 - m2) * _fact(j3 + m3) * _fact(j3 - m3)
    )
    # summation index t (doubled) over all non-negative factorial arguments
    tmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    tmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = Fraction(0)
    for t in range(tmin, tmax + 1, 2):
        den = (
            _fact(t)
            * _fact(j3 - j2 + t + m1)
            * _fact(j3 - j1 + t - m2)
            * _fact(j1 + j2 - j3 - t)
            * _fact(j1 - t - m1)
            * _fact(j2 - t + m2)
        )
        total += Fraction(-1 if (t // 2) % 2 else 1, den)
    if ((j1 - j2 - m3) // 2) % 2:
        total = -total
    return _signed_sqrt(total, pref)


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3-j symbol (j1 j2 j3; m1 m2 m3).

    Returns 0 when the projections do not sum to zero or the triangle rule
    fails. Raises ValueError if some |m| > j.
    """
    return _threej2(twice(j1), twice(j2), twice(j3), twice(m1), twice(m2), twice(m3))


@lru_cache(maxsize=65536)
def _sixj2(j1, j2, j3, j4, j5, j6) -> float:
    if min(j1, j2, j3, j4, j5, j6) < 0:
        raise ValueError("angular momenta must be non-negative")
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    if not all(_triangle_ok(*t) for t in triads):
        return 0.0
    pref = Fraction(1)
    for t in triads:
        pref *= _delta_sq(*t)
    sums = [sum(t) for t in triads]
    pairs = (j1 + j2 + j4 + j5, j2 + j3 + j5 + j6, j3 + j1 + j6 + j4)
    total = Fraction(0)
    for t in range(max(sums), min(pairs) + 1, 2):
        den = _fact(pairs[0] - t) * _fact(pairs[1] - t) * _fact(pairs[2] - t)
        for s in sums:
            den *= _fact(t - s)
        term = Fraction(_fact(t + 2), den)
        total += -term if (t // 2) % 2 else term
    return _signed_sqrt(total, pref)


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}; zero when any triad is broken."""
    return _sixj2(twice(j1), twice(j2), twice(j3), twice(j4), twice(j5), twice(j6))


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """<j1 m1; j2 m2 | J M> in the Condon-Shortley convention."""
    t = [twice(v) for v in (j1, m1, j2, m2, J, M)]
    if t[1] + t[3] != t[5]:
        return 0.0
    tj1, tm1, tj2, tm2, tJ, tM = t
    phase = ((tj1 - tj2 + tM) // 2) % 2
    value = math.sqrt(tJ + 1) * _threej2(tj1, tj2, tJ, tm1, tm2, -tM)
    return -value if phase else value
