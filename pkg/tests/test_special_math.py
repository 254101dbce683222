import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fibretrap.special_math import (
    HalfInteger,
    bessel_j,
    bessel_j_prime,
    bessel_k,
    bessel_k_prime,
    clebsch_gordan,
    twice,
    wigner_3j,
    wigner_6j,
)


def test_half_integer_arithmetic():
    h = HalfInteger.of(1.5)
    assert h.twice_value == 3 and str(h) == "3/2"
    assert HalfInteger.of(Fraction(1, 2)) + 1 == HalfInteger.of(1.5)
    assert -h == HalfInteger.of(-1.5)
    assert twice(2) == 4 and twice(0.5) == 1
    with pytest.raises(ValueError):
        HalfInteger.of(0.3)


@pytest.mark.parametrize("order", [0, 1, 2])
@pytest.mark.parametrize("x", [0.05, 0.7, 1.62, 3.9, 11.0])
def test_bessel_j_integral_representation(order, x):
    # J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt
    ref, _ = quad(lambda t: math.cos(order * t - x * math.sin(t)), 0, math.pi, epsabs=1e-15)
    assert bessel_j(order, x) == pytest.approx(ref / math.pi, abs=1e-13)


@pytest.mark.parametrize("order", [0, 1, 2])
@pytest.mark.parametrize("x", [0.05, 0.22, 0.95, 4.0, 20.0])
def test_bessel_k_against_mpmath(order, x):
    ref = float(mpmath.besselk(order, x))
    assert bessel_k(order, x) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("x", [0.1, 1.0, 2.5])
def test_bessel_derivatives(x):
    assert bessel_j_prime(1, x) == pytest.approx(float(mpmath.diff(lambda t: mpmath.besselj(1, t), x)), rel=1e-12)
    assert bessel_k_prime(1, x) == pytest.approx(float(mpmath.diff(lambda t: mpmath.besselk(1, t), x)), rel=1e-12)
    assert bessel_j_prime(1, 0.0) == 0.5


def test_threej_closed_forms():
    # (j j 0; m -m 0) = (-1)^(j-m) / sqrt(2j+1)
    for j2 in range(0, 9):
        for m2 in range(-j2, j2 + 1, 2):
            j, m = Fraction(j2, 2), Fraction(m2, 2)
            expect = (-1) ** int(j - m) / math.sqrt(j2 + 1)
            assert wigner_3j(j, j, 0, m, -m, 0) == pytest.approx(expect, abs=1e-14)
    # (1 1 1; 1 -1 0) = 1/sqrt(6), (1 1 2; 0 0 0) = sqrt(2/15)
    assert wigner_3j(1, 1, 1, 1, -1, 0) == pytest.approx(1 / math.sqrt(6), abs=1e-15)
    assert wigner_3j(1, 1, 2, 0, 0, 0) == pytest.approx(math.sqrt(2 / 15), abs=1e-15)
    assert wigner_3j(1, 1, 1, 0, 0, 0) == 0.0  # odd J sum with zero projections
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle violated


def test_threej_rejects_bad_projection():
    with pytest.raises(ValueError):
        wigner_3j(1, 1, 1, 2, -2, 0)


def test_sixj_closed_forms():
    # {a b c; 0 c b} = (-1)^(a+b+c) / sqrt((2b+1)(2c+1))
    for a, b, c in [(1, 1, 1), (2, 1, 1), (1, 2, 2), (Fraction(1, 2), Fraction(1, 2), 1), (3, 2, 1)]:
        expect = (-1) ** int(a + b + c) / math.sqrt((2 * b + 1) * (2 * c + 1))
        assert wigner_6j(a, b, c, 0, c, b) == pytest.approx(expect, abs=1e-14)
    assert wigner_6j(1, 1, 1, 1, 1, 1) == pytest.approx(1 / 6, abs=1e-15)
    assert wigner_6j(1, 1, 3, 1, 1, 1) == 0.0


js = st.integers(min_value=0, max_value=8)


@settings(max_examples=200, deadline=None)
@given(js, js, js, st.data())
def test_threej_symmetries(a2, b2, c2, data):
    if not (abs(a2 - b2) <= c2 <= a2 + b2 and (a2 + b2 + c2) % 2 == 0):
        return
    m1 = data.draw(st.sampled_from(range(-a2, a2 + 1, 2)))
    m2 = data.draw(st.sampled_from(range(-b2, b2 + 1, 2)))
    m3 = -m1 - m2
    if abs(m3) > c2:
        return
    j = [Fraction(a2, 2), Fraction(b2, 2), Fraction(c2, 2)]
    m = [Fraction(m1, 2), Fraction(m2, 2), Fraction(m3, 2)]
    w = wigner_3j(*j, *m)
    sign = (-1) ** int(sum(j))
    assert wigner_3j(j[1], j[2], j[0], m[1], m[2], m[0]) == pytest.approx(w, abs=1e-12)
    assert wigner_3j(j[1], j[0], j[2], m[1], m[0], m[2]) == pytest.approx(sign * w, abs=1e-12)
    assert wigner_3j(*j, *(-x for x in m)) == pytest.approx(sign * w, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6))
def test_threej_orthogonality(a2, b2):
    # sum_{m1 m2} (2j3+1) (j1 j2 j3; m1 m2 m3)(j1 j2 j3'; m1 m2 m3') = delta delta
    ja, jb = Fraction(a2, 2), Fraction(b2, 2)
    for c2 in range(abs(a2 - b2), a2 + b2 + 1, 2):
        for m32 in range(-c2, c2 + 1, 2):
            total = 0.0
            for m12 in range(-a2, a2 + 1, 2):
                m22 = m32 - m12
                if abs(m22) > b2:
                    continue
                w = wigner_3j(ja, jb, Fraction(c2, 2), Fraction(m12, 2), Fraction(m22, 2), Fraction(-m32, 2))
                total += (c2 + 1) * w * w
            assert total == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_sixj_orthogonality(a2, b2, d2, e2):
    # sum_x (2x+1)(2f+1) {a b x; d e f}{a b x; d e f'} = delta_ff'
    a, b, d, e = (Fraction(v, 2) for v in (a2, b2, d2, e2))
    fs = [Fraction(f2, 2) for f2 in range(0, 13)]
    xs = [Fraction(x2, 2) for x2 in range(0, 13)]
    for f in fs:
        total = sum((2 * x + 1) * (2 * f + 1) * wigner_6j(a, b, x, d, e, f) ** 2 for x in xs)
        if total:
            assert float(total) == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=6, max_size=6))
def test_sixj_column_permutation(t):
    j = [Fraction(v, 2) for v in t]
    w = wigner_6j(*j)
    assert wigner_6j(j[1], j[0], j[2], j[4], j[3], j[5]) == pytest.approx(w, abs=1e-12)
    assert wigner_6j(j[3], j[4], j[2], j[0], j[1], j[5]) == pytest.approx(w, abs=1e-12)


def test_clebsch_gordan_completeness():
    j1, j2 = Fraction(3, 2), 1
    for m1 in np.arange(-1.5, 2, 1.0):
        for m2 in (-1, 0, 1):
            total = 0.0
            for J in (Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)):
                M = Fraction(m1).limit_denominator(2) + m2
                if abs(M) <= J:
                    total += clebsch_gordan(j1, Fraction(m1).limit_denominator(2), j2, m2, J, M) ** 2
            assert total == pytest.approx(1.0, abs=1e-12)
    # <1/2 1/2, 1/2 -1/2 | 1 0> = 1/sqrt(2)
    h = Fraction(1, 2)
    assert clebsch_gordan(h, h, h, -h, 1, 0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert clebsch_gordan(h, h, h, -h, 0, 0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
