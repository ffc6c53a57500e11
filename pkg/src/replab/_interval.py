"""Rational enclosures for square roots and the complex exponential."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv
from mpmath.libmp import to_rational

#: rational upper bound for 2*pi (2 * 355/113)
TWO_PI_UP = Fraction(710, 113)
PI_UP = Fraction(355, 113)


def sqrt_upper(x: Fraction, bits: int = 64) -> Fraction:
    x = Fraction(x)
    if x <= 0:
        return Fraction(0)
    scale = 1 << (2 * bits)
    m = (x.numerator * scale) // x.denominator
    return Fraction(math.isqrt(m) + 1, 1 << bits)


def sqrt_lower(x: Fraction, bits: int = 64) -> Fraction:
    x = Fraction(x)
    if x <= 0:
        return Fraction(0)
    scale = 1 << (2 * bits)
    m = (x.numerator * scale) // x.denominator
    return Fraction(math.isqrt(m), 1 << bits)


def abs_upper(re: Fraction, im: Fraction) -> Fraction:
    if im == 0:
        return abs(Fraction(re))
    if re == 0:
        return abs(Fraction(im))
    return sqrt_upper(Fraction(re) ** 2 + Fraction(im) ** 2)


def _endpoints(x) -> tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    a, b = to_rational(lo), to_rational(hi)
    return Fraction(int(a[0]), int(a[1])), Fraction(int(b[0]), int(b[1]))


def cis_enclosure(x: Fraction, prec: int = 80) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Rational bounds ``(cos_lo, cos_hi, sin_lo, sin_hi)`` for angle ``2*pi*x``."""
    x = Fraction(x)
    x -= math.floor(x)
    old = iv.prec
    iv.prec = prec
    try:
        t = iv.mpf(x.numerator) / iv.mpf(x.denominator)
        angle = 2 * iv.pi * t
        c_lo, c_hi = _endpoints(iv.cos(angle))
        s_lo, s_hi = _endpoints(iv.sin(angle))
    finally:
        iv.prec = old
    return c_lo, c_hi, s_lo, s_hi


@dataclass(frozen=True)
class Box:
    """Axis-aligned rational rectangle in the complex plane."""

    re_lo: Fraction
    re_hi: Fraction
    im_lo: Fraction
    im_hi: Fraction

    def __add__(self, other: "Box") -> "Box":
        return Box(self.re_lo + other.re_lo, self.re_hi + other.re_hi,
                   self.im_lo + other.im_lo, self.im_hi + other.im_hi)

    @classmethod
    def point(cls, re, im) -> "Box":
        re, im = Fraction(re), Fraction(im)
        return cls(re, re, im, im)

    def mid(self) -> tuple[Fraction, Fraction]:
        return (self.re_lo + self.re_hi) / 2, (self.im_lo + self.im_hi) / 2

    def radius(self) -> Fraction:
        """l1 half-width; an upper bound on the Euclidean radius."""
        return (self.re_hi - self.re_lo) / 2 + (self.im_hi - self.im_lo) / 2


def _scale(lo: Fraction, hi: Fraction, c: Fraction) -> tuple[Fraction, Fraction]:
    a, b = lo * c, hi * c
    return (a, b) if a <= b else (b, a)


def scaled_cis(c_re: Fraction, c_im: Fraction, x: Fraction, prec: int = 80) -> Box:
    """Enclosure of ``c * exp(2 pi i x)``."""
    c_lo, c_hi, s_lo, s_hi = cis_enclosure(x, prec)
    rr = _scale(c_lo, c_hi, c_re)
    ii = _scale(s_lo, s_hi, c_im)
    ri = _scale(s_lo, s_hi, c_re)
    ir = _scale(c_lo, c_hi, c_im)
    return Box(rr[0] - ii[1], rr[1] - ii[0], ri[0] + ir[0], ri[1] + ir[1])
