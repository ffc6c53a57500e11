"""Exact torus geometry, the skew-shift and polynomial sequences mod 1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from ._interval import TWO_PI_UP, Box, abs_upper, scaled_cis, sqrt_lower, sqrt_upper
from .cfrac import (
    ZERO,
    CertifiedValue,
    RealSpec,
    approx_for_horizon,
    approximant,
    as_real,
    circle_norm,
    frac_part,
    real_lincomb,
)
from .errors import DimensionMismatch, InsufficientPrecision


@dataclass(frozen=True)
class TorusVector:
    """Point of T^k stored as integer numerators over one reduced denominator."""

    nums: tuple[int, ...]
    den: int = 1

    def __post_init__(self):
        den = int(self.den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        nums = tuple(int(a) % den for a in self.nums)
        if not nums:
            raise ValueError("a torus vector needs at least one component")
        g = math.gcd(den, *nums)
        object.__setattr__(self, "nums", tuple(a // g for a in nums))
        object.__setattr__(self, "den", den // g)

    @classmethod
    def of(cls, components: Iterable) -> "TorusVector":
        fr = [Fraction(c) for c in components]
        den = math.lcm(*(f.denominator for f in fr)) if fr else 1
        return cls(tuple(f.numerator * (den // f.denominator) for f in fr), den)

    @classmethod
    def zero(cls, k: int) -> "TorusVector":
        return cls((0,) * k, 1)

    @property
    def k(self) -> int:
        return len(self.nums)

    @property
    def components(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.den) for a in self.nums)

    def __getitem__(self, j: int) -> Fraction:
        return Fraction(self.nums[j], self.den)

    def _aligned(self, other: "TorusVector") -> tuple[int, list[int], list[int]]:
        if self.k != other.k:
            raise DimensionMismatch(f"dimensions {self.k} and {other.k} differ")
        L = math.lcm(self.den, other.den)
        a, b = L // self.den, L // other.den
        return L, [x * a for x in self.nums], [y * b for y in other.nums]

    def __add__(self, other: "TorusVector") -> "TorusVector":
        L, x, y = self._aligned(other)
        return TorusVector(tuple(u + v for u, v in zip(x, y)), L)

    def __sub__(self, other: "TorusVector") -> "TorusVector":
        L, x, y = self._aligned(other)
        return TorusVector(tuple(u - v for u, v in zip(x, y)), L)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def torus_dist(x: TorusVector, y: TorusVector) -> Fraction:
    """Sum of componentwise circle norms."""
    L, a, b = x._aligned(y)
    total = 0
    for u, v in zip(a, b):
        d = (u - v) % L
        total += min(d, L - d)
    return Fraction(total, L)


@dataclass(frozen=True)
class SkewShift:
    """(w1, ..., wk) -> (w1 + alpha, w2 + w1, ..., wk + w(k-1))."""

    k: int
    alpha: RealSpec

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("the skew-shift needs k >= 2")
        object.__setattr__(self, "alpha", as_real(self.alpha))

    @cached_property
    def approx(self):
        """Deepest convergent of alpha, computed once per map."""
        return approximant(self.alpha)


def _check_dim(T: SkewShift, omega: TorusVector) -> None:
    if omega.k != T.k:
        raise DimensionMismatch(f"point has dimension {omega.k}, map has {T.k}")


def skew_apply(T: SkewShift, omega: TorusVector) -> TorusVector:
    """One step of the map.  A prefix-valued alpha is replaced by its deepest convergent."""
    _check_dim(T, omega)
    a = T.approx
    L = math.lcm(omega.den, a.q)
    s = L // omega.den
    x = [v * s for v in omega.nums]
    out = [x[0] + a.p * (L // a.q)]
    out.extend(x[i] + x[i - 1] for i in range(1, len(x)))
    return TorusVector(tuple(out), L)


def skew_iterate(T: SkewShift, omega: TorusVector, n: int) -> TorusVector:
    for _ in range(n):
        omega = skew_apply(T, omega)
    return omega


def orbit_component_closed_form(T: SkewShift, omega: TorusVector, n: int, j: int,
                                tol=None) -> CertifiedValue:
    """j-th component of T^n(omega): C(n,j) alpha + sum_i C(n, j-i) omega_i mod 1."""
    _check_dim(T, omega)
    if not 1 <= j <= T.k:
        raise IndexError(f"component {j} outside 1..{T.k}")
    if n < 0:
        raise ValueError("n must be non-negative")
    a = T.approx if tol is None else approx_for_horizon(T.alpha, n, j, tol)
    L = math.lcm(omega.den, a.q)
    s = L // omega.den
    num = math.comb(n, j) * a.p * (L // a.q)
    num += sum(math.comb(n, j - i) * omega.nums[i - 1] * s for i in range(1, j + 1))
    err = math.comb(n, j) * a.error_bound if a.error_bound else ZERO
    return CertifiedValue(Fraction(num % L, L), err)


def orbit_closed_form(T: SkewShift, omega: TorusVector, n: int) -> TorusVector:
    """T^n(omega) from the closed form, on the deepest convergent of alpha."""
    return TorusVector.of(orbit_component_closed_form(T, omega, n, j).value
                          for j in range(1, T.k + 1))


@lru_cache(maxsize=None)
def binomial_poly(m: int) -> tuple[Fraction, ...]:
    """Monomial coefficients of n -> C(n, m)."""
    coeffs = [Fraction(1)]
    for t in range(m):
        # multiply by (n - t)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] += c
            nxt[i] -= t * c
        coeffs = nxt
    f = math.factorial(m)
    return tuple(c / f for c in coeffs)


@dataclass(frozen=True)
class LinearForm:
    """``alpha_coeff * alpha + sum(omega_coeffs[i] * omega_{i+1})``."""

    alpha_coeff: Fraction
    omega_coeffs: tuple[Fraction, ...]

    def evaluate(self, alpha, omega: Sequence) -> RealSpec:
        terms = [(self.alpha_coeff, alpha)]
        terms.extend((c, w) for c, w in zip(self.omega_coeffs, omega))
        return real_lincomb(terms)

    def nonzero_omegas(self) -> list[int]:
        """1-based indices of the omega entries with non-zero coefficient."""
        return [i + 1 for i, c in enumerate(self.omega_coeffs) if c != 0]


def skew_coefficient_forms(j: int, k: int) -> list[LinearForm]:
    """Monomial coefficients of n -> t(n, j, omega) as linear forms in (alpha, omega)."""
    if not 1 <= j <= k:
        raise IndexError(f"component {j} outside 1..{k}")
    alpha_part = list(binomial_poly(j))
    omega_parts = [[ZERO] * (j + 1) for _ in range(k)]
    for i in range(1, j + 1):
        for deg, c in enumerate(binomial_poly(j - i)):
            omega_parts[i - 1][deg] += c
    return [LinearForm(alpha_part[d], tuple(omega_parts[i][d] for i in range(k)))
            for d in range(j + 1)]


@dataclass(frozen=True)
class PolynomialSeq:
    """n -> sum_i coeffs[i] * n**i (read mod 1 when used on the circle)."""

    coeffs: tuple[RealSpec, ...]

    def __post_init__(self):
        coeffs = [as_real(c) for c in self.coeffs] or [Fraction(0)]
        while len(coeffs) > 1 and isinstance(coeffs[-1], Fraction) and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def exact(self, n: int) -> Fraction:
        if not self.is_rational:
            raise TypeError("exact evaluation needs rational coefficients")
        return sum((c * n**i for i, c in enumerate(self.coeffs)), Fraction(0))


def skew_component_poly(T: SkewShift, omega: TorusVector, j: int) -> PolynomialSeq:
    _check_dim(T, omega)
    forms = skew_coefficient_forms(j, T.k)
    return PolynomialSeq(tuple(f.evaluate(T.alpha, omega.components) for f in forms))


def poly_eval_mod1(p: PolynomialSeq, n: int, tol=None) -> CertifiedValue:
    """p(n) mod 1 with the error inherited from the coefficient approximations."""
    share = None if tol is None else Fraction(tol) / (p.degree + 1)
    total, error = Fraction(0), Fraction(0)
    for i, c in enumerate(p.coeffs):
        a = approximant(c) if share is None else approx_for_horizon(c, n, i, share)
        total += a.value * n**i
        error += a.error_bound * n**i
    return CertifiedValue(frac_part(total), error)


def pascal_recurrence_check(p, n_range: Iterable[int], degree: int | None = None) -> bool:
    """Does ``sum_i (-1)^i C(d+1, i) p(n-i) = 0`` hold exactly for every n in range?

    ``p`` is a rational :class:`PolynomialSeq` or an indexable table of values,
    in which case ``degree`` must be given.
    """
    if isinstance(p, PolynomialSeq):
        d = p.degree if degree is None else degree
        value = p.exact
    else:
        if degree is None:
            raise ValueError("a table needs an explicit degree")
        d = degree
        table = p

        def value(n):
            return Fraction(table[n])
    weights = [(-1) ** i * math.comb(d + 1, i) for i in range(d + 2)]
    for n in n_range:
        if n < d + 1:
            raise ValueError(f"index {n} is below the recurrence order {d + 1}")
        if sum(w * value(n - i) for i, w in enumerate(weights)) != 0:
            return False
    return True


def _invert(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class VandermondeSystem:
    """A[i][j] = i**j for 0 <= i, j <= d, with its exact inverse."""

    d: int
    A: tuple[tuple[int, ...], ...]
    A_inv: tuple[tuple[Fraction, ...], ...]


@lru_cache(maxsize=None)
def vandermonde(d: int) -> VandermondeSystem:
    if d < 0:
        raise ValueError("degree must be non-negative")
    A = [[i**j for j in range(d + 1)] for i in range(d + 1)]
    inv = _invert([[Fraction(v) for v in row] for row in A])
    return VandermondeSystem(d, tuple(map(tuple, A)), tuple(map(tuple, inv)))


def vandermonde_extract(samples: Sequence, sys: VandermondeSystem) -> list[RealSpec]:
    """Recover ``(a_0, a_1 n, ..., a_d n**d)`` from ``p(0), p(n), ..., p(d n)``."""
    if len(samples) != sys.d + 1:
        raise DimensionMismatch(f"expected {sys.d + 1} samples, got {len(samples)}")
    return [real_lincomb(zip(row, samples)) for row in sys.A_inv]


@dataclass(frozen=True)
class ExpTerm:
    c_re: Fraction
    c_im: Fraction
    alpha: RealSpec

    def __post_init__(self):
        object.__setattr__(self, "c_re", Fraction(self.c_re))
        object.__setattr__(self, "c_im", Fraction(self.c_im))
        object.__setattr__(self, "alpha", as_real(self.alpha))

    @property
    def abs_upper(self) -> Fraction:
        return abs_upper(self.c_re, self.c_im)


@dataclass(frozen=True)
class ExpSumSeq:
    """n -> sum_j c_j exp(2 pi i alpha_j n)."""

    terms: tuple[ExpTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("an exponential sum needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def mass(self) -> Fraction:
        """Upper bound on sum_j |c_j| (hence on sup |a(n)|)."""
        return sum((t.abs_upper for t in self.terms), Fraction(0))


@dataclass(frozen=True)
class CertifiedComplex:
    re: Fraction
    im: Fraction
    error: Fraction

    def dist_bounds(self, other: "CertifiedComplex") -> tuple[Fraction, Fraction]:
        """Certified (lower, upper) bounds on ``|self - other|``."""
        d2 = (self.re - other.re) ** 2 + (self.im - other.im) ** 2
        slack = self.error + other.error
        return max(Fraction(0), sqrt_lower(d2) - slack), sqrt_upper(d2) + slack


def exp_sum_eval(s: ExpSumSeq, n: int, tol=Fraction(1, 10**12), *, max_prec: int = 4096) -> CertifiedComplex:
    """Value of the sum at n within ``tol`` (l1 radius around a rational centre)."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    live = [t for t in s.terms if t.c_re != 0 or t.c_im != 0]
    phase_err = Fraction(0)
    points = []
    for t in live:
        budget = tol / (2 * len(live) * TWO_PI_UP * t.abs_upper)
        a = approx_for_horizon(t.alpha, n, 1, budget)
        points.append((t, frac_part(a.value * n)))
        phase_err += t.abs_upper * TWO_PI_UP * n * a.error_bound
    prec = 80
    while True:
        box = Box.point(0, 0)
        for t, x in points:
            box = box + scaled_cis(t.c_re, t.c_im, x, prec)
        if box.radius() + phase_err <= tol:
            re, im = box.mid()
            return CertifiedComplex(re, im, box.radius() + phase_err)
        if prec >= max_prec:
            raise InsufficientPrecision(f"interval radius {box.radius()} above {tol} at {prec} bits")
        prec *= 2


def exp_shift_bound(s: ExpSumSeq, q: int) -> CertifiedValue:
    """Bound on sup_n |a(n+q) - a(n)| <= sum_j |c_j| 2 pi <q alpha_j>, independent of n.

    ``value`` holds the bound on the approximants, ``error`` the contribution
    of the approximation errors.
    """
    value, error = Fraction(0), Fraction(0)
    for t in s.terms:
        if t.c_re == 0 and t.c_im == 0:
            continue
        a = approximant(t.alpha)
        w = t.abs_upper * TWO_PI_UP
        value += w * circle_norm(q * a.value)
        error += w * q * a.error_bound
    return CertifiedValue(value, error)
