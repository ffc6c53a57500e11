"""Sequence transforms and the constructive steps used to build joint witnesses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ..cfrac import (
    CertifiedValue,
    approx_for_horizon,
    approximant,
    as_real,
    cf_from_rational,
    circle_norm,
    frac_part,
    qnorm,
    real_lincomb,
    real_scale,
)
from ..errors import Anomaly, DimensionMismatch, HypothesisViolation, InsufficientPrecision
from ..torus import (
    PolynomialSeq,
    TorusVector,
    ExpSumSeq,
    ExpTerm,
    pascal_recurrence_check,
    poly_eval_mod1,
    skew_component_poly,
    skew_iterate,
)
from . import sequences as S
from .engine import multiplier_bound

#: multiplier bounds above this are searched along convergents first
LINEAR_LIFT_LIMIT = 4096


def _poly_shift(coeffs, l: int) -> tuple:
    d = len(coeffs) - 1
    return tuple(real_lincomb([(math.comb(i, s) * l ** (i - s), coeffs[i]) for i in range(s, d + 1)])
                 for s in range(d + 1))


def transform_shift(seq, l: int):
    """n -> w_{n+l}."""
    if l < 0:
        raise ValueError("shift must be a non-negative integer")
    if l == 0:
        return seq
    if isinstance(seq, S.Polynomial):
        return S.Polynomial(PolynomialSeq(_poly_shift(seq.poly.coeffs, l)))
    if isinstance(seq, S.Affine):
        return S.Affine(seq.alpha, real_lincomb([(1, seq.beta), (l, seq.alpha)]))
    if isinstance(seq, (S.SkewOrbitComponent, S.SkewOrbitFull)) and isinstance(seq.T.alpha, Fraction):
        start = skew_iterate(seq.T, seq.omega, l)
        if isinstance(seq, S.SkewOrbitFull):
            return S.SkewOrbitFull(seq.T, start)
        return S.SkewOrbitComponent(seq.T, start, seq.j)
    if isinstance(seq, S.Table):
        if l >= len(seq.values):
            raise ValueError("shift runs past the end of the table")
        return S.Table(seq.values[l:], seq.space)
    if isinstance(seq, S.Joint):
        return S.Joint(tuple(transform_shift(m, l) for m in seq.members))
    return S.Shifted(seq, l)


def transform_dilate(seq, l: int):
    """n -> w_{n*l}."""
    if l < 1:
        raise ValueError("dilation factor must be a positive integer")
    if l == 1:
        return seq
    if isinstance(seq, S.Polynomial):
        return S.Polynomial(PolynomialSeq(tuple(real_scale(a, l**i)
                                                for i, a in enumerate(seq.poly.coeffs))))
    if isinstance(seq, S.Affine):
        return S.Affine(real_scale(seq.alpha, l), seq.beta)
    if isinstance(seq, S.ExpSum):
        return S.ExpSum(ExpSumSeq(tuple(ExpTerm(t.c_re, t.c_im, real_scale(t.alpha, l))
                                        for t in seq.seq.terms)))
    if isinstance(seq, S.Table):
        return S.Table(seq.values[::l], seq.space)
    if isinstance(seq, S.Joint):
        return S.Joint(tuple(transform_dilate(m, l) for m in seq.members))
    return S.Dilated(seq, l)


def transform_intmul(seq, l: int):
    """n -> l * w_n mod 1 (circle- or torus-valued sequences only)."""
    if seq.space not in (S.CIRCLE, S.TORUS):
        raise DimensionMismatch(f"integer multiples are undefined on a {seq.space} space")
    if isinstance(seq, S.Polynomial):
        return S.Polynomial(PolynomialSeq(tuple(real_scale(a, l) for a in seq.poly.coeffs)))
    if isinstance(seq, S.Affine):
        return S.Affine(real_scale(seq.alpha, l), real_scale(seq.beta, l))
    if isinstance(seq, S.Table):
        if seq.space == S.CIRCLE:
            return S.Table(tuple(l * v for v in seq.values), seq.space)
        return S.Table(tuple(TorusVector(tuple(l * a for a in v.nums), v.den) for v in seq.values),
                       seq.space)
    return S.IntMultiple(seq, l)


@dataclass(frozen=True)
class LiftResult:
    d: int
    q: int
    norm: CertifiedValue
    bound: int
    within_inverse_epsilon: bool


def _certified_norm(alpha, q: int, eps: Fraction):
    """(status, value) with status 'below', 'above' or 'unknown' relative to eps."""
    c = qnorm(alpha, q)
    if c.value + c.error < eps:
        return "below", c
    if c.value - c.error >= eps:
        return "above", c
    gap = abs(c.value - eps)
    tol = gap / 2 if gap else eps / 2**20
    try:
        a = approx_for_horizon(alpha, q - 1, 1, tol)
    except InsufficientPrecision:
        return "unknown", c
    c = CertifiedValue(circle_norm(q * a.value), q * a.error_bound)
    if c.value + c.error < eps:
        return "below", c
    if c.value - c.error >= eps:
        return "above", c
    return "unknown", c


def _lift_by_convergents(base_q: int, alpha, eps: Fraction, bound: int) -> LiftResult | None:
    """Smallest d via the convergents of a rational estimate b of ``base_q * alpha``.

    For d below a convergent denominator d_m of b, <d b> >= <d_{m-1} b>, so the
    first convergent with <d_m b> < eps is the smallest multiplier for b.  The
    answer transfers to alpha once the estimation error is separated from eps;
    the estimate is sharpened a few times before giving up with None.
    """
    for shift in (8, 24, 64):
        try:
            a = approx_for_horizon(alpha, bound * base_q, 1, eps / 2**shift)
        except InsufficientPrecision:
            return None
        b = frac_part(base_q * a.value)
        err = a.error_bound * base_q
        prev_norm = None
        for d in cf_from_rational(b).denominators:
            if d > bound:
                break
            norm = circle_norm(d * b)
            if norm + d * err < eps:
                # every smaller multiplier must stay certifiably at or above eps
                if prev_norm is None or prev_norm - d * err >= eps:
                    return LiftResult(d, d * base_q, CertifiedValue(norm, d * err), bound, d <= 1 / eps)
                break
            if norm - d * err < eps:
                break
            prev_norm = norm if prev_norm is None else min(prev_norm, norm)
        else:
            return None
    return None


def addition_lift(base_q: int, alpha, epsilon) -> LiftResult:
    """Smallest d with <d * base_q * alpha> < epsilon."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if base_q < 1:
        raise ValueError("base_q must be a positive integer")
    alpha = as_real(alpha)
    bound = multiplier_bound(eps)
    if bound > LINEAR_LIFT_LIMIT:
        fast = _lift_by_convergents(base_q, alpha, eps, bound)
        if fast is not None:
            return fast
    for d in range(1, bound + 1):
        status, c = _certified_norm(alpha, d * base_q, eps)
        if status == "below":
            return LiftResult(d, d * base_q, c, bound, d <= 1 / eps)
        if status == "unknown":
            raise InsufficientPrecision(
                f"cannot decide <{d * base_q} alpha> against {eps}: estimate {c.value} +/- {c.error}")
    raise Anomaly(f"no multiplier d <= {bound} brings <d * {base_q} * alpha> below {eps}")


def rational_scale(seq, rho):
    """n -> rho * p(n) mod 1 for sequences satisfying an integer recurrence."""
    rho = Fraction(rho)
    if isinstance(seq, S.SkewOrbitComponent):
        seq = S.Polynomial(skew_component_poly(seq.T, seq.omega, seq.j))
    if isinstance(seq, S.Polynomial):
        p = seq.poly
        if p.is_rational and not pascal_recurrence_check(p, range(p.degree + 1, p.degree + 12)):
            raise Anomaly("a polynomial failed the Pascal recurrence")
        return S.Polynomial(PolynomialSeq(tuple(real_scale(a, rho) for a in p.coeffs)))
    if isinstance(seq, S.Affine):
        return S.Affine(real_scale(seq.alpha, rho), real_scale(seq.beta, rho))
    if isinstance(seq, S.Table) and seq.space == S.CIRCLE:
        d = seq.recurrence_degree
        if d is None:
            raise HypothesisViolation("table carries no declared recurrence")
        if len(seq.values) > d + 1 and not pascal_recurrence_check(
                seq.values, range(d + 1, len(seq.values)), degree=d):
            raise HypothesisViolation(f"table values violate the order-{d + 1} Pascal recurrence")
        return S.Table(tuple(rho * v for v in seq.values), S.CIRCLE, d)
    raise HypothesisViolation(f"no integer recurrence known for {type(seq).__name__}")


def hompoly_expand_check(a_k, k: int, q: int, n_range: Iterable[int]) -> bool:
    """Check <a_k (n+q)^k - a_k n^k> = <sum_{j<k} a_k C(k,j) n^j q^(k-j)> on n_range.

    Both sides are evaluated independently from the deepest approximant of
    ``a_k``; agreement is required within the sum of their error bounds.
    """
    if k < 1:
        raise ValueError("degree must be positive")
    a_k = as_real(a_k)
    p = PolynomialSeq((Fraction(0),) * k + (a_k,))
    a = approximant(a_k)
    for n in n_range:
        left_hi, left_lo = poly_eval_mod1(p, n + q), poly_eval_mod1(p, n)
        lhs = circle_norm(left_hi.value - left_lo.value)
        lhs_err = left_hi.error + left_lo.error
        weight = sum(math.comb(k, j) * n**j * q ** (k - j) for j in range(k))
        rhs = circle_norm(a.value * weight)
        rhs_err = a.error_bound * weight
        slack = lhs_err + rhs_err
        if slack >= Fraction(1, 4):
            raise InsufficientPrecision(f"error {slack} too large to compare at n = {n}")
        if abs(lhs - rhs) > slack:
            return False
    return True
