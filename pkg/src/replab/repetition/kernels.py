"""Compiled evaluators behind the witness search.

Polynomial-type sequences (polynomials, rotations, skew-shift orbits and their
transforms) are compiled to coefficient lists in the binomial basis
``n -> sum_s b_s C(n, s)``.  Integer-valued basis polynomials keep the
coefficients of shifted differences small exactly when the Diophantine
structure of ``alpha`` makes them so, which is what the certified bound
``sum_s |f_s| C(H, s)`` exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .._interval import sqrt_lower, sqrt_upper
from ..cfrac import (
    ContinuedFraction,
    RealSpec,
    approx_for_horizon,
    approximant,
    circle_norm,
    frac_part,
    real_lincomb,
    real_scale,
)
from ..errors import DimensionMismatch, HorizonExceeded, InsufficientPrecision
from ..torus import (
    ExpSumSeq,
    TorusVector,
    binomial_poly,
    exp_shift_bound,
    exp_sum_eval,
    torus_dist,
)
from . import sequences as S

WITNESS = "witness"
REJECT = "reject"
INDETERMINATE = "indeterminate"
IMPRECISE = "imprecise"

#: extra bits of precision tried in turn when a comparison straddles epsilon
_BIT_LADDER = (12, 40, 120)


@dataclass(frozen=True)
class Outcome:
    """Result of testing one candidate q.

    ``upper`` is the computed block maximum (or bound) and ``budget`` the
    approximation error, so ``m(q) <= upper + budget``.  ``lower`` is a
    certified lower bound on ``m(q)`` when one was established.
    """

    q: int
    status: str
    upper: Fraction | None = None
    budget: Fraction = Fraction(0)
    lower: Fraction | None = None
    method: str = ""
    note: str = ""


@dataclass(frozen=True)
class BlockDist:
    """``m(q)`` estimate: ``|m(q) - value| <= error_budget`` for ``kind == 'scan'``;
    ``m(q) <= value + error_budget`` for ``kind == 'bound'``."""

    value: Fraction
    error_budget: Fraction
    horizon: int
    kind: str = "scan"

    @property
    def upper(self) -> Fraction:
        return self.value + self.error_budget


def _probe_points(H: int, count: int = 32) -> list[int]:
    pts = {0, H, H // 2}
    if H > 0:
        step = max(1, H // count)
        pts.update(range(0, H + 1, step))
    return sorted(pts)


@lru_cache(maxsize=None)
def _mono_to_binom(i: int) -> tuple[int, ...]:
    """n**i = sum_s c_s C(n, s); c_s = s! * S(i, s)."""
    # Stirling numbers of the second kind by the usual recurrence
    row = [1]
    for m in range(1, i + 1):
        nxt = [0] * (m + 1)
        for s in range(1, m + 1):
            nxt[s] = s * (row[s] if s < len(row) else 0) + row[s - 1]
        row = nxt
    return tuple(row[s] * math.factorial(s) for s in range(i + 1))


def _combine(terms: list[tuple]) -> RealSpec:
    terms = [(c, x) for c, x in terms if c != 0]
    if not terms:
        return Fraction(0)
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    return real_lincomb(terms)


def monomial_to_binomial(coeffs) -> tuple[RealSpec, ...]:
    d = len(coeffs) - 1
    out = []
    for s in range(d + 1):
        out.append(_combine([(_mono_to_binom(i)[s], coeffs[i]) for i in range(s, d + 1)]))
    return tuple(out)


def binomial_shift(coeffs, l: int) -> tuple[RealSpec, ...]:
    """Coefficients of n -> p(n + l) via C(n+l, t) = sum_s C(n, s) C(l, t-s)."""
    d = len(coeffs) - 1
    return tuple(_combine([(math.comb(l, t - s), coeffs[t]) for t in range(s, d + 1)])
                 for s in range(d + 1))


@lru_cache(maxsize=None)
def _dilate_matrix(t: int, l: int) -> tuple[int, ...]:
    """C(l n, t) = sum_s g_s C(n, s) with integer g_s."""
    mono = binomial_poly(t)
    out = []
    for s in range(t + 1):
        g = sum(mono[i] * l**i * _mono_to_binom(i)[s] for i in range(s, t + 1))
        assert g.denominator == 1
        out.append(int(g))
    return tuple(out)


def binomial_dilate(coeffs, l: int) -> tuple[RealSpec, ...]:
    d = len(coeffs) - 1
    return tuple(_combine([(_dilate_matrix(t, l)[s], coeffs[t]) for t in range(s, d + 1)])
                 for s in range(d + 1))


def skew_binomial(T, omega, j: int) -> tuple[RealSpec, ...]:
    """t(n, j) = alpha C(n, j) + sum_i omega_i C(n, j-i)."""
    comps = omega.components
    return tuple(comps[j - s - 1] for s in range(j)) + (T.alpha,)


class PolyKernel:
    """Sum-metric sequence on a product of circles with polynomial components."""

    def __init__(self, components, governing=()):
        self.components = tuple(tuple(c) for c in components)
        self.governing = tuple(governing)
        self._cache: dict = {}

    @property
    def diameter(self) -> Fraction:
        return Fraction(len(self.components), 2)

    # -- transforms -------------------------------------------------------
    def shifted(self, l: int) -> "PolyKernel":
        return PolyKernel([binomial_shift(c, l) for c in self.components], self.governing)

    def dilated(self, l: int) -> "PolyKernel":
        return PolyKernel([binomial_dilate(c, l) for c in self.components],
                          [real_scale(g, l) for g in self.governing])

    def multiplied(self, l: int) -> "PolyKernel":
        return PolyKernel([tuple(real_scale(b, l) for b in c) for c in self.components],
                          [real_scale(g, l) for g in self.governing])

    # -- compilation ------------------------------------------------------
    def _compiled(self, N: int, bits: int):
        Nb = 1 << max(N, 1).bit_length()
        key = (Nb, bits)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        count = sum(len(c) for c in self.components)
        tol = Fraction(1, (1 << bits) * count)
        approx = [[approx_for_horizon(b, Nb, s, tol) for s, b in enumerate(c)]
                  for c in self.components]
        D = math.lcm(*(a.q for row in approx for a in row))
        nums = [[(a.p * (D // a.q)) % D for a in row] for row in approx]
        errs = [[a.error_bound for a in row] for row in approx]
        hit = (D, nums, errs)
        self._cache[key] = hit
        return hit

    @staticmethod
    def _budget(errs, N: int) -> Fraction:
        return sum((e * math.comb(N, s) for row in errs for s, e in enumerate(row) if s and e),
                   Fraction(0))

    @staticmethod
    def _diffs(nums, D: int, q: int) -> list[list[int]]:
        out = []
        cq = [math.comb(q, t) for t in range(max(len(r) for r in nums) + 1)]
        for row in nums:
            d = len(row) - 1
            out.append([sum(row[s + t] * cq[t] for t in range(1, d - s + 1)) % D for s in range(d)])
        return out

    @staticmethod
    def _dist_num(diffs, D: int, n: int) -> int:
        total = 0
        for f in diffs:
            v = sum(c * math.comb(n, s) for s, c in enumerate(f)) % D
            total += min(v, D - v)
        return total

    @staticmethod
    def _bound_num(diffs, D: int, H: int) -> int:
        half = D // 2
        total = 0
        for f in diffs:
            for s, c in enumerate(f):
                total += (c if c <= half else D - c) * math.comb(H, s)
        return total

    @staticmethod
    def _scan(diffs, D: int, H: int, threshold: int | None):
        """Forward-difference walk over n = 0..H; returns (max numerator, first n at threshold)."""
        tables = [list(f) for f in diffs if f]
        half = D // 2
        best = 0
        if not tables:
            return 0, None
        for n in range(H + 1):
            total = 0
            for beta in tables:
                v = beta[0]
                total += v if v <= half else D - v
            if total > best:
                best = total
                if threshold is not None and total >= threshold:
                    return best, n
            for beta in tables:
                for i in range(len(beta) - 1):
                    x = beta[i] + beta[i + 1]
                    beta[i] = x - D if x >= D else x
        return best, None

    def block(self, q: int, r: int, *, bits: int = 60, scan_limit: int | None = None) -> BlockDist:
        H, N = r * q, (r + 1) * q
        if scan_limit is not None and H + 1 > scan_limit:
            raise InsufficientPrecision(f"block of {H + 1} points exceeds the scan limit")
        compiled = None
        for b in (bits, 40, 24, 12, 4):
            try:
                compiled = self._compiled(N, b)
                break
            except InsufficientPrecision:
                if b <= 4:
                    raise
        D, nums, errs = compiled
        best, _ = self._scan(self._diffs(nums, D, q), D, H, None)
        return BlockDist(Fraction(best, D), self._budget(errs, N), H)

    def certify(self, q: int, r: int, eps: Fraction, *, scan_limit: int, exact_limit: int) -> Outcome:
        H, N = r * q, (r + 1) * q
        base_bits = max(1, math.ceil(math.log2(1 / eps))) if eps < 1 else 1
        last = None
        for extra in _BIT_LADDER:
            try:
                D, nums, errs = self._compiled(N, base_bits + extra)
            except InsufficientPrecision as exc:
                return last or Outcome(q, IMPRECISE, note=str(exc))
            B = self._budget(errs, N)
            if B >= eps:
                last = Outcome(q, IMPRECISE, budget=B, note="error budget exceeds epsilon")
                continue
            diffs = self._diffs(nums, D, q)
            if H > exact_limit:
                U = Fraction(self._bound_num(diffs, D, H), D)
                if U + B < eps:
                    return Outcome(q, WITNESS, U, B, method="binomial-bound")
            for n in _probe_points(H):
                v = Fraction(self._dist_num(diffs, D, n), D)
                if v - B >= eps:
                    return Outcome(q, REJECT, v, B, lower=v - B, method="probe")
            if H + 1 > scan_limit:
                return Outcome(q, INDETERMINATE, budget=B, note="scan limit reached")
            threshold = math.ceil((eps + B) * D)
            best, hit = self._scan(diffs, D, H, threshold)
            M = Fraction(best, D)
            if hit is not None:
                return Outcome(q, REJECT, M, B, lower=M - B, method="scan")
            if M + B < eps:
                return Outcome(q, WITNESS, M, B, method="scan")
            last = Outcome(q, INDETERMINATE, M, B, note="block maximum within budget of epsilon")
        return last

    def point(self, n: int) -> tuple:
        """Components at index n as (value mod 1, error) pairs."""
        out = []
        for c in self.components:
            val, err = Fraction(0), Fraction(0)
            for s, b in enumerate(c):
                a = approximant(b)
                val += a.value * math.comb(n, s)
                err += a.error_bound * math.comb(n, s)
            out.append((frac_part(val), err))
        return tuple(out)


class ExpKernel:
    """n -> seq(mult * n + offset) in the complex plane."""

    def __init__(self, seq: ExpSumSeq, offset: int = 0, mult: int = 1):
        self.seq = seq
        self.offset = offset
        self.mult = mult
        self._values: dict = {}

    @property
    def governing(self):
        return tuple(real_scale(t.alpha, self.mult) for t in self.seq.terms)

    @property
    def diameter(self) -> Fraction:
        return 2 * self.seq.mass

    def shifted(self, l: int) -> "ExpKernel":
        return ExpKernel(self.seq, self.offset + l * self.mult, self.mult)

    def dilated(self, l: int) -> "ExpKernel":
        return ExpKernel(self.seq, self.offset, self.mult * l)

    def _value(self, n: int, tol: Fraction):
        key = (n, tol)
        hit = self._values.get(key)
        if hit is None:
            hit = exp_sum_eval(self.seq, self.mult * n + self.offset, tol)
            self._values[key] = hit
        return hit

    def _dist(self, n: int, q: int, tol: Fraction):
        a, b = self._value(n, tol), self._value(n + q, tol)
        lo, hi = a.dist_bounds(b)
        return lo, hi, a.error + b.error

    def shift_bound(self, q: int):
        return exp_shift_bound(self.seq, q * self.mult)

    def block(self, q: int, r: int, *, scan_limit: int | None = 4096, tol=Fraction(1, 2**40)) -> BlockDist:
        H = r * q
        if scan_limit is not None and H + q + 1 > scan_limit:
            b = self.shift_bound(q)
            return BlockDist(b.value, b.error, H, kind="bound")
        best, slack = Fraction(0), Fraction(0)
        for n in range(H + 1):
            lo, hi, e = self._dist(n, q, tol)
            best = max(best, hi - e)
            slack = max(slack, e)
        return BlockDist(best, slack, H)

    def certify(self, q: int, r: int, eps: Fraction, *, scan_limit: int, exact_limit: int) -> Outcome:
        H = r * q
        try:
            b = self.shift_bound(q)
        except InsufficientPrecision as exc:
            return Outcome(q, IMPRECISE, note=str(exc))
        if b.upper < eps:
            return Outcome(q, WITNESS, b.value, b.error, method="shift-bound")
        tol = eps / 4096
        try:
            for n in _probe_points(H, 8):
                lo, hi, e = self._dist(n, q, tol)
                if lo >= eps:
                    return Outcome(q, REJECT, hi - e, e, lower=lo, method="probe")
            if H + q + 1 > min(scan_limit, exact_limit):
                return Outcome(q, INDETERMINATE, b.value, b.error, note="shift bound inconclusive")
            best, slack = Fraction(0), Fraction(0)
            for n in range(H + 1):
                lo, hi, e = self._dist(n, q, tol)
                if lo >= eps:
                    return Outcome(q, REJECT, hi - e, e, lower=lo, method="scan")
                best = max(best, hi - e)
                slack = max(slack, e)
        except InsufficientPrecision as exc:
            return Outcome(q, IMPRECISE, note=str(exc))
        if best + slack < eps:
            return Outcome(q, WITNESS, best, slack, method="scan")
        return Outcome(q, INDETERMINATE, best, slack, note="block maximum within budget of epsilon")


class TableKernel:
    def __init__(self, values: tuple, space: str):
        self.values = tuple(values)
        self.space = space
        self.governing = ()

    @property
    def diameter(self) -> Fraction:
        if self.space == S.CIRCLE:
            return Fraction(1, 2)
        if self.space == S.TORUS:
            return Fraction(self.values[0].k, 2)
        return 2 * max(sqrt_upper(a * a + b * b) for a, b in self.values)

    def _dist(self, i: int, j: int) -> tuple[Fraction, Fraction]:
        x, y = self.values[i], self.values[j]
        if self.space == S.CIRCLE:
            d = circle_norm(x - y)
            return d, d
        if self.space == S.TORUS:
            d = torus_dist(x, y)
            return d, d
        d2 = (x[0] - y[0]) ** 2 + (x[1] - y[1]) ** 2
        return sqrt_lower(d2), sqrt_upper(d2)

    def _check(self, q: int, r: int) -> None:
        if (r + 1) * q >= len(self.values):
            raise HorizonExceeded(
                f"index {(r + 1) * q} needed but the table holds {len(self.values)} values")

    def block(self, q: int, r: int, **_) -> BlockDist:
        self._check(q, r)
        lo_max, hi_max = Fraction(0), Fraction(0)
        for n in range(r * q + 1):
            lo, hi = self._dist(n, n + q)
            lo_max, hi_max = max(lo_max, lo), max(hi_max, hi)
        return BlockDist(hi_max, hi_max - lo_max, r * q)

    def certify(self, q: int, r: int, eps: Fraction, **_) -> Outcome:
        try:
            self._check(q, r)
        except HorizonExceeded as exc:
            return Outcome(q, IMPRECISE, note=str(exc))
        best = Fraction(0)
        for n in range(r * q + 1):
            lo, hi = self._dist(n, n + q)
            if lo >= eps:
                return Outcome(q, REJECT, hi, Fraction(0), lower=lo, method="scan")
            best = max(best, hi)
        if best < eps:
            return Outcome(q, WITNESS, best, Fraction(0), method="scan")
        return Outcome(q, INDETERMINATE, best, note="block maximum within rounding of epsilon")


class JointKernel:
    """Max metric over members."""

    def __init__(self, members):
        self.members = tuple(members)

    @property
    def governing(self):
        out = []
        for m in self.members:
            out.extend(m.governing)
        return tuple(out)

    @property
    def diameter(self) -> Fraction:
        return max(m.diameter for m in self.members)

    def block(self, q: int, r: int, **kw) -> BlockDist:
        parts = [m.block(q, r, **kw) for m in self.members]
        kind = "bound" if any(p.kind == "bound" for p in parts) else "scan"
        top = max(p.value + p.error_budget for p in parts)
        value = max(p.value for p in parts)
        return BlockDist(value, top - value, r * q, kind)

    def certify(self, q: int, r: int, eps: Fraction, **kw) -> Outcome:
        results = []
        for m in self.members:
            o = m.certify(q, r, eps, **kw)
            if o.status == REJECT:
                return o
            results.append(o)
        bad = [o for o in results if o.status != WITNESS]
        if bad:
            return Outcome(q, bad[0].status, note=bad[0].note)
        value = max(o.upper for o in results)
        top = max(o.upper + o.budget for o in results)
        methods = sorted({o.method for o in results})
        return Outcome(q, WITNESS, value, top - value, method="+".join(methods))


def compile_kernel(seq):
    """Turn a sequence spec into an evaluator."""
    if isinstance(seq, S.Polynomial):
        coeffs = seq.poly.coeffs
        gov = [c for c in coeffs[1:] if isinstance(c, ContinuedFraction) or c != 0]
        return PolyKernel([monomial_to_binomial(coeffs)], gov)
    if isinstance(seq, S.Affine):
        return PolyKernel([(seq.beta, seq.alpha)], [seq.alpha])
    if isinstance(seq, S.SkewOrbitComponent):
        return PolyKernel([skew_binomial(seq.T, seq.omega, seq.j)], [seq.T.alpha])
    if isinstance(seq, S.SkewOrbitFull):
        return PolyKernel([skew_binomial(seq.T, seq.omega, j) for j in range(1, seq.T.k + 1)],
                          [seq.T.alpha])
    if isinstance(seq, S.ExpSum):
        return ExpKernel(seq.seq)
    if isinstance(seq, S.Table):
        return TableKernel(seq.values, seq.space)
    if isinstance(seq, S.Joint):
        return JointKernel(compile_kernel(m) for m in seq.members)
    if isinstance(seq, (S.Shifted, S.Dilated, S.IntMultiple)):
        return _transform_kernel(seq)
    raise TypeError(f"not a sequence specification: {seq!r}")


def _transform_kernel(seq):
    base = compile_kernel(seq.base)
    l = seq.l
    if isinstance(seq, S.Shifted):
        if l < 0:
            raise ValueError("shift must be non-negative")
        if isinstance(base, JointKernel):
            return JointKernel(compile_kernel(S.Shifted(m, l)) for m in seq.base.members)
        if isinstance(base, TableKernel):
            return TableKernel(base.values[l:], base.space)
        return base.shifted(l)
    if isinstance(seq, S.Dilated):
        if l < 1:
            raise ValueError("dilation factor must be positive")
        if isinstance(base, JointKernel):
            return JointKernel(compile_kernel(S.Dilated(m, l)) for m in seq.base.members)
        if isinstance(base, TableKernel):
            return TableKernel(base.values[::l], base.space)
        return base.dilated(l)
    if isinstance(base, PolyKernel):
        return base.multiplied(l)
    if isinstance(base, TableKernel) and base.space in (S.CIRCLE, S.TORUS):
        if base.space == S.CIRCLE:
            return TableKernel(tuple(l * v for v in base.values), base.space)
        return TableKernel(tuple(TorusVector(tuple(l * a for a in v.nums), v.den) for v in base.values),
                           base.space)
    raise DimensionMismatch("integer multiples need a circle- or torus-valued sequence")
