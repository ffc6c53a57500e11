"""Continued fractions, circle norms and finite-window Diophantine criteria.

A real number is either an exact :class:`~fractions.Fraction` or a
:class:`ContinuedFraction` prefix.  The prefix ``[a0; a1, ..., aM]`` stands for
any real whose expansion begins with those quotients: the closed interval
between ``pM/qM`` and the mediant ``(pM + pM-1)/(qM + qM-1)``.  Every quantity
computed from a prefix carries an error bound derived from that interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Iterable, Sequence, Union

from .errors import Anomaly, InsufficientPrecision, ResourceLimit

#: largest bit length a quotient generator may push a denominator to
INT_BITS_BUDGET = 1 << 18

HALF = Fraction(1, 2)
ZERO = Fraction(0)


def _convergent_lists(quotients: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    ps, qs = [], []
    p2, p1, q2, q1 = 0, 1, 1, 0
    for a in quotients:
        p2, p1 = p1, a * p1 + p2
        q2, q1 = q1, a * q1 + q2
        ps.append(p1)
        qs.append(q1)
    return tuple(ps), tuple(qs)


@dataclass(frozen=True)
class ContinuedFraction:
    """Finite prefix of a simple continued fraction.

    ``source``, when present, produces longer prefixes of the same number on
    demand (``source(n)`` returns at least ``n`` quotients when it can).
    """

    quotients: tuple[int, ...]
    source: Callable[[int], Sequence[int]] | None = field(default=None, compare=False, repr=False)
    _p: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _q: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        quotients = tuple(int(a) for a in self.quotients)
        if not quotients:
            raise ValueError("a continued fraction needs at least one quotient")
        if any(a < 1 for a in quotients[1:]):
            raise ValueError("partial quotients after a0 must be positive")
        ps, qs = _convergent_lists(quotients)
        object.__setattr__(self, "quotients", quotients)
        object.__setattr__(self, "_p", ps)
        object.__setattr__(self, "_q", qs)

    def __len__(self) -> int:
        return len(self.quotients)

    def __str__(self) -> str:
        return "cf:" + ",".join(str(a) for a in self.quotients)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._p

    @property
    def denominators(self) -> tuple[int, ...]:
        return self._q

    @property
    def convergents(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self._p, self._q))

    def convergent(self, m: int) -> Fraction:
        return Fraction(self._p[m], self._q[m])

    @property
    def value(self) -> Fraction:
        """The deepest convergent."""
        return Fraction(self._p[-1], self._q[-1])

    def _previous(self, m: int) -> tuple[int, int]:
        return (self._p[m - 1], self._q[m - 1]) if m > 0 else (1, 0)

    def interval(self) -> tuple[Fraction, Fraction]:
        """Closed interval of all reals with this prefix."""
        p, q = self._p[-1], self._q[-1]
        pp, qp = self._previous(len(self) - 1)
        a, b = Fraction(p, q), Fraction(p + pp, q + qp)
        return (a, b) if a <= b else (b, a)

    def error_at(self, m: int) -> Fraction:
        """Bound on ``|x - p_m/q_m|`` valid for every x with this prefix."""
        last = len(self) - 1
        if not 0 <= m <= last:
            raise IndexError(f"convergent index {m} out of range 0..{last}")
        if m < last:
            return Fraction(1, self._q[m] * self._q[m + 1])
        _, qp = self._previous(m)
        return Fraction(1, self._q[m] * (self._q[m] + qp))

    def deepen(self, length: int) -> "ContinuedFraction":
        """Return a prefix with at least ``length`` quotients if the source allows."""
        if len(self) >= length or self.source is None:
            return self
        quotients = tuple(self.source(length))
        if quotients[: len(self)] != self.quotients:
            raise Anomaly("quotient source disagrees with the existing prefix")
        if len(quotients) <= len(self):
            return self
        return ContinuedFraction(quotients, self.source)


RealSpec = Union[Fraction, ContinuedFraction]


def as_real(x) -> RealSpec:
    if isinstance(x, ContinuedFraction):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not a real specification: {x!r}")


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class RationalApprox:
    p: int
    q: int
    error_bound: Fraction

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class CertifiedValue:
    """A rational estimate with ``|true - value| <= error``."""

    value: Fraction
    error: Fraction = ZERO
    ambiguous: bool = False

    @property
    def lower(self) -> Fraction:
        return self.value - self.error

    @property
    def upper(self) -> Fraction:
        return self.value + self.error


def cf_from_rational(x) -> ContinuedFraction:
    """Canonical expansion (last quotient >= 2 unless the expansion has length 1)."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    quotients = []
    while True:
        a, rem = divmod(num, den)
        quotients.append(a)
        if rem == 0:
            break
        num, den = den, rem
    return ContinuedFraction(tuple(quotients))


def convergents(cf: ContinuedFraction, m: int) -> list[tuple[int, int]]:
    """Convergents ``(p_i, q_i)`` for ``i <= m``."""
    if not 0 <= m < len(cf):
        raise IndexError(f"convergent index {m} out of range for {len(cf)} quotients")
    return list(cf.convergents[: m + 1])


def frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


def circle_norm(x) -> Fraction:
    """Distance from ``x`` to the nearest integer."""
    r = frac_part(Fraction(x))
    return min(r, 1 - r)


def approximant(x) -> RationalApprox:
    """Deepest available rational approximation with its certified error."""
    x = as_real(x)
    if isinstance(x, Fraction):
        return RationalApprox(x.numerator, x.denominator, ZERO)
    m = len(x) - 1
    return RationalApprox(x.numerators[m], x.denominators[m], x.error_at(m))


def approx_for_horizon(alpha, N: int, d: int, tol, *, min_denominator: int = 0) -> RationalApprox:
    """Shallowest convergent whose error times ``(N+1)**d`` is below ``tol``.

    Deepens the prefix through its source when the supplied quotients do not
    suffice.  ``min_denominator`` additionally requires ``q > min_denominator``.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    alpha = as_real(alpha)
    if isinstance(alpha, Fraction):
        return RationalApprox(alpha.numerator, alpha.denominator, ZERO)
    scale = (N + 1) ** d
    cf = alpha
    while True:
        for m in range(len(cf)):
            err = cf.error_at(m)
            if err * scale < tol and cf.denominators[m] > min_denominator:
                return RationalApprox(cf.numerators[m], cf.denominators[m], err)
        try:
            deeper = cf.deepen(len(cf) + 1)
        except ResourceLimit as exc:
            raise InsufficientPrecision(str(exc), required=tol / scale) from exc
        if len(deeper) == len(cf):
            raise InsufficientPrecision(
                f"{len(cf)} quotients give error {cf.error_at(len(cf) - 1)}; "
                f"need below {tol / scale} for horizon {N} at degree {d}",
                required=tol / scale,
            )
        cf = deeper


def qnorm(alpha, q: int, tol=None) -> CertifiedValue:
    """Certified ``<q * alpha>``.

    With ``tol`` set, raises :class:`InsufficientPrecision` unless the error
    bound can be pushed below it.
    """
    alpha = as_real(alpha)
    if isinstance(alpha, Fraction):
        return CertifiedValue(circle_norm(q * alpha))
    if tol is None:
        approx = approximant(alpha)
    else:
        approx = approx_for_horizon(alpha, q - 1, 1, tol)
    value = circle_norm(q * approx.value)
    error = q * approx.error_bound
    # the norm folds at 0 and 1/2; flag rather than guess which side we are on
    ambiguous = value - error < 0 or value + error > HALF
    return CertifiedValue(value, error, ambiguous)


@dataclass(frozen=True)
class DiophantineMin:
    value: Fraction
    q: int
    error: Fraction
    method: str


def _window_approx(alpha, k: int, q_max: int, tol) -> RationalApprox:
    alpha = as_real(alpha)
    if isinstance(alpha, Fraction):
        return approximant(alpha)
    try:
        return approx_for_horizon(alpha, q_max - 1, k, tol, min_denominator=q_max)
    except InsufficientPrecision:
        # a convergent inside the window is still usable if its error is fine
        return approx_for_horizon(alpha, q_max - 1, k, tol)


def _scan_min(P: int, Q: int, k: int, q_max: int) -> tuple[int, int]:
    best_num, best_q = None, 0
    r = 0
    for q in range(1, q_max + 1):
        r = (r + P) % Q
        d = r if 2 * r <= Q else Q - r
        num = d * q ** (k - 1) if k > 1 else d
        if best_num is None or num < best_num:
            best_num, best_q = num, q
            if num == 0:
                break
    return best_num, best_q


def _convergent_candidates(value: Fraction, q_max: int) -> list[int]:
    cf = cf_from_rational(value)
    dens = set(q for q in cf.denominators if q <= q_max)
    if len(cf) > 1:
        # the alternative expansion [..., a_M - 1, 1] contributes one more convergent
        extra = cf.denominators[-1] - cf.denominators[-2]
        if 1 <= extra <= q_max:
            dens.add(extra)
    return sorted(dens)


def diophantine_inf(alpha, k: int, q_max: int, *, method: str = "auto",
                    tol=Fraction(1, 10**6), scan_limit: int = 2 * 10**6) -> DiophantineMin:
    """Minimum of ``q**(k-1) * <q alpha>`` over ``1 <= q <= q_max``.

    Ties go to the smallest q.  ``method`` is ``"scan"`` (every q),
    ``"convergents"`` (convergent denominators only, valid when the minimum is
    below 1/2 for k >= 2 and always for k = 1) or ``"auto"``.
    """
    if k < 1 or q_max < 1:
        raise ValueError("need k >= 1 and q_max >= 1")
    approx = _window_approx(alpha, k, q_max, tol)
    P, Q = approx.p % approx.q, approx.q
    error = q_max**k * approx.error_bound
    if method == "auto":
        method = "scan" if q_max <= scan_limit else "convergents"
    if method == "scan":
        num, q = _scan_min(P, Q, k, q_max)
        return DiophantineMin(Fraction(num, Q), q, error, "scan")
    if method != "convergents":
        raise ValueError(f"unknown method {method!r}")
    best = None
    for q in _convergent_candidates(Fraction(P, Q), q_max):
        v = q ** (k - 1) * circle_norm(Fraction(q * P, Q))
        if best is None or v < best[0]:
            best = (v, q)
    if best is None:
        best = (circle_norm(Fraction(P, Q)), 1)
    if k > 1 and best[0] >= HALF:
        raise ValueError("convergent shortcut needs a window minimum below 1/2; use method='scan'")
    return DiophantineMin(best[0], best[1], error, "convergents")


def _liouville_source(k: int, max_bits: int, length: int) -> tuple[int, ...]:
    quotients = [0, 1]
    q_prev, q = 1, 1
    m = 1
    while len(quotients) < length:
        a = m * q ** (k - 1) + 1
        quotients.append(a)
        q_prev, q = q, a * q + q_prev
        if q.bit_length() > max_bits:
            raise ResourceLimit(f"denominator at stage {m + 1} exceeds {max_bits} bits")
        m += 1
    return tuple(quotients[: max(length, 1)])


def liouville_stage_bounds(cf: ContinuedFraction, k: int, stages: int) -> list[Fraction]:
    """Certified upper bounds on ``q_m**(k-1) * <q_m alpha>`` for ``m = 1..stages``."""
    if stages + 1 >= len(cf):
        raise InsufficientPrecision(f"stage {stages} needs {stages + 2} quotients", required=None)
    out = []
    for m in range(1, stages + 1):
        q = cf.denominators[m]
        out.append(q ** (k - 1) * min(qnorm(cf, q).upper, HALF))
    return out


def build_liouville_like(k: int, stages: int, *, max_bits: int = INT_BITS_BUDGET) -> ContinuedFraction:
    """Number with ``a_{m+1} = m * q_m**(k-1) + 1``, so stage m has criterion value below 1/m.

    The result keeps a quotient source, so later callers can deepen it.
    """
    if k < 1 or stages < 1:
        raise ValueError("need k >= 1 and at least one stage")
    source = partial(_liouville_source, k, max_bits)
    cf = ContinuedFraction(source(stages + 2), source)
    for m, bound in enumerate(liouville_stage_bounds(cf, k, stages), start=1):
        if bound > Fraction(1, m):
            raise Anomaly(f"stage {m} bound {bound} exceeds 1/{m}")
    return cf


def is_badly_approximable_window(alpha, q_max: int, c) -> bool:
    """True iff ``q <q alpha> >= c`` for every ``q <= q_max``. Window evidence only."""
    c = Fraction(c)
    res = diophantine_inf(alpha, 2, q_max)
    if res.value - res.error >= c:
        return True
    if res.value + res.error < c:
        return False
    raise InsufficientPrecision(f"window minimum {res.value} +/- {res.error} straddles {c}")


def _common_prefix(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    out = []
    for x, y in zip(a, b):
        if x != y:
            break
        out.append(x)
    return tuple(out)


def _lincomb_interval(terms, const: Fraction) -> tuple[Fraction, Fraction]:
    lo = hi = const
    for c, x in terms:
        a, b = x.interval()
        if c > 0:
            lo, hi = lo + c * a, hi + c * b
        else:
            lo, hi = lo + c * b, hi + c * a
    return lo, hi


def _lincomb_source(terms, const: Fraction, length: int) -> tuple[int, ...]:
    best: tuple[int, ...] = ()
    for _ in range(64):
        lo, hi = _lincomb_interval(terms, const)
        best = _common_prefix(cf_from_rational(lo).quotients, cf_from_rational(hi).quotients)
        if len(best) >= length:
            return best
        try:
            deeper = tuple((c, x.deepen(len(x) + 1)) for c, x in terms)
        except ResourceLimit:
            break
        if all(len(d) == len(x) for (_, d), (_, x) in zip(deeper, terms)):
            break
        terms = deeper
    return best


def real_lincomb(terms: Iterable[tuple], const=0) -> RealSpec:
    """``const + sum(c * x)`` for rational ``c`` and real ``x``.

    Irrational results come back as a prefix holding exactly the quotients
    shared by both ends of the enclosing interval, with a source that refines
    the inputs on demand.
    """
    const = Fraction(const)
    irr = []
    for c, x in terms:
        c, x = Fraction(c), as_real(x)
        if c == 0:
            continue
        if isinstance(x, Fraction):
            const += c * x
        else:
            irr.append((c, x))
    if not irr:
        return const
    if len(irr) == 1 and irr[0][0] == 1 and const == 0:
        return irr[0][1]
    irr = tuple(irr)
    quotients = _lincomb_source(irr, const, 1)
    if not quotients:
        raise InsufficientPrecision("linear combination straddles an integer; inputs too coarse")
    return ContinuedFraction(quotients, partial(_lincomb_source, irr, const))


def real_scale(x, c) -> RealSpec:
    return real_lincomb([(c, x)])


def golden(depth: int) -> ContinuedFraction:
    """Prefix of (sqrt(5) - 1)/2 = [0; 1, 1, 1, ...] with ``depth`` ones."""
    return ContinuedFraction((0,) + (1,) * depth)


def sqrt2_frac(depth: int) -> ContinuedFraction:
    """Prefix of sqrt(2) - 1 = [0; 2, 2, 2, ...]."""
    return ContinuedFraction((0,) + (2,) * depth)


def parse_real(text: str) -> RealSpec:
    """Parse ``rat:p/q``, ``p/q``, ``cf:a0,a1,...``, ``golden:N``, ``sqrt2:N``, ``liouville:K:M``."""
    text = text.strip()
    kind, sep, body = text.partition(":")
    if not sep:
        return Fraction(text)
    kind = kind.lower()
    if kind == "rat":
        return Fraction(body)
    if kind == "cf":
        body = body.strip().lstrip("[").rstrip("]")
        return ContinuedFraction(tuple(int(t) for t in body.split(",") if t.strip()))
    if kind == "golden":
        return golden(int(body))
    if kind == "sqrt2":
        return sqrt2_frac(int(body))
    if kind == "liouville":
        k, _, m = body.partition(":")
        return build_liouville_like(int(k), int(m))
    raise ValueError(f"unknown real specification {text!r}")


def format_real(x) -> str:
    x = as_real(x)
    if isinstance(x, Fraction):
        return f"rat:{x.numerator}/{x.denominator}"
    return str(x)


def fraction_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def real_to_json(x):
    """Rationals as ``"p/q"`` strings, prefixes as integer arrays."""
    x = as_real(x)
    if isinstance(x, Fraction):
        return fraction_str(x)
    return list(x.quotients)
