"""Potentials V(n) = f(T^n omega) sampled along a skew-shift orbit."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

from .._interval import TWO_PI_UP, cis_enclosure
from ..cfrac import approximant, frac_part
from ..errors import ResourceLimit
from ..repetition.engine import RepetitionWitness, max_block_dist
from ..repetition.sequences import SkewOrbitFull
from ..torus import SkewShift, TorusVector, skew_apply
from .report import ExperimentReport, verdict_of

#: largest number of orbit points evaluated for one check
TRACE_LIMIT = 20_000


@dataclass(frozen=True)
class CosTerm:
    c: Fraction
    m: tuple[int, ...]


@dataclass(frozen=True)
class PotentialSpec:
    """f(x) = sum_j c_j cos(2 pi m_j . x) on T^k, sampled along the orbit of omega."""

    terms: tuple[CosTerm, ...]
    T: SkewShift
    omega: TorusVector

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if len(t.m) != self.T.k:
                raise ValueError(f"frequency vector {t.m} does not match k = {self.T.k}")
        if self.omega.k != self.T.k:
            raise ValueError("base point dimension does not match the skew-shift")

    @property
    def sup_bound(self) -> Fraction:
        return sum((abs(t.c) for t in self.terms), Fraction(0))

    @property
    def lipschitz(self) -> Fraction:
        """Upper bound for |f(x) - f(y)| / dist(x, y) in the sum metric."""
        return TWO_PI_UP * sum((abs(t.c) * max((abs(v) for v in t.m), default=0)
                                for t in self.terms), Fraction(0))


def parse_trig(text: str, k: int) -> tuple[CosTerm, ...]:
    """``1/2*cos(0,0,1);cos(1,0,0);3/4`` -> cosine terms (bare numbers are constants)."""
    terms = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        coef, star, rest = part.partition("*")
        if not star:
            coef, rest = ("1", part) if part.startswith("cos(") else (part, "")
        if rest:
            if not (rest.startswith("cos(") and rest.endswith(")")):
                raise ValueError(f"term {part!r} is not of the form c*cos(m1,...,mk)")
            m = tuple(int(v) for v in rest[4:-1].split(","))
        else:
            m = (0,) * k
        terms.append(CosTerm(Fraction(coef), m))
    if not terms:
        raise ValueError("trig spec has no terms")
    return tuple(terms)


def potential_trace(pot: PotentialSpec, count: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    """(centre, lower, upper) enclosures of V(0), ..., V(count - 1).

    The orbit is iterated exactly for a rational approximant ``a`` of alpha;
    component j at time n then differs from the true orbit by at most
    ``C(n, j) |alpha - a|``.
    """
    if count > TRACE_LIMIT:
        raise ResourceLimit(f"{count} orbit points exceed the trace limit {TRACE_LIMIT}")
    approx = approximant(pot.T.alpha)
    T = SkewShift(pot.T.k, approx.value)
    point = pot.omega
    out = []
    for n in range(count):
        lo = hi = Fraction(0)
        for t in pot.terms:
            phase = frac_part(sum(m * x for m, x in zip(t.m, point.components)))
            drift = sum(abs(m) * math.comb(n, j + 1) for j, m in enumerate(t.m)) * approx.error_bound
            c_lo, c_hi, _, _ = cis_enclosure(phase)
            # cos is 2 pi-Lipschitz in the phase
            c_lo, c_hi = max(c_lo - TWO_PI_UP * drift, Fraction(-1)), min(c_hi + TWO_PI_UP * drift, Fraction(1))
            a, b = t.c * c_lo, t.c * c_hi
            lo, hi = lo + min(a, b), hi + max(a, b)
        out.append(((lo + hi) / 2, lo, hi))
        point = skew_apply(T, point)
    return out


def potential_block_check(pot: PotentialSpec, witness, r: int, epsilon) -> ExperimentReport:
    """Compare sup_{n <= rq} |V(n+q) - V(n)| with L * epsilon.

    ``witness`` is a :class:`RepetitionWitness` or a bare ``q``.  The bound
    applies only when the full orbit is certified to repeat within epsilon
    at ``q``; otherwise the check is reported as not applicable.
    """
    start = time.perf_counter()
    eps = Fraction(epsilon)
    q = witness.q if isinstance(witness, RepetitionWitness) else int(witness)
    if q < 1 or r < 1:
        raise ValueError("q and r must be positive")
    block = max_block_dist(SkewOrbitFull(pot.T, pot.omega), q, r)
    applicable = block.upper < eps
    trace = potential_trace(pot, (r + 1) * q + 1)
    sup_upper = max(max(trace[n + q][2] - trace[n][1], trace[n][2] - trace[n + q][1])
                    for n in range(r * q + 1))
    L = pot.lipschitz
    bound = L * eps
    holds = sup_upper <= bound if applicable else None
    table = [{"n": n, "V": float(c), "radius": float((hi - lo) / 2)} for n, (c, lo, hi) in enumerate(trace)]
    return ExperimentReport(
        scenario="potential",
        parameters={"terms": [{"c": t.c, "m": list(t.m)} for t in pot.terms],
                    "alpha": pot.T.alpha, "k": pot.T.k, "omega": pot.omega,
                    "q": q, "r": r, "epsilon": eps},
        cases=[{
            "block": block,
            "applicable": applicable,
            "lipschitz": L,
            "bound": bound,
            "sup_difference_upper": sup_upper,
            "holds": holds,
        }],
        verdict=verdict_of(holds is not False),
        notes=[] if applicable else ["q does not certify the orbit at epsilon; bound not applicable"],
        duration=time.perf_counter() - start,
        table=table,
    )
