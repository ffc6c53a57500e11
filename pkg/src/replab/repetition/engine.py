"""Witness search for the repetition property on finite windows."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from ..cfrac import ContinuedFraction, as_real
from ..errors import ResourceLimit
from .kernels import (
    IMPRECISE,
    INDETERMINATE,
    REJECT,
    WITNESS,
    BlockDist,
    Outcome,
    compile_kernel,
)
from .sequences import Joint

DEFAULT_SCAN_LIMIT = 2_000_000
DEFAULT_EXACT_LIMIT = 4096


@dataclass(frozen=True)
class Exhaustive:
    name = "exhaustive"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ConvergentDenominators:
    """Convergent denominators of the governing reals and their multiples.

    Multiples run up to ``ceil(1/eps) + 1`` unless ``max_multiple`` caps them.
    """

    multiples: bool = True
    max_multiple: int | None = None
    name = "convergents"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class MultiplierLift:
    """Multiples d * base_q with d <= ceil(1/eps) + 1 of an externally supplied witness."""

    base_q: int
    name = "lift"

    def __post_init__(self):
        if self.base_q < 1:
            raise ValueError("base witness must be a positive integer")

    def __str__(self) -> str:
        return f"lift:{self.base_q}"


Strategy = Union[Exhaustive, ConvergentDenominators, MultiplierLift]


def parse_strategy(text: str) -> Strategy:
    text = text.strip().lower()
    if text in ("exhaustive", "scan"):
        return Exhaustive()
    if text in ("convergents", "convergentdenominators", "convergent-denominators"):
        return ConvergentDenominators()
    if text.startswith("lift:") or text.startswith("multiplierlift:"):
        return MultiplierLift(int(text.split(":", 1)[1]))
    raise ValueError(f"unknown strategy {text!r}")


@dataclass(frozen=True)
class RepetitionQuery:
    epsilon: Fraction
    r: int
    q_max: int
    strategy: Strategy = field(default_factory=Exhaustive)

    def __post_init__(self):
        eps = Fraction(self.epsilon)
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        if self.r < 1:
            raise ValueError("r must be a positive integer")
        if self.q_max < 1:
            raise ValueError("q_max must be a positive integer")
        object.__setattr__(self, "epsilon", eps)


@dataclass(frozen=True)
class RepetitionWitness:
    """``max_dist + error_budget`` is a certified upper bound on the block
    maximum over ``0 <= n <= horizon`` and lies below the query's epsilon."""

    q: int
    max_dist: Fraction
    horizon: int
    error_budget: Fraction
    method: str = ""

    @property
    def found(self) -> bool:
        return True


@dataclass(frozen=True)
class NotFound:
    """No certified witness among the candidates.

    Evidence about the finite window only.  ``min_lower`` is the smallest
    certified lower bound on m(q) over rejected candidates.
    """

    strategy: str
    candidates: int
    q_low: int | None
    q_high: int | None
    min_lower: Fraction | None
    indeterminate: tuple[int, ...] = ()
    imprecise: tuple[int, ...] = ()

    @property
    def found(self) -> bool:
        return False


@dataclass(frozen=True)
class RepetitionProfile:
    r: int
    values: dict

    def rows(self):
        for q in sorted(self.values):
            b = self.values[q]
            yield q, b.upper, b.error_budget


def _deepen_past(cf: ContinuedFraction, bound: int) -> ContinuedFraction:
    while cf.denominators[-1] <= bound:
        try:
            deeper = cf.deepen(len(cf) + 1)
        except ResourceLimit:
            break
        if len(deeper) == len(cf):
            break
        cf = deeper
    return cf


def governing_denominators(reals: Iterable, q_max: int) -> list[int]:
    """Convergent denominators (up to q_max) of the given reals.

    The lcm of the rational denominators is included too, so a sequence with
    only rational coefficients gets its period as a candidate.
    """
    dens = {1}
    period = 1
    for x in reals:
        x = as_real(x)
        if isinstance(x, Fraction):
            period = math.lcm(period, x.denominator)
            if x.denominator <= q_max:
                dens.add(x.denominator)
            continue
        cf = _deepen_past(x, q_max)
        dens.update(q for q in cf.denominators if 1 <= q <= q_max)
    if period <= q_max:
        dens.add(period)
    return sorted(dens)


def multiplier_bound(eps: Fraction) -> int:
    return math.ceil(1 / Fraction(eps)) + 1


def candidate_set(kernel, query: RepetitionQuery, extra_governing: Sequence = ()) -> list[int]:
    strat, q_max = query.strategy, query.q_max
    if isinstance(strat, Exhaustive):
        return list(range(1, q_max + 1))
    D = multiplier_bound(query.epsilon)
    if isinstance(strat, MultiplierLift):
        return [d * strat.base_q for d in range(1, D + 1) if d * strat.base_q <= q_max]
    dens = governing_denominators(tuple(kernel.governing) + tuple(extra_governing), q_max)
    if not strat.multiples:
        return dens
    if strat.max_multiple is not None:
        D = min(D, strat.max_multiple)
    return sorted({d * q for q in dens for d in range(1, D + 1) if d * q <= q_max})


def _certify(args):
    kernel, q, r, eps, scan_limit, exact_limit = args
    return kernel.certify(q, r, eps, scan_limit=scan_limit, exact_limit=exact_limit)


def _search(kernel, query: RepetitionQuery, candidates: Sequence[int], *, workers: int,
            scan_limit: int, exact_limit: int, on_outcome=None):
    eps, r = query.epsilon, query.r
    if eps > kernel.diameter:
        # every pair of points is closer than epsilon
        return RepetitionWitness(1, kernel.diameter, r, Fraction(0), "degenerate")
    rejected_lower = None
    indeterminate, imprecise = [], []

    def consume(o: Outcome):
        nonlocal rejected_lower
        if on_outcome is not None:
            on_outcome(o)
        if o.status == WITNESS:
            return RepetitionWitness(o.q, o.upper, r * o.q, o.budget, o.method)
        if o.status == REJECT:
            if rejected_lower is None or o.lower < rejected_lower:
                rejected_lower = o.lower
        elif o.status == INDETERMINATE:
            indeterminate.append(o.q)
        elif o.status == IMPRECISE:
            imprecise.append(o.q)
        return None

    if workers <= 1:
        for q in candidates:
            w = consume(kernel.certify(q, r, eps, scan_limit=scan_limit, exact_limit=exact_limit))
            if w is not None:
                return w
    else:
        batch = 4 * workers
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for start in range(0, len(candidates), batch):
                chunk = candidates[start:start + batch]
                jobs = [(kernel, q, r, eps, scan_limit, exact_limit) for q in chunk]
                # map preserves candidate order, so the first witness is the smallest
                for o in pool.map(_certify, jobs):
                    w = consume(o)
                    if w is not None:
                        return w
    return NotFound(
        str(query.strategy),
        len(candidates),
        candidates[0] if candidates else None,
        candidates[-1] if candidates else None,
        rejected_lower,
        tuple(indeterminate),
        tuple(imprecise),
    )


def find_witness(seq, query: RepetitionQuery, *, workers: int = 1,
                 scan_limit: int = DEFAULT_SCAN_LIMIT, exact_limit: int = DEFAULT_EXACT_LIMIT,
                 governing: Sequence = (), on_outcome=None):
    """Smallest candidate q with certified m(q) < epsilon, or :class:`NotFound`.

    Candidates whose block maximum cannot be separated from epsilon are
    skipped and listed in the result; they never count as witnesses.
    ``governing`` adds reals whose convergent denominators seed the
    ``ConvergentDenominators`` strategy.
    """
    kernel = compile_kernel(seq)
    return _search(kernel, query, candidate_set(kernel, query, governing), workers=workers,
                   scan_limit=scan_limit, exact_limit=exact_limit, on_outcome=on_outcome)


def certify_candidate(seq, q: int, query: RepetitionQuery, *, scan_limit: int = DEFAULT_SCAN_LIMIT,
                      exact_limit: int = DEFAULT_EXACT_LIMIT) -> Outcome:
    """Test a single q against the query's epsilon and r."""
    kernel = compile_kernel(seq)
    if query.epsilon > kernel.diameter:
        return Outcome(q, WITNESS, kernel.diameter, Fraction(0), method="degenerate")
    return kernel.certify(q, query.r, query.epsilon, scan_limit=scan_limit, exact_limit=exact_limit)


def find_joint_witness(family: Sequence, query: RepetitionQuery, **kw):
    """Smallest q that is a witness for every member at once (max metric)."""
    return find_witness(Joint(tuple(family)), query, **kw)


def max_block_dist(seq, q: int, r: int, **kw) -> BlockDist:
    """m(q) = max over 0 <= n <= rq of dist(w_n, w_{n+q}) with its error budget."""
    if q < 1 or r < 1:
        raise ValueError("q and r must be positive")
    return compile_kernel(seq).block(q, r, **kw)


def profile(seq, r: int, qs: Iterable[int], **kw) -> RepetitionProfile:
    kernel = compile_kernel(seq)
    return RepetitionProfile(r, {q: kernel.block(q, r, **kw) for q in qs})


@dataclass(frozen=True)
class RpScan:
    rungs: tuple

    def q_values(self) -> list:
        """Minimal witness per rung, ``None`` where none was found."""
        return [res.q if res.found else None for _, res in self.rungs]


def canonical_rp_scan(seq, r_max: int, q_max: int, strategy: Strategy | None = None, **kw) -> RpScan:
    """find_witness with epsilon = 1/r for r = 1..r_max."""
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    strategy = strategy or Exhaustive()
    kernel = compile_kernel(seq)
    rungs = []
    for r in range(1, r_max + 1):
        query = RepetitionQuery(Fraction(1, r), r, q_max, strategy)
        res = _search(kernel, query, candidate_set(kernel, query),
                      workers=kw.get("workers", 1),
                      scan_limit=kw.get("scan_limit", DEFAULT_SCAN_LIMIT),
                      exact_limit=kw.get("exact_limit", DEFAULT_EXACT_LIMIT))
        rungs.append((r, res))
    return RpScan(tuple(rungs))
