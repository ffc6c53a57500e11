"""Joint witnesses for an exponential sum paired with a repeating base sequence.

A witness ``q0`` for the base at a tightened epsilon is multiplied by one
factor per exponential frequency, each chosen by :func:`addition_lift`.
Targets are tightened in reverse so that later multipliers cannot undo an
earlier term, and the final ``q`` is certified on both sequences directly.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

from ..errors import HypothesisViolation
from ..repetition.engine import (
    ConvergentDenominators,
    RepetitionQuery,
    certify_candidate,
    find_witness,
    multiplier_bound,
)
from ..repetition.kernels import WITNESS
from ..repetition.lemmas import addition_lift
from ..repetition.sequences import ExpSum
from ..torus import ExpSumSeq
from .report import ExperimentReport, verdict_of

#: the lifted frequencies keep sum |c_j| 2 pi <q alpha_j> below 2 pi / 7 * eps
MASS_SHARE = 7


def lift_targets(terms, eps: Fraction) -> tuple[list[Fraction], list[int]]:
    """Per-term targets eta_j and multiplier bounds D_j, tightened from the last term back."""
    mass = sum((t.abs_upper for t in terms), Fraction(0))
    eta = eps / (MASS_SHARE * mass)
    targets, bounds = [], []
    factor = 1
    for _ in reversed(terms):
        target = eta / factor
        targets.append(target)
        bounds.append(multiplier_bound(target))
        factor *= bounds[-1]
    return targets[::-1], bounds[::-1]


def universal_joint_experiment(ap: ExpSumSeq, base, query: RepetitionQuery, *,
                               label: str = "appendix") -> ExperimentReport:
    """Build and certify a common witness for ``ap`` and ``base`` at ``(eps, r)``."""
    start = time.perf_counter()
    eps, r = query.epsilon, query.r
    live = [t for t in ap.terms if t.c_re != 0 or t.c_im != 0]
    targets, bounds = lift_targets(live, eps) if live else ([], [])
    P = math.prod(bounds)
    strategy = query.strategy
    if isinstance(strategy, ConvergentDenominators):
        strategy = ConvergentDenominators(multiples=False)
    base_query = RepetitionQuery(eps / P, (r + 1) * P, query.q_max, strategy)
    base_res = find_witness(base, base_query)
    if not base_res.found:
        raise HypothesisViolation(
            f"base has no witness up to q_max = {query.q_max} at epsilon {eps / P}")
    q = base_res.q
    lifts = []
    for t, target in zip(live, targets):
        lift = addition_lift(q, t.alpha, target)
        lifts.append({"alpha": t.alpha, "target": target, "d": lift.d, "q": lift.q,
                      "norm": lift.norm, "d_within_inverse_epsilon": lift.within_inverse_epsilon})
        q = lift.q
    if q > query.q_max:
        raise HypothesisViolation(f"lifted q = {q} exceeds q_max = {query.q_max}")
    final_query = RepetitionQuery(eps, r, query.q_max, query.strategy)
    base_check = certify_candidate(base, q, final_query)
    ap_check = certify_candidate(ExpSum(ap), q, final_query)
    ok = base_check.status == WITNESS and ap_check.status == WITNESS
    notes = []
    if not live:
        notes.append("all coefficients vanish; the base witness serves unchanged")
    return ExperimentReport(
        scenario=label,
        parameters={"ap": ap, "base": base, "epsilon": eps, "r": r, "q_max": query.q_max,
                    "strategy": str(query.strategy), "base_epsilon": eps / P,
                    "base_r": (r + 1) * P},
        cases=[{
            "base_witness": base_res,
            "lifts": lifts,
            "q": q,
            "base_check": base_check,
            "ap_check": ap_check,
        }],
        verdict=verdict_of(ok),
        notes=notes,
        duration=time.perf_counter() - start,
    )
