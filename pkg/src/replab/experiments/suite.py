"""Shipped parameter sets for every scenario and a runner over all of them."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterator

from ..cfrac import build_liouville_like, golden, sqrt2_frac
from ..repetition.engine import ConvergentDenominators, Exhaustive, RepetitionQuery, find_witness
from ..repetition.grammar import parse_sequence
from ..repetition.sequences import SkewOrbitFull
from ..torus import SkewShift, TorusVector
from .appendix import universal_joint_experiment
from .potential import PotentialSpec, parse_trig, potential_block_check
from .report import ExperimentReport, RandomSource
from .theorems import (
    adversarial_omega,
    thm_a_experiment,
    thm_b_experiment,
    thm_c_experiment,
    thm_e_experiment,
    thm_f_experiment,
)

DEFAULT_SEED = 20240917
BIG = 10**200

_SILVER3 = "cf:[0," + ",".join(["3"] * 60) + "]"

#: (exponential sum, base) pairs for the joint-witness construction
APPENDIX_PAIRS = (
    ("expsum:1@1/3", "affine:golden:120"),
    ("expsum:1@golden:80;(1/2,1/2)@sqrt2:80", "affine:golden:120"),
    ("expsum:0@golden:40", "affine:1/7"),
    ("expsum:1@liouville:2:6;1@1/5", "poly:0,0,liouville:2:6"),
    ("expsum:(0,1)@sqrt2:80", "skew:k=2,alpha=liouville:2:6,component=2"),
    ("expsum:1@2/9;-1@5/11", "affine:3/13,1/2"),
    ("expsum:1/3@golden:80;1/3@sqrt2:80;1/3@" + _SILVER3, "affine:sqrt2:150"),
    ("expsum:(3,4)@liouville:3:5", "poly:0,liouville:2:6,1/2"),
    ("expsum:1@sqrt2:80", "skew:k=3,alpha=liouville:3:6,component=3"),
    ("expsum:2@1/2;1@golden:80", "poly:1/4,1/3,1/5"),
)


def _q(eps, r, q_max, strategy=None) -> RepetitionQuery:
    return RepetitionQuery(Fraction(eps), r, q_max, strategy or Exhaustive())


def theorem_cases(seed: int) -> Iterator[Callable[[], ExperimentReport]]:
    conv = ConvergentDenominators()
    rng = RandomSource(seed)
    liou2, liou3 = build_liouville_like(2, 6), build_liouville_like(3, 6)
    g = golden(60)

    yield lambda: thm_a_experiment(liou2, 2, _q(Fraction(1, 100), 3, BIG, conv), label="a")
    yield lambda: thm_a_experiment(liou3, 3, _q(Fraction(1, 100), 3, BIG, conv), label="a")
    yield lambda: thm_a_experiment(g, 2, _q(Fraction(1, 20), 2, 10**4), label="a")
    yield lambda: thm_a_experiment(sqrt2_frac(60), 2, _q(Fraction(1, 20), 2, 10**4), label="a")
    yield lambda: thm_a_experiment(Fraction(3, 7), 3, _q(Fraction(1, 20), 2, 100), label="a")

    yield lambda: thm_b_experiment(build_liouville_like(2, 7), _q(Fraction(1, 10), 2, 10**40, conv), 20, rng)
    yield lambda: thm_b_experiment(g, _q(Fraction(1, 10), 2, 300), 5, rng)

    for alpha in (Fraction(2, 7), g):
        yield lambda alpha=alpha: thm_c_experiment(
            alpha, 3, adversarial_omega(alpha, 3, 10**4), _q(Fraction(1, 20), 2, 10**4))
    yield lambda: thm_c_experiment(liou3, 3, TorusVector.zero(3), _q(Fraction(1, 100), 3, BIG, conv))
    yield lambda: thm_c_experiment(Fraction(2, 7), 3, TorusVector.zero(3), _q(Fraction(3, 5), 2, 100))

    liou6 = build_liouville_like(6, 4)
    yield lambda: thm_e_experiment(liou6, 20, rng, _q(Fraction(1, 10), 2, 10**80))
    yield lambda: thm_e_experiment(liou6, 0, rng, _q(Fraction(1, 10), 2, 10**80))
    yield lambda: thm_e_experiment(g, 5, rng, _q(Fraction(1, 10), 2, 10**4))

    grid = [Fraction(i, 100) for i in range(100)]
    yield lambda: thm_f_experiment(golden(150), 4, grid, _q(Fraction(1, 10), 2, 10**4))
    yield lambda: thm_f_experiment(Fraction(2, 7), 4, [Fraction(i, 7) for i in range(7)],
                                   _q(Fraction(1, 10), 2, 10**4))
    yield lambda: thm_f_experiment(golden(150), 5, grid[::10], _q(Fraction(3, 5), 2, 10**4))


def appendix_cases() -> Iterator[Callable[[], ExperimentReport]]:
    query = _q(Fraction(1, 10), 2, BIG, ConvergentDenominators())
    for i, (ap, base) in enumerate(APPENDIX_PAIRS):
        yield lambda ap=ap, base=base, i=i: universal_joint_experiment(
            parse_sequence(ap).seq, parse_sequence(base), query, label=f"appendix-{i}")


def potential_cases() -> Iterator[Callable[[], ExperimentReport]]:
    eps = Fraction(1, 10)
    for alpha in (Fraction(3, 7), build_liouville_like(2, 6)):
        T = SkewShift(2, alpha)
        omega = TorusVector.of([Fraction(1, 3), Fraction(1, 5)])
        w = find_witness(SkewOrbitFull(T, omega), _q(eps, 2, 10**5, ConvergentDenominators()))
        for f in ("cos(0,1)", "1/2*cos(1,1);3/4"):
            yield lambda T=T, omega=omega, w=w, f=f: potential_block_check(
                PotentialSpec(parse_trig(f, 2), T, omega), w, 2, eps)


def run_suite(seed: int = DEFAULT_SEED, *, parts=("theorem", "appendix", "potential")) -> list[ExperimentReport]:
    reports = []
    if "theorem" in parts:
        reports += [case() for case in theorem_cases(seed)]
    if "appendix" in parts:
        reports += [case() for case in appendix_cases()]
    if "potential" in parts:
        reports += [case() for case in potential_cases()]
    return reports
