import random
from fractions import Fraction

import mpmath
import pytest

from replab.cfrac import build_liouville_like, circle_norm, golden, sqrt2_frac
from replab.errors import DimensionMismatch, HypothesisViolation
from replab.repetition import lemmas
from replab.repetition.grammar import parse_sequence, split_top
from replab.repetition.lemmas import addition_lift, hompoly_expand_check, rational_scale, transform_intmul
from replab.repetition.sequences import (
    Affine,
    ExpSum,
    Polynomial,
    SkewOrbitComponent,
    SkewOrbitFull,
    Table,
)
from replab.torus import SkewShift, TorusVector

mpmath.mp.dps = 80
REALS = {
    "golden": (golden(80), (mpmath.sqrt(5) - 1) / 2),
    "sqrt2": (sqrt2_frac(80), mpmath.sqrt(2) - 1),
}


def mp_norm(x):
    return abs(x - mpmath.nint(x))


def brute_lift(base_q, alpha_mp, eps):
    d = 1
    while mp_norm(d * base_q * alpha_mp) >= eps:
        d += 1
    return d


@pytest.mark.parametrize("name", sorted(REALS))
def test_lift_matches_high_precision_brute_force(name):
    alpha, alpha_mp = REALS[name]
    rng = random.Random(name)
    for _ in range(40):
        base_q = rng.randint(1, 1000)
        eps = rng.choice([Fraction(1, 5), Fraction(1, 10), Fraction(1, 50), Fraction(1, 3000)])
        res = addition_lift(base_q, alpha, eps)
        assert res.d == brute_lift(base_q, alpha_mp, mpmath.mpf(eps.numerator) / eps.denominator)
        assert res.q == res.d * base_q and res.d <= res.bound


def test_convergent_lift_agrees_with_linear_scan(monkeypatch):
    rng = random.Random(11)
    for _ in range(25):
        alpha = rng.choice([golden(80), sqrt2_frac(80), build_liouville_like(2, 6), Fraction(355, 113)])
        base_q, eps = rng.randint(1, 10**6), Fraction(1, rng.randint(500, 10000))
        monkeypatch.setattr(lemmas, "LINEAR_LIFT_LIMIT", 1)
        fast = addition_lift(base_q, alpha, eps)
        monkeypatch.setattr(lemmas, "LINEAR_LIFT_LIMIT", 10**9)
        assert addition_lift(base_q, alpha, eps).d == fast.d


def test_lift_records_inverse_epsilon_bound():
    res = addition_lift(1, golden(40), Fraction(1, 10))
    assert res.d == 5
    assert res.within_inverse_epsilon
    assert res.norm.upper < Fraction(1, 10)


def test_lift_rational_alpha_and_bad_input():
    assert addition_lift(3, Fraction(1, 7), Fraction(1, 100)).q == 21
    with pytest.raises(ValueError):
        addition_lift(0, golden(10), Fraction(1, 2))
    with pytest.raises(ValueError):
        addition_lift(1, golden(10), Fraction(0))


def test_rational_scale():
    seq = Polynomial.of(0, Fraction(1, 2))
    assert rational_scale(seq, Fraction(1, 3)).poly.coeffs == (0, Fraction(1, 6))
    T = SkewShift(3, Fraction(2, 9))
    comp = SkewOrbitComponent(T, TorusVector.of([Fraction(1, 2), 0, 0]), 3)
    scaled = rational_scale(comp, Fraction(2, 5))
    poly = rational_scale(Polynomial(lemmas.skew_component_poly(T, comp.omega, 3)), 1)
    assert [scaled.poly.exact(n) for n in range(6)] == [Fraction(2, 5) * poly.poly.exact(n) for n in range(6)]
    table = Table(tuple(Fraction(n * (n - 1), 2) / 3 for n in range(10)), recurrence_degree=2)
    assert rational_scale(table, 3).values[4] == 6
    with pytest.raises(HypothesisViolation):
        rational_scale(Table((0, 1, 5, 2, 7)), 2)
    with pytest.raises(HypothesisViolation):
        rational_scale(Table((0, 1, 5, 2, 7, 1), recurrence_degree=1), 2)


def test_intmul_rejects_complex_sequences():
    seq = parse_sequence("expsum:1@1/3")
    with pytest.raises(DimensionMismatch):
        transform_intmul(seq, 2)


@pytest.mark.parametrize("a,k,q", [(golden(60), 2, 5), (build_liouville_like(3, 5), 3, 7), (Fraction(3, 11), 4, 2)])
def test_hompoly_expansion(a, k, q):
    assert hompoly_expand_check(a, k, q, range(0, 40))


def test_grammar_round_trips():
    assert split_top("a,[b,c],(d,e)") == ["a", "[b,c]", "(d,e)"]
    assert parse_sequence("poly:0,1/2,golden:5") == Polynomial.of(0, Fraction(1, 2), golden(5))
    assert parse_sequence("affine:1/3") == Affine(Fraction(1, 3))
    s = parse_sequence("skew:k=3,alpha=cf:[0,1,2],omega=0,1/2,0,component=2")
    assert isinstance(s, SkewOrbitComponent) and s.j == 2 and s.omega[1] == Fraction(1, 2)
    full = parse_sequence("skew:k=2,alpha=1/5")
    assert isinstance(full, SkewOrbitFull) and full.omega == TorusVector.zero(2)
    e = parse_sequence("expsum:(1,-1/2)@golden:4;3@1/7")
    assert isinstance(e, ExpSum) and e.seq.terms[0].c_im == Fraction(-1, 2)
    assert parse_sequence("table:0,1/2,1").values == (0, Fraction(1, 2), 1)
    for bad in ("poly", "what:1", "expsum:1", "affine:1,2,3"):
        with pytest.raises(ValueError):
            parse_sequence(bad)
    assert circle_norm(Fraction(7, 4)) == Fraction(1, 4)
