from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from replab.cfrac import build_liouville_like, circle_norm, golden, qnorm, sqrt2_frac
from replab.repetition.engine import (
    ConvergentDenominators,
    Exhaustive,
    MultiplierLift,
    NotFound,
    RepetitionQuery,
    canonical_rp_scan,
    candidate_set,
    certify_candidate,
    find_joint_witness,
    find_witness,
    max_block_dist,
    parse_strategy,
    profile,
)
from replab.repetition.kernels import compile_kernel
from replab.repetition.lemmas import transform_dilate, transform_intmul, transform_shift
from replab.repetition.sequences import (
    Affine,
    ExpSum,
    Joint,
    Polynomial,
    SkewOrbitComponent,
    SkewOrbitFull,
    Table,
)
from replab.torus import ExpSumSeq, ExpTerm, SkewShift, TorusVector, skew_iterate, torus_dist
from replab.errors import HorizonExceeded


def brute_m_skew(T, omega, q, r):
    pts = [omega]
    for _ in range((r + 1) * q):
        pts.append(skew_iterate(T, pts[-1], 1))
    return max(torus_dist(pts[n], pts[n + q]) for n in range(r * q + 1))


def brute_m_poly(coeffs, q, r):
    def p(n):
        return sum(c * n**i for i, c in enumerate(coeffs))
    return max(circle_norm(p(n + q) - p(n)) for n in range(r * q + 1))


def brute_witness(m_of_q, eps, q_max):
    for q in range(1, q_max + 1):
        if m_of_q(q) < eps:
            return q
    return None


fracs = st.fractions(min_value=0, max_value=1, max_denominator=40).filter(lambda x: x < 1)


@given(fracs, st.lists(fracs, min_size=2, max_size=3), st.integers(1, 3),
       st.sampled_from([Fraction(1, 3), Fraction(1, 10), Fraction(1, 50)]))
@settings(max_examples=40, deadline=None)
def test_skew_witness_matches_brute_force(alpha, omega, r, eps):
    T = SkewShift(len(omega), alpha)
    w = TorusVector.of(omega)
    res = find_witness(SkewOrbitFull(T, w), RepetitionQuery(eps, r, 60))
    want = brute_witness(lambda q: brute_m_skew(T, w, q, r), eps, 60) if eps <= len(omega) / 2 else 1
    assert (res.q if res.found else None) == want


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=25), min_size=1, max_size=4),
       st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_poly_block_max_is_exact_for_rational_coefficients(coeffs, r):
    seq = Polynomial.of(*coeffs)
    for q in (1, 2, 7, 12):
        b = max_block_dist(seq, q, r)
        assert b.error_budget == 0
        assert b.value == brute_m_poly(coeffs, q, r)


def test_block_dist_brackets_high_precision_oracle():
    mpmath.mp.dps = 60
    phi = (mpmath.sqrt(5) - 1) / 2
    seq = Polynomial.of(0, 0, golden(40), build_liouville_like(2, 5))
    a2 = golden(60).value
    a3 = build_liouville_like(2, 5).deepen(12).value
    for q in (3, 55, 144):
        b = max_block_dist(seq, q, 2)
        def p(n):
            return mpmath.mpf(a2.numerator) / a2.denominator * n * n + mpmath.mpf(a3.numerator) / a3.denominator * n**3
        true = max(abs(x - mpmath.nint(x)) for x in (p(n + q) - p(n) for n in range(2 * q + 1)))
        assert abs(Fraction(str(true)) - b.value) <= b.error_budget + Fraction(1, 10**30)


@pytest.mark.parametrize("alpha", [Fraction(3, 11), Fraction(17, 97), golden(50), sqrt2_frac(50)])
def test_affine_m_equals_norm_independent_of_r(alpha):
    seq = Affine(alpha, Fraction(1, 5))
    for q in (1, 4, 29, 400):
        c = qnorm(alpha, q)
        for r in (1, 2, 5):
            b = max_block_dist(seq, q, r)
            assert abs(b.value - c.value) <= c.error + b.error_budget
            if isinstance(alpha, Fraction):
                assert b.value == c.value and b.error_budget == 0


def test_affine_golden_witness_is_fibonacci():
    q = RepetitionQuery(Fraction(1, 100), 10, 200)
    for strat in (Exhaustive(), ConvergentDenominators()):
        res = find_witness(Affine(golden(40)), RepetitionQuery(q.epsilon, q.r, q.q_max, strat))
        assert res.found and res.q == 55


def test_golden_quadratic_has_no_witness_in_window():
    res = find_witness(Polynomial.monomial(golden(60), 2), RepetitionQuery(Fraction(1, 20), 2, 2000))
    assert isinstance(res, NotFound)
    assert res.min_lower is not None and res.min_lower > 0
    assert not res.indeterminate and not res.imprecise


@pytest.mark.parametrize("k,expected", [(2, 1477), (3, 585397)])
def test_liouville_joint_witness(k, expected):
    alpha = build_liouville_like(k, 6)
    family = [Polynomial.monomial(alpha, j) for j in range(1, k + 1)]
    res = find_joint_witness(family, RepetitionQuery(Fraction(1, 100), 3, 10**12, ConvergentDenominators()))
    assert res.found and res.q == expected
    assert res.max_dist + res.error_budget < Fraction(1, 100)


def test_joint_equals_max_of_members():
    alpha = Fraction(5, 23)
    a, b = Affine(alpha), Polynomial.of(0, 0, Fraction(2, 7))
    for q in (1, 3, 7, 23):
        j = max_block_dist(Joint((a, b)), q, 2)
        assert j.value == max(max_block_dist(a, q, 2).value, max_block_dist(b, q, 2).value)


def test_full_orbit_bounded_by_sum_of_components():
    # dual route: the torus distance is the sum of component distances
    T = SkewShift(3, golden(50))
    w = TorusVector.of([Fraction(1, 3), Fraction(1, 7), 0])
    for q in (2, 21, 89):
        full = max_block_dist(SkewOrbitFull(T, w), q, 2)
        parts = [max_block_dist(SkewOrbitComponent(T, w, j), q, 2) for j in (1, 2, 3)]
        assert full.value <= sum(p.value for p in parts) + sum(p.error_budget for p in parts) + full.error_budget
        assert full.value + full.error_budget >= max(p.value - p.error_budget for p in parts)


def test_transforms_match_brute_force():
    coeffs = [Fraction(1, 3), Fraction(2, 9), Fraction(5, 13)]
    seq = Polynomial.of(*coeffs)
    for l in (1, 2, 5):
        shifted = [sum(c * m**i for i, c in enumerate(coeffs)) for m in range(l, l + 3)]
        s = transform_shift(seq, l)
        assert [s.poly.exact(n) for n in range(3)] == shifted
        d = transform_dilate(seq, l)
        assert [d.poly.exact(n) for n in range(4)] == [seq.poly.exact(n * l) for n in range(4)]
        m = transform_intmul(seq, l)
        assert [m.poly.exact(n) for n in range(4)] == [l * seq.poly.exact(n) for n in range(4)]


@pytest.mark.parametrize("l", [2, 3, 7])
def test_intmul_transfers_witnesses(l):
    # m_{l w}(q) <= l m_w(q), so a witness at eps / l stays one at eps
    seq = Polynomial.of(Fraction(1, 3), 0, build_liouville_like(2, 6))
    base = find_witness(seq, RepetitionQuery(Fraction(1, 30 * l), 2, 10**9, ConvergentDenominators()))
    assert base.found
    out = certify_candidate(transform_intmul(seq, l), base.q, RepetitionQuery(Fraction(1, 30), 2, 10**9))
    assert out.status == "witness"
    lb = max_block_dist(transform_intmul(seq, l), base.q, 2)
    mb = max_block_dist(seq, base.q, 2)
    assert lb.value <= l * (mb.value + mb.error_budget) + lb.error_budget


def test_m_is_monotone_in_r():
    seq = SkewOrbitFull(SkewShift(2, golden(50)), TorusVector.of([Fraction(1, 4), 0]))
    for q in (5, 34):
        vals = [max_block_dist(seq, q, r) for r in (1, 2, 4, 8)]
        for a, b in zip(vals, vals[1:]):
            assert a.value <= b.value + a.error_budget + b.error_budget


def test_witness_stable_under_deepening():
    query = RepetitionQuery(Fraction(1, 20), 2, 10**4)
    a = find_witness(Polynomial.of(0, 0, sqrt2_frac(40)), query)
    b = find_witness(Polynomial.of(0, 0, sqrt2_frac(80)), query)
    assert (a.found, getattr(a, "q", None)) == (b.found, getattr(b, "q", None))


def test_workers_are_deterministic():
    seq = SkewOrbitFull(SkewShift(2, Fraction(13, 89)), TorusVector.of([Fraction(1, 3), 0]))
    query = RepetitionQuery(Fraction(1, 40), 2, 300)
    assert find_witness(seq, query, workers=1) == find_witness(seq, query, workers=3)


def test_degenerate_epsilon_gives_q_one():
    seq = SkewOrbitFull(SkewShift(3, golden(20)), TorusVector.zero(3))
    res = find_witness(seq, RepetitionQuery(Fraction(8, 5), 1, 10))
    assert res.found and res.q == 1 and res.method == "degenerate"
    # epsilon equal to the circle diameter is not degenerate
    res = find_witness(Affine(Fraction(1, 2)), RepetitionQuery(Fraction(1, 2), 1, 1))
    assert not res.found


def test_table_and_constant_sequences():
    res = find_witness(Table.constant(Fraction(1, 3), 10), RepetitionQuery(Fraction(1, 100), 2, 3))
    assert res.found and res.q == 1
    with pytest.raises(HorizonExceeded):
        max_block_dist(Table((0, Fraction(1, 2))), 1, 2)
    periodic = Table(tuple(Fraction(i % 3, 3) for i in range(40)))
    assert find_witness(periodic, RepetitionQuery(Fraction(1, 100), 2, 10)).q == 3


def test_exp_sum_witness_matches_rotation():
    s = ExpSum(ExpSumSeq((ExpTerm(1, 0, golden(40)),)))
    res = find_witness(s, RepetitionQuery(Fraction(1, 10), 2, 100, ConvergentDenominators()))
    # |e(q alpha) - 1| < 1/10 first happens at a Fibonacci number
    # |e(q alpha) - 1| = 2 |sin(pi q alpha)|; first Fibonacci q with that below 1/10
    phi = (mpmath.sqrt(5) - 1) / 2
    oracle = next(q for q in (1, 2, 3, 5, 8, 13, 21, 34, 55, 89)
                  if 2 * abs(mpmath.sin(mpmath.pi * q * phi)) < mpmath.mpf(1) / 10)
    assert res.found and res.q == oracle


def test_candidate_sets_and_strategy_parsing():
    kernel = compile_kernel(Affine(golden(30)))
    q = RepetitionQuery(Fraction(1, 3), 1, 30, ConvergentDenominators(multiples=False))
    assert candidate_set(kernel, q) == [1, 2, 3, 5, 8, 13, 21]
    lift = RepetitionQuery(Fraction(1, 3), 1, 100, MultiplierLift(7))
    # multiples run to ceil(1/eps) + 1 = 4
    assert candidate_set(kernel, lift) == [7, 14, 21, 28]
    rational_period = compile_kernel(Polynomial.of(Fraction(1, 4), Fraction(1, 3), Fraction(1, 5)))
    assert 15 in candidate_set(rational_period, RepetitionQuery(Fraction(1, 10), 1, 100,
                                                                  ConvergentDenominators(multiples=False)))
    assert parse_strategy("lift:9") == MultiplierLift(9)
    with pytest.raises(ValueError):
        parse_strategy("random")
    with pytest.raises(ValueError):
        RepetitionQuery(Fraction(0), 1, 1)


def test_profile_and_rp_scan():
    prof = profile(Affine(Fraction(2, 7)), 2, range(1, 8))
    assert [row[1] for row in prof.rows()] == [circle_norm(Fraction(2 * q, 7)) for q in range(1, 8)]
    scan = canonical_rp_scan(Affine(golden(40)), 6, 200)
    phi = (mpmath.sqrt(5) - 1) / 2
    def norm(q):
        x = q * phi
        return abs(x - mpmath.nint(x))
    # rung r asks for <q alpha> < 1/r; r = 1 is degenerate
    oracle = [1] + [next(q for q in range(1, 201) if norm(q) < mpmath.mpf(1) / r) for r in range(2, 7)]
    assert scan.q_values() == oracle
