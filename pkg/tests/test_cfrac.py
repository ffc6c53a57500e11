import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from replab.cfrac import (
    ContinuedFraction,
    approx_for_horizon,
    build_liouville_like,
    cf_from_rational,
    circle_norm,
    diophantine_inf,
    format_real,
    golden,
    is_badly_approximable_window,
    liouville_stage_bounds,
    parse_real,
    qnorm,
    real_lincomb,
    real_scale,
    sqrt2_frac,
)
from replab.errors import InsufficientPrecision


def cf_value(quotients):
    """Evaluate a finite continued fraction from the tail up."""
    x = Fraction(quotients[-1])
    for a in reversed(quotients[:-1]):
        x = a + 1 / x
    return x


def brute_min(alpha: Fraction, k: int, q_max: int):
    best = None
    for q in range(1, q_max + 1):
        v = q ** (k - 1) * circle_norm(q * alpha)
        if best is None or v < best[0]:
            best = (v, q)
    return best


quotient_lists = st.lists(st.integers(1, 50), min_size=1, max_size=12).map(lambda t: [0] + t)


@given(quotient_lists)
def test_convergents_match_truncated_evaluation(qs):
    cf = ContinuedFraction(tuple(qs))
    for m, (p, q) in enumerate(cf.convergents):
        assert Fraction(p, q) == cf_value(qs[: m + 1])
        assert math.gcd(p, q) == 1


@given(quotient_lists, st.lists(st.integers(1, 1000), min_size=1, max_size=6))
def test_error_bound_covers_every_extension(prefix, tail):
    cf = ContinuedFraction(tuple(prefix))
    x = cf_value(prefix + tail)
    for m in range(len(prefix)):
        assert abs(x - cf.convergent(m)) <= cf.error_at(m)
    lo, hi = cf.interval()
    assert lo <= x <= hi


@given(st.fractions(min_value=-5, max_value=5, max_denominator=10**6))
def test_rational_roundtrip(x):
    assert cf_value(list(cf_from_rational(x).quotients)) == x


@given(st.fractions(min_value=0, max_value=1, max_denominator=300), st.integers(1, 4))
@settings(max_examples=60)
def test_diophantine_inf_rational_matches_brute_force(alpha, k):
    res = diophantine_inf(alpha, k, 400)
    assert (res.value, res.q) == brute_min(alpha, k, 400)
    assert res.error == 0


def test_diophantine_inf_golden_against_high_precision():
    mpmath.mp.dps = 60
    phi = (mpmath.sqrt(5) - 1) / 2
    values = [q * abs(q * phi - mpmath.nint(q * phi)) for q in range(1, 3001)]
    oracle = min(values)
    res = diophantine_inf(golden(60), 2, 3000)
    assert abs(res.value - Fraction(str(oracle))) <= res.error + Fraction(1, 10**40)
    assert res.q == values.index(oracle) + 1


def test_convergent_method_agrees_with_scan_below_half():
    alpha = build_liouville_like(2, 5)
    a = diophantine_inf(alpha, 2, 10**5, method="scan")
    b = diophantine_inf(alpha, 2, 10**5, method="convergents")
    assert (a.value, a.q) == (b.value, b.q)


def test_qnorm_error_contains_truth():
    mpmath.mp.dps = 80
    x = golden(40)
    phi = (mpmath.sqrt(5) - 1) / 2
    for q in (1, 7, 144, 10**6):
        c = qnorm(x, q)
        true = abs(q * phi - mpmath.nint(q * phi))
        assert abs(Fraction(str(true)) - c.value) <= c.error + Fraction(1, 10**50)


def test_approx_for_horizon_meets_tolerance_and_deepens():
    alpha = build_liouville_like(3, 3)
    a = approx_for_horizon(alpha, 10**6, 3, Fraction(1, 10**9))
    assert a.error_bound * (10**6 + 1) ** 3 < Fraction(1, 10**9)
    with pytest.raises(InsufficientPrecision):
        approx_for_horizon(golden(10), 10**6, 2, Fraction(1, 10**9))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_liouville_stage_bounds(k):
    cf = build_liouville_like(k, 6)
    for m, bound in enumerate(liouville_stage_bounds(cf, k, 6), start=1):
        assert bound <= Fraction(1, m)
    # the stage-m quotient follows a_{m+1} = m q_m^(k-1) + 1
    for m in range(1, 6):
        assert cf.quotients[m + 1] == m * cf.denominators[m] ** (k - 1) + 1


def test_liouville_source_deepens_consistently():
    cf = build_liouville_like(2, 3)
    deeper = cf.deepen(len(cf) + 3)
    assert deeper.quotients[: len(cf)] == cf.quotients
    assert len(deeper) >= len(cf) + 3


def test_badly_approximable_window():
    # min over the window of q <q phi> is 0.3819... at q = 1
    assert is_badly_approximable_window(golden(60), 10**4, Fraction(3, 10))
    assert not is_badly_approximable_window(golden(60), 10**4, Fraction(2, 5))
    assert not is_badly_approximable_window(build_liouville_like(2, 6), 10**4, Fraction(1, 10))


def test_lincomb_against_float_oracle():
    mpmath.mp.dps = 50
    phi = (mpmath.sqrt(5) - 1) / 2
    s2 = mpmath.sqrt(2) - 1
    x = real_lincomb([(Fraction(3, 4), golden(60)), (Fraction(-2, 5), sqrt2_frac(60))], Fraction(1, 7))
    lo, hi = x.interval()
    true = Fraction(str(mpmath.mpf(3) / 4 * phi - mpmath.mpf(2) / 5 * s2 + mpmath.mpf(1) / 7))
    assert lo - Fraction(1, 10**40) <= true <= hi + Fraction(1, 10**40)
    assert real_scale(Fraction(2, 3), 3) == 2
    assert real_lincomb([(1, golden(5))]) is not None


def test_parse_real_grammar():
    assert parse_real("3/7") == Fraction(3, 7)
    assert parse_real("rat:-1/2") == Fraction(-1, 2)
    assert parse_real("cf:0,1,2").quotients == (0, 1, 2)
    assert parse_real("cf:[0,2,2]").quotients == (0, 2, 2)
    assert parse_real("golden:5").quotients == (0, 1, 1, 1, 1, 1)
    assert parse_real("sqrt2:3").quotients == (0, 2, 2, 2)
    assert parse_real("liouville:2:4").quotients[:3] == (0, 1, 2)
    assert format_real(Fraction(1, 3)) == "rat:1/3"
    with pytest.raises(ValueError):
        parse_real("nope:1")
