import json
import math
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner

from replab.cfrac import build_liouville_like, golden, qnorm
from replab.cli import main
from replab.config import load_settings, parse_config
from replab.errors import HypothesisViolation
from replab.experiments.appendix import lift_targets, universal_joint_experiment
from replab.experiments.potential import PotentialSpec, parse_trig, potential_block_check
from replab.experiments.report import ExperimentReport, RandomSource, emit_report, write_report
from replab.experiments.theorems import (
    adversarial_omega,
    orbit_family,
    sufficient_factor,
    thm_a_experiment,
    thm_b_experiment,
    thm_c_experiment,
    thm_e_experiment,
    thm_f_experiment,
)
from replab.repetition.engine import (
    ConvergentDenominators,
    RepetitionQuery,
    RepetitionWitness,
    certify_candidate,
    find_witness,
)
from replab.repetition.grammar import parse_sequence
from replab.repetition.sequences import Joint, SkewOrbitFull
from replab.torus import ExpSumSeq, ExpTerm, SkewShift, TorusVector, skew_coefficient_forms

SNAPSHOTS = Path(__file__).parent / "snapshots"
CONV = ConvergentDenominators()


def test_golden_theorem_a_matches_snapshot():
    report = thm_a_experiment(golden(60), 2, RepetitionQuery(Fraction(1, 20), 2, 10**4))
    assert emit_report(report) == (SNAPSHOTS / "theorem_a_golden.json").read_text()


def test_theorem_a_liouville_and_rational():
    r = thm_a_experiment(build_liouville_like(3, 6), 3, RepetitionQuery(Fraction(1, 100), 3, 10**60, CONV))
    case = r.cases[0]
    assert r.consistent and case["result"].found and case["prediction"] == "witness"
    assert case["criterion"].value <= Fraction(1, 6)
    r = thm_a_experiment(Fraction(3, 7), 3, RepetitionQuery(Fraction(1, 20), 2, 100))
    assert r.consistent and r.cases[0]["criterion"].value == 0 and r.cases[0]["result"].q == 7


@pytest.mark.parametrize("k", [2, 3])
def test_sufficient_factor_guarantees_witness(k):
    # kappa * q^(k-1) <q alpha> < eps at a denominator q makes k! q a joint witness
    alpha = build_liouville_like(k, 6)
    family = Joint(tuple(orbit_family(alpha, k)))
    checked = 0
    for q in alpha.denominators[2:7]:
        crit = q ** (k - 1) * qnorm(alpha, q).upper
        eps = crit * sufficient_factor(k, 3) * Fraction(11, 10)
        if eps >= Fraction(1, 2):
            continue
        out = certify_candidate(family, math.factorial(k) * q, RepetitionQuery(eps, 3, 10**80))
        assert out.status == "witness"
        checked += 1
    assert checked >= 2


def test_theorem_b_lifts_every_sample():
    r = thm_b_experiment(build_liouville_like(2, 7), RepetitionQuery(Fraction(1, 10), 2, 10**40, CONV),
                         20, RandomSource(3))
    assert r.consistent
    samples = r.cases[1:]
    assert len(samples) == 20 and all(c["certified"] for c in samples)


def test_adversarial_point_hits_badly_approximable_coefficient():
    for alpha in (Fraction(2, 7), golden(50)):
        w = adversarial_omega(alpha, 3, 10**4)
        beta = skew_coefficient_forms(3, 3)[2].evaluate(alpha, w.components)
        r = thm_c_experiment(alpha, 3, w, RepetitionQuery(Fraction(1, 20), 2, 10**4))
        assert r.consistent
        case = r.cases[0]
        assert case["quadratic_coefficient_criterion"].value >= Fraction(1, 10)
        assert not case["result"].found and case["lower_bound_constant"] > 0
        assert beta is not None


def test_theorem_c_degenerate_and_control():
    r = thm_c_experiment(Fraction(2, 7), 3, TorusVector.zero(3), RepetitionQuery(Fraction(3, 5), 2, 50))
    assert r.consistent and r.cases[0]["result"].q == 1
    r = thm_c_experiment(build_liouville_like(3, 6), 3, TorusVector.zero(3),
                         RepetitionQuery(Fraction(1, 100), 3, 10**60, CONV))
    assert r.consistent and r.cases[0]["result"].found


def test_theorem_e_fractions():
    liou = build_liouville_like(6, 4)
    r = thm_e_experiment(liou, 0, RandomSource(1), RepetitionQuery(Fraction(1, 10), 2, 10**80))
    assert r.consistent and r.cases[0]["fraction"] is None and r.notes
    assert r.cases[1]["found"]  # the point 0 itself
    r = thm_e_experiment(golden(60), 4, RandomSource(1), RepetitionQuery(Fraction(1, 10), 2, 10**4))
    assert r.consistent and r.cases[0]["fraction"] == 0


def test_theorem_f_grid():
    grid = [Fraction(i, 100) for i in range(100)]
    r = thm_f_experiment(golden(150), 4, grid, RepetitionQuery(Fraction(1, 10), 2, 10**4))
    assert r.consistent
    assert sum(c["passes"] for c in r.cases) <= 10
    # -alpha/4 + omega_1/6 = 0 at omega_1 = 3 alpha / 2 mod 1 = 3/7
    r = thm_f_experiment(Fraction(2, 7), 4, [Fraction(i, 7) for i in range(7)],
                         RepetitionQuery(Fraction(1, 10), 2, 10**4))
    solved = [c for c in r.cases if c["solution"]]
    assert r.consistent and [c["omega_i"] for c in solved] == [Fraction(3, 7)] and solved[0]["passes"]
    r = thm_f_experiment(golden(150), 4, grid[:5], RepetitionQuery(Fraction(3, 5), 2, 10**4))
    assert r.consistent and all(c["passes"] and c["q"] == 1 for c in r.cases)


def test_appendix_construction():
    query = RepetitionQuery(Fraction(1, 10), 2, 10**200, CONV)
    ap = parse_sequence("expsum:1@golden:80;(1/2,1/2)@sqrt2:80").seq
    r = universal_joint_experiment(ap, parse_sequence("affine:golden:120"), query)
    case = r.cases[0]
    assert r.consistent and case["ap_check"].upper + case["ap_check"].budget < Fraction(1, 10)
    zero = ExpSumSeq((ExpTerm(0, 0, golden(20)),))
    r = universal_joint_experiment(zero, parse_sequence("affine:1/7"), query)
    assert r.consistent and r.cases[0]["q"] == 7 and r.cases[0]["ap_check"].upper == 0
    with pytest.raises(HypothesisViolation):
        universal_joint_experiment(ap, parse_sequence("poly:0,0,golden:60"),
                                   RepetitionQuery(Fraction(1, 10), 2, 10**4, CONV))


def test_lift_targets_tighten_backwards():
    terms = (ExpTerm(1, 0, golden(20)), ExpTerm(1, 0, golden(20)))
    targets, bounds = lift_targets(terms, Fraction(1, 10))
    assert targets[1] == Fraction(1, 140)
    assert targets[0] == targets[1] / bounds[1]


def test_potential_checks():
    T = SkewShift(2, Fraction(3, 7))
    omega = TorusVector.of([Fraction(1, 3), Fraction(1, 5)])
    w = find_witness(SkewOrbitFull(T, omega), RepetitionQuery(Fraction(1, 10), 2, 100, CONV))
    pot = PotentialSpec(parse_trig("cos(0,1)", 2), T, omega)
    r = potential_block_check(pot, w, 2, Fraction(1, 10))
    case = r.cases[0]
    assert r.consistent and case["applicable"] and case["holds"]
    assert case["sup_difference_upper"] <= case["bound"]
    const = PotentialSpec(parse_trig("2", 2), T, omega)
    assert potential_block_check(const, w, 2, Fraction(1, 10)).cases[0]["sup_difference_upper"] == 0
    bad = potential_block_check(PotentialSpec(parse_trig("cos(0,1)", 2), SkewShift(2, golden(40)),
                                              TorusVector.zero(2)), 7, 2, Fraction(1, 10))
    assert bad.consistent and not bad.cases[0]["applicable"] and bad.cases[0]["holds"] is None
    assert emit_report(r, "csv").splitlines()[0] == "n,V,radius"


def test_report_serialization(tmp_path):
    empty = ExperimentReport("empty", {})
    assert json.loads(emit_report(empty)) == {"cases": [], "notes": [], "parameters": {},
                                              "scenario": "empty", "verdict": "consistent"}
    w = RepetitionWitness(5, Fraction(1, 3), 10, Fraction(0))
    text = emit_report(ExperimentReport("one", {"eps": Fraction(1, 2)}, cases=[w], duration=1.5))
    data = json.loads(text)
    assert data["cases"][0]["q"] == 5 and data["cases"][0]["max_dist"] == "1/3"
    assert "duration_seconds" not in data
    assert "duration_seconds" in json.loads(emit_report(ExperimentReport("t", {}, duration=1.0),
                                                        include_timing=True))
    with pytest.raises(OSError):
        write_report(empty, tmp_path / "missing" / "x.json")


def test_random_source_streams():
    a, b = RandomSource(9), RandomSource(9)
    assert [a.torus_point(i, 3) for i in range(5)] == [b.torus_point(i, 3) for i in range(5)]
    assert a.torus_point(0, 3) != RandomSource(10).torus_point(0, 3)
    assert all(c.denominator <= 2**32 for c in a.torus_point(4, 3).components)
    with pytest.raises(ValueError):
        RandomSource(-1)


def test_config_layers(tmp_path):
    cfg = tmp_path / "replab.cfg"
    cfg.write_text("# budgets\nq_max = 10**6\nworkers = 2\n")
    s = load_settings(cfg, environ={"REPLAB_Q_MAX": "500"})
    assert (s.q_max, s.workers) == (500, 2)
    with pytest.raises(ValueError):
        parse_config("nonsense = 1")


def test_cli_commands(tmp_path):
    runner = CliRunner()
    out = runner.invoke(main, ["witness", "--seq", "affine:golden:40", "--epsilon", "1/100",
                               "--r", "10", "--qmax", "200"])
    assert out.exit_code == 0 and json.loads(out.output)["q"] == 55
    out = runner.invoke(main, ["witness", "profile", "--seq", "affine:1/7", "--r", "2", "--qlist", "1..3"])
    assert out.output.splitlines() == ["q,m_q_upper,error_budget", "1,1/7,0/1", "2,2/7,0/1", "3,3/7,0/1"]
    out = runner.invoke(main, ["witness", "joint", "--seq", "affine:1/3", "--seq", "affine:1/4",
                               "--epsilon", "1/10", "--r", "1", "--qmax", "20"])
    assert json.loads(out.output)["q"] == 12
    out = runner.invoke(main, ["cfrac", "criterion", "--alpha", "3/7", "--k", "2", "--qmax", "10"])
    assert json.loads(out.output)["value"] == "0/1"
    csv_path = tmp_path / "pot.csv"
    out = runner.invoke(main, ["experiment", "potential", "--f", "cos(0,1)", "--k", "2", "--alpha", "3/7",
                               "--omega", "1/3,1/5", "--epsilon", "1/10", "--r", "2", "--csv", str(csv_path)])
    assert out.exit_code == 0 and json.loads(out.output)["verdict"] == "consistent"
    assert csv_path.read_text().startswith("n,V,radius")
    out = runner.invoke(main, ["experiment", "theorem", "--part", "a", "--alpha", "golden:60", "--k", "2",
                               "--epsilon", "1/20", "--r", "2", "--qmax", "10000"])
    assert out.output == (SNAPSHOTS / "theorem_a_golden.json").read_text()
    out = runner.invoke(main, ["witness", "--seq", "poly:x", "--epsilon", "1/2", "--r", "1"])
    assert out.exit_code == 1 and "ValueError" in out.output
