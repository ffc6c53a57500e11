"""Command line interface: ``replab cfrac|orbit|witness|experiment``."""

from __future__ import annotations

import csv
import json
import sys
from fractions import Fraction

import click

from .cfrac import (
    build_liouville_like,
    cf_from_rational,
    diophantine_inf,
    liouville_stage_bounds,
    parse_real,
)
from .config import load_settings, parse_int
from .errors import Anomaly, ResourceLimit
from .experiments.appendix import universal_joint_experiment
from .experiments.potential import PotentialSpec, parse_trig, potential_block_check
from .experiments.report import RandomSource, emit_report, to_jsonable, write_report
from .experiments.suite import run_suite
from .experiments.theorems import (
    adversarial_omega,
    thm_a_experiment,
    thm_b_experiment,
    thm_c_experiment,
    thm_e_experiment,
    thm_f_experiment,
)
from .repetition.engine import (
    RepetitionQuery,
    find_joint_witness,
    find_witness,
    parse_strategy,
    profile,
)
from .repetition.grammar import parse_sequence, split_top
from .repetition.sequences import ExpSum, SkewOrbitFull
from .torus import PolynomialSeq, SkewShift, TorusVector, orbit_component_closed_form, poly_eval_mod1

_EXPECTED = (ValueError, ArithmeticError, ResourceLimit, Anomaly, OSError)


def _dump(obj) -> None:
    click.echo(json.dumps(to_jsonable(obj), sort_keys=True, indent=2))


def _fraction(ctx, param, value):
    if value is None:
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(str(exc)) from exc


def _big_int(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_int(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


def _qlist(text: str) -> list[int]:
    """``1..50`` or ``3,5,8`` or a mix such as ``1..4,10``."""
    out = []
    for part in split_top(text):
        lo, dots, hi = part.partition("..")
        out.extend(range(int(lo), int(hi) + 1) if dots else [int(part)])
    return out


def _omega(text: str | None, k: int) -> TorusVector:
    if not text:
        return TorusVector.zero(k)
    return TorusVector.of(Fraction(t) for t in split_top(text))


class _Group(click.Group):
    """Turns library errors into one-line messages with a non-zero exit."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except _EXPECTED as exc:
            name = type(exc).__name__
            raise click.ClickException(f"{name}: {exc}") from exc


@click.group(cls=_Group)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="key = value file overriding defaults")
@click.pass_context
def main(ctx, config_path):
    """Witness search for the repetition property of skew-shift orbits."""
    ctx.obj = load_settings(config_path)


# ---------------------------------------------------------------- cfrac

@main.group()
def cfrac():
    """Continued fractions and Diophantine criteria."""


@cfrac.command("expand")
@click.argument("real")
@click.option("--depth", type=int, default=None, help="quotients to show (deepens when possible)")
def cfrac_expand(real, depth):
    """Partial quotients and convergents of a real."""
    x = parse_real(real)
    if isinstance(x, Fraction):
        x = cf_from_rational(x)
    if depth is not None:
        x = x.deepen(depth)
        quotients = x.quotients[:depth]
    else:
        quotients = x.quotients
    n = len(quotients)
    _dump({"quotients": list(quotients),
           "convergents": [f"{p}/{q}" for p, q in x.convergents[:n]],
           "error": x.error_at(n - 1)})


@cfrac.command("criterion")
@click.option("--alpha", required=True)
@click.option("--k", type=int, required=True)
@click.option("--qmax", default=None, callback=_big_int, help="search bound, e.g. 10000 or 10**60")
@click.option("--method", type=click.Choice(["auto", "scan", "convergents"]), default="auto")
@click.pass_obj
def cfrac_criterion(settings, alpha, k, qmax, method):
    """min over q <= qmax of q^(k-1) <q alpha>."""
    _dump(diophantine_inf(parse_real(alpha), k, qmax or settings.q_max, method=method))


@cfrac.command("liouville")
@click.option("--k", type=int, required=True)
@click.option("--stages", type=int, default=6)
def cfrac_liouville(k, stages):
    """Liouville-like prefix with its stage bounds."""
    cf = build_liouville_like(k, stages)
    _dump({"quotients": list(cf.quotients), "stage_bounds": liouville_stage_bounds(cf, k, stages)})


# ---------------------------------------------------------------- orbit

@main.group()
def orbit():
    """Points of skew-shift orbits and polynomial sequences."""


@orbit.command("skew")
@click.option("--k", type=int, required=True)
@click.option("--alpha", required=True)
@click.option("--omega", default=None, help="comma separated rationals; zero by default")
@click.option("--n", "n_values", required=True, help="times, e.g. 0..10 or 5,100")
def orbit_skew(k, alpha, omega, n_values):
    """T^n(omega) for each requested n."""
    T = SkewShift(k, parse_real(alpha))
    w = _omega(omega, k)
    rows = []
    for n in _qlist(n_values):
        comps = [orbit_component_closed_form(T, w, n, j) for j in range(1, k + 1)]
        rows.append({"n": n, "point": [c.value for c in comps], "error": [c.error for c in comps]})
    _dump(rows)


@orbit.command("poly")
@click.option("--coeffs", required=True, help="a0,a1,... (reals; bracket continued fractions)")
@click.option("--n", "n_values", required=True)
def orbit_poly(coeffs, n_values):
    """p(n) mod 1 with its error for each requested n."""
    p = PolynomialSeq(tuple(parse_real(t) for t in split_top(coeffs)))
    _dump([{"n": n, **to_jsonable(poly_eval_mod1(p, n))} for n in _qlist(n_values)])


# ---------------------------------------------------------------- witness

def _query(settings, epsilon, r, qmax, strategy) -> RepetitionQuery:
    return RepetitionQuery(epsilon, r, qmax or settings.q_max,
                           parse_strategy(strategy or settings.strategy))


def _search_kw(settings) -> dict:
    return {"workers": settings.workers, "scan_limit": settings.scan_limit,
            "exact_limit": settings.exact_limit}


@main.group(invoke_without_command=True)
@click.option("--seq", "seqs", multiple=True, help="sequence spec")
@click.option("--epsilon", callback=_fraction, default=None)
@click.option("--r", type=int, default=None)
@click.option("--qmax", default=None, callback=_big_int, help="search bound, e.g. 10000 or 10**60")
@click.option("--strategy", default=None, help="exhaustive, convergents or lift:<q>")
@click.pass_context
def witness(ctx, seqs, epsilon, r, qmax, strategy):
    """Smallest certified witness q for one sequence."""
    if ctx.invoked_subcommand is not None:
        return
    if len(seqs) != 1 or epsilon is None or r is None:
        raise click.UsageError("witness needs exactly one --seq plus --epsilon and --r")
    settings = ctx.obj
    res = find_witness(parse_sequence(seqs[0]), _query(settings, epsilon, r, qmax, strategy),
                       **_search_kw(settings))
    _dump(res)


@witness.command("joint")
@click.option("--seq", "seqs", multiple=True, required=True)
@click.option("--epsilon", callback=_fraction, required=True)
@click.option("--r", type=int, required=True)
@click.option("--qmax", default=None, callback=_big_int, help="search bound, e.g. 10000 or 10**60")
@click.option("--strategy", default=None)
@click.pass_obj
def witness_joint(settings, seqs, epsilon, r, qmax, strategy):
    """One q for every --seq at once."""
    family = [parse_sequence(s) for s in seqs]
    _dump(find_joint_witness(family, _query(settings, epsilon, r, qmax, strategy),
                             **_search_kw(settings)))


@witness.command("profile")
@click.option("--seq", required=True)
@click.option("--r", type=int, required=True)
@click.option("--qlist", required=True, help="e.g. 1..50")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="write here instead of stdout")
def witness_profile(seq, r, qlist, csv_path):
    """CSV of q, m_q_upper, error_budget."""
    prof = profile(parse_sequence(seq), r, _qlist(qlist))
    out = open(csv_path, "w", newline="", encoding="utf-8") if csv_path else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["q", "m_q_upper", "error_budget"])
        for q, upper, budget in prof.rows():
            writer.writerow([q, f"{upper.numerator}/{upper.denominator}",
                             f"{budget.numerator}/{budget.denominator}"])
    finally:
        if csv_path:
            out.close()


# ---------------------------------------------------------------- experiment

def _finish(report, csv_path, timing):
    click.echo(emit_report(report, "json", include_timing=timing), nl=False)
    if csv_path:
        write_report(report, csv_path, "csv")


@main.group()
def experiment():
    """Scenario runs that end in a consistent/inconsistent verdict."""


@experiment.command("theorem")
@click.option("--part", type=click.Choice(["a", "b", "c", "e", "f"]), required=True)
@click.option("--alpha", required=True)
@click.option("--k", type=int, default=None)
@click.option("--qmax", default=None, callback=_big_int, help="search bound, e.g. 10000 or 10**60")
@click.option("--epsilon", callback=_fraction, required=True)
@click.option("--r", type=int, required=True)
@click.option("--strategy", default=None)
@click.option("--samples", type=int, default=20)
@click.option("--seed", type=int, default=None)
@click.option("--omega", default=None, help="base point for part c (adversarial by default)")
@click.option("--grid", type=int, default=100, help="grid size for part f")
@click.option("--timing", is_flag=True, help="include wall-clock duration")
@click.pass_obj
def experiment_theorem(settings, part, alpha, k, qmax, epsilon, r, strategy, samples, seed,
                       omega, grid, timing):
    """One skew-shift scenario, selected by --part."""
    a = parse_real(alpha)
    query = _query(settings, epsilon, r, qmax, strategy)
    rng = RandomSource(settings.seed if seed is None else seed)
    if part == "a":
        report = thm_a_experiment(a, k or 2, query)
    elif part == "b":
        report = thm_b_experiment(a, query, samples, rng)
    elif part == "c":
        k = k or 3
        w = _omega(omega, k) if omega else adversarial_omega(a, k, query.q_max)
        report = thm_c_experiment(a, k, w, query)
    elif part == "e":
        report = thm_e_experiment(a, samples, rng, query)
    else:
        report = thm_f_experiment(a, k or 4, [Fraction(i, grid) for i in range(grid)], query)
    _finish(report, None, timing)


@experiment.command("appendix")
@click.option("--ap", required=True, help="expsum spec")
@click.option("--base", required=True, help="sequence spec with witnesses")
@click.option("--epsilon", callback=_fraction, default="1/10")
@click.option("--r", type=int, default=2)
@click.option("--qmax", default=None, callback=_big_int, help="search bound, e.g. 10000 or 10**60")
@click.option("--strategy", default="convergents")
@click.option("--timing", is_flag=True)
@click.pass_obj
def experiment_appendix(settings, ap, base, epsilon, r, qmax, strategy, timing):
    """Joint witness of an exponential sum with a base sequence."""
    seq = parse_sequence(ap)
    if not isinstance(seq, ExpSum):
        raise click.BadParameter("--ap must be an expsum: spec")
    query = RepetitionQuery(epsilon, r, qmax or 10**200, parse_strategy(strategy))
    _finish(universal_joint_experiment(seq.seq, parse_sequence(base), query), None, timing)


@experiment.command("potential")
@click.option("--f", "trig", required=True, help="e.g. '1/2*cos(0,1);cos(1,0)'")
@click.option("--k", type=int, required=True)
@click.option("--alpha", required=True)
@click.option("--omega", default=None)
@click.option("--epsilon", callback=_fraction, required=True)
@click.option("--r", type=int, required=True)
@click.option("--q", type=int, default=None, help="test this q instead of searching")
@click.option("--qmax", default=None, callback=_big_int, help="search bound, e.g. 10000 or 10**60")
@click.option("--strategy", default="convergents")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="write the potential trace here")
@click.option("--timing", is_flag=True)
@click.pass_obj
def experiment_potential(settings, trig, k, alpha, omega, epsilon, r, q, qmax, strategy,
                         csv_path, timing):
    """Block repetition of V(n) = f(T^n omega) along a witness."""
    T = SkewShift(k, parse_real(alpha))
    w = _omega(omega, k)
    pot = PotentialSpec(parse_trig(trig, k), T, w)
    if q is None:
        res = find_witness(SkewOrbitFull(T, w), _query(settings, epsilon, r, qmax, strategy),
                           **_search_kw(settings))
        if not res.found:
            raise click.ClickException("no witness for the orbit in the window; pass --q to test one")
        q = res
    _finish(potential_block_check(pot, q, r, epsilon), csv_path, timing)


@experiment.command("suite")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="write JSON here")
@click.option("--timing", is_flag=True)
@click.pass_obj
def experiment_suite(settings, seed, out, timing):
    """All shipped scenarios; exits 1 if any verdict is inconsistent."""
    reports = run_suite(settings.seed if seed is None else seed)
    text = emit_report(reports, "json", include_timing=timing)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    bad = [r.scenario for r in reports if not r.consistent]
    click.echo(f"{len(reports) - len(bad)}/{len(reports)} consistent", err=True)
    if bad:
        raise click.ClickException("inconsistent: " + ", ".join(bad))


if __name__ == "__main__":
    main()
