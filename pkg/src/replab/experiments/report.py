"""Experiment reports, canonical serialization and seeded sampling."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..cfrac import ContinuedFraction, fraction_str
from ..torus import TorusVector

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"


@dataclass
class ExperimentReport:
    scenario: str
    parameters: dict
    cases: list = field(default_factory=list)
    verdict: str = CONSISTENT
    notes: list = field(default_factory=list)
    duration: float | None = None
    table: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.verdict == CONSISTENT


def verdict_of(ok: bool) -> str:
    return CONSISTENT if ok else INCONSISTENT


def to_jsonable(x):
    """Exact, order-stable JSON form: rationals as "p/q", prefixes as integer arrays."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, ContinuedFraction):
        return list(x.quotients)
    if isinstance(x, TorusVector):
        return [fraction_str(c) for c in x.components]
    if isinstance(x, ExperimentReport):
        return report_dict(x)
    if dataclasses.is_dataclass(x):
        out = {"type": type(x).__name__}
        for f in dataclasses.fields(x):
            if f.name.startswith("_") or not f.repr:
                continue
            out[f.name] = to_jsonable(getattr(x, f.name))
        return out
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return str(x)


def report_dict(report: ExperimentReport, include_timing: bool = False) -> dict:
    out = {
        "scenario": report.scenario,
        "parameters": to_jsonable(report.parameters),
        "cases": to_jsonable(report.cases),
        "verdict": report.verdict,
        "notes": list(report.notes),
    }
    if include_timing:
        out["duration_seconds"] = None if report.duration is None else round(report.duration, 3)
    return out


def emit_report(report, fmt: str = "json", include_timing: bool = False) -> str:
    """Serialize a report (or a list of reports).

    Timing is left out by default so equal inputs give byte-identical output.
    ``csv`` writes the report's table (profile or potential trace).
    """
    if fmt == "json":
        if isinstance(report, (list, tuple)):
            obj = [report_dict(r, include_timing) for r in report]
        else:
            obj = report_dict(report, include_timing)
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        rows = report.table
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: to_jsonable(v) for k, v in row.items()})
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")


def write_report(report, path, fmt: str = "json", include_timing: bool = False) -> None:
    text = emit_report(report, fmt, include_timing)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"could not write {fmt} report to {path}: {exc}") from exc


@dataclass(frozen=True)
class RandomSource:
    """Seeded sampler; each case gets its own stream keyed by its index."""

    seed: int
    resolution_bits: int = 32

    def __post_init__(self):
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def stream(self, case) -> random.Random:
        return random.Random(f"{self.seed}:{case}")

    def rational(self, rng: random.Random) -> Fraction:
        return Fraction(rng.getrandbits(self.resolution_bits), 1 << self.resolution_bits)

    def torus_point(self, case, k: int) -> TorusVector:
        rng = self.stream(case)
        return TorusVector.of(self.rational(rng) for _ in range(k))
