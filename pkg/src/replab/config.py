"""Run settings from defaults, an optional ``key = value`` file and ``REPLAB_*`` variables.

Later sources win: defaults, then the file, then the environment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

ENV_PREFIX = "REPLAB_"


@dataclass(frozen=True)
class Settings:
    q_max: int = 10_000
    scan_limit: int = 2_000_000
    exact_limit: int = 4096
    workers: int = 1
    seed: int = 20240917
    strategy: str = "exhaustive"


def parse_int(raw: str) -> int:
    """Integer that may be written ``10**6`` or ``1_000_000``."""
    raw = raw.strip().replace("_", "")
    if "**" in raw:
        base, _, exp = raw.partition("**")
        return int(base) ** int(exp)
    return int(raw)


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in fields(Settings)}[name]
    if kind in (int, "int"):
        return parse_int(raw)
    return raw.strip()


def parse_config(text: str, source: str = "<config>") -> dict:
    known = {f.name for f in fields(Settings)}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not eq or key not in known:
            raise ValueError(f"{source}:{lineno}: expected one of {sorted(known)} as 'key = value'")
        try:
            out[key] = _coerce(key, value)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: bad value for {key}: {exc}") from exc
    return out


def load_settings(path: str | os.PathLike | None = None, environ=None) -> Settings:
    settings = Settings()
    if path is not None:
        p = Path(path)
        settings = replace(settings, **parse_config(p.read_text(encoding="utf-8"), str(p)))
    environ = os.environ if environ is None else environ
    overrides = {}
    for f in fields(Settings):
        raw = environ.get(ENV_PREFIX + f.name.upper())
        if raw is not None:
            overrides[f.name] = _coerce(f.name, raw)
    return replace(settings, **overrides)
