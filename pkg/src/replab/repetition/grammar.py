"""Text form of sequence specs.

``poly:a0,a1,...``  ``affine:alpha,beta``  ``table:v0,v1,...``
``skew:k=3,alpha=cf:0,1,2,omega=0,1/2,0[,component=j]``
``expsum:(re,im)@alpha;(re,im)@alpha``

Reals use the grammar of :func:`replab.cfrac.parse_real`.  Inside comma
separated lists a continued fraction must be bracketed (``cf:[0,1,2]``) or use
a named family (``golden:40``).
"""

from __future__ import annotations

from fractions import Fraction

from ..cfrac import parse_real
from ..torus import ExpSumSeq, ExpTerm, PolynomialSeq, SkewShift, TorusVector
from . import sequences as S


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside brackets and parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _keyed(body: str) -> dict[str, str]:
    """``k=3,alpha=cf:0,1,1,omega=0,0,0`` -> dict; bare tokens extend the previous key."""
    out: dict[str, str] = {}
    key = None
    for tok in split_top(body):
        name, eq, value = tok.partition("=")
        if eq and name.strip().isidentifier():
            key = name.strip().lower()
            out[key] = value.strip()
        elif key is None:
            raise ValueError(f"value {tok!r} has no key")
        else:
            out[key] += "," + tok
    return out


def parse_sequence(text: str):
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise ValueError(f"sequence spec {text!r} lacks a kind prefix")
    kind = kind.lower()
    if kind == "poly":
        return S.Polynomial(PolynomialSeq(tuple(parse_real(t) for t in split_top(body))))
    if kind == "affine":
        parts = split_top(body)
        if len(parts) not in (1, 2):
            raise ValueError("affine takes alpha[,beta]")
        beta = parse_real(parts[1]) if len(parts) == 2 else Fraction(0)
        return S.Affine(parse_real(parts[0]), beta)
    if kind == "table":
        return S.Table(tuple(Fraction(t) for t in split_top(body)))
    if kind == "skew":
        fields = _keyed(body)
        k = int(fields["k"])
        alpha = parse_real(fields["alpha"])
        omega_txt = fields.get("omega")
        omega = (TorusVector.of(Fraction(t) for t in split_top(omega_txt)) if omega_txt
                 else TorusVector.zero(k))
        T = SkewShift(k, alpha)
        if "component" in fields:
            return S.SkewOrbitComponent(T, omega, int(fields["component"]))
        return S.SkewOrbitFull(T, omega)
    if kind == "expsum":
        terms = []
        for part in split_top(body, ";"):
            coef, at, alpha = part.partition("@")
            if not at:
                raise ValueError(f"term {part!r} lacks '@alpha'")
            coef = coef.strip()
            if coef.startswith("("):
                re, im = split_top(coef.strip("()"))
            else:
                re, im = coef, "0"
            terms.append(ExpTerm(Fraction(re), Fraction(im), parse_real(alpha)))
        return S.ExpSum(ExpSumSeq(tuple(terms)))
    raise ValueError(f"unknown sequence kind {kind!r}")
