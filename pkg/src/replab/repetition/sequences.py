"""Declarative sequence descriptions.

Every spec is immutable and names the metric space its points live in:
``circle`` (distance ``<x - y>``), ``torus`` (sum of circle norms),
``complex`` (Euclidean) or ``product`` (max over members).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..cfrac import RealSpec, as_real
from ..errors import DimensionMismatch
from ..torus import ExpSumSeq, PolynomialSeq, SkewShift, TorusVector

CIRCLE = "circle"
TORUS = "torus"
COMPLEX = "complex"
PRODUCT = "product"


@dataclass(frozen=True)
class Polynomial:
    """n -> p(n) mod 1."""

    poly: PolynomialSeq
    space = CIRCLE

    @classmethod
    def of(cls, *coeffs) -> "Polynomial":
        return cls(PolynomialSeq(tuple(as_real(c) for c in coeffs)))

    @classmethod
    def monomial(cls, alpha, degree: int) -> "Polynomial":
        return cls.of(*([Fraction(0)] * degree + [alpha]))


@dataclass(frozen=True)
class Affine:
    """The rotation n -> beta + n*alpha mod 1."""

    alpha: RealSpec
    beta: RealSpec = Fraction(0)
    space = CIRCLE

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_real(self.alpha))
        object.__setattr__(self, "beta", as_real(self.beta))


@dataclass(frozen=True)
class SkewOrbitComponent:
    """n -> j-th component of T^n(omega)."""

    T: SkewShift
    omega: TorusVector
    j: int
    space = CIRCLE

    def __post_init__(self):
        if self.omega.k != self.T.k:
            raise DimensionMismatch(f"point has dimension {self.omega.k}, map has {self.T.k}")
        if not 1 <= self.j <= self.T.k:
            raise IndexError(f"component {self.j} outside 1..{self.T.k}")


@dataclass(frozen=True)
class SkewOrbitFull:
    """n -> T^n(omega) on the torus."""

    T: SkewShift
    omega: TorusVector
    space = TORUS

    def __post_init__(self):
        if self.omega.k != self.T.k:
            raise DimensionMismatch(f"point has dimension {self.omega.k}, map has {self.T.k}")

    def components(self) -> list[SkewOrbitComponent]:
        return [SkewOrbitComponent(self.T, self.omega, j) for j in range(1, self.T.k + 1)]


@dataclass(frozen=True)
class ExpSum:
    seq: ExpSumSeq
    space = COMPLEX


@dataclass(frozen=True)
class Table:
    """Explicit finite sequence.

    Circle values are stored unreduced (the metric reduces them), torus values
    as :class:`TorusVector`, complex values as ``(re, im)`` pairs.
    ``recurrence_degree`` declares that the unreduced values satisfy the
    Pascal recurrence of that order.
    """

    values: tuple
    space: str = CIRCLE
    recurrence_degree: int | None = None

    def __post_init__(self):
        if not self.values:
            raise ValueError("a table needs at least one value")
        if self.space == CIRCLE:
            vals = tuple(Fraction(v) for v in self.values)
        elif self.space == COMPLEX:
            vals = tuple((Fraction(a), Fraction(b)) for a, b in self.values)
        elif self.space == TORUS:
            vals = tuple(v if isinstance(v, TorusVector) else TorusVector.of(v) for v in self.values)
        else:
            raise ValueError(f"unsupported table space {self.space!r}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value, length: int = 1) -> "Table":
        return cls((value,) * length)


@dataclass(frozen=True)
class Joint:
    """A finite family viewed as one sequence in the product with the max metric."""

    members: tuple
    space = PRODUCT

    def __post_init__(self):
        if not self.members:
            raise ValueError("a joint family needs at least one member")
        object.__setattr__(self, "members", tuple(self.members))


@dataclass(frozen=True)
class Shifted:
    """n -> base(n + l)."""

    base: object
    l: int

    @property
    def space(self):
        return self.base.space


@dataclass(frozen=True)
class Dilated:
    """n -> base(n * l)."""

    base: object
    l: int

    @property
    def space(self):
        return self.base.space


@dataclass(frozen=True)
class IntMultiple:
    """n -> l * base(n) mod 1."""

    base: object
    l: int

    @property
    def space(self):
        return self.base.space


SequenceSpec = Union[Polynomial, Affine, SkewOrbitComponent, SkewOrbitFull, ExpSum, Table,
                     Joint, Shifted, Dilated, IntMultiple]
