"""Spin^c structure arithmetic: spinor bundle Chern numbers, the Dirac and
half de Rham indices, the virtual dimension of the moduli space and the
sign exponent of the charge-conjugation symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lattice
from .errors import DimensionMismatch, InternalInconsistency, NonIntegralDimension, NotCharacteristic
from .lattice import Class
from .manifold import ManifoldModel, euler_characteristic


@dataclass(frozen=True)
class SpinCStructure:
    """A characteristic class c on a model; c = c1(W+) = c1(W-)."""

    base: ManifoldModel
    c: Class

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(int(x) for x in self.c))
        if len(self.c) != self.base.rank:
            raise DimensionMismatch(f"class of length {len(self.c)} on {self.base.name} of rank {self.base.rank}")
        if not lattice.is_characteristic(self.base.form, self.c):
            raise NotCharacteristic(f"{self.c} is not characteristic on {self.base.name}")

    @property
    def square(self) -> int:
        return lattice.square(self.base.form, self.c)

    def negate(self) -> "SpinCStructure":
        return SpinCStructure(self.base, tuple(-x for x in self.c))


@dataclass(frozen=True)
class NonIntegral:
    """Marker for a symmetry exponent (chi + sigma)/4 that is not an integer."""

    value: Fraction

    def __str__(self):
        return f"non-integral ({self.value})"


@dataclass(frozen=True)
class ValueClass:
    kind: str  # "zero", "count_points", "pair_eta_power", "odd_trivial"
    d: int | None = None

    def __str__(self):
        return f"{self.kind}({self.d})" if self.d is not None else self.kind


def _quarter(numerator: int, what: str) -> int:
    if numerator % 4:
        raise NonIntegralDimension(f"{what}: {numerator}/4 is not an integer")
    return numerator // 4


def virtual_dimension(s: SpinCStructure) -> int:
    m = s.base
    return _quarter(s.square - 2 * euler_characteristic(m) - 3 * m.sigma, "virtual dimension")


def chern_numbers(s: SpinCStructure) -> tuple[int, int]:
    """``(c2(W+), c2(W-))``; the second exceeds the first by chi."""
    plus = virtual_dimension(s)
    return plus, plus + euler_characteristic(s.base)


def dirac_index(s: SpinCStructure) -> int:
    """Real index of the Dirac operator, (c^2 - sigma)/4."""
    return _quarter(s.square - s.base.sigma, "Dirac index")


def half_derham_index(m: ManifoldModel) -> int:
    """Index of d* + d+ on 1-forms, -(1 - b1 + b2+)."""
    value = -(1 - m.b1 + m.b2_plus)
    twice = -(euler_characteristic(m) + m.sigma)
    if 2 * value != twice:
        raise InternalInconsistency(f"{m.name}: -(1-b1+b2+)={value} but -(chi+sigma)/2={Fraction(twice, 2)}")
    return value


def symmetry_exponent(m: ManifoldModel) -> int | NonIntegral:
    """k with N(-c) = (-1)^k N(c), or :class:`NonIntegral`."""
    num = euler_characteristic(m) + m.sigma
    if num % 4:
        return NonIntegral(Fraction(num, 4))
    return num // 4


def sw_defined_value_class(s: SpinCStructure) -> ValueClass:
    """How the invariant is defined on this class, by its virtual dimension."""
    v = virtual_dimension(s)
    if v < 0:
        return ValueClass("zero")
    if v == 0:
        return ValueClass("count_points")
    if v % 2:
        return ValueClass("odd_trivial")
    return ValueClass("pair_eta_power", v // 2)


@dataclass(frozen=True)
class IndexReport:
    dirac_index: int
    half_derham_index: int
    vdim: int
    c2_wplus: int
    c2_wminus: int
    symmetry_k: int | NonIntegral
    value_class: ValueClass


def index_report(s: SpinCStructure) -> IndexReport:
    plus, minus = chern_numbers(s)
    rep = IndexReport(
        dirac_index(s),
        half_derham_index(s.base),
        virtual_dimension(s),
        plus,
        minus,
        symmetry_exponent(s.base),
        sw_defined_value_class(s),
    )
    if rep.vdim != rep.dirac_index + rep.half_derham_index:
        raise InternalInconsistency("vdim differs from the sum of the two indices")
    return rep
