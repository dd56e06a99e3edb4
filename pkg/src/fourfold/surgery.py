"""Connected sums, blow-ups and the canonical-class extension over
X # d CP2bar.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lattice
from .errors import InternalInconsistency
from .lattice import Class
from .manifold import GeometricFlags, ManifoldModel, default_catalog, euler_characteristic, kappa
from .swarith import SpinCStructure, virtual_dimension


@dataclass(frozen=True)
class SumDecomposition:
    """Y = left # right with the basis of Y = basis(left) followed by basis(right)."""

    left: ManifoldModel
    right: ManifoldModel
    total: ManifoldModel

    @property
    def left_indices(self) -> range:
        return range(0, self.left.rank)

    @property
    def right_indices(self) -> range:
        return range(self.left.rank, self.left.rank + self.right.rank)

    def parts(self) -> tuple[ManifoldModel, ...]:
        """All irreducible summands, left to right."""
        return self.left.parts() + self.right.parts()

    def embed(self, left_class: Class | None = None, right_class: Class | None = None) -> Class:
        lc = tuple(left_class) if left_class is not None else (0,) * self.left.rank
        rc = tuple(right_class) if right_class is not None else (0,) * self.right.rank
        return lc + rc


def _cp2bar() -> ManifoldModel:
    return default_catalog()["CP2bar"]


def connected_sum(a: ManifoldModel, b: ManifoldModel, name: str | None = None) -> tuple[ManifoldModel, SumDecomposition]:
    """Form Q_a + Q_b, b1 additive; chi(a#b) = chi(a) + chi(b) - 2.

    Only spin and simple connectivity are carried over; geometric structures
    on a sum are left to the rule engine.
    """
    flags = GeometricFlags(
        simply_connected=a.flags.simply_connected and b.flags.simply_connected,
        spin=a.flags.spin and b.flags.spin,
    )
    y = ManifoldModel(
        name or f"{a.name} # {b.name}",
        a.b1 + b.b1,
        lattice.direct_sum(a.form, b.form),
        flags,
        None,
        provenance="parsed",
        summands=a.parts() + b.parts(),
    )
    if euler_characteristic(y) != euler_characteristic(a) + euler_characteristic(b) - 2:
        raise InternalInconsistency("euler characteristic is not additive up to 2")
    if y.sigma != a.sigma + b.sigma:
        raise InternalInconsistency("signature is not additive")
    return y, SumDecomposition(a, b, y)


def blow_up(m: ManifoldModel, times: int = 1) -> tuple[ManifoldModel, list[SumDecomposition]]:
    """m # times * CP2bar, with one exceptional generator per copy appended to the basis."""
    decs = []
    y = m
    for _ in range(times):
        y, dec = connected_sum(y, _cp2bar())
        decs.append(dec)
    return y, decs


def blow_up_class(s: SpinCStructure) -> SpinCStructure:
    """c + h on X # CP2bar, where h^2 = -1; the virtual dimension is unchanged."""
    y, _ = blow_up(s.base)
    out = SpinCStructure(y, s.c + (1,))
    if out.square != s.square - 1:
        raise InternalInconsistency("blown-up class square is not c^2 - 1")
    if virtual_dimension(out) != virtual_dimension(s):
        raise InternalInconsistency("blow-up changed the virtual dimension")
    return out


@dataclass(frozen=True)
class NotExtendable:
    reason: str

    def __str__(self):
        return f"not extendable: {self.reason}"


def canonical_extension(s: SpinCStructure) -> SpinCStructure | NotExtendable:
    """K_c = c + 3(h_1 + ... + h_d) on X # d CP2bar when vdim(c) = 2d >= 0."""
    v = virtual_dimension(s)
    if v < 0:
        return NotExtendable(f"negative virtual dimension {v}")
    if v % 2:
        return NotExtendable(f"odd virtual dimension {v}")
    d = v // 2
    y, _ = blow_up(s.base, d)
    k = SpinCStructure(y, s.c + (3,) * d)
    if k.square != s.square - 9 * d or k.square != kappa(y):
        raise InternalInconsistency("K_c^2 does not equal 2 chi(Y) + 3 sigma(Y)")
    return k


def find_minus_one_sphere_classes(m: ManifoldModel, box: int) -> list[Class]:
    """Classes with e^2 = -1 in the box; candidates for exceptional spheres only."""
    if box < 1:
        raise ValueError("box must be at least 1")
    return list(lattice.iter_vectors(m.form, box, square=-1))

