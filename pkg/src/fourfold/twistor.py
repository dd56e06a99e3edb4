"""The complexified quadric Q = {g(z, z) = 0} in CP^3, its two rulings by
lines, and the reality structures on them.

Lines are stored by an orthonormal spanning pair; Plucker coordinates are
p_ij = u_i v_j - u_j v_i over the pairs (01, 02, 03, 12, 13, 23) in the
coordinate basis.  A line on Q lies in the plus ruling when its bivector,
taken in the orthonormal frame, is self-dual.
"""

from __future__ import annotations

import numpy as np

from .cliffkern import (
    ASD_BASIS,
    PAIRS,
    SD_BASIS,
    STAR,
    TOL_COMPOSITE,
    Metric4,
    compatibility_residual,
    form_from_matrix,
    form_matrix,
    hopf,
    inverse_hopf,
    spinor_to_acs,
    spinor_to_reverse_acs,
)
from .errors import (
    DegeneratePencil,
    NotCompatible,
    NotEigen,
    NotOnConic,
    NotOnQuadric,
    PointOnQuadric,
    PreconditionViolation,
    TangentsCoincide,
)

TOL_QUADRIC = 1e-10
TOL_RULING = 1e-9


def _first_nonzero_normalize(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    peak = np.abs(z).max()
    if peak == 0:
        raise ValueError("zero vector has no projective class")
    k = int(np.argmax(np.abs(z) > 1e-9 * peak))
    return z / z[k]


def proj_distance(a, b) -> float:
    """sin of the Fubini-Study angle between [a] and [b]; 0 iff equal.

    Computed as the residual of projecting the unit a onto b, which keeps
    full precision near 0.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.linalg.norm(a - np.vdot(b, a) * b))


class ProjPoint:
    __slots__ = ("coords",)

    def __init__(self, z):
        self.coords = _first_nonzero_normalize(z)

    def unit(self) -> np.ndarray:
        return self.coords / np.linalg.norm(self.coords)

    def __repr__(self):
        return "ProjPoint[" + ":".join(f"{c:.4g}" for c in self.coords) + "]"


class ProjLine:
    """Projective line through two independent points of CP^3."""

    __slots__ = ("basis",)

    def __init__(self, u, v):
        m = np.column_stack([np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)])
        q, r = np.linalg.qr(m)
        if abs(r[1, 1]) <= 1e-12 * max(1.0, abs(r[0, 0])):
            raise ValueError("points do not span a line")
        self.basis = q

    @property
    def plucker(self) -> np.ndarray:
        u, v = self.basis.T
        return _first_nonzero_normalize(form_from_matrix(np.outer(u, v) - np.outer(v, u)))

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        return self.basis[:, 0], self.basis[:, 1]

    def contains(self, z, tol: float = 1e-10) -> bool:
        z = np.asarray(z, dtype=complex)
        resid = z - self.basis @ (self.basis.conj().T @ z)
        return np.linalg.norm(resid) <= tol * np.linalg.norm(z)

    def __repr__(self):
        return "ProjLine(plucker=" + ", ".join(f"{c:.4g}" for c in self.plucker) + ")"


def line_distance(a: ProjLine, b: ProjLine) -> float:
    return proj_distance(a.plucker, b.plucker)


def quadric_value(m: Metric4, z) -> complex:
    """g(z, z) (bilinear) for the unit representative of [z], scaled by |g|."""
    z = np.asarray(z, dtype=complex)
    z = z / np.linalg.norm(z)
    return complex(z @ m.g @ z) / np.linalg.norm(m.g, 2)


def quadric_membership(m: Metric4, z, tol: float = TOL_QUADRIC) -> bool:
    return abs(quadric_value(m, z)) <= tol


def no_real_points_check(m: Metric4, samples: int, rng: np.random.Generator) -> bool:
    """True when no sampled real point lies on Q, as definiteness demands."""
    for _ in range(samples):
        v = rng.normal(size=4)
        if quadric_membership(m, v):
            return False
    return True


def line_on_quadric(m: Metric4, line: ProjLine, tol: float = TOL_COMPOSITE) -> bool:
    u, v = line.points()
    scale = np.linalg.norm(m.g, 2)
    vals = (u @ m.g @ u, v @ m.g @ v, u @ m.g @ v)
    return max(abs(x) for x in vals) <= tol * scale


def frame_bivector(m: Metric4, line: ProjLine) -> np.ndarray:
    """Unit-norm bivector of the line in frame components."""
    u, v = (m.to_frame(x) for x in line.points())
    p = form_from_matrix(np.outer(u, v) - np.outer(v, u))
    return p / np.linalg.norm(p)


def ruling_residuals(m: Metric4, line: ProjLine) -> tuple[float, float]:
    """|*p - p| and |*p + p| for the unit frame bivector p."""
    p = frame_bivector(m, line)
    return float(np.linalg.norm(STAR @ p - p)), float(np.linalg.norm(STAR @ p + p))


def ruling_of_line(m: Metric4, line: ProjLine) -> str:
    """"plus" or "minus"; the bivector of a line on Q is a star eigenvector."""
    if not line_on_quadric(m, line):
        raise NotOnQuadric("line does not lie on the quadric")
    plus, minus = ruling_residuals(m, line)
    if min(plus, minus) > TOL_RULING * 100:
        raise NotEigen(f"bivector is not a star eigenvector (residuals {plus:.2e}, {minus:.2e})")
    return "plus" if plus < minus else "minus"


def lines_of_acs(m: Metric4, J) -> tuple[ProjLine, ProjLine]:
    """(l_J, conj l_J): the +i and -i eigenspaces of J on C^4."""
    J = np.asarray(J, dtype=float)
    if compatibility_residual(m, J) > TOL_COMPOSITE:
        raise NotCompatible("J is not a g-compatible complex structure")
    proj = (np.eye(4) - 1j * J) / 2
    u, _, _ = np.linalg.svd(proj)
    l = ProjLine(u[:, 0], u[:, 1])
    lbar = ProjLine(u[:, 0].conj(), u[:, 1].conj())
    return l, lbar


def plus_line(m: Metric4, phi) -> ProjLine:
    """Plus-ruling line attached to a spinor of W+."""
    return lines_of_acs(m, spinor_to_acs(m, phi))[0]


def minus_line(m: Metric4, psi) -> ProjLine:
    """Minus-ruling line attached to a spinor of W-."""
    return lines_of_acs(m, spinor_to_reverse_acs(m, psi))[0]


def ruling_coordinate(m: Metric4, line: ProjLine) -> tuple[str, np.ndarray]:
    """(ruling, unit spinor) with plus_line / minus_line of the spinor equal to ``line``."""
    ruling = ruling_of_line(m, line)
    p = frame_bivector(m, line)
    basis = SD_BASIS if ruling == "plus" else ASD_BASIS
    w = basis @ p / 2
    n = (np.cross(w, w.conj()) / 2j).real
    if ruling == "minus":
        # the anti-self-dual triple satisfies I J = -K
        n = -n
    # sphere point (alpha, beta, gamma) = Hopf image (z, y, x)
    alpha, beta, gamma = n / np.linalg.norm(n)
    return ruling, inverse_hopf((gamma, beta, alpha))


def theta(z) -> np.ndarray:
    """Real structure on CP^3: complex conjugation of homogeneous coordinates."""
    return np.conj(np.asarray(z, dtype=complex))


def theta_line(line: ProjLine) -> ProjLine:
    u, v = line.points()
    return ProjLine(theta(u), theta(v))


def theta_plus(m: Metric4, line: ProjLine) -> ProjLine:
    """Antiholomorphic involution of the plus ruling induced by conjugation."""
    if ruling_of_line(m, line) != "plus":
        raise PreconditionViolation("line is not in the plus ruling")
    return theta_line(line)


def theta_minus(m: Metric4, line: ProjLine) -> ProjLine:
    if ruling_of_line(m, line) != "minus":
        raise PreconditionViolation("line is not in the minus ruling")
    return theta_line(line)


def spinor_antipode(phi) -> np.ndarray:
    """Quaternionic structure [a:b] -> [-conj b : conj a]; covers the antipodal map."""
    a, b = np.asarray(phi, dtype=complex)
    return np.array([-np.conj(b), np.conj(a)])


def _residual_line(m: Metric4, p, line: ProjLine, expect: str) -> ProjLine:
    p = np.asarray(p, dtype=complex)
    if quadric_membership(m, p, 1e-8):
        raise PointOnQuadric("p lies on the quadric")
    if ruling_of_line(m, line) != expect:
        raise PreconditionViolation(f"line is not in the {expect} ruling")
    p = p / np.linalg.norm(p)
    u, v = line.points()
    bu = u @ m.g @ p
    bv = v @ m.g @ p
    qp = p @ m.g @ p
    scale = np.linalg.norm(m.g, 2)
    if max(abs(bu), abs(bv)) <= 1e-12 * scale:
        raise DegeneratePencil("p is polar to the line")
    # The plane <p, l> meets Q in l and in the line s q(p) + 2t B(p,u) + 2r B(p,v) = 0.
    meet = bv * u - bu * v
    w, bw = (u, bu) if abs(bu) >= abs(bv) else (v, bv)
    second = p - qp / (2 * bw) * w
    return ProjLine(meet, second)


def psi_p(m: Metric4, p, line: ProjLine) -> ProjLine:
    """Second line of the plane <p, line> on Q; minus ruling to plus ruling."""
    return _residual_line(m, p, line, "minus")


def psi_p_inverse(m: Metric4, p, line: ProjLine) -> ProjLine:
    """The same residual construction, plus ruling back to minus ruling."""
    return _residual_line(m, p, line, "plus")


def sd_coordinates(m: Metric4, bivector) -> np.ndarray:
    """SD components w (in the basis e01+e23, e02-e13, e03+e12) of a coordinate-basis bivector."""
    pf = form_from_matrix(m.chol.T @ form_matrix(np.asarray(bivector, dtype=complex)) @ m.chol)
    return SD_BASIS @ pf / 2


def tangent_conic_quadratic(m: Metric4, bivector) -> np.ndarray:
    """Real self-dual frame form where the tangents to the plus conic at [phi] and theta+[phi] meet.

    ``bivector`` is a point of the conic given as a coordinate-basis
    bivector (e.g. ProjLine.plucker of a plus-ruling line).  The result is
    normalized to unit length; it agrees with the quadratic map up to real
    scale.
    """
    b = np.asarray(bivector, dtype=complex)
    pf = form_from_matrix(m.chol.T @ form_matrix(b) @ m.chol)
    pf = pf / np.linalg.norm(pf)
    if np.linalg.norm(STAR @ pf - pf) > 1e-8:
        raise NotOnConic("bivector is not self-dual")
    w = SD_BASIS @ pf / 2
    if abs(w @ w) > 1e-8 * np.vdot(w, w).real:
        raise NotOnConic("bivector is not decomposable")
    xi = np.cross(w, w.conj()) / 2j
    if np.linalg.norm(xi) <= 1e-10 * np.vdot(w, w).real:
        raise TangentsCoincide("tangent lines coincide")
    xi = xi.real
    form = xi @ SD_BASIS
    return form / np.linalg.norm(form)
