"""Single-fiber spinor algebra on R^4 with a Riemannian metric.

Conventions, all in a positively oriented g-orthonormal frame e0..e3:

* two-forms are 6-vectors in the basis e_i ^ e_j, i < j, ordered
  (01, 02, 03, 12, 13, 23);
* volume form e0^e1^e2^e3, so that *(e0^e1) = e2^e3;
* for u in frame coordinates let rho(u) be the quaternion matrix
  [[u0 + i u1, u2 + i u3], [-u2 + i u3, u0 - i u1]]; Clifford
  multiplication on W+ (+) W- is [[0, -rho(u)], [rho(u)^H, 0]], which
  makes self-dual forms act on W+ and anti-self-dual forms act on W-;
* the spinor [1:0] maps to the complex structure I0 with
  I0 e0 = e1, I0 e2 = e3, whose Kahler form is e0^e1 + e2^e3.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import NotCompatible, NotSelfDual, SingularMetric, ZeroSpinor

TOL_CONSTRUCT = 1e-12
TOL_DERIVED = 1e-10
TOL_COMPOSITE = 1e-8

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class Metric4:
    """Positive definite metric on R^4 with a Cholesky orthonormal frame.

    ``g = L L^T``; the frame is ``L^-T`` (columns g-orthonormal, det > 0),
    and frame coordinates of a vector v are ``L^T v``.
    """

    def __init__(self, g):
        g = np.array(g, dtype=float)
        if g.shape != (4, 4):
            raise SingularMetric("metric must be 4x4")
        scale = max(1.0, float(np.abs(g).max()))
        if np.abs(g - g.T).max() > TOL_CONSTRUCT * scale:
            raise SingularMetric("metric is not symmetric")
        g = (g + g.T) / 2
        try:
            chol = np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise SingularMetric("metric is not positive definite") from None
        self.g = g
        self.chol = chol
        self.frame = np.linalg.inv(chol).T
        self.orientation = 1
        resid = np.abs(self.frame.T @ g @ self.frame - np.eye(4)).max()
        if resid > TOL_CONSTRUCT * np.linalg.cond(g) or np.linalg.det(self.frame) <= 0:
            raise SingularMetric(f"frame factorization failed (residual {resid:.2e})")

    @classmethod
    def standard(cls) -> "Metric4":
        return cls(np.eye(4))

    def inner(self, v, w):
        return np.asarray(v) @ self.g @ np.asarray(w)

    def to_frame(self, v):
        return self.chol.T @ np.asarray(v)

    def from_frame(self, u):
        return self.frame @ np.asarray(u)

    def endo_to_frame(self, a):
        return self.chol.T @ a @ self.frame

    def endo_from_frame(self, a):
        return self.frame @ a @ self.chol.T


def random_metric(rng: np.random.Generator, max_cond: float = 1e4) -> Metric4:
    """Random SPD metric with condition number at most ``max_cond``."""
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    half = np.sqrt(max_cond)
    lam = np.exp(rng.uniform(-np.log(half), np.log(half), size=4))
    return Metric4(q @ np.diag(lam) @ q.T)


# -- Clifford module ---------------------------------------------------------

def rho(u) -> np.ndarray:
    u0, u1, u2, u3 = u
    return np.array([[u0 + 1j * u1, u2 + 1j * u3], [-u2 + 1j * u3, u0 - 1j * u1]])


def clifford_action(m: Metric4, v) -> np.ndarray:
    """Clifford multiplication by a vector (coordinate basis) on W+ (+) W-."""
    r = rho(m.to_frame(v))
    c = np.zeros((4, 4), dtype=complex)
    c[:2, 2:] = -r
    c[2:, :2] = r.conj().T
    return c


def clifford_plus_to_minus(m: Metric4, v) -> np.ndarray:
    return clifford_action(m, v)[2:, :2]


# -- two-forms -----------------------------------------------------------------

def form_matrix(f) -> np.ndarray:
    f = np.asarray(f)
    a = np.zeros((4, 4), dtype=f.dtype)
    for k, (i, j) in enumerate(PAIRS):
        a[i, j] = f[k]
        a[j, i] = -f[k]
    return a


def form_from_matrix(a) -> np.ndarray:
    return np.array([a[i, j] for i, j in PAIRS])


def _star_matrix() -> np.ndarray:
    s = np.zeros((6, 6))
    index = {p: k for k, p in enumerate(PAIRS)}
    for (i, j) in PAIRS:
        k, l = (x for x in range(4) if x not in (i, j))
        sign = np.linalg.det(np.eye(4)[[i, j, k, l]])
        s[index[(k, l)], index[(i, j)]] = sign
    return s


STAR = _star_matrix()

SD_BASIS = np.array([[1, 0, 0, 0, 0, 1], [0, 1, 0, 0, -1, 0], [0, 0, 1, 1, 0, 0]], dtype=float)
ASD_BASIS = np.array([[1, 0, 0, 0, 0, -1], [0, 1, 0, 0, 1, 0], [0, 0, 1, -1, 0, 0]], dtype=float)


def hodge_star2(m: Metric4, f) -> np.ndarray:
    """Hodge star of a two-form given in frame components."""
    return STAR @ np.asarray(f)


def _levi_civita() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        eps[perm] = np.linalg.det(np.eye(4)[list(perm)])
    return eps


_EPS = _levi_civita()


def hodge_star_coords(m: Metric4) -> np.ndarray:
    """6x6 star on coordinate components a_ij of sum a_ij dx^i ^ dx^j (i < j).

    Index formula (*a)_kl = 1/2 sqrt(det g) eps_ijkl g^ia g^jb a_ab; it does
    not use the frame.
    """
    ginv = np.linalg.inv(m.g)
    vol = np.sqrt(np.linalg.det(m.g))
    out = np.zeros((6, 6))
    for col in range(6):
        a = form_matrix(np.eye(6)[col])
        raised = ginv @ a @ ginv.T
        star = 0.5 * vol * np.einsum("ij,ijkl->kl", raised, _EPS)
        out[:, col] = form_from_matrix(star)
    return out


def coords_to_frame_form(m: Metric4, a) -> np.ndarray:
    """Frame components of a coordinate-basis two-form (dx^i = frame^i_a theta^a)."""
    return form_from_matrix(m.frame.T @ form_matrix(a) @ m.frame)


def frame_to_coords_form(m: Metric4, f) -> np.ndarray:
    return form_from_matrix(m.chol @ form_matrix(f) @ m.chol.T)


def wedge(f, h) -> float:
    """Coefficient of the volume form in f ^ h."""
    f = np.asarray(f)
    h = np.asarray(h)
    return f[0] * h[5] - f[1] * h[4] + f[2] * h[3] + f[3] * h[2] - f[4] * h[1] + f[5] * h[0]


def self_dual_part(f) -> np.ndarray:
    return (np.asarray(f) + STAR @ f) / 2


def anti_self_dual_part(f) -> np.ndarray:
    return (np.asarray(f) - STAR @ f) / 2


def clifford_two_form(f) -> np.ndarray:
    """Action of a frame two-form on W+ (+) W-: sum f_ij c(e_i) c(e_j)."""
    out = np.zeros((4, 4), dtype=complex)
    basis = np.eye(4)
    for k, (i, j) in enumerate(PAIRS):
        ci = np.zeros((4, 4), dtype=complex)
        cj = np.zeros((4, 4), dtype=complex)
        for c, idx in ((ci, i), (cj, j)):
            r = rho(basis[idx])
            c[:2, 2:] = -r
            c[2:, :2] = r.conj().T
        out += f[k] * (ci @ cj)
    return out


def clifford_two_form_coords(m: Metric4, a) -> np.ndarray:
    """Action of a coordinate-basis two-form, built from c(v) of metric-dual vectors.

    For a_ij dx^i ^ dx^j the action is a_ij [c(X^i), c(X^j)]/2 with
    X^i = g^-1 dx^i.
    """
    ginv = np.linalg.inv(m.g)
    cs = [clifford_action(m, ginv[:, i]) for i in range(4)]
    out = np.zeros((4, 4), dtype=complex)
    for k, (i, j) in enumerate(PAIRS):
        out += a[k] * (cs[i] @ cs[j] - cs[j] @ cs[i]) / 2
    return out


def form_to_endo(m: Metric4, f) -> np.ndarray:
    """Traceless skew-hermitian endomorphism of W+ for a self-dual frame two-form."""
    f = np.asarray(f, dtype=float)
    if np.abs(f - STAR @ f).max() > TOL_DERIVED * max(1.0, np.abs(f).max()):
        raise NotSelfDual("two-form is not self-dual")
    e = clifford_two_form(f)[:2, :2]
    return e - np.trace(e) / 2 * np.eye(2)


def _endo_images() -> np.ndarray:
    m = Metric4.standard()
    cols = []
    for b in SD_BASIS:
        e = form_to_endo(m, b)
        cols.append(np.concatenate([e.real.ravel(), e.imag.ravel()]))
    return np.array(cols).T


_IMAGES = _endo_images()


def endo_to_form(m: Metric4, a) -> np.ndarray:
    """Inverse of :func:`form_to_endo` on traceless skew-hermitian matrices."""
    a = np.asarray(a, dtype=complex)
    vec = np.concatenate([a.real.ravel(), a.imag.ravel()])
    coeff, *_ = np.linalg.lstsq(_IMAGES, vec, rcond=None)
    return coeff @ SD_BASIS


def quad_map(m: Metric4, phi) -> tuple[np.ndarray, np.ndarray]:
    """(phi phi^H)_0 and the self-dual form matching i (phi phi^H)_0."""
    phi = np.asarray(phi, dtype=complex)
    endo = np.outer(phi, phi.conj()) - 0.5 * np.vdot(phi, phi).real * np.eye(2)
    return endo, endo_to_form(m, 1j * endo)


def hopf(phi) -> np.ndarray:
    """Unit vector (x, y, z) with (phi phi^H)_0 = (x s1 + y s2 + z s3)/2 for unit phi."""
    phi = np.asarray(phi, dtype=complex)
    phi = phi / np.linalg.norm(phi)
    a, b = phi
    ab = a * np.conj(b)
    return np.array([2 * ab.real, -2 * ab.imag, abs(a) ** 2 - abs(b) ** 2])


def inverse_hopf(n) -> np.ndarray:
    """A unit spinor whose Hopf image is the unit vector ``n``."""
    x, y, z = np.asarray(n, dtype=float) / np.linalg.norm(n)
    if z > -0.5:
        a = np.sqrt((1 + z) / 2)
        return np.array([a, (x + 1j * y) / (2 * a)])
    b = np.sqrt((1 - z) / 2)
    return np.array([(x - 1j * y) / (2 * b), b])


def _acs_from_frame_form(f) -> np.ndarray:
    # omega(v, w) = g(Jv, w) gives J_frame = Omega^T.
    return form_matrix(f).T


QUATERNION_PLUS = tuple(_acs_from_frame_form(b) for b in SD_BASIS)
QUATERNION_MINUS = tuple(_acs_from_frame_form(b) for b in ASD_BASIS)


def acs_from_sphere(m: Metric4, n, ruling: str = "plus") -> np.ndarray:
    """alpha I + beta J + gamma K (coordinate basis) for a unit vector n."""
    n = np.asarray(n, dtype=float)
    quats = QUATERNION_PLUS if ruling == "plus" else QUATERNION_MINUS
    j = sum(c * q for c, q in zip(n, quats))
    return m.endo_from_frame(j)


def sphere_coordinates(m: Metric4, J, ruling: str = "plus") -> np.ndarray:
    """Inverse of :func:`acs_from_sphere`; tr(I^2) = -4 for each generator."""
    jf = m.endo_to_frame(np.asarray(J, dtype=float))
    quats = QUATERNION_PLUS if ruling == "plus" else QUATERNION_MINUS
    return np.array([-np.trace(jf @ q) / 4 for q in quats])


def spinor_to_acs(m: Metric4, phi) -> np.ndarray:
    """Compatible, orientation-preserving complex structure of the spinor line [phi].

    The Hopf image (x, y, z) of phi gives the twistor-sphere point
    z I + y J + x K, matching the order of the self-dual generators
    e01+e23, e02-e13, e03+e12.
    """
    phi = np.asarray(phi, dtype=complex)
    if np.linalg.norm(phi) <= 1e-12:
        raise ZeroSpinor("spinor vanishes")
    x, y, z = hopf(phi)
    return acs_from_sphere(m, (z, y, x), "plus")


def spinor_to_reverse_acs(m: Metric4, psi) -> np.ndarray:
    """Same construction for W-: complex structures inducing the reverse orientation."""
    psi = np.asarray(psi, dtype=complex)
    if np.linalg.norm(psi) <= 1e-12:
        raise ZeroSpinor("spinor vanishes")
    x, y, z = hopf(psi)
    return acs_from_sphere(m, (z, y, x), "minus")


def compatibility_residual(m: Metric4, J) -> float:
    J = np.asarray(J, dtype=float)
    scale = np.abs(m.g).max()
    r1 = np.abs(J @ J + np.eye(4)).max()
    r2 = np.abs(J.T @ m.g @ J - m.g).max() / scale
    return max(r1, r2)


def associated_two_form(m: Metric4, J) -> np.ndarray:
    """omega(v, w) = g(Jv, w) in frame components."""
    J = np.asarray(J, dtype=float)
    if compatibility_residual(m, J) > TOL_COMPOSITE:
        raise NotCompatible("J is not a g-compatible complex structure")
    jf = m.endo_to_frame(J)
    return form_from_matrix(jf.T)
