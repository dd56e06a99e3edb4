"""Exact arithmetic of unimodular symmetric integer bilinear forms.

Classes in H^2(X; Z) are plain tuples of ints in the basis of the form.
Signature counts come from a symmetric Gaussian reduction over
:class:`fractions.Fraction`, never from a floating eigensolver.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import DimensionMismatch, NonUnimodular, NotSymmetric

Class = tuple[int, ...]

E8_CARTAN: tuple[tuple[int, ...], ...] = (
    (2, 0, -1, 0, 0, 0, 0, 0),
    (0, 2, 0, -1, 0, 0, 0, 0),
    (-1, 0, 2, -1, 0, 0, 0, 0),
    (0, -1, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, -1),
    (0, 0, 0, 0, 0, 0, -1, 2),
)


class SignatureData:
    __slots__ = ("b2_plus", "b2_minus")

    def __init__(self, b2_plus: int, b2_minus: int):
        self.b2_plus = b2_plus
        self.b2_minus = b2_minus

    @property
    def sigma(self) -> int:
        return self.b2_plus - self.b2_minus

    @property
    def rank(self) -> int:
        return self.b2_plus + self.b2_minus

    def __eq__(self, other):
        if not isinstance(other, SignatureData):
            return NotImplemented
        return (self.b2_plus, self.b2_minus) == (other.b2_plus, other.b2_minus)

    def __hash__(self):
        return hash((self.b2_plus, self.b2_minus))

    def __iter__(self):
        yield self.b2_plus
        yield self.b2_minus
        yield self.sigma

    def __repr__(self):
        return f"SignatureData(b2_plus={self.b2_plus}, b2_minus={self.b2_minus}, sigma={self.sigma})"


def symmetric_inertia(matrix: Sequence[Sequence[int]]) -> tuple[int, int, int, Fraction]:
    """Return ``(positive, negative, zero, determinant)`` of a symmetric rational matrix.

    Congruence reduction: pivot on a nonzero diagonal entry, or, when the
    whole remaining diagonal vanishes, replace e_i by e_i + e_j for an
    off-diagonal a_ij != 0, which creates the pivot 2 a_ij. Both moves are
    unimodular, so the product of pivots is the determinant.
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] for row in matrix]
    active = list(range(n))
    pos = neg = 0
    det = Fraction(1)
    while active:
        pivot = next((i for i in active if a[i][i] != 0), None)
        if pivot is None:
            pair = next(
                ((i, j) for i in active for j in active if i < j and a[i][j] != 0),
                None,
            )
            if pair is None:
                return pos, neg, len(active), Fraction(0)
            i, j = pair
            for k in active:
                a[i][k] += a[j][k]
            for k in active:
                a[k][i] += a[k][j]
            pivot = i
        p = a[pivot][pivot]
        if p > 0:
            pos += 1
        else:
            neg += 1
        det *= p
        active.remove(pivot)
        cols = [j for j in active if a[pivot][j] != 0]
        for i in active:
            f = a[i][pivot]
            if f == 0:
                continue
            f /= p
            row = a[i]
            prow = a[pivot]
            for j in cols:
                row[j] -= f * prow[j]
    return pos, neg, 0, det


class IntersectionForm:
    """Unimodular symmetric integer form; immutable.

    Symmetry and ``|det| = 1`` are checked at construction.
    """

    __slots__ = ("matrix", "_sig", "_inverse", "_char_base")

    def __init__(self, matrix: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in row) for row in matrix)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise DimensionMismatch("intersection form must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise NotSymmetric(f"entry ({i},{j})={rows[i][j]} but ({j},{i})={rows[j][i]}")
        pos, neg, _, det = symmetric_inertia(rows)
        if abs(det) != 1:
            raise NonUnimodular(f"determinant {det} is not +-1")
        self._init(rows, SignatureData(pos, neg))

    def _init(self, rows, sig):
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "_sig", sig)
        object.__setattr__(self, "_inverse", None)
        object.__setattr__(self, "_char_base", None)

    @classmethod
    def _trusted(cls, rows, sig: SignatureData) -> "IntersectionForm":
        # Used by direct sums and negation, whose validity follows from the inputs.
        self = object.__new__(cls)
        self._init(rows, sig)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("IntersectionForm is immutable")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    n = rank

    def __eq__(self, other):
        if not isinstance(other, IntersectionForm):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"IntersectionForm({[list(r) for r in self.matrix]})"

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]

    def is_even(self) -> bool:
        return all(self.matrix[i][i] % 2 == 0 for i in range(self.rank))

    def inverse(self) -> tuple[tuple[int, ...], ...]:
        """Exact inverse; integral because the form is unimodular."""
        if self._inverse is None:
            object.__setattr__(self, "_inverse", _integral_inverse(self.matrix))
        return self._inverse

    def characteristic_base(self) -> Class:
        """The unique characteristic vector with all coordinates in {0, 1}.

        Every characteristic vector is congruent to it mod 2, because the form
        is invertible mod 2.
        """
        if self._char_base is None:
            object.__setattr__(self, "_char_base", _solve_mod2(self.matrix))
        return self._char_base


def _integral_inverse(rows) -> tuple[tuple[int, ...], ...]:
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = []
    for r in range(n):
        row = a[r][n:]
        assert all(x.denominator == 1 for x in row)
        out.append(tuple(int(x) for x in row))
    return tuple(out)


def _solve_mod2(rows) -> Class:
    # Gaussian elimination over GF(2) on bitmask rows: Q c = diag(Q) mod 2.
    n = len(rows)
    eqs = []
    for i in range(n):
        mask = 0
        for j in range(n):
            if rows[i][j] & 1:
                mask |= 1 << j
        eqs.append((mask, rows[i][i] & 1))
    pivots: list[tuple[int, int, int]] = []
    for mask, rhs in eqs:
        for pcol, pmask, prhs in pivots:
            if mask >> pcol & 1:
                mask ^= pmask
                rhs ^= prhs
        if mask == 0:
            if rhs:
                raise NonUnimodular("form is singular mod 2")
            continue
        pcol = mask.bit_length() - 1
        pivots = [
            (c, m ^ mask, r ^ rhs) if m >> pcol & 1 else (c, m, r) for c, m, r in pivots
        ]
        pivots.append((pcol, mask, rhs))
    sol = [0] * n
    for pcol, _mask, rhs in pivots:
        sol[pcol] = rhs
    return tuple(sol)


# -- constructors -----------------------------------------------------------

def diagonal(*entries: int) -> IntersectionForm:
    rows = [[0] * len(entries) for _ in entries]
    for i, e in enumerate(entries):
        if e not in (1, -1):
            raise NonUnimodular(f"diagonal entry {e} is not +-1")
        rows[i][i] = e
    pos = sum(1 for e in entries if e > 0)
    return IntersectionForm._trusted(tuple(map(tuple, rows)), SignatureData(pos, len(entries) - pos))


def hyperbolic() -> IntersectionForm:
    return IntersectionForm._trusted(((0, 1), (1, 0)), SignatureData(1, 1))


def e8(sign: int = 1) -> IntersectionForm:
    """The E8 form (positive definite) or its negative for ``sign=-1``."""
    rows = tuple(tuple(sign * x for x in row) for row in E8_CARTAN)
    sig = SignatureData(8, 0) if sign > 0 else SignatureData(0, 8)
    return IntersectionForm._trusted(rows, sig)


def empty_form() -> IntersectionForm:
    return IntersectionForm._trusted((), SignatureData(0, 0))


def direct_sum(*forms: IntersectionForm) -> IntersectionForm:
    n = sum(f.rank for f in forms)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for f in forms:
        for i, row in enumerate(f.matrix):
            rows[off + i][off:off + f.rank] = row
        off += f.rank
    sig = SignatureData(sum(f._sig.b2_plus for f in forms), sum(f._sig.b2_minus for f in forms))
    return IntersectionForm._trusted(tuple(map(tuple, rows)), sig)


# -- operations ---------------------------------------------------------------

def signature_data(form: IntersectionForm) -> SignatureData:
    return form._sig


def _check_dim(form: IntersectionForm, *classes: Sequence[int]) -> None:
    for c in classes:
        if len(c) != form.rank:
            raise DimensionMismatch(f"class of length {len(c)} against form of rank {form.rank}")


def pair(form: IntersectionForm, x: Sequence[int], y: Sequence[int]) -> int:
    _check_dim(form, x, y)
    q = form.matrix
    total = 0
    for i, xi in enumerate(x):
        if xi:
            row = q[i]
            total += xi * sum(row[j] * yj for j, yj in enumerate(y) if yj)
    return total


def square(form: IntersectionForm, x: Sequence[int]) -> int:
    return pair(form, x, x)


def is_characteristic(form: IntersectionForm, c: Sequence[int]) -> bool:
    _check_dim(form, c)
    q = form.matrix
    for i in range(form.rank):
        if (sum(q[i][j] * c[j] for j in range(form.rank)) - q[i][i]) % 2:
            return False
    return True


def reverse_orientation(form: IntersectionForm) -> IntersectionForm:
    rows = tuple(tuple(-x for x in row) for row in form.matrix)
    return IntersectionForm._trusted(rows, SignatureData(form._sig.b2_minus, form._sig.b2_plus))


def definiteness(form: IntersectionForm) -> int:
    """+1 positive definite, -1 negative definite, 0 indefinite or rank 0."""
    sig = form._sig
    if form.rank == 0:
        return 0
    if sig.b2_minus == 0:
        return 1
    if sig.b2_plus == 0:
        return -1
    return 0


def definite_coordinate_bound(form: IntersectionForm, value: int) -> int:
    """Largest ``|x_i|`` possible for ``Q(x, x) = value`` on a definite form.

    In the inner product +-Q, ``x_i`` is the pairing of x with the i-th dual
    basis vector, whose norm is ``|Q^-1_ii|``; Cauchy-Schwarz gives
    ``x_i^2 <= |Q^-1_ii| * |value|``.
    """
    if definiteness(form) == 0:
        raise ValueError("bound needs a definite form")
    inv = form.inverse()
    return max(math.isqrt(abs(inv[i][i]) * abs(value)) for i in range(form.rank))


def _contiguous_blocks(form: IntersectionForm) -> list[tuple[int, int]]:
    q = form.matrix
    n = form.rank
    blocks = []
    start = 0
    reach = -1
    for i in range(n):
        last = max((j for j in range(n) if q[i][j] != 0), default=i)
        reach = max(reach, last)
        if reach <= i:
            blocks.append((start, i + 1))
            start = i + 1
    return blocks


def _ldl(rows) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Exact A = U^T D U with U unit upper triangular, for positive definite A."""
    n = len(rows)
    a = [[Fraction(x) for x in r] for r in rows]
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        for j in range(i + 1, n):
            u[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                a[j][k] -= u[i][j] * u[i][k] * d[i]
    return d, u


def _ellipsoid_points(rows, sign: int, box: int, budget: int, base) -> list[tuple[Class, int]]:
    """(x, Q(x)) for all x in the box with 0 <= sign*Q(x) <= budget, sorted.

    ``sign*Q`` must be positive definite.  Fincke-Pohst in exact
    arithmetic: sign*Q = sum d_i (x_i + sum_j u_ij x_j)^2, coordinates fixed
    from the last one down, each confined to the interval the remaining
    budget allows.
    """
    n = len(rows)
    d, u = _ldl([[sign * x for x in r] for r in rows])
    out = []
    x = [0] * n

    def rec(i: int, left: Fraction):
        if i < 0:
            out.append((tuple(x), sign * int(budget - left)))
            return
        centre = -sum((u[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        span = math.isqrt(math.floor(left / d[i])) + 1
        lo = max(-box, math.floor(centre) - span)
        hi = min(box, math.ceil(centre) + span)
        for v in range(lo, hi + 1):
            if base is not None and (v - base[i]) % 2:
                continue
            used = d[i] * (v - centre) ** 2
            if used <= left:
                x[i] = v
                rec(i - 1, left - used)
        x[i] = 0

    rec(n - 1, Fraction(budget))
    out.sort()
    return out


def iter_vectors(
    form: IntersectionForm,
    box: int,
    square: int | None = None,
    characteristic: bool = False,
) -> Iterator[Class]:
    """Yield vectors with ``max |x_i| <= box`` in lexicographic order.

    Optional filters: the exact square, and the characteristic condition.
    The search runs block by block over the orthogonal summands that are
    contiguous in the basis, pruning by the squares the remaining blocks can
    still reach. With a square on a definite form each block is searched as
    an exact ellipsoid, so large boxes stay cheap.
    """
    if box < 0:
        raise ValueError("box must be nonnegative")
    n = form.rank
    if n == 0:
        if square in (None, 0):
            yield ()
        return
    base = form.characteristic_base() if characteristic else None
    if characteristic and square is not None and (square - signature_data(form).sigma) % 8:
        # characteristic squares are congruent to the signature mod 8
        return
    sign = definiteness(form) if square is not None else 0
    if sign and sign * square < 0:
        return
    q = form.matrix
    blocks = []
    for lo, hi in _contiguous_blocks(form):
        sub = [row[lo:hi] for row in q[lo:hi]]
        if sign:
            blocks.append(_ellipsoid_points(sub, sign, box, sign * square, base[lo:hi] if base is not None else None))
            continue
        axes = []
        for j in range(lo, hi):
            vals = range(-box, box + 1)
            if base is not None:
                vals = [v for v in vals if (v - base[j]) % 2 == 0]
            axes.append(list(vals))
        cands = []
        for vec in itertools.product(*axes):
            s = 0
            for i, vi in enumerate(vec):
                if vi:
                    s += vi * sum(sub[i][j] * vj for j, vj in enumerate(vec) if vj)
            cands.append((vec, s))
        blocks.append(cands)

    if square is None:
        for combo in itertools.product(*blocks):
            yield tuple(x for vec, _ in combo for x in vec)
        return

    reachable: list[set[int]] = [set() for _ in blocks] + [{0}]
    for k in range(len(blocks) - 1, -1, -1):
        sqs = {s for _, s in blocks[k]}
        reachable[k] = {a + b for a in sqs for b in reachable[k + 1]}

    def rec(k: int, remaining: int, prefix: tuple[int, ...]):
        if k == len(blocks):
            if remaining == 0:
                yield prefix
            return
        nxt = reachable[k + 1]
        for vec, s in blocks[k]:
            if remaining - s in nxt:
                yield from rec(k + 1, remaining - s, prefix + vec)

    if square in reachable[0]:
        yield from rec(0, square, ())


def enumerate_characteristic(form: IntersectionForm, box: int, square: int | None = None) -> list[Class]:
    return list(iter_vectors(form, box, square=square, characteristic=True))


def random_block_form(rng: random.Random, max_blocks: int = 4, e8_weight: float = 0.1) -> IntersectionForm:
    """Direct sum of 1-``max_blocks`` random blocks from (1), (-1), H, E8, -E8."""
    parts = []
    for _ in range(rng.randint(1, max_blocks)):
        r = rng.random()
        if r < e8_weight:
            parts.append(e8(rng.choice((1, -1))))
        elif r < e8_weight + (1 - e8_weight) / 3:
            parts.append(hyperbolic())
        else:
            parts.append(diagonal(rng.choice((1, -1))))
    return direct_sum(*parts)


def random_characteristic(form: IntersectionForm, rng: random.Random, spread: int = 2) -> Class:
    """A characteristic class ``c0 + 2x`` with ``x_i`` uniform in ``[-spread, spread]``."""
    base = form.characteristic_base()
    return tuple(b + 2 * rng.randint(-spread, spread) for b in base)
