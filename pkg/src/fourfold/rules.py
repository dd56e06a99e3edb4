"""Forward-chaining derivation of Seiberg-Witten verdicts from manifold
facts, plus the symplectic-side formulas (Taubes' constraints, the Gromov
moduli dimension, the homology-to-Spin^c labelling).

Invariant values are tracked as three states: nonzero with unit magnitude
(the sign is never resolved), zero, or unknown.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import lattice
from .errors import (
    DataInconsistent,
    MissingData,
    NotCharacteristic,
    PreconditionViolation,
    SplitMismatch,
)
from .lattice import Class
from .manifold import ManifoldModel
from .surgery import SumDecomposition, connected_sum
from .swarith import NonIntegral, SpinCStructure, symmetry_exponent, virtual_dimension

CANONICAL = "K"
"""Assertion key for the canonical class when its coordinates are not known."""

NONZERO = "nonzero_pm1"
ZERO = "zero"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: str
    premises: tuple[str, ...]

    def __str__(self):
        return f"[{self.rule}] {self.conclusion} <= " + "; ".join(self.premises)


def _fmt(key) -> str:
    if key == CANONICAL:
        return "K"
    return "(" + ",".join(str(x) for x in key) + ")"


@dataclass(frozen=True)
class SWVerdict:
    assertions: tuple[tuple[object, str], ...]
    global_status: str  # "all_trivial" or "unknown"
    derivation: tuple[Derivation, ...]
    symmetry_k: int | NonIntegral

    def status(self, key) -> str:
        for k, v in self.assertions:
            if k == key:
                return v
        return ZERO if self.global_status == "all_trivial" else UNKNOWN

    def __str__(self):
        lines = [f"global: {self.global_status}"]
        lines += [f"N{_fmt(k)}: {'±1' if v == NONZERO else v}" for k, v in self.assertions]
        lines += [str(d) for d in self.derivation]
        return "\n".join(lines)


@dataclass(frozen=True)
class Contradiction:
    rules: tuple[str, ...]
    premises: tuple[str, ...]
    conclusion: str
    derivations: tuple[Derivation, ...]

    def __str__(self):
        return "CONTRADICTION: " + self.conclusion + "\n" + "\n".join(str(d) for d in self.derivations)


@dataclass
class _Context:
    model: ManifoldModel
    decomposition: SumDecomposition | None
    facts: dict = field(default_factory=dict)  # key -> list[Derivation]

    @property
    def k(self):
        return symmetry_exponent(self.model)

    def classes(self, kind: str) -> list:
        return [cls for (kd, cls) in self.facts if kd == kind]


def _b2p(m: ManifoldModel) -> str:
    return f"b2+({m.name}) = {m.b2_plus}"


def _canonical_premise(key) -> str:
    return "K unspecified" if key == CANONICAL else f"K = {_fmt(key)}"


def _canonical_key(m: ManifoldModel):
    return m.symplectic_data.K if m.symplectic_data is not None else CANONICAL


def _r1_kahler(ctx: _Context):
    m = ctx.model
    if m.flags.kahler and m.b2_plus > 1:
        key = _canonical_key(m)
        yield ("nonzero", key), Derivation(
            "R1-kahler", f"N{_fmt(key)} = ±1", (f"{m.name} is Kähler", _b2p(m) + " > 1", _canonical_premise(key))
        )


def _r2_symplectic(ctx: _Context):
    m = ctx.model
    if m.flags.symplectic and m.b2_plus > 1:
        key = _canonical_key(m)
        yield ("nonzero", key), Derivation(
            "R2-taubes-symplectic", f"N{_fmt(key)} = ±1",
            (f"{m.name} is symplectic", _b2p(m) + " > 1", _canonical_premise(key)),
        )


def _r3_psc(ctx: _Context):
    m = ctx.model
    if not m.flags.psc:
        return
    if m.b2_plus > 1:
        yield ("all_trivial", None), Derivation(
            "R3-nonnegative-scalar-curvature", "all invariants vanish",
            (f"{m.name} admits a metric with s >= 0", _b2p(m) + " > 1", "max |phi|^2 <= max(0, -s) = 0"),
        )
    elif m.b2_plus >= 1 and lattice.definiteness(m.form) > 0:
        yield ("all_trivial", None), Derivation(
            "R3-no-walls", "all invariants vanish",
            (
                f"{m.name} admits a metric with s >= 0",
                "form positive definite: every nonzero class has positive square, so there are no walls",
                "the s >= 0 metric has no irreducible solutions",
            ),
        )


def _r4_connected_sum(ctx: _Context):
    dec = ctx.decomposition
    if dec is None:
        return
    positive = [p for p in dec.parts() if p.b2_plus > 0]
    if len(positive) >= 2:
        yield ("all_trivial", None), Derivation(
            "R4-connected-sum", "all invariants vanish",
            tuple(_b2p(p) + " > 0" for p in positive[:2]) + (f"{ctx.model.name} splits with both pieces b2+ > 0",),
        )


def _r5_symmetry(ctx: _Context):
    k = ctx.k
    if isinstance(k, NonIntegral):
        return
    parity = "symmetric" if k % 2 == 0 else "skew-symmetric"
    for kind in ("nonzero", "zero"):
        for cls in ctx.classes(kind):
            if cls == CANONICAL or cls is None:
                continue
            neg = tuple(-x for x in cls)
            yield (kind, neg), Derivation(
                "R5-charge-conjugation",
                f"N{_fmt(neg)} {'= ±1' if kind == 'nonzero' else '= 0'}",
                (f"N{_fmt(cls)} {'= ±1' if kind == 'nonzero' else '= 0'}", f"k = (chi+sigma)/4 = {k}, N {parity}"),
            )


def _r6_blow_up(ctx: _Context):
    dec = ctx.decomposition
    if dec is None:
        return
    parts = dec.parts()
    exceptional = [i for i, p in enumerate(parts) if p.b1 == 0 and p.form.matrix == ((-1,),)]
    core_idx = [i for i in range(len(parts)) if i not in exceptional]
    if not exceptional or not core_idx:
        return
    offsets = []
    off = 0
    for p in parts:
        offsets.append(off)
        off += p.rank
    core_parts = [parts[i] for i in core_idx]
    core, core_dec = core_parts[0], None
    for p in core_parts[1:]:
        core, core_dec = connected_sum(core, p)
    if core.b2_plus <= 1:
        return
    sub = evaluate(core, core_dec)
    if not isinstance(sub, SWVerdict):
        return
    positions = [j for i in core_idx for j in range(offsets[i], offsets[i] + parts[i].rank)]
    ones = [offsets[i] for i in exceptional]
    premise_base = (f"{ctx.model.name} = {core.name} # {len(exceptional)} CP2bar", _b2p(core) + " > 1")

    def lift(cls):
        if cls == CANONICAL:
            return CANONICAL
        out = [0] * ctx.model.rank
        for pos, x in zip(positions, cls):
            out[pos] = x
        for pos in ones:
            out[pos] = 1
        return tuple(out)

    if sub.global_status == "all_trivial":
        yield ("all_trivial", None), Derivation(
            "R6-blow-up", "all invariants vanish", premise_base + (f"all invariants of {core.name} vanish",)
        )
    for cls, status in sub.assertions:
        kind = "nonzero" if status == NONZERO else "zero" if status == ZERO else None
        if kind is None:
            continue
        new = lift(cls)
        yield (kind, new), Derivation(
            "R6-blow-up",
            f"N{_fmt(new)} {'= ±1' if kind == 'nonzero' else '= 0'}",
            premise_base + (f"N{_fmt(cls)} on {core.name} {'= ±1' if kind == 'nonzero' else '= 0'}",),
        )


def _r7_dimension(ctx: _Context):
    m = ctx.model
    tracked = set(c for c in ctx.classes("nonzero") + ctx.classes("zero") if c not in (CANONICAL, None))
    if m.symplectic_data is not None:
        tracked.add(m.symplectic_data.K)
    for cls in sorted(tracked):
        if not lattice.is_characteristic(m.form, cls):
            continue
        v = virtual_dimension(SpinCStructure(m, cls))
        if v < 0 or v % 2:
            why = "negative" if v < 0 else "odd"
            yield ("zero", cls), Derivation(
                "R7-dimension", f"N{_fmt(cls)} = 0", (f"vdim{_fmt(cls)} = {v} is {why}",)
            )


RULES: tuple[Callable[[_Context], Iterable], ...] = (
    _r1_kahler,
    _r2_symplectic,
    _r3_psc,
    _r4_connected_sum,
    _r5_symmetry,
    _r6_blow_up,
    _r7_dimension,
)


def _conflict(facts: dict, order: list) -> Contradiction | None:
    trivial = facts.get(("all_trivial", None))
    for key in order:
        kind, cls = key
        if kind != "nonzero":
            continue
        pos = facts[key]
        neg = (facts.get(("zero", cls)) or []) + (trivial or [])
        if not neg:
            continue
        # a structural vanishing (surgery, curvature) explains more than a dimension count
        structural = [d for d in neg if d.rule.startswith(("R3", "R4", "R6"))]
        d_pos, d_neg = pos[0], (structural or neg)[0]
        rules = (d_pos.rule, d_neg.rule)
        if d_neg.rule.startswith(("R4", "R6")) and d_pos.rule.startswith(("R1", "R2")):
            text = (
                f"hypotheses imply both N{_fmt(cls)}=±1 and N≡0: no "
                f"{'Kähler' if d_pos.rule.startswith('R1') else 'symplectic'} structure compatible with the decomposition"
            )
        else:
            text = f"hypotheses imply both N{_fmt(cls)}=±1 ({d_pos.rule}) and N{_fmt(cls)}=0 ({d_neg.rule})"
        return Contradiction(rules, d_pos.premises + d_neg.premises, text, (d_pos, d_neg))
    return None


def evaluate(m: ManifoldModel, decomposition: SumDecomposition | None = None) -> SWVerdict | Contradiction:
    """Apply the rule set to a fixed point and report the verdict or the conflict."""
    ctx = _Context(m, decomposition)
    order: list = []
    changed = True
    while changed:
        changed = False
        for rule in RULES:
            for key, der in list(rule(ctx)):
                ders = ctx.facts.get(key)
                if ders is None:
                    ctx.facts[key] = [der]
                    order.append(key)
                    changed = True
                elif der not in ders:
                    ders.append(der)
                    changed = True
    clash = _conflict(ctx.facts, order)
    if clash is not None:
        return clash
    trivial = ("all_trivial", None) in ctx.facts
    assertions = []
    for kind, cls in order:
        if cls is None:
            continue
        assertions.append((cls, NONZERO if kind == "nonzero" else ZERO))
    derivation = tuple(d for key in order for d in ctx.facts[key])
    return SWVerdict(tuple(assertions), "all_trivial" if trivial else "unknown", derivation, ctx.k)


# -- symplectic formulas -----------------------------------------------------

def _symplectic(m: ManifoldModel):
    if m.symplectic_data is None:
        raise MissingData(f"{m.name} has no symplectic data (K, omega)")
    return m.symplectic_data


@dataclass(frozen=True)
class FilterDecision:
    cls: Class
    keep: bool
    reason: str


def taubes_filter(m: ManifoldModel, candidates: Sequence[Sequence[int]]) -> list[FilterDecision]:
    """Keep candidate basic classes k with |k . omega| <= K . omega."""
    sd = _symplectic(m)
    if m.b2_plus <= 1:
        raise PreconditionViolation(f"Taubes' constraints need b2+ > 1, {m.name} has b2+ = {m.b2_plus}")
    bound = lattice.pair(m.form, sd.K, sd.omega)
    if bound < 0:
        raise DataInconsistent(f"K.omega = {bound} < 0 contradicts the symplectic hypothesis")
    out = []
    for k in candidates:
        k = tuple(k)
        if not lattice.is_characteristic(m.form, k):
            out.append(FilterDecision(k, False, "not characteristic"))
            continue
        p = lattice.pair(m.form, k, sd.omega)
        if abs(p) > bound:
            out.append(FilterDecision(k, False, f"|k·ω| = {abs(p)} > K·ω = {bound}"))
        else:
            out.append(FilterDecision(k, True, f"|k·ω| = {abs(p)} <= K·ω = {bound}"))
    return out


@dataclass(frozen=True)
class PiMultiple:
    coefficient: int

    def __str__(self):
        return f"{self.coefficient}·π"


def taubes_constant(m: ManifoldModel) -> PiMultiple:
    """2 pi c1(K^-1).[omega], exactly, as an integer multiple of pi."""
    sd = _symplectic(m)
    return PiMultiple(2 * lattice.pair(m.form, tuple(-x for x in sd.K), sd.omega))


def gromov_dimension(m: ManifoldModel, mu: Sequence[int]) -> int:
    """Dimension mu.(mu - K) of pseudoholomorphic curves in the class dual to mu."""
    sd = _symplectic(m)
    return lattice.square(m.form, mu) - lattice.pair(m.form, mu, sd.K)


def spinc_from_homology(m: ManifoldModel, eta_dual: Sequence[int]) -> SpinCStructure:
    """The Spin^c structure 2 eta* - K labelled by a homology class."""
    sd = _symplectic(m)
    return SpinCStructure(m, tuple(2 * e - k for e, k in zip(eta_dual, sd.K)))


def scalar_curvature_bound(s_min: float) -> float:
    """A priori bound on sup |phi|^2 for solutions, max(0, -s)."""
    return max(0.0, -s_min)


def hitchin_thorpe_check(m: ManifoldModel, K: Sequence[int]) -> bool:
    if not lattice.is_characteristic(m.form, K):
        raise NotCharacteristic(f"{tuple(K)} is not characteristic on {m.name}")
    return lattice.square(m.form, K) >= 0


@dataclass(frozen=True)
class BlowDownVerdict:
    kind: str  # "allowed", "arithmetically_possible_only_if", "excluded"
    reason: str
    vdim: int

    def __str__(self):
        return f"{self.kind}: {self.reason}"


def blow_down_obstruction(
    y: ManifoldModel, decomposition: SumDecomposition, c_x: Sequence[int], k: int
) -> BlowDownVerdict:
    """Classify a splitting K_Y = c_X + k h over Y = X # CP2bar."""
    sd = _symplectic(y)
    right = decomposition.right
    if right.b1 != 0 or right.form.matrix != ((-1,),):
        raise PreconditionViolation("the right summand must be a CP2bar")
    if decomposition.total.form != y.form:
        raise PreconditionViolation("decomposition does not describe this manifold")
    c_x = tuple(c_x)
    lifted = decomposition.embed(c_x, (k,))
    if lifted != sd.K:
        raise SplitMismatch(f"c_X + k h = {_fmt(lifted)} but K_Y = {_fmt(sd.K)}")
    v = virtual_dimension(SpinCStructure(decomposition.left, c_x))
    if v == 0:
        return BlowDownVerdict("allowed", "vdim(c_X) = 0: c_X is the canonical case", v)
    if v == 2 and abs(k) == 3:
        return BlowDownVerdict(
            "arithmetically_possible_only_if",
            "vdim(c_X) = 2 and k = ±3: arithmetically possible; excluded for symplectic Y "
            "by comparing Seiberg-Witten and Gromov moduli",
            v,
        )
    return BlowDownVerdict("excluded", f"vdim(c_X) = {v}, k = {k}: outside both admissible cases", v)
