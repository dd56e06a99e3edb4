"""Manifold data model, built-in catalog, JSON manifests, connected-sum
expressions and the almost-complex existence decision.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

from . import lattice
from .errors import (
    DuplicateName,
    ExpressionSyntaxError,
    FourfoldError,
    InvariantViolation,
    ManifestParseError,
    UnknownManifold,
    ZeroMultiplicity,
)
from .lattice import Class, IntersectionForm


@dataclass(frozen=True)
class GeometricFlags:
    simply_connected: bool = False
    spin: bool = False
    kahler: bool = False
    symplectic: bool = False
    psc: bool = False


@dataclass(frozen=True)
class SymplecticData:
    """Canonical class K and symplectic class [omega], in the form's basis."""

    K: Class
    omega: Class


@dataclass(frozen=True)
class ManifoldModel:
    """A closed, connected, oriented 4-manifold described by its cohomology.

    ``summands`` lists the pieces when the model was built as a connected
    sum; it is provenance only and does not take part in equality.
    """

    name: str
    b1: int
    form: IntersectionForm
    flags: GeometricFlags = GeometricFlags()
    symplectic_data: SymplecticData | None = None
    provenance: str = "catalog"
    summands: tuple["ManifoldModel", ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        problems = model_violations(self)
        if problems:
            raise InvariantViolation(self.name, "; ".join(problems))

    @property
    def rank(self) -> int:
        return self.form.rank

    @property
    def signature(self) -> lattice.SignatureData:
        return lattice.signature_data(self.form)

    @property
    def b2_plus(self) -> int:
        return self.signature.b2_plus

    @property
    def b2_minus(self) -> int:
        return self.signature.b2_minus

    @property
    def sigma(self) -> int:
        return self.signature.sigma

    @property
    def chi(self) -> int:
        return euler_characteristic(self)

    @property
    def kappa(self) -> int:
        return kappa(self)

    def parts(self) -> tuple["ManifoldModel", ...]:
        return self.summands or (self,)


def model_violations(m: ManifoldModel) -> list[str]:
    out = []
    if m.b1 < 0:
        out.append("b1 must be nonnegative")
    f = m.flags
    if f.kahler and not f.symplectic:
        out.append("kahler implies symplectic")
    if f.spin and not m.form.is_even():
        out.append("spin requires an even form")
    if f.simply_connected and m.b1 != 0:
        out.append("simply connected requires b1 = 0")
    sd = m.symplectic_data
    if sd is not None:
        if not f.symplectic:
            out.append("symplectic_data requires the symplectic flag")
        if len(sd.K) != m.rank or len(sd.omega) != m.rank:
            out.append("symplectic_data classes must match the rank")
        elif not lattice.is_characteristic(m.form, sd.K):
            out.append("canonical class K is not characteristic")
    return out


def euler_characteristic(m: ManifoldModel) -> int:
    # b0 = b4 = 1 and b3 = b1 by Poincare duality.
    return 2 * (1 - m.b1) + m.rank


def kappa(m: ManifoldModel) -> int:
    return 2 * euler_characteristic(m) + 3 * m.sigma


# -- almost complex structures ---------------------------------------------

@dataclass(frozen=True)
class WuVerdict:
    status: str  # "yes", "no" or "indeterminate"
    witnesses: tuple[Class, ...] = ()
    reason: str = ""
    box: int = 0

    def __str__(self):
        if self.status == "yes":
            return f"Yes: {len(self.witnesses)} witness(es)"
        if self.status == "no":
            return f"No: {self.reason}"
        return f"Indeterminate: no witness with coordinates in [-{self.box}, {self.box}]"


def admits_almost_complex(m: ManifoldModel, box: int = 3) -> WuVerdict:
    """Decide whether some characteristic c has c^2 = 2 chi + 3 sigma.

    On a definite form the search is extended to a coordinate bound that
    covers every solution, so both answers are proofs. On an indefinite
    form a failed search is only ``indeterminate``.
    """
    if box < 1:
        raise ValueError("box must be at least 1")
    k = kappa(m)
    if m.rank == 0:
        if k == 0:
            return WuVerdict("yes", ((),), box=box)
        return WuVerdict("no", reason=f"rank 0, κ={k}≠0", box=box)
    sign = lattice.definiteness(m.form)
    if sign < 0 and k > 0:
        return WuVerdict("no", reason=f"negative definite, κ={k}>0", box=box)
    if sign > 0 and k < 0:
        return WuVerdict("no", reason=f"positive definite, κ={k}<0", box=box)
    if sign != 0:
        bound = max(1, lattice.definite_coordinate_bound(m.form, k))
        found = tuple(lattice.enumerate_characteristic(m.form, bound, k))
        if found:
            return WuVerdict("yes", found, box=bound)
        kind = "positive" if sign > 0 else "negative"
        return WuVerdict(
            "no", reason=f"{kind} definite, no characteristic c with c²={k} (exhaustive to bound {bound})", box=bound
        )
    found = tuple(lattice.enumerate_characteristic(m.form, box, k))
    if found:
        return WuVerdict("yes", found, box=box)
    return WuVerdict("indeterminate", box=box)


# -- catalog ------------------------------------------------------------------

def _builtins() -> dict[str, ManifoldModel]:
    from .lattice import diagonal, direct_sum, e8, empty_form, hyperbolic

    k3_form = direct_sum(e8(-1), e8(-1), hyperbolic(), hyperbolic(), hyperbolic())
    k3_omega = (0,) * 16 + (1, 1, 0, 0, 0, 0)
    entries = [
        ManifoldModel("S4", 0, empty_form(), GeometricFlags(simply_connected=True, spin=True, psc=True)),
        ManifoldModel(
            "CP2", 0, diagonal(1),
            GeometricFlags(simply_connected=True, kahler=True, symplectic=True, psc=True),
            SymplecticData(K=(-3,), omega=(1,)),
        ),
        ManifoldModel("CP2bar", 0, diagonal(-1), GeometricFlags(simply_connected=True, psc=True)),
        ManifoldModel(
            "S2xS2", 0, hyperbolic(),
            GeometricFlags(simply_connected=True, spin=True, kahler=True, symplectic=True, psc=True),
            SymplecticData(K=(-2, -2), omega=(1, 1)),
        ),
        ManifoldModel(
            "K3", 0, k3_form,
            GeometricFlags(simply_connected=True, spin=True, kahler=True, symplectic=True),
            SymplecticData(K=(0,) * 22, omega=k3_omega),
        ),
    ]
    return {m.name: m for m in entries}


class Catalog(Mapping[str, ManifoldModel]):
    """Read-only name -> model mapping."""

    def __init__(self, models: Mapping[str, ManifoldModel]):
        self._models = MappingProxyType(dict(models))

    def __getitem__(self, name: str) -> ManifoldModel:
        try:
            return self._models[name]
        except KeyError:
            raise UnknownManifold(name) from None

    def __contains__(self, name) -> bool:
        return name in self._models

    def __iter__(self) -> Iterator[str]:
        return iter(self._models)

    def __len__(self) -> int:
        return len(self._models)


BUILTIN_NAMES = ("S4", "CP2", "CP2bar", "S2xS2", "K3")

_ENTRY_KEYS = {"name", "b1", "form", "flags", "symplectic_data"}
_FLAG_KEYS = {"spin", "kahler", "symplectic", "psc", "simply_connected"}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _int_vector(v, what: str) -> Class:
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise ValueError(f"{what} must be a list of integers")
    return tuple(v)


def _entry_line(text: str, index: int) -> int:
    # Best effort: line of the index-th occurrence of a "name" key.
    hits = [m.start() for m in re.finditer(r'"name"\s*:', text)]
    if index < len(hits):
        return text.count("\n", 0, hits[index]) + 1
    return 1


def load_catalog(source: str = "") -> Catalog:
    """Built-in models plus the entries of a JSON manifest."""
    models = _builtins()
    if not source.strip():
        return Catalog(models)
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ManifestParseError(exc.lineno, exc.msg) from None
    if not isinstance(doc, dict) or set(doc) != {"manifolds"} or not isinstance(doc["manifolds"], list):
        raise ManifestParseError(1, 'top level must be {"manifolds": [...]}')
    for idx, entry in enumerate(doc["manifolds"]):
        line = _entry_line(source, idx)
        try:
            model = _model_from_entry(entry)
        except (ValueError, TypeError) as exc:
            raise ManifestParseError(line, str(exc)) from None
        except InvariantViolation:
            raise
        except FourfoldError as exc:
            raise InvariantViolation(str(entry.get("name", f"#{idx}")), str(exc)) from None
        if model.name in models:
            raise DuplicateName(f"manifold {model.name!r} defined twice (line {line})")
        models[model.name] = model
    return Catalog(models)


def _model_from_entry(entry) -> ManifoldModel:
    if not isinstance(entry, dict):
        raise ValueError("each manifold entry must be an object")
    unknown = set(entry) - _ENTRY_KEYS
    if unknown:
        raise ValueError(f"unknown keys {sorted(unknown)}")
    for key in ("name", "form"):
        if key not in entry:
            raise ValueError(f"missing key {key!r}")
    name = entry["name"]
    if not isinstance(name, str) or not _IDENT.match(name):
        raise ValueError(f"name {name!r} must be an identifier")
    b1 = entry.get("b1", 0)
    if not isinstance(b1, int) or isinstance(b1, bool):
        raise ValueError("b1 must be an integer")
    rows = entry["form"]
    if not isinstance(rows, list):
        raise ValueError("form must be a list of rows")
    form = IntersectionForm([_int_vector(r, "form row") for r in rows])
    flags_in = entry.get("flags", {})
    if not isinstance(flags_in, dict):
        raise ValueError("flags must be an object")
    unknown = set(flags_in) - _FLAG_KEYS
    if unknown:
        raise ValueError(f"unknown flags {sorted(unknown)}")
    if not all(isinstance(v, bool) for v in flags_in.values()):
        raise ValueError("flag values must be booleans")
    sd = None
    if "symplectic_data" in entry:
        raw = entry["symplectic_data"]
        if not isinstance(raw, dict) or set(raw) != {"K", "omega"}:
            raise ValueError('symplectic_data must be {"K": [...], "omega": [...]}')
        sd = SymplecticData(_int_vector(raw["K"], "K"), _int_vector(raw["omega"], "omega"))
    return ManifoldModel(name, b1, form, GeometricFlags(**flags_in), sd, provenance="manifest")


@functools.lru_cache(maxsize=1)
def default_catalog() -> Catalog:
    return load_catalog("")


# -- orientation reversal ---------------------------------------------------

def reverse(m: ManifoldModel, name: str | None = None) -> ManifoldModel:
    """Same manifold, opposite orientation.

    Spin, simple connectivity and positive scalar curvature do not depend on
    orientation; Kahler and symplectic data do and are dropped.
    """
    f = m.flags
    flags = GeometricFlags(simply_connected=f.simply_connected, spin=f.spin, psc=f.psc)
    return ManifoldModel(
        name or f"~{m.name}",
        m.b1,
        lattice.reverse_orientation(m.form),
        flags,
        None,
        provenance="parsed",
        summands=tuple(reverse(s) for s in m.summands),
    )


# -- expressions --------------------------------------------------------------
#
#   expr := term ("#" term)*
#   term := INT "*" atom | atom
#   atom := IDENT | "~" atom | "(" expr ")"

@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Neg:
    child: object


@dataclass(frozen=True)
class Mult:
    k: int
    child: object


@dataclass(frozen=True)
class Sum:
    terms: tuple


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[#*~()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(pos, frozenset({"IDENT", "INT", "~", "("}), text)
        kind = m.lastgroup
        val = m.group(kind)
        toks.append(("INT" if kind == "int" else "IDENT" if kind == "ident" else val, val, m.start(kind)))
        pos = m.end()
    toks.append(("EOF", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str, expected: frozenset[str]):
        tok = self.peek()
        if tok[0] != kind:
            raise ExpressionSyntaxError(tok[2], expected, self.text)
        self.i += 1
        return tok

    def expr(self):
        terms = [self.term()]
        while self.peek()[0] == "#":
            self.i += 1
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        tok = self.peek()
        if tok[0] == "INT":
            self.i += 1
            k = int(tok[1])
            self.take("*", frozenset({"*"}))
            if k < 1:
                raise ZeroMultiplicity(f"multiplicity {k} at position {tok[2]} must be at least 1")
            return Mult(k, self.atom())
        return self.atom(term_start=True)

    def atom(self, term_start: bool = False):
        tok = self.peek()
        if tok[0] == "IDENT":
            self.i += 1
            return Ref(tok[1])
        if tok[0] == "~":
            self.i += 1
            return Neg(self.atom())
        if tok[0] == "(":
            self.i += 1
            node = self.expr()
            self.take(")", frozenset({")", "#"}))
            return node
        expected = {"IDENT", "~", "("} | ({"INT"} if term_start else set())
        raise ExpressionSyntaxError(tok[2], frozenset(expected), self.text)


def parse_tree(text: str):
    if not text.strip():
        raise ExpressionSyntaxError(0, frozenset({"IDENT", "INT", "~", "("}), text)
    p = _Parser(text)
    node = p.expr()
    tok = p.peek()
    if tok[0] != "EOF":
        raise ExpressionSyntaxError(tok[2], frozenset({"#", "EOF"}), text)
    return node


def pretty(node) -> str:
    """Canonical text for an expression tree; parses back to the same tree."""

    def atom(n):
        if isinstance(n, Ref):
            return n.name
        if isinstance(n, Neg):
            return "~" + atom(n.child)
        return "(" + expr(n) + ")"

    def term(n):
        if isinstance(n, Mult):
            return f"{n.k}*{atom(n.child)}"
        return atom(n)

    def expr(n):
        if isinstance(n, Sum):
            return " # ".join(term(t) for t in n.terms)
        return term(n)

    return expr(node)


def _build(node, catalog: Mapping[str, ManifoldModel]):
    """Return ``(model, decomposition or None)``."""
    from .surgery import connected_sum

    if isinstance(node, Ref):
        if node.name not in catalog:
            raise UnknownManifold(node.name)
        return catalog[node.name], None
    if isinstance(node, Neg):
        inner, dec = _build(node.child, catalog)
        out = reverse(inner, pretty(node))
        if dec is not None:
            dec = replace(dec, left=reverse(dec.left), right=reverse(dec.right), total=out)
        return out, dec
    name = pretty(node)
    if isinstance(node, Mult):
        base, dec = _build(node.child, catalog)
        acc = base
        for _ in range(node.k - 1):
            acc, dec = connected_sum(acc, base)
        return (replace(acc, name=name) if node.k > 1 else acc), dec
    acc, dec = _build(node.terms[0], catalog)
    for t in node.terms[1:]:
        nxt, _ = _build(t, catalog)
        acc, dec = connected_sum(acc, nxt)
    return replace(acc, name=name), dec


def parse_decomposed(text: str, catalog: Mapping[str, ManifoldModel] | None = None):
    """Parse an expression; also return the outermost sum decomposition, if any."""
    if catalog is None:
        catalog = default_catalog()
    model, dec = _build(parse_tree(text), catalog)
    if dec is not None:
        dec = replace(dec, total=model)
    return model, dec


def parse_expression(text: str, catalog: Mapping[str, ManifoldModel] | None = None) -> ManifoldModel:
    return parse_decomposed(text, catalog)[0]


def model_from_classes(name: str, form: IntersectionForm, b1: int = 0, **flags) -> ManifoldModel:
    """Convenience constructor used by tests and demos."""
    return ManifoldModel(name, b1, form, GeometricFlags(**flags), provenance="parsed")


def with_symplectic_data(m: ManifoldModel, K: Sequence[int], omega: Sequence[int], kahler: bool = False) -> ManifoldModel:
    """Copy of ``m`` with symplectic hypotheses attached."""
    flags = replace(m.flags, symplectic=True, kahler=kahler or m.flags.kahler)
    return replace(m, flags=flags, symplectic_data=SymplecticData(tuple(K), tuple(omega)))
