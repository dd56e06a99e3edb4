import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fourfold import lattice as L
from fourfold import manifold as M
from fourfold.errors import (
    DuplicateName,
    ExpressionSyntaxError,
    InvariantViolation,
    ManifestParseError,
    UnknownManifold,
    ZeroMultiplicity,
)

CAT = M.default_catalog()


def test_builtin_profiles():
    assert len(CAT) == 5
    assert (M.euler_characteristic(CAT["S4"]), M.kappa(CAT["S4"])) == (2, 4)
    assert (M.euler_characteristic(CAT["CP2"]), M.kappa(CAT["CP2"])) == (3, 9)
    assert M.kappa(CAT["CP2bar"]) == 3
    k3 = CAT["K3"]
    assert (k3.chi, k3.b2_plus, k3.sigma) == (24, 3, -16)


def test_catalog_lookup():
    assert "CP2" in CAT and "CP3" not in CAT
    with pytest.raises(UnknownManifold):
        CAT["CP3"]


def test_spin_entries_have_even_diagonal():
    for m in CAT.values():
        if m.flags.spin:
            assert all(m.form.matrix[i][i] % 2 == 0 for i in range(m.rank))
            assert L.is_characteristic(m.form, (0,) * m.rank)


def test_reverse_preserves_chi_negates_sigma():
    for m in CAT.values():
        r = M.reverse(m)
        assert r.chi == m.chi and r.sigma == -m.sigma


def test_wu_examples():
    v = M.admits_almost_complex(CAT["S4"], 5)
    assert v.status == "no" and str(v) == "No: rank 0, κ=4≠0"
    v = M.admits_almost_complex(CAT["CP2"], 3)
    assert v.status == "yes" and v.witnesses == ((-3,), (3,))
    v = M.admits_almost_complex(CAT["CP2bar"], 5)
    assert v.status == "no" and v.reason.startswith("negative definite")


def test_wu_definite_searches_are_exhaustive():
    # 5 CP2: kappa = 29 = 3*3^2 + 2*1^2 needs entries beyond the requested box
    m = M.model_from_classes("P5", L.diagonal(*[1] * 5))
    v = M.admits_almost_complex(m, 1)
    assert v.status == "yes" and v.box > 1
    assert len(v.witnesses) == 10 * 32 + 5 * 32
    for c in v.witnesses:
        assert L.is_characteristic(m.form, c) and L.square(m.form, c) == m.kappa
    # kappa = 44, but characteristic classes of an even form are 2x with square divisible by 8
    e8 = M.model_from_classes("E8m", L.e8())
    assert M.admits_almost_complex(e8).status == "no"


def test_wu_indefinite_can_be_indeterminate():
    k3 = CAT["K3"]
    # kappa(K3) = 0 and c = 0 works
    assert M.admits_almost_complex(k3, 1).status == "yes"
    m, _ = M.parse_decomposed("K3 # K3")
    assert m.kappa == -4
    assert M.admits_almost_complex(m, 1).status == "indeterminate"


def test_parse_examples():
    m = M.parse_expression("CP2 # 2*CP2bar")
    assert m.form.tolist() == [[1, 0, 0], [0, -1, 0], [0, 0, -1]]
    assert (m.chi, m.sigma) == (5, -1)
    assert M.parse_expression("CP2") == CAT["CP2"]
    assert M.parse_expression("~CP2").form.tolist() == [[-1]]
    assert M.parse_expression("(CP2 # CP2bar) # S4").chi == 4


def test_parse_errors():
    with pytest.raises(ExpressionSyntaxError) as e:
        M.parse_expression("CP2 #")
    assert e.value.position == 5 and "INT" in e.value.expected
    with pytest.raises(ExpressionSyntaxError) as e:
        M.parse_expression("CP2 CP2")
    assert e.value.position == 4
    with pytest.raises(ExpressionSyntaxError):
        M.parse_expression("2 CP2")
    with pytest.raises(ExpressionSyntaxError):
        M.parse_expression("")
    with pytest.raises(UnknownManifold):
        M.parse_expression("CP3")
    with pytest.raises(ZeroMultiplicity):
        M.parse_expression("0*CP2")


def test_parsed_sum_decomposition():
    m, dec = M.parse_decomposed("K3 # 2*CP2bar")
    assert dec.total is m
    assert dec.left.rank + dec.right.rank == m.rank
    assert [p.name for p in m.parts()] == ["K3", "CP2bar", "CP2bar"]


MANIFEST = """{
  "manifolds": [
    {"name": "Enriques_cover", "b1": 0,
     "form": [[0, 1], [1, 0]],
     "flags": {"spin": true, "simply_connected": true}},
    {"name": "P1", "form": [[1]],
     "flags": {"kahler": true, "symplectic": true},
     "symplectic_data": {"K": [-3], "omega": [1]}}
  ]
}"""


def test_manifest_loading():
    cat = M.load_catalog(MANIFEST)
    assert len(cat) == 7
    assert cat["P1"].symplectic_data.K == (-3,)
    assert cat["Enriques_cover"].provenance == "manifest"
    assert M.parse_expression("P1 # Enriques_cover", cat).rank == 3


@pytest.mark.parametrize(
    "doc, err",
    [
        ('{"manifolds": [{"name": "CP2", "form": [[1]]}]}', DuplicateName),
        ('{"manifolds": [{"name": "X", "form": [[2]]}]}', InvariantViolation),
        ('{"manifolds": [{"name": "X", "form": [[1]], "flags": {"spin": true}}]}', InvariantViolation),
        ('{"manifolds": [{"name": "X", "form": [[1]], "colour": 1}]}', ManifestParseError),
        ('{"manifolds": [{"name": "X", "form": [[1]], "flags": {"hyperkahler": true}}]}', ManifestParseError),
        ('{"manifolds": [\n  {"name": "X", "form": [[1]],}]}', ManifestParseError),
        ('[]', ManifestParseError),
    ],
)
def test_manifest_errors(doc, err):
    with pytest.raises(err):
        M.load_catalog(doc)


def test_manifest_error_reports_line():
    with pytest.raises(ManifestParseError) as e:
        M.load_catalog('{"manifolds": [\n\n  {"name": "X", "form": [[1]], "oops": 0}]}')
    assert e.value.line == 3


def test_symplectic_data_invariants():
    with pytest.raises(InvariantViolation):
        M.with_symplectic_data(CAT["CP2"], (2,), (1,))
    with pytest.raises(InvariantViolation):
        M.load_catalog(json.dumps({"manifolds": [{"name": "Y", "form": [[1]], "symplectic_data": {"K": [1], "omega": [1]}}]}))


# -- parser round trip ---------------------------------------------------------

NAMES = ["S4", "CP2", "CP2bar", "S2xS2", "K3"]


def _exprs():
    atom = st.deferred(lambda: st.one_of(
        st.sampled_from(NAMES).map(M.Ref),
        atom.map(M.Neg),
        expr.filter(lambda e: isinstance(e, M.Sum) or isinstance(e, M.Mult)),
    ))
    term = st.one_of(atom, st.tuples(st.integers(1, 3), atom).map(lambda t: M.Mult(*t)))
    expr = st.one_of(term, st.lists(term, min_size=2, max_size=3).map(lambda ts: M.Sum(tuple(ts))))
    return expr


RANKS = {"S4": 0, "CP2": 1, "CP2bar": 1, "S2xS2": 2, "K3": 22}


def _rank(node):
    if isinstance(node, M.Ref):
        return RANKS[node.name]
    if isinstance(node, M.Neg):
        return _rank(node.child)
    if isinstance(node, M.Mult):
        return node.k * _rank(node.child)
    return sum(_rank(t) for t in node.terms)


def _spaced(text, rng):
    return text.replace("#", " # " if rng else "#").replace("*", " * " if rng else "*")


@settings(max_examples=150, deadline=None)
@given(_exprs(), st.booleans())
def test_parser_round_trip(tree, spaced):
    # exact inertia of very large sums is slow and beside the point here
    assume(_rank(tree) <= 60)
    text = M.pretty(tree)
    again = M.parse_tree(_spaced(text, spaced))
    assert M.pretty(again) == text
    a = M.parse_expression(text)
    b = M.parse_expression(M.pretty(again))
    assert a.form == b.form and a.b1 == b.b1 and a.flags == b.flags
