import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from fourfold import cli

GOLDEN = Path(__file__).parent / "golden"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def machine(*argv):
    code, out, err = call("--machine", *argv)
    assert code == 0, err
    assert out.count("\n") == 1
    return json.loads(out)


def test_info_human():
    code, out, _ = call("info", "CP2")
    assert code == 0
    for piece in ("χ=3", "σ=1", "b⁺=1", "b⁻=0", "κ=9"):
        assert piece in out


def test_wu_human():
    assert call("wu", "S4")[1].strip() == "No: rank 0, κ=4≠0"
    assert call("wu", "CP2bar")[1].startswith("No: negative definite")


def test_spinc_enumerate():
    doc = machine("spinc", "enumerate", "CP2", "--box", "3", "--square", "9")
    assert doc["classes"] == [[-3], [3]]
    # --vdim D asks for square 4D + kappa
    doc = machine("spinc", "enumerate", "CP2", "--box", "3", "--vdim", "0")
    assert doc["square"] == 9 and doc["classes"] == [[-3], [3]]


@pytest.mark.parametrize(
    "argv, name",
    [
        (("info", "CP2"), "info_CP2"),
        (("info", "S4"), "info_S4"),
        (("info", "CP2bar"), "info_CP2bar"),
        (("wu", "CP2"), "wu_CP2"),
        (("wu", "S4"), "wu_S4"),
        (("wu", "CP2bar"), "wu_CP2bar"),
        (("spinc", "enumerate", "CP2", "--box", "3", "--square", "9"), "spinc_enumerate_CP2"),
        (("rules", "CP2"), "rules_CP2"),
    ],
)
def test_golden(argv, name):
    code, out, _ = call("--machine", *argv)
    assert code == 0
    assert out == (GOLDEN / f"{name}.json").read_text(encoding="utf-8")


def _all_documents(tmp_path):
    cands = tmp_path / "cands.json"
    cands.write_text(json.dumps([[0] * 22, [2] + [0] * 21]), encoding="utf-8")
    runs = [
        ("info", "K3 # 2*CP2bar"),
        ("wu", "K3 # K3", "--box", "1"),
        ("wu", "CP2"),
        ("spinc", "enumerate", "S2xS2", "--box", "2"),
        ("vdim", "CP2 # CP2bar", "--class", "5,3"),
        ("blowup", "K3", "--class", ",".join(["0"] * 22)),
        ("extend", "CP2 # CP2bar", "--class", "5,3"),
        ("extend", "K3 # K3", "--class", ",".join(["0"] * 44)),
        ("rules", "K3"),
        ("rules", "K3 # K3", "--decomposed"),
        ("rules", "K3 # K3", "--decomposed", "--assume", "symplectic"),
        ("taubes", "K3", "--candidates", str(cands)),
        ("gromov", "K3", "--mu", ",".join(["0"] * 22)),
        ("kernel", "selftest", "--trials", "3"),
    ]
    return [machine(*r) for r in runs]


def test_every_command_validates_against_schema(tmp_path):
    schema = cli.output_schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    docs = _all_documents(tmp_path)
    assert {d["command"] for d in docs} == {
        "info", "wu", "spinc_enumerate", "vdim", "blowup", "extend", "rules", "taubes", "gromov", "kernel_selftest"
    }
    for d in docs:
        jsonschema.validate(d, schema)
    for d in machine("info", "CP2"), machine("wu", "S4"):
        assert all(k == k.lower() for k in d)


def test_rules_contradiction_output():
    code, out, _ = call("rules", "K3 # K3", "--decomposed", "--assume", "symplectic")
    assert code == 0
    assert out.startswith("CONTRADICTION")
    assert "[R2-taubes-symplectic]" in out and "[R4-connected-sum]" in out
    doc = machine("rules", "K3 # K3", "--decomposed", "--assume", "symplectic")
    assert doc["status"] == "contradiction" and len(doc["derivations"]) == 2


def test_taubes_constant_is_a_pi_multiple(tmp_path):
    cands = tmp_path / "c.txt"
    cands.write_text(",".join(["0"] * 22) + "\n", encoding="utf-8")
    doc = machine("taubes", "K3", "--candidates", str(cands))
    assert doc["taubes_constant"] == "0·π"


@pytest.mark.parametrize(
    "argv",
    [
        ("info", "CP2 #"),
        ("info", "CP3"),
        ("vdim", "CP2", "--class", "2"),
        ("vdim", "CP2", "--class", "3,1"),
        ("vdim", "CP2", "--class", "x"),
        ("kernel", "selftest", "--trials", "0"),
        ("wu", "CP2", "--box", "0"),
        ("gromov", "S4", "--mu", ""),
    ],
)
def test_domain_and_usage_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert out == ""


def test_diagnostic_is_one_line():
    code, _, err = call("info", "CP3")
    assert code == 2 and err.count("\n") == 1 and err.startswith("fourfold:")


def test_internal_fault_exits_1(monkeypatch):
    def boom(*_):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "default_catalog", boom)
    code, _, err = call("info", "CP2")
    assert code == 1 and "internal error" in err


def test_selftest_deterministic_and_exit_codes(monkeypatch):
    a = call("--machine", "kernel", "selftest", "--seed", "1", "--trials", "100")
    b = call("--machine", "kernel", "selftest", "--seed", "1", "--trials", "100")
    assert a[0] == 0 and a[1] == b[1]
    doc = json.loads(a[1])
    assert doc["ok"] and all(r["max_residual"] < r["tolerance"] for r in doc["residuals"].values())
    # a violated tolerance is reported with a nonzero exit
    from fourfold import selftest

    monkeypatch.setitem(selftest.TOLERANCES, "clifford_relation", 0.0)
    code, _, err = call("kernel", "selftest", "--trials", "5")
    assert code == 1 and "clifford_relation" in err


MANIFEST = {"manifolds": [{"name": "H", "form": [[0, 1], [1, 0]], "flags": {"spin": True}}]}


def test_manifest_flag_and_environment(tmp_path, monkeypatch):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(MANIFEST), encoding="utf-8")
    assert call("info", "H")[0] == 2
    assert machine("--manifest", str(path), "info", "H # CP2")["rank"] == 3
    # global options are accepted after the verb too
    assert machine("info", "H", "--manifest", str(path))["sigma"] == 0
    monkeypatch.setenv("FOURFOLD_MANIFEST", str(path))
    assert machine("info", "H")["even"] is True
    monkeypatch.setenv("FOURFOLD_MANIFEST", str(tmp_path / "missing.json"))
    assert call("info", "CP2")[0] == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fourfold", "--machine", "info", "S4"],
        capture_output=True, text=True, encoding="utf-8", check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kappa"] == 4
    proc = subprocess.run([sys.executable, "-m", "fourfold", "wu", "S4 #"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
