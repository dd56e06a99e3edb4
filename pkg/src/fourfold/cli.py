"""fourfold: command-line front end.

Class vectors are comma-separated integers in the model's basis order; for
a parsed sum such as "K3 # 2*CP2bar" the basis is the summands' bases left
to right.  Write negative leading entries as --class=-3,1.

Exit status: 0 on success, 2 on domain and usage errors (one line on
stderr), 1 on internal faults and self-test tolerance failures.
"""

from __future__ import annotations

import argparse
from importlib import resources
import json
import os
import sys
from dataclasses import replace

from . import lattice, rules, surgery
from .errors import FourfoldError, ToleranceExceeded
from .manifold import ManifoldModel, admits_almost_complex, default_catalog, load_catalog, parse_decomposed
from .swarith import NonIntegral, SpinCStructure, index_report, symmetry_exponent

MANIFEST_ENV = "FOURFOLD_MANIFEST"
DEFAULT_MAX_WITNESSES = 20
FLAG_NAMES = ("simply_connected", "spin", "kahler", "symplectic", "psc")


class UsageError(FourfoldError):
    pass


def parse_class(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer vector: {text!r}") from None


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def _fmt_class(c) -> str:
    return "(" + ",".join(str(x) for x in c) + ")"


def _k_json(k):
    return None if isinstance(k, NonIntegral) else k


# -- commands ------------------------------------------------------------------
# Each returns (machine document, human text).

def cmd_info(args, catalog):
    m, _ = parse_decomposed(args.expr, catalog)
    flags = {f: getattr(m.flags, f) for f in FLAG_NAMES}
    doc = {
        "command": "info",
        "name": m.name,
        "rank": m.rank,
        "b1": m.b1,
        "b2_plus": m.b2_plus,
        "b2_minus": m.b2_minus,
        "sigma": m.sigma,
        "chi": m.chi,
        "kappa": m.kappa,
        "even": m.form.is_even(),
        "flags": flags,
        "form": m.form.tolist(),
    }
    held = [f for f, v in flags.items() if v] or ["none"]
    text = "\n".join([
        m.name,
        f"  χ={m.chi}, σ={m.sigma}, b⁺={m.b2_plus}, b⁻={m.b2_minus}, κ={m.kappa}",
        f"  rank {m.rank}, b1={m.b1}, {'even' if doc['even'] else 'odd'} form",
        "  flags: " + " ".join(held),
    ])
    return doc, text


def _capped(items, cap):
    items = list(items)
    return items[:cap], len(items), len(items) > cap


def cmd_wu(args, catalog):
    m, _ = parse_decomposed(args.expr, catalog)
    v = admits_almost_complex(m, args.box)
    shown, count, cut = _capped(v.witnesses, args.max_witnesses)
    doc = {
        "command": "wu",
        "name": m.name,
        "kappa": m.kappa,
        "status": v.status,
        "reason": v.reason,
        "box": v.box,
        "witnesses": [list(c) for c in shown],
        "witness_count": count,
        "truncated": cut,
    }
    lines = [str(v)]
    lines += [f"  c={_fmt_class(c)}" for c in shown]
    if cut:
        lines.append(f"  ... {count - len(shown)} more")
    return doc, "\n".join(lines)


def cmd_spinc(args, catalog):
    m, _ = parse_decomposed(args.expr, catalog)
    square = args.square
    if args.vdim is not None:
        implied = 4 * args.vdim + m.kappa
        if square is not None and square != implied:
            raise UsageError(f"--vdim {args.vdim} needs c²={implied}, but --square {square} was given")
        square = implied
    found = lattice.enumerate_characteristic(m.form, args.box, square)
    shown, count, cut = _capped(found, args.max_witnesses)
    doc = {
        "command": "spinc_enumerate",
        "name": m.name,
        "box": args.box,
        "square": square,
        "vdim": args.vdim,
        "classes": [list(c) for c in shown],
        "count": count,
        "truncated": cut,
    }
    head = f"{count} characteristic class(es) in [-{args.box}, {args.box}]"
    if square is not None:
        head += f" with c²={square}"
    lines = [head] + [f"  {_fmt_class(c)}" for c in shown]
    if cut:
        lines.append(f"  ... {count - len(shown)} more")
    return doc, "\n".join(lines)


def cmd_vdim(args, catalog):
    m, _ = parse_decomposed(args.expr, catalog)
    s = SpinCStructure(m, args.cls)
    r = index_report(s)
    doc = {
        "command": "vdim",
        "name": m.name,
        "class": list(s.c),
        "square": s.square,
        "vdim": r.vdim,
        "dirac_index": r.dirac_index,
        "half_derham_index": r.half_derham_index,
        "c2_wplus": r.c2_wplus,
        "c2_wminus": r.c2_wminus,
        "symmetry_k": _k_json(r.symmetry_k),
        "value_class": str(r.value_class),
    }
    text = "\n".join([
        f"{m.name}, c={_fmt_class(s.c)}, c²={s.square}",
        f"  vdim = {r.vdim} = dirac {r.dirac_index} + half de Rham {r.half_derham_index}",
        f"  c2(W+)={r.c2_wplus}, c2(W-)={r.c2_wminus}",
        f"  symmetry exponent k={r.symmetry_k}; invariant type {r.value_class}",
    ])
    return doc, text


def cmd_blowup(args, catalog):
    m, _ = parse_decomposed(args.expr, catalog)
    s = SpinCStructure(m, args.cls)
    out = surgery.blow_up_class(s)
    doc = {
        "command": "blowup",
        "name": m.name,
        "class": list(s.c),
        "blown_up_name": out.base.name,
        "blown_up_class": list(out.c),
        "square": out.square,
        "vdim": index_report(out).vdim,
    }
    text = f"{out.base.name}: c={_fmt_class(out.c)}, c²={out.square}, vdim={doc['vdim']} (unchanged)"
    return doc, text


def cmd_extend(args, catalog):
    m, _ = parse_decomposed(args.expr, catalog)
    s = SpinCStructure(m, args.cls)
    out = surgery.canonical_extension(s)
    if isinstance(out, surgery.NotExtendable):
        doc = {"command": "extend", "name": m.name, "class": list(s.c), "extendable": False, "reason": out.reason}
        return doc, str(out)
    d = (len(out.c) - len(s.c))
    doc = {
        "command": "extend",
        "name": m.name,
        "class": list(s.c),
        "extendable": True,
        "reason": "",
        "d": d,
        "total_name": out.base.name,
        "canonical_class": list(out.c),
        "square": out.square,
        "kappa": out.base.kappa,
    }
    text = f"{out.base.name}: K_c={_fmt_class(out.c)}, K_c²={out.square} = 2χ+3σ = {out.base.kappa} (d={d})"
    return doc, text


def _assume(m: ManifoldModel, names) -> ManifoldModel:
    if not names:
        return m
    bad = [n for n in names if n not in FLAG_NAMES]
    if bad:
        raise UsageError(f"unknown flag(s) for --assume: {', '.join(bad)}")
    flags = replace(m.flags, **{n: True for n in names})
    return replace(m, flags=flags, provenance="parsed")


def _key_json(key):
    return "K" if key == rules.CANONICAL else list(key)


def _der_json(d: rules.Derivation):
    return {"rule": d.rule, "conclusion": d.conclusion, "premises": list(d.premises)}


def cmd_rules(args, catalog):
    m, dec = parse_decomposed(args.expr, catalog)
    m = _assume(m, args.assume)
    if dec is not None:
        dec = replace(dec, total=m)
    out = rules.evaluate(m, dec if args.decomposed else None)
    if isinstance(out, rules.Contradiction):
        doc = {
            "command": "rules",
            "name": m.name,
            "status": "contradiction",
            "global_status": "contradiction",
            "symmetry_k": _k_json(symmetry_exponent(m)),
            "conclusion": out.conclusion,
            "rules": list(out.rules),
            "assertions": [],
            "derivations": [_der_json(d) for d in out.derivations],
        }
    else:
        doc = {
            "command": "rules",
            "name": m.name,
            "status": "verdict",
            "global_status": out.global_status,
            "symmetry_k": _k_json(out.symmetry_k),
            "conclusion": "",
            "rules": sorted({d.rule for d in out.derivation}),
            "assertions": [{"class": _key_json(k), "status": v} for k, v in out.assertions],
            "derivations": [_der_json(d) for d in out.derivation],
        }
    return doc, str(out)


def _read_candidates(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read candidates file: {exc}") from None
    if text.lstrip().startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"candidates file: {exc}") from None
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise UsageError("candidates file must be a JSON list of integer lists")
        return [tuple(int(x) for x in r) for r in data]
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                out.append(parse_class(line))
            except argparse.ArgumentTypeError as exc:
                raise UsageError(str(exc)) from None
    return out


def cmd_taubes(args, catalog):
    m, _ = parse_decomposed(args.expr, catalog)
    decisions = rules.taubes_filter(m, _read_candidates(args.candidates))
    const = rules.taubes_constant(m)
    doc = {
        "command": "taubes",
        "name": m.name,
        "taubes_constant": str(const),
        "taubes_constant_pi_multiple": const.coefficient,
        "decisions": [{"class": list(d.cls), "keep": d.keep, "reason": d.reason} for d in decisions],
    }
    lines = [f"{m.name}: 2π c1(K⁻¹)·[ω] = {const}"]
    lines += [f"  {'keep' if d.keep else 'drop'} {_fmt_class(d.cls)}: {d.reason}" for d in decisions]
    return doc, "\n".join(lines)


def cmd_gromov(args, catalog):
    m, _ = parse_decomposed(args.expr, catalog)
    dim = rules.gromov_dimension(m, args.mu)
    doc = {"command": "gromov", "name": m.name, "mu": list(args.mu), "dimension": dim}
    return doc, f"{m.name}: dim M(μ={_fmt_class(args.mu)}) = μ·(μ−K) = {dim}"


def cmd_selftest(args, catalog):
    from .selftest import TOLERANCES, kernel_selftest

    rep = kernel_selftest(args.seed, args.trials)
    doc = {
        "command": "kernel_selftest",
        "seed": rep.seed,
        "trials": rep.trials,
        "ok": rep.ok,
        "residuals": {
            k: {"max_residual": v, "tolerance": TOLERANCES[k], "ok": v <= TOLERANCES[k]}
            for k, v in rep.residuals.items()
        },
    }
    lines = [f"kernel selftest seed={rep.seed} trials={rep.trials}"]
    for k, v in rep.residuals.items():
        mark = "ok" if v <= TOLERANCES[k] else "FAIL"
        lines.append(f"  {k:28s} {v:.3e}  (tol {TOLERANCES[k]:.0e})  {mark}")
    return doc, "\n".join(lines), rep


# -- argument parsing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", default=argparse.SUPPRESS, help=f"JSON manifest of extra models (default ${MANIFEST_ENV})")
    common.add_argument("--machine", action="store_true", default=argparse.SUPPRESS, help="emit one JSON document")

    p = argparse.ArgumentParser(
        prog="fourfold",
        description="Intersection forms, Spin^c arithmetic, surgery rules and spinor kernel checks.",
        epilog="Classes are comma-separated integers in basis order; sums use the summands' bases "
               "left to right. Use --class=-3,1 when the first entry is negative.",
        parents=[common],
    )
    sub = p.add_subparsers(dest="verb", required=True, metavar="command")

    def add(name, fn, help_text, expr=True):
        sp = sub.add_parser(name, help=help_text, parents=[common])
        if expr:
            sp.add_argument("expr", help='manifold expression, e.g. "K3 # 2*CP2bar"')
        sp.set_defaults(func=fn)
        return sp

    add("info", cmd_info, "Betti numbers, signature, Euler characteristic and flags")

    sp = add("wu", cmd_wu, "decide existence of an almost complex structure")
    sp.add_argument("--box", type=_positive, default=3)
    sp.add_argument("--max-witnesses", type=_positive, default=DEFAULT_MAX_WITNESSES)

    spinc = sub.add_parser("spinc", help="Spin^c structure queries", parents=[common])
    ssub = spinc.add_subparsers(dest="action", required=True, metavar="action")
    sp = ssub.add_parser("enumerate", help="characteristic classes in a box", parents=[common])
    sp.add_argument("expr")
    sp.add_argument("--box", type=_positive, required=True)
    sp.add_argument("--square", type=int)
    sp.add_argument("--vdim", type=int)
    sp.add_argument("--max-witnesses", type=_positive, default=DEFAULT_MAX_WITNESSES)
    sp.set_defaults(func=cmd_spinc)

    for name, fn, text in (
        ("vdim", cmd_vdim, "indices and virtual dimension of a class"),
        ("blowup", cmd_blowup, "transport a class to the blow-up"),
        ("extend", cmd_extend, "canonical extension K_c over X # d CP2bar"),
    ):
        sp = add(name, fn, text)
        sp.add_argument("--class", dest="cls", type=parse_class, required=True, help="e.g. 3 or 1,-1,0")

    sp = add("rules", cmd_rules, "run the invariant rule engine")
    sp.add_argument("--decomposed", action="store_true", help="use the outermost # of the expression")
    sp.add_argument("--assume", type=lambda s: tuple(x for x in s.split(",") if x), default=(),
                    help="extra flags to assume, e.g. symplectic")

    sp = add("taubes", cmd_taubes, "filter candidate basic classes with Taubes' constraints")
    sp.add_argument("--candidates", required=True, help="file: JSON list of classes or one class per line")

    sp = add("gromov", cmd_gromov, "dimension of pseudoholomorphic curves dual to mu")
    sp.add_argument("--mu", type=parse_class, required=True)

    kernel = sub.add_parser("kernel", help="spinor/twistor kernel", parents=[common])
    ksub = kernel.add_subparsers(dest="action", required=True, metavar="action")
    sp = ksub.add_parser("selftest", help="seeded residual sweep", parents=[common])
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--trials", type=_positive, default=100)
    sp.set_defaults(func=cmd_selftest)
    return p


def _catalog(path: str | None):
    path = path or os.environ.get(MANIFEST_ENV) or None
    if path is None:
        return default_catalog()
    try:
        with open(path, encoding="utf-8") as fh:
            return load_catalog(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read manifest: {exc}") from None


def output_schema() -> dict:
    """JSON schema every --machine document validates against."""
    text = resources.files("fourfold").joinpath("data/output_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _emit(doc, text, machine: bool, out):
    if machine:
        out.write(json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n")
    else:
        out.write(text + "\n")


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    machine = getattr(args, "machine", False)
    try:
        catalog = _catalog(getattr(args, "manifest", None))
        result = args.func(args, catalog)
    except FourfoldError as exc:
        err.write(f"fourfold: {type(exc).__name__}: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - exit 1 is the internal-fault channel
        err.write(f"fourfold: internal error: {type(exc).__name__}: {exc}\n")
        return 1
    _emit(result[0], result[1], machine, out)
    if len(result) == 3:
        try:
            result[2].check()
        except ToleranceExceeded as exc:
            err.write(f"fourfold: {exc}\n")
            return 1
    return 0


def main():
    sys.exit(run())
