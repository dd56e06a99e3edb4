"""Acceptance gate: one timed check per criterion, each printing a PASS/FAIL line."""

import random
import time

import numpy as np
import pytest

from fourfold import cliffkern as ck
from fourfold import lattice as L
from fourfold import manifold as M
from fourfold import rules as R
from fourfold import surgery as G
from fourfold import swarith as S
from fourfold import twistor as tw
from fourfold.selftest import kernel_selftest

CAT = M.default_catalog()


@pytest.fixture
def gate(capsys):
    """Run a criterion body under a clock and print its verdict line."""

    def run(number, title, limit, body):
        t0 = time.perf_counter()
        failure = None
        try:
            detail = body()
        except AssertionError as exc:
            detail, failure = None, exc
        elapsed = time.perf_counter() - t0
        ok = failure is None and elapsed < limit
        note = detail if failure is None else f"assertion failed: {failure}"
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} "
                  f"({elapsed:.2f} s, limit {limit:g} s){' - ' + note if note else ''}")
        if failure is not None:
            raise failure
        assert elapsed < limit, f"criterion {number} took {elapsed:.2f} s, limit {limit} s"

    return run


def _random_model(rng, name="X"):
    return M.model_from_classes(name, L.random_block_form(rng), b1=rng.randint(0, 2))


def test_criterion_1_wu_arithmetic(gate):
    def body():
        s4, cp2, bar = CAT["S4"], CAT["CP2"], CAT["CP2bar"]
        assert M.kappa(s4) == 4
        v = M.admits_almost_complex(s4)
        assert v.status == "no" and str(v) == "No: rank 0, κ=4≠0"
        assert M.kappa(cp2) == 9
        for box in (3, 4, 7):
            v = M.admits_almost_complex(cp2, box)
            assert v.status == "yes" and set(v.witnesses) == {(-3,), (3,)}
        assert M.kappa(bar) == 3
        v = M.admits_almost_complex(bar)
        assert v.status == "no" and v.reason.startswith("negative definite")
        return "S4 No, CP2 {±3h}, CP2bar No (negative definite)"

    gate(1, "Wu arithmetic on S4, CP2, CP2bar", 1.0, body)


def test_criterion_2_index_decomposition(gate):
    def body():
        rng = random.Random(20)
        for _ in range(1000):
            m = _random_model(rng)
            s = S.SpinCStructure(m, L.random_characteristic(m.form, rng))
            assert S.virtual_dimension(s) == S.dirac_index(s) + S.half_derham_index(m)
        return "1000 pairs, exact"

    gate(2, "vdim = Dirac index + half de Rham index", 5.0, body)


def test_criterion_3_blow_up_invariance(gate):
    def body():
        rng = random.Random(30)
        for _ in range(1000):
            m = _random_model(rng)
            s = S.SpinCStructure(m, L.random_characteristic(m.form, rng))
            up = G.blow_up_class(s)
            assert up.base.rank == m.rank + 1 and up.c == s.c + (1,)
            assert S.virtual_dimension(up) == S.virtual_dimension(s)
        return "1000 pairs, exact"

    gate(3, "vdim(c + h on X # CP2bar) = vdim(c on X)", 5.0, body)


def test_criterion_4_canonical_extension(gate):
    def body():
        rng = random.Random(40)
        done = tried = 0
        while done < 500:
            tried += 1
            m = _random_model(rng)
            if m.b2_plus == 0:
                continue
            s = S.SpinCStructure(m, L.random_characteristic(m.form, rng, spread=3))
            v = S.virtual_dimension(s)
            if v < 0 or v % 2:
                continue
            d = v // 2
            k = G.canonical_extension(s)
            y = k.base
            assert k.c == s.c + (3,) * d
            assert L.is_characteristic(y.form, k.c)
            assert k.square == 2 * y.chi + 3 * y.sigma == s.square - 9 * d
            done += 1
        return f"500 classes with even vdim >= 0 ({tried} drawn)"

    gate(4, "K_c = c + 3 sum h_i is characteristic with K_c^2 = 2chi + 3sigma", 5.0, body)


def test_criterion_5_characteristic_residue(gate):
    def body():
        rng = random.Random(50)
        count = forms = 0
        while forms < 200:
            form = L.random_block_form(rng, max_blocks=4, e8_weight=0.15)
            if form.rank > 10:
                continue
            forms += 1
            q = np.array(form.tolist(), dtype=np.int64).reshape(form.rank, form.rank)
            sigma = int(np.sum(np.linalg.eigvalsh(q.astype(float)) > 0)) * 2 - form.rank if form.rank else 0
            box = 2 if form.rank <= 5 else 1
            for c in L.enumerate_characteristic(form, box):
                c = np.array(c, dtype=np.int64)
                # independent check: c.x = x.x mod 2 on every basis vector, then the residue
                assert all((c @ q[:, i] - q[i, i]) % 2 == 0 for i in range(form.rank))
                assert (int(c @ q @ c) - sigma) % 8 == 0
                count += 1
        return f"{count} classes over {forms} forms"

    gate(5, "characteristic c has c^2 = sigma mod 8", 5.0, body)


def test_criterion_6_kernel_identities(gate):
    def body():
        report = kernel_selftest(seed=6, trials=1000)
        r = report.residuals
        assert r["clifford_relation"] < 1e-12, r
        assert r["star_involution"] < 1e-12, r
        assert r["coordinate_star_involution"] < 1e-12, r
        assert r["quartic_term"] < 1e-12, r
        assert r["asd_kernel"] < 1e-10, r
        rng = np.random.default_rng(61)
        for _ in range(1000):
            m = ck.random_metric(rng)
            w = np.linalg.eigvals(ck.hodge_star_coords(m))
            assert np.sum(np.abs(w - 1) < 1e-6) == 3 and np.sum(np.abs(w + 1) < 1e-6) == 3
        assert np.linalg.matrix_rank(ck.SD_BASIS) == 3 and np.linalg.matrix_rank(ck.ASD_BASIS) == 3
        worst = max(r[k] for k in ("clifford_relation", "star_involution", "quartic_term"))
        return f"1000 metrics; worst of 1e-12 identities {worst:.1e}, ASD kernel {r['asd_kernel']:.1e}"

    gate(6, "Clifford relation, star involution, dim 3/3, quartic term, ASD kernel", 30.0, body)


def _fibonacci_sphere(n):
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    r = np.sqrt(1 - z ** 2)
    a = np.pi * (1 + 5 ** 0.5) * k
    return np.column_stack([r * np.cos(a), r * np.sin(a), z])


def test_criterion_7_twistor_geometry(gate):
    def body():
        rng = np.random.default_rng(70)
        cplx = lambda n: rng.normal(size=n) + 1j * rng.normal(size=n)  # noqa: E731
        for _ in range(200):
            z = cplx(4)
            assert np.array_equal(tw.theta(tw.theta(z)), z)
        m = ck.random_metric(rng)
        fixed = np.inf
        ruling = 0.0
        for n in _fibonacci_sphere(10_000):
            phi = ck.inverse_hopf(n)
            for line, th in ((tw.plus_line(m, phi), tw.theta_plus), (tw.minus_line(m, phi), tw.theta_minus)):
                ruling = max(ruling, min(tw.ruling_residuals(m, line)))
                image = th(m, line)
                fixed = min(fixed, tw.proj_distance(tw.frame_bivector(m, line), tw.frame_bivector(m, image)))
        assert fixed > 0.5, fixed
        assert ruling < 1e-9, ruling
        reality = 0.0
        for _ in range(200):
            mm = ck.random_metric(rng)
            p = rng.normal(size=4)
            l = tw.minus_line(mm, cplx(2))
            lhs = tw.psi_p(mm, p, tw.theta_minus(mm, l))
            rhs = tw.theta_plus(mm, tw.psi_p(mm, p, l))
            reality = max(reality, tw.line_distance(lhs, rhs))
        assert reality < 1e-8, reality
        conic = 0.0
        for _ in range(100):
            mm = ck.random_metric(rng)
            phi = cplx(2)
            got = tw.tangent_conic_quadratic(mm, tw.plus_line(mm, phi).plucker)
            conic = max(conic, tw.proj_distance(got, ck.quad_map(mm, phi)[1]))
        assert conic < 1e-8, conic
        return f"fixed-point gap {fixed:.3f}, ruling {ruling:.1e}, psi reality {reality:.1e}, conic {conic:.1e}"

    gate(7, "Theta, theta+-, rulings, psi_p reality, tangent conic", 60.0, body)


def test_criterion_8_rule_engine(gate):
    def body():
        k3 = R.evaluate(CAT["K3"])
        assert k3.status((0,) * 22) == R.NONZERO and k3.symmetry_k == 2
        assert k3.derivation[0].rule == "R1-kahler"
        for text in ("K3 # K3", "K3 # S2xS2", "S2xS2 # CP2", "CP2 # CP2"):
            m, dec = M.parse_decomposed(text)
            v = R.evaluate(m, dec)
            assert v.global_status == "all_trivial", text
        rng = random.Random(80)
        for _ in range(20):
            a, b = _random_model(rng, "A"), _random_model(rng, "B")
            if a.b2_plus == 0 or b.b2_plus == 0:
                continue
            m, dec = G.connected_sum(a, b)
            assert R.evaluate(m, dec).global_status == "all_trivial"
        m, dec = M.parse_decomposed("K3 # K3")
        y = M.model_from_classes("Y", m.form, symplectic=True)
        out = R.evaluate(y, G.SumDecomposition(dec.left, dec.right, y))
        assert isinstance(out, R.Contradiction) and len(out.derivations) == 2
        text = str(out)
        assert "[R2-taubes-symplectic]" in text and "[R4-connected-sum]" in text
        cp2 = R.evaluate(CAT["CP2"])
        assert cp2.global_status == "all_trivial" and cp2.derivation[0].rule == "R3-no-walls"
        for args in ((CAT["K3"],), (m, dec), (y, G.SumDecomposition(dec.left, dec.right, y)), (CAT["CP2"],)):
            assert str(R.evaluate(*args)) == str(R.evaluate(*args))
        return "K3 Kähler, sums trivial, contradiction printed, CP2 no walls, replays identical"

    gate(8, "rule engine verdicts and determinism", 1.0, body)


def test_criterion_9_symplectic_properties(gate):
    def body():
        # b2+ = 5, K^2 = kappa = 27
        form = L.diagonal(1, 1, 1, 1, 1, -1, -1)
        K = (3, 3, 3, 1, 1, 1, 1)
        base = M.model_from_classes("Z", form)
        rng = random.Random(90)
        for _ in range(100):
            omega = tuple(rng.randint(-2, 3) for _ in range(7))
            if L.pair(form, K, omega) < 0:
                continue
            z = M.with_symplectic_data(base, K, omega)
            assert R.spinc_from_homology(z, (0,) * 7).c == tuple(-x for x in K)
            assert all(d.keep for d in R.taubes_filter(z, [K, tuple(-x for x in K)]))
            assert R.gromov_dimension(z, K) == 0
        k3 = CAT["K3"]
        assert R.spinc_from_homology(k3, (0,) * 22).c == (0,) * 22
        assert R.gromov_dimension(k3, k3.symplectic_data.K) == 0

        x = M.parse_expression("CP2 # CP2bar")
        cases = [((-3,), 1, CAT["CP2"], "allowed"), ((5, 3), 3, x, "arithmetically_possible_only_if"),
                 ((5, 3), -3, x, "arithmetically_possible_only_if"), ((5, 1), 1, x, "excluded"),
                 ((9, 7), 5, x, "excluded"), ((5, 3), 1, x, "excluded")]
        for c_x, k, base_x, kind in cases:
            yy, dec = G.connected_sum(base_x, CAT["CP2bar"])
            yy = M.with_symplectic_data(yy, c_x + (k,), (1,) + (0,) * base_x.rank)
            assert R.blow_down_obstruction(yy, G.SumDecomposition(dec.left, dec.right, yy), c_x, k).kind == kind
        return "eta=0 gives -K, ±K kept, gr(K)=0, blow-down split matches"

    gate(9, "symplectic arithmetic properties", 1.0, body)
