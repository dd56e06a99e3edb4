"""Clifford module, Hodge star and the spinor to complex structure map in one fiber.

Run: python3 demos/spinor_kernel.py
"""

import numpy as np

from fourfold import cliffkern as ck
from fourfold.selftest import kernel_selftest

rng = np.random.default_rng(0)
m = ck.random_metric(rng, max_cond=50)
print("metric eigenvalues:", np.round(np.linalg.eigvalsh(m.g), 3))

v, w = rng.normal(size=4), rng.normal(size=4)
cv, cw = ck.clifford_action(m, v), ck.clifford_action(m, w)
resid = np.abs(cv @ cw + cw @ cv + 2 * m.inner(v, w) * np.eye(4)).max()
print(f"c(v)c(w) + c(w)c(v) + 2g(v,w): {resid:.1e}")

phi = np.array([1 + 2j, -0.5j])
endo, form = ck.quad_map(m, phi)
n2 = np.vdot(phi, phi).real
print(f"<q(phi)phi, phi> = {np.vdot(phi, endo @ phi).real:.6f}, |phi|^4/2 = {n2 ** 2 / 2:.6f}")

J = ck.spinor_to_acs(m, phi)
omega = ck.associated_two_form(m, J)
print(f"J^2 + 1: {np.abs(J @ J + np.eye(4)).max():.1e}; omega^omega = {ck.wedge(omega, omega):.6f} = |omega|^2")
cos = omega @ form / np.linalg.norm(omega) / np.linalg.norm(form)
print(f"omega and the quadratic map point the same way: cos = {cos:.12f}")

print("ASD forms on W+:", np.abs(ck.clifford_two_form(ck.ASD_BASIS[1])[:2, :2]).max())

report = kernel_selftest(seed=1, trials=200)
for name, value in report.residuals.items():
    print(f"  {name:28s} {value:.1e}")
