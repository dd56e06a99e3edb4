"""Lines on the complexified metric quadric and the maps between its rulings.

Run: python3 demos/twistor_quadric.py
"""

import numpy as np

from fourfold import cliffkern as ck
from fourfold import twistor as tw

m = ck.Metric4.standard()
print("(1:i:0:0) on Q:", tw.quadric_membership(m, [1, 1j, 0, 0]))

i0 = ck.spinor_to_acs(m, np.array([1, 0]))
l, lbar = tw.lines_of_acs(m, i0)
print("l_I:", l, "ruling", tw.ruling_of_line(m, l))
print("conj l_I ruling:", tw.ruling_of_line(m, lbar))

rng = np.random.default_rng(3)
g = ck.random_metric(rng, max_cond=20)
psi = rng.normal(size=2) + 1j * rng.normal(size=2)
lm = tw.minus_line(g, psi)
p = rng.normal(size=4)
lp = tw.psi_p(g, p, lm)
print("psi_p sends a minus line to the", tw.ruling_of_line(g, lp), "ruling")
gap = tw.line_distance(tw.psi_p(g, p, tw.theta_minus(g, lm)), tw.theta_plus(g, lp))
print(f"psi_p(theta-(l)) vs theta+(psi_p(l)): {gap:.1e}")
print(f"round trip: {tw.line_distance(tw.psi_p_inverse(g, p, lp), lm):.1e}")

phi = rng.normal(size=2) + 1j * rng.normal(size=2)
line = tw.plus_line(g, phi)
meet = tw.tangent_conic_quadratic(g, line.plucker)
print(f"tangent meet vs quadratic map: {tw.proj_distance(meet, ck.quad_map(g, phi)[1]):.1e}")
