"""Forward-chaining verdicts on Seiberg-Witten invariants, with derivations.

Run: python3 demos/rule_engine.py
"""

from fourfold import manifold as M
from fourfold import rules as R
from fourfold import surgery as G

cat = M.default_catalog()

print("-- K3 (Kahler, b2+ = 3)")
print(R.evaluate(cat["K3"]))

print("\n-- CP2 (positive definite, positive scalar curvature)")
print(R.evaluate(cat["CP2"]))

m, dec = M.parse_decomposed("K3 # K3")
print("\n-- K3 # K3 with its splitting")
print(R.evaluate(m, dec))

# claim a symplectic structure on the sum: the rules disagree and say why
y = M.model_from_classes("Y", m.form, symplectic=True)
print("\n-- symplectic on K3 # K3")
print(R.evaluate(y, G.SumDecomposition(dec.left, dec.right, y)))

print("\n-- symplectic numerology on K3")
k3 = cat["K3"]
print("Taubes constant:", R.taubes_constant(k3))
print("Gromov dimension of a square-2 class:", R.gromov_dimension(k3, (0,) * 16 + (1, 1, 0, 0, 0, 0)))
for d in R.taubes_filter(k3, [(0,) * 22, (2,) + (0,) * 21]):
    print(f"  {d.cls[:3]}...: keep={d.keep} ({d.reason})")
