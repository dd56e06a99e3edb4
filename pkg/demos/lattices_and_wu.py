"""Intersection forms, characteristic classes and the almost complex test.

Run: python3 demos/lattices_and_wu.py
"""

from fourfold import lattice as L
from fourfold import manifold as M

cat = M.default_catalog()

print("Signature data of the built-in models")
for name, m in cat.items():
    print(f"  {name:7s} rank={m.rank:2d}  b+={m.b2_plus}  b-={m.b2_minus}  chi={m.chi:2d}  "
          f"sigma={m.sigma:3d}  kappa={m.kappa}")

# kappa = 2 chi + 3 sigma must be the square of a characteristic class
for name, box in (("S4", 3), ("CP2", 3), ("CP2bar", 3), ("S2xS2", 3), ("K3", 1)):
    print(f"{name}: {M.admits_almost_complex(cat[name], box)}")

# E8 has 240 roots; the search prunes by block and by the ellipsoid x.Qx <= 2
roots = list(L.iter_vectors(L.e8(), L.definite_coordinate_bound(L.e8(), 2), square=2))
print(f"roots of E8: {len(roots)}")

# every characteristic class satisfies c^2 = sigma mod 8
form = L.direct_sum(L.diagonal(1, 1, -1), L.hyperbolic())
sigma = L.signature_data(form).sigma
sq = sorted({L.square(form, c) for c in L.enumerate_characteristic(form, 2)})
print(f"characteristic squares on <1,1,-1> + H, box 2: {sq} (sigma = {sigma})")
