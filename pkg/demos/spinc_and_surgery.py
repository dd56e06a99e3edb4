"""Spin^c arithmetic and its behaviour under connected sums and blow-ups.

Run: python3 demos/spinc_and_surgery.py
"""

from fourfold import manifold as M
from fourfold import surgery as G
from fourfold import swarith as S

cat = M.default_catalog()

s = S.SpinCStructure(cat["CP2"], (3,))
r = S.index_report(s)
print(f"CP2, c = 3h: vdim {r.vdim} = Dirac {r.dirac_index} + de Rham {r.half_derham_index}; "
      f"c2(W+), c2(W-) = {r.c2_wplus}, {r.c2_wminus}; value class {r.value_class.kind}")

# blowing up keeps the expected dimension when the new class is e = h
up = G.blow_up_class(s)
print(f"on {up.base.name}: c = {up.c}, vdim {S.virtual_dimension(up)}")

# a class of vdim 2 extends to a canonical-like class after one more blow-up
x = M.parse_expression("CP2 # CP2bar")
c = S.SpinCStructure(x, (5, 3))
k = G.canonical_extension(c)
print(f"{x.name}, c = (5,3): vdim {S.virtual_dimension(c)} -> K_c = {k.c} on {k.base.name}, "
      f"K_c^2 = {k.square} = 2chi + 3sigma = {k.base.kappa}")

odd = G.canonical_extension(S.SpinCStructure(M.parse_expression("K3 # K3"), (0,) * 44))
print(f"K3 # K3, c = 0: {odd.reason}")

print("(-1)-classes of CP2 # CP2bar in box 2:", G.find_minus_one_sphere_classes(x, 2))
