"""Backlund tower: new K-surfaces from old ones, one algebraic step each.

A chain of parameters (alpha, theta0) lifts the planar system into layers;
each layer yields a surface.  Consecutive surfaces sit at the constant
vertex distance 2*lam*alpha / (alpha^2 + lam^2), and swapping the order of
two steps commutes up to roundoff after matching the layer seeds
(permutability).  The same closure identities can be checked pointwise on
random samples, where the naive scheme fails by a wide margin.
"""

import numpy as np

from ksurf.goursat import LatticeDomain2
from ksurf.harness import demo_data
from ksurf.sinegordon import (
    BacklundParam,
    check_compatibility_3d,
    hirota_backlund_system,
    naive_backlund_system,
)
from ksurf.surfaces import (
    backlund_step_norms,
    backlund_surface,
    backlund_two_route_residual,
    export_obj,
)

dom = LatticeDomain2.from_k(1.0, 5)
data = demo_data()
chain = [BacklundParam(1.0, 0.5), BacklundParam(0.5, -0.25)]
lam = 1.0

tower = backlund_surface(data, dom, chain, lam)
for z, mesh in enumerate(tower):
    export_obj(mesh, f"demo_tower_layer{z}.obj")
print(f"wrote {len(tower)} layers (demo_tower_layer*.obj)")

for z in range(len(chain)):
    alpha = chain[z].alpha
    norms = backlund_step_norms(tower[z], tower[z + 1])
    expected = 2.0 * lam * alpha / (alpha**2 + lam**2)
    print(
        f"step {z + 1}: |dF| mean = {norms.mean():.12f} "
        f"(expected {expected:.12f}, spread {norms.std():.2e})"
    )

res = backlund_two_route_residual(data, dom, chain, lam)
print(f"two-route (permutability) residual = {res:.3e}\n")

rng = np.random.default_rng(0)
samples = rng.uniform(-3.0, 3.0, size=(2000, 3))
print("closure identities on random samples, eps = 2^-3:")
for name, make in (("hirota", hirota_backlund_system), ("naive", naive_backlund_system)):
    worst = max(check_compatibility_3d(make(al), samples, 2.0**-3) for al in (0.5, 1.0, 2.0))
    print(f"  {name:<7} worst residual = {worst:.3e}")
