"""Dev: criterion-3 design check at the fallback order (largest <= 12 that
builds under the condition guard)."""
import numpy as np
from anisonorm.anisotropy import Anisotropy
from anisonorm.grid import Grid, GridFunction
from anisonorm.decomposition import build_partition
from anisonorm.kernels import (ConditionNumberError, build_generator,
                               build_calderon_pair, calderon_reconstruct)

gen_grid = Grid(N=(16384,), L=(13.0,))
order = 12
gen = None
while gen is None:
    try:
        gen = build_generator(order, gen_grid)
    except ConditionNumberError:
        order -= 1
print("fallback order:", order, "l1:", f"{gen.l1_mass:.3e}")

grid = Grid(N=(8192,), L=(13.0,))
aniso = Anisotropy((1.0,))
fam = build_calderon_pair(gen, aniso, grid, side="+")
part = build_partition(aniso, None, grid)
rng = np.random.default_rng(7)

# fixture: random smooth content on coronas 0..2 only (hard cutoff)
uhat = np.zeros(grid.shape, dtype=complex)
for j in range(3):
    phase = np.exp(2j * np.pi * rng.random(grid.shape))
    uhat += part.windows[j] * phase
u = GridFunction(grid, np.fft.ifftn(uhat * grid.size))
u = GridFunction(grid, u.values / u.sup_norm())
res = [(u - calderon_reconstruct(u, fam, J)).sup_norm() for J in range(1, 9)]
print("residuals J=1..8:", ["%.3e" % r for r in res])
print("ratios:", ["%.2e" % (res[i+1]/res[i]) for i in range(len(res)-1)])

# also a gaussian bump fixture (generic smooth corpus member)
x = grid.axis_points(0)
ub = GridFunction(grid, np.exp(-0.5 * ((x - 1.0) / 0.8) ** 2))
res = [(ub - calderon_reconstruct(ub, fam, J)).sup_norm() for J in range(1, 9)]
print("gaussian bump residuals:", ["%.3e" % r for r in res])
print("ratios:", ["%.2e" % (res[i+1]/res[i]) for i in range(len(res)-1)])
