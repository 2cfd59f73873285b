"""Dev prototype: measure generator l1 mass, symbol sizes, telescoping error,
reconstruction decay across moment orders. Not part of the package."""
import numpy as np
from anisonorm.anisotropy import Anisotropy
from anisonorm.grid import Grid, GridFunction
from anisonorm.kernels import (build_generator, build_calderon_pair,
                               verify_telescoping, calderon_reconstruct,
                               reconstruction_symbol)

gen_grid = Grid(N=(16384,), L=(13.0,))
print("gen grid h:", gen_grid.h[0])

for lmax in (1, 2, 3, 12):
    try:
        gen = build_generator(lmax, gen_grid)
    except Exception as e:
        print(f"l_max={lmax}: BUILD FAILED: {e}")
        continue
    print(f"l_max={lmax}: mass={gen.mass:.6e} l1={gen.l1_mass:.4e} "
          f"edge_leak={gen.edge_leakage:.2e} "
          f"max_resid_moment={max(gen.residual_moments):.2e} "
          f"next={gen.next_moment:.2e} sigma={gen.sigma:.4f}")
    xi = np.linspace(0, 1000, 20001)
    gh = np.abs(gen.ghat(xi))
    print(f"   max|ghat| = {gh.max():.4e} at xi={xi[gh.argmax()]:.1f}; "
          f"|ghat(3)|={np.abs(gen.ghat(3.0)):.3e} |ghat(6)|={np.abs(gen.ghat(6.0)):.3e} "
          f"|ghat| at 600: {np.abs(gen.ghat(600.0)):.2e}")

# telescoping + family on a fine 1-D grid
grid = Grid(N=(8192,), L=(13.0,))
aniso = Anisotropy((1.0,))
for lmax in (1, 2, 3):
    gen = build_generator(lmax, gen_grid)
    fam = build_calderon_pair(gen, aniso, grid, side="+")
    errs = [verify_telescoping(fam, N) for N in range(1, 10)]
    print(f"l_max={lmax}: support_leak={fam.support_leakage:.2e} "
          f"telescope max over N: {max(errs):.2e}")

# reconstruction decay on a band-weighted fixture
from anisonorm.decomposition import build_partition
gen = build_generator(1, gen_grid)
fam = build_calderon_pair(gen, aniso, grid, side="+")
part = build_partition(aniso, None, grid)
print("partition J:", part.J)
rng = np.random.default_rng(0)
beta = 3.0
uhat = np.zeros(grid.shape, dtype=complex)
for j, w in enumerate(part.windows):
    if j > 7:
        break
    phase = np.exp(2j * np.pi * rng.random(grid.shape))
    uhat += 2.0 ** (-beta * j) * w * phase
u = GridFunction(grid, np.fft.ifftn(uhat * grid.size))
u = GridFunction(grid, u.values / u.sup_norm())
res = []
for J in range(0, 7):
    r = u - calderon_reconstruct(u, fam, J)
    res.append(r.sup_norm())
print("recon residuals (L=1, beta=3):", ["%.3e" % r for r in res])
print("ratios:", ["%.3f" % (res[i+1]/res[i]) for i in range(len(res)-1)])
