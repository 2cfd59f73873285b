"""Dev: can l_max=12 build at all? Try (a) wider margins, (b) a
Gaussian-derivative (Hermite) basis with triangular moment structure."""
import math
import numpy as np
from anisonorm.grid import Grid
from anisonorm.kernels import build_generator, _gaussian_raw_moments

gen_grid = Grid(N=(16384,), L=(13.0,))

# (a) wider margin
for margin in (0.05, 0.02):
    try:
        g = build_generator(12, gen_grid, margin=margin, sharpness=11.0)
        print(f"margin={margin}: built, l1={g.l1_mass:.3e}")
    except Exception as e:
        print(f"margin={margin}: {e}")

# (b) Hermite-derivative basis: b_m = d^m/dt^m G(t; c, sigma), single center
def derivative_basis_solve(l_max, c=1.5, sigma=0.04):
    n = l_max + 1
    raw = _gaussian_raw_moments(c, sigma, l_max)
    M = np.zeros((n, n))
    for k in range(n):
        for m in range(k + 1):
            ff = math.perm(k, m)  # k!/(k-m)!
            M[k, m] = (-1) ** m * ff * raw[k - m]
    scale = np.abs(M).max(axis=0)
    Ms = M / scale
    cond = np.linalg.cond(Ms)
    rhs = np.zeros(n); rhs[0] = 1.0
    coef = np.linalg.solve(Ms, rhs) / scale
    # l1 mass by quadrature: g = sum coef_m * He_m-type derivative
    t = np.linspace(0.5, 2.5, 200001)
    u = (t - c) / sigma
    G = np.exp(-0.5 * u * u)
    # derivatives via Hermite recurrence: d^m/dt^m G = (-1/sigma)^m He_m(u) G
    He = [np.ones_like(u), u]
    for m in range(2, n):
        He.append(u * He[-1] - (m - 1) * He[-2])
    g = np.zeros_like(t)
    for m in range(n):
        g += coef[m] * (-1.0 / sigma) ** m * He[m] * G
    h = t[1] - t[0]
    l1 = np.abs(g).sum() * h
    mass = g.sum() * h
    moms = [abs((g * t ** k).sum() * h) for k in range(1, n)]
    edge = max(np.abs(g[t < 1.0]).max(), np.abs(g[t > 2.0]).max())
    print(f"deriv basis l_max={l_max} sigma={sigma}: cond={cond:.2e} "
          f"mass={mass:.4f} l1={l1:.3e} maxmom={max(moms):.2e} edge={edge:.2e}")

for sig in (0.030, 0.038):
    derivative_basis_solve(12, sigma=sig)
derivative_basis_solve(3, sigma=0.038)
