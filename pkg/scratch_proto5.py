"""Dev: envelope * Chebyshev basis for order 12; can it build under the
guard and show measurable reconstruction decay on near-DC fixtures?"""
import numpy as np
from anisonorm.grid import Grid, GridFunction

fine = Grid(N=(32768,), L=(4.0,))
t = fine.axis_points(0)
h = fine.h[0]

# C-infinity envelope on (1, 2): exp(-1/(s(1-s))) with s = t - 1
s = np.clip(t - 1.0, 1e-300, 1.0 - 1e-16)
w = np.where((t > 1.0) & (t < 2.0), np.exp(-1.0 / np.maximum(s * (1 - s), 1e-300)), 0.0)

order = 12
n = order + 1
# basis: w(t) * T_m(2t - 3)
T = [np.ones_like(t), 2 * t - 3.0]
for m in range(2, n):
    T.append(2 * (2 * t - 3.0) * T[-1] - T[-2])
B = np.stack([w * T[m] for m in range(n)])  # (n, Nt)

M = np.empty((n, n))
for k in range(n):
    M[k] = (B * t ** k).sum(axis=1) * h
scale = np.abs(M).max(axis=0)
Ms = M / scale
cond = np.linalg.cond(Ms)
rhs = np.zeros(n); rhs[0] = 1.0
coef = np.linalg.solve(Ms, rhs) / scale
g = (coef[:, None] * B).sum(axis=0)
l1 = np.abs(g).sum() * h
mass = g.sum() * h
moms = [abs((g * t ** k).sum() * h) for k in range(1, n + 1)]
print(f"cheb basis order {order}: cond={cond:.2e} mass={mass:.6f} l1={l1:.3e}")
print(f"  rel moment residuals (tol 1e-10): {max(moms[:order])/l1:.2e}; next={moms[order]/l1:.2e}")

# ghat by quadrature at small args
def ghat(xi):
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    return (g[None, :] * np.exp(-1j * np.outer(xi, t))).sum(axis=1) * h

for x in (0.125, 0.25, 0.5, 1.0, 2.0, 4.0):
    print(f"|ghat({x})| = {abs(ghat(x))[0]:.6e}, |ghat-1| = {abs(ghat(x)-1)[0]:.3e}")

# reconstruction decay on a near-DC fixture, 1-D grid, order-12 family
grid = Grid(N=(4096,), L=(13.0,))
xi_lat = grid.axis_freqs(0)

def A(j):
    return ghat(2.0 ** (-j) * xi_lat)   # plus side, a = 1

rng = np.random.default_rng(3)
uhat = np.where(np.abs(xi_lat) <= 0.5,
                np.exp(2j * np.pi * rng.random(grid.shape)), 0.0)
u = np.fft.ifftn(uhat * grid.size)
u /= np.abs(u).max()

prev = None
S = np.zeros(grid.shape, dtype=complex)
for J in range(0, 5):
    aj = A(J)
    if J == 0:
        S = aj * (2 - aj * aj) * aj
    else:
        am = A(J - 1)
        S = S + (aj + am) * (2 - aj * aj - am * am) * (aj - am)
    res = np.abs(u - np.fft.ifftn(S * np.fft.fftn(u))).max()
    if prev is not None:
        print(f"J={J}: residual {res:.3e} ratio {res/prev:.3e}")
    else:
        print(f"J={J}: residual {res:.3e}")
    prev = res
