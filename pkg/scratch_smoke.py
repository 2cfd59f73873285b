"""Dev smoke: end-to-end checks of the main identities before tests."""
import numpy as np
import warnings
from anisonorm import *
from anisonorm.decomposition import default_level
from anisonorm.kernels import reconstruction_symbol
from anisonorm.grid import apply_symbol

# 1. dft Gaussian vs analytic
g = Grid(N=(128,), L=(8.0,))
x = g.axis_points(0)
sig = 0.5
u = GridFunction(g, np.exp(-0.5 * (x / sig) ** 2))
U = dft(u)
xi = g.axis_freqs(0)
analytic = sig * np.sqrt(2 * np.pi) * np.exp(-0.5 * (sig * xi) ** 2)
print("dft gaussian err:", np.abs(U.coeffs - analytic).max() / analytic.max())

# 2. convolve oracle (direct sum)
g2 = Grid(N=(16, 16), L=(2.0, 2.0))
rng = np.random.default_rng(0)
f2 = GridFunction(g2, rng.standard_normal(g2.shape) + 1j * rng.standard_normal(g2.shape))
h2 = GridFunction(g2, rng.standard_normal(g2.shape))
c = convolve(f2, h2)
direct = np.zeros(g2.shape, dtype=complex)
hh = np.prod(g2.h)
for m0 in range(16):
    for m1 in range(16):
        acc = 0.0
        for j0 in range(16):
            for j1 in range(16):
                acc += f2.values[j0, j1] * h2.values[(m0 - j0 + 8) % 16, (m1 - j1 + 8) % 16]
        direct[m0, m1] = acc * hh
print("convolve vs direct:", np.abs(c.values - direct).max())

# 3. partition + resummation on 64^3 (criterion 1 sizing)
import time as _t
t0 = _t.time()
g3 = Grid(N=(64, 64, 64), L=(4.0, 4.0, 2.0), time_axis=2)
an3 = Anisotropy((1.0, 1.0, 2.0))
part3 = build_partition(an3, None, g3)
exact = np.abs(part3.partial_sum() - 1.0).max()
u3 = GridFunction(g3, rng.standard_normal(g3.shape))
bd = lp_bands(u3, part3)
resid = (bd.resum() - u3).sup_norm() / u3.sup_norm()
print(f"partition 64^3: J={part3.J} exact={exact:.2e} resum={resid:.2e} time={_t.time()-t0:.2f}s")

# 4. Rychkov extension
from anisonorm.calibration import GEN_GRID
gen = build_generator(1, GEN_GRID)
g1 = Grid(N=(8192,), L=(13.0,))
an1 = Anisotropy((1.0,))
fam_m = build_calderon_pair(gen, an1, g1, side="-")
fam_p = build_calderon_pair(gen, an1, g1, side="+")
print("support leakage minus/plus:", fam_m.support_leakage, fam_p.support_leakage)
x1 = g1.axis_points(0)
fvals = np.exp(-0.5 * ((x1 - 1.2) / 0.25) ** 2)
f = HalfspaceFunction(GridFunction(g1, fvals), axis=0, side="+")
J = 6
ef = rychkov_extend(f, fam_m, J)
keep = x1 >= 0
restr_resid = np.abs((ef.values - f.known().values)[keep]).max()
e0 = f.known()
cald_resid = (e0 - calderon_reconstruct(e0, fam_m, J)).sup_norm()
print(f"extension: restriction residual {restr_resid:.3e} vs calderon {cald_resid:.3e}")

# excluded-side independence
pert = np.where(x1 < 0, rng.standard_normal(x1.size), 0.0)
f_pert = HalfspaceFunction(GridFunction(g1, fvals + pert), axis=0, side="+")
diff = (rychkov_extend(f_pert, fam_m, J) - ef).sup_norm()
print("excluded-side dependence:", diff, "(perturbation sup", np.abs(pert).max(), ")")

# 5. k_flat right-inverse
gt = Grid(N=(256, 2048), L=(4.0, 26.0), time_axis=1)
an_t = Anisotropy((1.0, 2.0))
part_t = build_partition(an_t, None, gt)
profile = build_eta(Grid(N=(2048,), L=(26.0,)))
vgrid = gt.drop_axis(1)
vpart = build_partition(Anisotropy((1.0,)), None, vgrid)
vhat = np.zeros(vgrid.shape, dtype=complex)
for j in range(3):
    vhat += vpart.windows[j] * np.exp(2j * np.pi * rng.random(vgrid.shape))
v = GridFunction(vgrid, np.fft.ifftn(vhat * vgrid.size))
v = GridFunction(vgrid, v.values / v.sup_norm())
with warnings.catch_warnings():
    warnings.simplefilter("error")
    kv = k_flat(v, profile, part_t, a_t=2.0, J=3)
r0kv = time_trace_r0(kv)
print("k_flat right-inverse resid:", (r0kv - v).sup_norm())

# 6. q_apply support + right-inverse
uvals = np.exp(-0.5 * ((x1 - 1.0) / 0.07) ** 2)
uu = GridFunction(g1, uvals)
tg = Grid(N=(512,), L=(26.0,))
prof_q = build_eta(tg)
qu = q_apply(uu, fam_p, prof_q, a_t=2.0, J=4)
r0qu = time_trace_r0(qu)
rec = calderon_reconstruct(uu, fam_p, 4)
print("q right-inverse resid:", (r0qu - uu).sup_norm(),
      "vs calderon:", (rec - uu).sup_norm(),
      "cross:", (r0qu - rec).sup_norm())
rep = support_report(uu, qu, 0, delta=2 * g1.h[0])
print("q support:", rep)

# 7. heat fixture
og = Grid(N=(64, 64), L=(4.0, 4.0))
tg2 = Grid(N=(256,), L=(2.0,))
pars = SpaceParams(s=4.0, aniso=Anisotropy((1.0, 1.0, 2.0)),
                   p=(2.0, 2.0, 2.0), q=2.0, kind="F")
print("admissible_l:", admissible_l(pars))
data = make_heat_fixture(og, tg2, pars)
report = compatibility_check(data)
for e in report.entries:
    print(f"l={e.l}: residual_sup={e.residual_sup:.3e} lhs={e.lhs_sup:.3e} rhs={e.rhs_sup:.3e}")
resid = heat_residual(GridFunction(og.with_time_axis(tg2),
                                   np.zeros(og.shape + tg2.shape)),
                      GridFunction(og.with_time_axis(tg2),
                                   np.zeros(og.shape + tg2.shape)))
print("zero heat residual:", resid.sup_norm())
