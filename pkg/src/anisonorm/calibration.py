"""Deterministic measurements behind the frozen regression brackets.

Each function measures one empirical equivalence constant on seeded
fixtures.  `selftest --freeze` writes the results into the bracket store;
plain selftest and the verification suite re-measure and compare within
the +-20% band, including under 2x grid refinement and fixture
translation where the contract asks for it.
"""
from __future__ import annotations

import numpy as np

from .anisotropy import Anisotropy, SpaceParams, rescale_params
from .decomposition import (build_partition, b_norm, f_norm, lp_bands)
from .extension import HalfspaceFunction, rychkov_extend
from .grid import Grid, GridFunction, mixed_lp_norm, shift, spectral_derivative
from .kernels import build_calderon_pair, build_generator, local_means_kernels, \
    localized_norm
from .traces import build_eta, k_flat, time_trace_r0

__all__ = ["MEASUREMENTS", "measure_all", "GEN_GRID", "make_band_fixture"]

GEN_GRID = Grid(N=(16384,), L=(13.0,))


def make_band_fixture(grid: Grid, aniso: Anisotropy, corona_weights,
                      seed: int, part=None) -> GridFunction:
    """Smooth random function with prescribed corona weights (deterministic)."""
    if part is None:
        part = build_partition(aniso, None, grid)
    rng = np.random.default_rng(seed)
    uhat = np.zeros(grid.shape, dtype=complex)
    for j, w in enumerate(corona_weights):
        if j > part.J:
            break
        uhat += w * part.windows[j] * np.exp(2j * np.pi * rng.random(grid.shape))
    vals = np.fft.ifftn(uhat * grid.size)
    peak = np.abs(vals).max()
    return GridFunction(grid, vals / peak if peak > 0 else vals)


def _gaussian(grid: Grid, centers, widths) -> GridFunction:
    mesh = np.meshgrid(*[grid.axis_points(i) for i in range(grid.d)],
                       indexing="ij")
    r2 = sum(((m - c) / w) ** 2 for m, c, w in zip(mesh, centers, widths))
    return GridFunction(grid, np.exp(-0.5 * r2))


def measure_fnorm_l2_equivalence(refine: int = 1) -> float:
    """Max two-sided deviation of the s=0, p=q=2 quasi-norm from plain L2."""
    grid = Grid(N=(32 * refine, 32 * refine), L=(4.0, 4.0))
    aniso = Anisotropy((1.0, 1.0))
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=0.0, aniso=aniso, p=(2.0, 2.0), q=2.0, kind="F")
    worst = 1.0
    for seed in range(4):
        u = make_band_fixture(grid, aniso, [2.0 ** (-0.5 * j) for j in range(6)],
                              seed=seed, part=part)
        ratio = f_norm(u, params, part) / mixed_lp_norm(u, (2.0, 2.0))
        worst = max(worst, ratio, 1.0 / ratio)
    return worst


def measure_rescale_equivalence(refine: int = 1) -> float:
    """Two-sided factor between the quasi-norm and its lambda-rescaled form."""
    grid = Grid(N=(32 * refine, 64 * refine), L=(4.0, 4.0))
    aniso = Anisotropy((1.0, 2.0))
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=0.8, aniso=aniso, p=(2.0, 2.0), q=2.0, kind="F")
    lam = 1.5
    params2 = rescale_params(params, lam)
    part2 = build_partition(params2.aniso, None, grid)
    worst = 1.0
    for seed in range(4):
        u = make_band_fixture(grid, aniso, [2.0 ** (-1.2 * j) for j in range(6)],
                              seed=10 + seed, part=part)
        ratio = f_norm(u, params2, part2) / f_norm(u, params, part)
        worst = max(worst, ratio, 1.0 / ratio)
    return worst


def measure_lifting_constant(refine: int = 1) -> float:
    """C in ||D^alpha u||_{s - alpha.a} <= C ||u||_s."""
    grid = Grid(N=(32 * refine, 64 * refine), L=(4.0, 4.0))
    aniso = Anisotropy((1.0, 2.0))
    part = build_partition(aniso, None, grid)
    alpha = (1, 0)
    drop = float(np.dot(alpha, aniso.array))
    params = SpaceParams(s=1.5, aniso=aniso, p=(2.0, 2.0), q=2.0, kind="F")
    shifted = SpaceParams(s=1.5 - drop, aniso=aniso, p=(2.0, 2.0), q=2.0,
                          kind="F")
    worst = 0.0
    for seed in range(4):
        u = make_band_fixture(grid, aniso, [2.0 ** (-1.5 * j) for j in range(6)],
                              seed=20 + seed, part=part)
        worst = max(worst, f_norm(spectral_derivative(u, alpha), shifted, part)
                    / f_norm(u, params, part))
    return worst


def measure_localized_norm_ratio(refine: int = 1) -> float:
    """Max two-sided ratio between the local-means norm and the window norm."""
    grid = Grid(N=(512 * refine,), L=(8.0,))
    aniso = Anisotropy((1.0,))
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=0.7, aniso=aniso, p=(2.0,), q=2.0, kind="F")
    k0 = _gaussian(grid, (0.0,), (0.35,))
    kernels = local_means_kernels(k0, N=1)
    worst = 1.0
    for seed in range(3):
        u = make_band_fixture(grid, aniso, [2.0 ** (-1.5 * j) for j in range(5)],
                              seed=30 + seed, part=part)
        ratio = localized_norm(u, kernels, params, N=1, J=part.J) \
            / f_norm(u, params, part)
        worst = max(worst, ratio, 1.0 / ratio)
    return worst


def _trace_setup(refine: int):
    nx, nt = 64 * refine, 128 * refine
    grid = Grid(N=(nx, nt), L=(4.0, 4.0), time_axis=1)
    aniso = Anisotropy((1.0, 2.0))
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=2.0, aniso=aniso, p=(2.0, 2.0), q=2.0, kind="F")
    tr_params = SpaceParams(s=2.0 - 2.0 / 2.0, aniso=Anisotropy((1.0,)),
                            p=(2.0,), q=2.0, kind="B")
    tr_part = build_partition(tr_params.aniso, None, grid.drop_axis(1))
    return grid, aniso, part, params, tr_params, tr_part


def measure_trace_r0_constant(refine: int = 1, translate: float = 0.0) -> float:
    """C in ||r0 f||_{B, s - a_t/p_t} <= C ||f||_{F, s} on band-limited data."""
    grid, aniso, part, params, tr_params, tr_part = _trace_setup(refine)
    worst = 0.0
    for seed in range(3):
        f = make_band_fixture(grid, aniso, [2.0 ** (-2.2 * j) for j in range(4)],
                              seed=40 + seed, part=part)
        if translate:
            f = shift(f, (translate, 0.0))
        worst = max(worst, b_norm(time_trace_r0(f), tr_params, tr_part)
                    / f_norm(f, params, part))
    return worst


def measure_k_flat_constant(refine: int = 1) -> float:
    """C in ||K v||_{F, s} <= C ||v||_{B, s - a_t/p_t}."""
    grid, aniso, part, params, tr_params, tr_part = _trace_setup(refine)
    profile = build_eta(Grid(N=(512 * refine,), L=(32.0,)))
    # modulated output shares the spatial axis; time axis comes from `grid`
    worst = 0.0
    for seed in range(3):
        v = make_band_fixture(grid.drop_axis(1), Anisotropy((1.0,)),
                              [2.0 ** (-2.2 * j) for j in range(3)],
                              seed=50 + seed, part=tr_part)
        kv = k_flat(v, profile, part, a_t=2.0, J=min(part.J, 3))
        worst = max(worst, f_norm(kv, params, part)
                    / b_norm(v, tr_params, tr_part))
    return worst


def measure_extension_constant(refine: int = 1, translate: float = 0.0) -> float:
    """C in ||E f||_F <= C ||e+ f||_F over half-space bumps."""
    grid = Grid(N=(4096 * refine,), L=(13.0,))
    aniso = Anisotropy((1.0,))
    gen = build_generator(1, GEN_GRID)
    fam = build_calderon_pair(gen, aniso, grid, side="-")
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=0.6, aniso=aniso, p=(2.0,), q=2.0, kind="F")
    x = grid.axis_points(0)
    worst = 0.0
    for c, wdt in ((1.0, 0.12), (2.0, 0.3), (1.5, 0.2)):
        vals = np.exp(-0.5 * ((x - c - translate) / wdt) ** 2)
        f = HalfspaceFunction(GridFunction(grid, vals), axis=0, side="+")
        ef = rychkov_extend(f, fam, J=6)
        worst = max(worst, f_norm(ef, params, part)
                    / f_norm(f.known(), params, part))
    return worst


def measure_multiplier_ratio(refine: int = 1) -> float:
    """Max ||m v||_F / ||v||_F for a fixed smooth bump multiplier."""
    grid = Grid(N=(64 * refine, 64 * refine), L=(4.0, 4.0))
    aniso = Anisotropy((1.0, 1.0))
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=0.8, aniso=aniso, p=(2.0, 2.0), q=2.0, kind="F")
    m = _gaussian(grid, (0.3, -0.4), (1.2, 1.5))
    worst = 0.0
    for seed in range(4):
        v = make_band_fixture(grid, aniso, [2.0 ** (-1.5 * j) for j in range(5)],
                              seed=60 + seed, part=part)
        worst = max(worst, f_norm(m * v, params, part) / f_norm(v, params, part))
    return worst


def measure_diffeo_shear_ratio(refine: int = 1) -> float:
    from .diffeo import StructuredDiffeo, identity_map, shear_map, \
        invariance_report
    grid = Grid(N=(48 * refine, 48 * refine, 32 * refine), L=(4.0, 4.0, 4.0),
                time_axis=2)
    aniso = Anisotropy((1.0, 1.0, 2.0))
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=0.5, aniso=aniso, p=(2.0, 2.0, 2.0), q=2.0, kind="F")
    f = _gaussian(grid, (0.2, -0.3, 0.0), (0.7, 0.8, 0.7))
    sigma = StructuredDiffeo(blocks=(
        shear_map((0, 1), strength=0.4, center=0.0, width=1.0),
        identity_map((2,)),
    ))
    return invariance_report(f, sigma, params, part)


def measure_diffeo_rotation_ratio(refine: int = 1) -> float:
    from .diffeo import StructuredDiffeo, rotation_map, invariance_report
    grid = Grid(N=(64 * refine, 64 * refine), L=(4.0, 4.0))
    aniso = Anisotropy((1.0, 1.0))
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=0.5, aniso=aniso, p=(2.0, 2.0), q=2.0, kind="F")
    f = _gaussian(grid, (0.4, -0.2), (0.6, 0.9))
    sigma = StructuredDiffeo(blocks=(rotation_map((0, 1), angle=0.7),))
    return invariance_report(f, sigma, params, part)


def measure_qprop_ratio(refine: int = 1) -> float:
    from .traces import q_prop_bound_check
    grid = Grid(N=(64 * refine,), L=(4.0,))
    tgrid = Grid(N=(128 * refine,), L=(8.0,))
    x = grid.axis_points(0)
    t = tgrid.axis_points(0)
    f1d = GridFunction(tgrid, np.exp(-0.5 * (t / 0.8) ** 2))
    v_seq = [GridFunction(grid, np.exp(-0.5 * ((x - 0.2 * j) / 0.5) ** 2)
                          * 2.0 ** (-j)) for j in range(4)]
    rep = q_prop_bound_check(v_seq, f1d, r=2.0, a=2.0, p=(2.0, 2.0), q=2.0)
    return rep.ratio


MEASUREMENTS = {
    "fnorm_l2_equivalence": measure_fnorm_l2_equivalence,
    "rescale_equivalence": measure_rescale_equivalence,
    "lifting_constant": measure_lifting_constant,
    "localized_norm_ratio": measure_localized_norm_ratio,
    "trace_r0_constant": measure_trace_r0_constant,
    "k_flat_constant": measure_k_flat_constant,
    "extension_constant": measure_extension_constant,
    "multiplier_ratio": measure_multiplier_ratio,
    "diffeo_shear_ratio": measure_diffeo_shear_ratio,
    "diffeo_rotation_ratio": measure_diffeo_rotation_ratio,
    "qprop_ratio": measure_qprop_ratio,
}


def measure_all(refine: int = 1) -> dict:
    return {name: fn(refine) for name, fn in sorted(MEASUREMENTS.items())}
