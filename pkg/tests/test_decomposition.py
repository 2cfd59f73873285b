import numpy as np
import pytest

from anisonorm import (Anisotropy, Grid, GridFunction, SpaceParams, b_norm,
                       build_partition, f_norm, lp_bands, mixed_lp_norm,
                       peetre_maximal, pointwise_multiply_report,
                       spectral_derivative, validate_trace_conditions)
from anisonorm.anisotropy import rescale_params
from anisonorm.decomposition import default_level
from anisonorm.errors import (CylinderFormError, GridMismatchError,
                              KindMismatchError, ValidationError)

from conftest import gaussian, random_band_function

GRID = Grid(N=(32, 32), L=(4.0, 4.0))
ANISO = Anisotropy((1.0, 2.0))


@pytest.fixture(scope="module")
def part():
    return build_partition(ANISO, None, GRID)


def test_partition_origin_window(part):
    # at xi = 0 the base window is 1 and all others vanish
    assert part.windows[0][0, 0] == pytest.approx(1.0, abs=1e-15)
    for w in part.windows[1:]:
        assert w[0, 0] == pytest.approx(0.0, abs=1e-15)


def test_partition_of_unity(part):
    assert np.abs(part.partial_sum() - 1.0).max() <= 1e-14


def test_partition_supports(part):
    rho = part.rho
    for j, w in enumerate(part.windows):
        outside = (rho > 1.5) if j == 0 else \
            (rho < 2.0 ** (j - 1)) | (rho > 3.0 * 2.0 ** (j - 1))
        if outside.any():
            assert np.abs(w[outside]).max() <= 1e-15


def test_partition_dilation_property(part):
    # window j equals window 1 evaluated at the 2^{(1-j)a}-dilated argument,
    # i.e. the ramp difference at (2^{-j} rho, 2^{1-j} rho)
    from anisonorm.decomposition import quintic_ramp
    rho = part.rho
    for j in range(1, part.J + 1):
        expected = quintic_ramp(2.0 ** -j * rho) - quintic_ramp(
            2.0 ** (1 - j) * rho)
        assert np.abs(part.windows[j] - expected).max() <= 1e-13


def test_default_level_covers_lattice():
    J = default_level(GRID, ANISO)
    part = build_partition(ANISO, J, GRID)
    assert np.abs(part.partial_sum() - 1.0).max() <= 1e-14


def _core_band_function(grid, part, seed):
    """Spectrum strictly inside {|xi|_a <= 1}, where the base window is 1."""
    rng = np.random.default_rng(seed)
    uhat = np.where(part.rho <= 1.0,
                    np.exp(2j * np.pi * rng.random(grid.shape)), 0.0)
    vals = np.fft.ifftn(uhat * grid.size)
    return GridFunction(grid, vals / np.abs(vals).max())


def test_lp_bands_low_band_identity(part):
    u = _core_band_function(GRID, part, seed=0)
    bd = lp_bands(u, part)
    assert (bd.bands[0] - u).sup_norm() <= 1e-12 * u.sup_norm()
    for b in bd.bands[1:]:
        assert b.sup_norm() <= 1e-12 * u.sup_norm()


def test_lp_bands_pure_exponential_corona_overlap(part):
    # a pure mode with |xi|_a = 2^j lands only in bands j and j+1
    rho = part.rho
    target = np.unravel_index(np.argmin(np.abs(rho - 4.0)), rho.shape)
    j0 = 2
    grid = GRID
    xi = [grid.axis_freqs(i)[target[i]] for i in range(2)]
    mesh = np.meshgrid(*[grid.axis_points(i) for i in range(2)], indexing="ij")
    u = GridFunction(grid, np.exp(1j * (xi[0] * mesh[0] + xi[1] * mesh[1])))
    bd = lp_bands(u, part)
    for j, b in enumerate(bd.bands):
        if abs(rho[target] - 4.0) < 1e-9 and j not in (j0, j0 + 1):
            assert b.sup_norm() <= 1e-12


def test_lp_bands_resummation(part):
    u = random_band_function(GRID, part, coronas=range(part.J + 1), seed=1)
    assert (lp_bands(u, part).resum() - u).sup_norm() <= 1e-10 * u.sup_norm()


def test_lp_bands_grid_mismatch(part):
    other = Grid(N=(16, 16), L=(4.0, 4.0))
    with pytest.raises(GridMismatchError):
        lp_bands(GridFunction(other, np.zeros(other.shape)), part)


def test_f_norm_zero(part):
    params = SpaceParams(s=1.0, aniso=ANISO, p=(2.0, 2.0), q=2.0, kind="F")
    z = GridFunction(GRID, np.zeros(GRID.shape))
    assert f_norm(z, params, part) == 0.0


def test_f_norm_single_band_equals_mixed_norm(part):
    params = SpaceParams(s=0.7, aniso=ANISO, p=(2.0, 3.0), q=2.0, kind="F")
    u = _core_band_function(GRID, part, seed=2)
    assert f_norm(u, params, part) == pytest.approx(
        mixed_lp_norm(u, params.p), rel=1e-10)


def test_f_norm_kind_mismatch(part):
    params = SpaceParams(s=0.0, aniso=ANISO, p=(2.0, 2.0), q=2.0, kind="B")
    u = random_band_function(GRID, part, coronas=(0,), seed=3)
    with pytest.raises(KindMismatchError):
        f_norm(u, params, part)
    with pytest.raises(KindMismatchError):
        b_norm(u, SpaceParams(s=0.0, aniso=ANISO, p=(2.0, 2.0), q=2.0,
                              kind="F"), part)


def test_b_norm_single_band_matches_f_norm(part):
    # one nonzero band collapses both scales to the same quantity, even for
    # p != q where they differ in general
    fp = SpaceParams(s=0.4, aniso=ANISO, p=(2.0, 3.0), q=1.5, kind="F")
    bp = SpaceParams(s=0.4, aniso=ANISO, p=(2.0, 3.0), q=1.5, kind="B")
    u = _core_band_function(GRID, part, seed=4)
    assert b_norm(u, bp, part) == pytest.approx(f_norm(u, fp, part), rel=1e-9)


def test_b_norm_sup_exponent(part):
    bp = SpaceParams(s=0.3, aniso=ANISO, p=(2.0, 2.0), q=float("inf"),
                     kind="B")
    u = random_band_function(GRID, part, coronas=(0, 1, 2), seed=5)
    bands = lp_bands(u, part).bands
    expected = max(2.0 ** (0.3 * j) * mixed_lp_norm(b, bp.p)
                   for j, b in enumerate(bands))
    assert b_norm(u, bp, part) == pytest.approx(expected, rel=1e-12)


def test_b_norm_monotone_in_s(part):
    u = random_band_function(GRID, part, coronas=(0, 1, 2), seed=6)
    lo = SpaceParams(s=0.2, aniso=ANISO, p=(2.0, 2.0), q=2.0, kind="B")
    hi = SpaceParams(s=1.1, aniso=ANISO, p=(2.0, 2.0), q=2.0, kind="B")
    assert b_norm(u, hi, part) >= b_norm(u, lo, part)


def test_quasinorm_subadditivity(part):
    params = SpaceParams(s=0.5, aniso=ANISO, p=(0.7, 2.0), q=0.9, kind="F")
    d = params.subadditivity_exponent
    for seed in range(3):
        u = random_band_function(GRID, part, coronas=(0, 1, 2), seed=seed)
        v = random_band_function(GRID, part, coronas=(1, 2, 3),
                                 seed=seed + 100)
        lhs = f_norm(u + v, params, part) ** d
        rhs = f_norm(u, params, part) ** d + f_norm(v, params, part) ** d
        assert lhs <= rhs * (1 + 1e-10)


def test_lambda_rescaling_two_sided(part):
    params = SpaceParams(s=0.8, aniso=ANISO, p=(2.0, 2.0), q=2.0, kind="F")
    lam = 1.5
    params2 = rescale_params(params, lam)
    part2 = build_partition(params2.aniso, None, GRID)
    ratios = []
    for seed in range(3):
        u = random_band_function(GRID, part, coronas=(0, 1, 2), seed=seed + 7)
        ratios.append(f_norm(u, params2, part2) / f_norm(u, params, part))
    # equivalence: ratios bounded and stable across fixtures
    assert max(ratios) / min(ratios) < 4.0


def test_lifting_property(part):
    params = SpaceParams(s=1.5, aniso=ANISO, p=(2.0, 2.0), q=2.0, kind="F")
    alpha = (1, 0)
    drop = float(np.dot(alpha, ANISO.array))
    shifted = SpaceParams(s=1.5 - drop, aniso=ANISO, p=(2.0, 2.0), q=2.0,
                          kind="F")
    ratios = []
    for seed in range(3):
        u = random_band_function(GRID, part, coronas=(0, 1, 2, 3),
                                 seed=seed + 20)
        ratios.append(f_norm(spectral_derivative(u, alpha), shifted, part)
                      / f_norm(u, params, part))
    assert max(ratios) < 10.0  # bounded lifting constant


def test_peetre_maximal_delta_profile():
    grid = Grid(N=(64,), L=(4.0,))
    aniso = Anisotropy((1.0,))
    vals = np.zeros(64)
    vals[32] = 1.0  # delta at the origin
    out = peetre_maximal(GridFunction(grid, vals), aniso, r=(2.0,), j=1)
    x = grid.axis_points(0)
    dist = np.minimum(np.abs(x), 8.0 - np.abs(x))
    expected = (1.0 + 2.0 * dist) ** -2.0
    assert np.abs(out.values.real - expected).max() <= 1e-12


def test_peetre_maximal_dominates_and_r_monotone():
    grid = Grid(N=(32,), L=(2.0,))
    aniso = Anisotropy((1.0,))
    rng = np.random.default_rng(8)
    u = GridFunction(grid, rng.standard_normal(32))
    m1 = peetre_maximal(u, aniso, r=(1.0,), j=0)
    m2 = peetre_maximal(u, aniso, r=(2.0,), j=0)
    assert np.all(m1.values.real >= np.abs(u.values) - 1e-13)
    assert np.all(m2.values.real <= m1.values.real + 1e-13)


def test_peetre_maximal_size_guard():
    grid = Grid(N=(256, 256), L=(1.0, 1.0))
    with pytest.raises(ValidationError):
        peetre_maximal(GridFunction(grid, np.zeros(grid.shape)),
                       Anisotropy((1.0, 1.0)), r=(1.0, 1.0), j=0)


def test_multiplier_report_constant(part):
    params = SpaceParams(s=0.5, aniso=ANISO, p=(2.0, 2.0), q=2.0, kind="F")
    v = random_band_function(GRID, part, coronas=(0, 1, 2), seed=9)
    ones = GridFunction(GRID, np.ones(GRID.shape))
    rep = pointwise_multiply_report(ones, v, params, part)
    assert rep.ratio == pytest.approx(1.0, rel=1e-10)
    rep_c = pointwise_multiply_report(3.0 * ones, v, params, part)
    assert rep_c.ratio == pytest.approx(3.0, rel=1e-10)


def test_multiplier_report_bump(part):
    params = SpaceParams(s=0.5, aniso=ANISO, p=(2.0, 2.0), q=2.0, kind="F")
    m = gaussian(GRID, (0.3, -0.4), (1.2, 1.5))
    ratios = [pointwise_multiply_report(
        m, random_band_function(GRID, part, coronas=(0, 1, 2), seed=s),
        params, part).ratio for s in range(3)]
    assert max(ratios) < 2.0  # bounded by the multiplier norm proxy scale


def test_validate_trace_conditions_r0_example():
    p = SpaceParams(s=2.0, aniso=Anisotropy((1.0, 1.0, 2.0)),
                    p=(2.0, 2.0, 2.0), q=2.0, kind="F")
    out = validate_trace_conditions(p, "r0")
    assert out["threshold"] == pytest.approx(1.0)
    assert out["ok"] is True
    p_low = SpaceParams(s=0.9, aniso=Anisotropy((1.0, 1.0, 2.0)),
                        p=(2.0, 2.0, 2.0), q=2.0, kind="F")
    assert validate_trace_conditions(p_low, "r0")["ok"] is False


def test_validate_trace_conditions_gamma_example():
    p = SpaceParams(s=2.0, aniso=Anisotropy((1.0, 1.0, 2.0)),
                    p=(1.0, 1.0, 1.0), q=1.0, kind="F")
    out = validate_trace_conditions(p, "gamma")
    assert out["threshold"] == pytest.approx(1.0)  # a0 / p0, corrections vanish


def test_validate_trace_conditions_small_p_correction():
    # p0 = 1/2 < 1 raises the r0 threshold by n (a0/min(1,p0) - a0)
    aniso = Anisotropy((1.0, 1.0, 2.0))
    p_small = SpaceParams(s=5.0, aniso=aniso, p=(0.5, 0.5, 2.0), q=2.0,
                          kind="F")
    p_one = SpaceParams(s=5.0, aniso=aniso, p=(1.0, 1.0, 2.0), q=2.0, kind="F")
    t_small = validate_trace_conditions(p_small, "r0")["threshold"]
    t_one = validate_trace_conditions(p_one, "r0")["threshold"]
    n, a0 = 2, 1.0
    assert t_small - t_one == pytest.approx(n * (a0 / 0.5 - a0))


def test_validate_trace_conditions_corner_thresholds():
    p = SpaceParams(s=4.0, aniso=Anisotropy((1.0, 1.0, 2.0)),
                    p=(2.0, 2.0, 2.0), q=2.0, kind="F")
    assert validate_trace_conditions(p, "corner_curved")["threshold"] == \
        pytest.approx(1.0)
    assert validate_trace_conditions(p, "corner_flat")["threshold"] == \
        pytest.approx(0.5)


def test_validate_trace_conditions_rejects_non_cylinder():
    p = SpaceParams(s=2.0, aniso=Anisotropy((1.0, 1.5, 2.0)),
                    p=(2.0, 2.0, 2.0), q=2.0, kind="F")
    with pytest.raises(CylinderFormError):
        validate_trace_conditions(p, "r0")
    with pytest.raises(ValidationError):
        validate_trace_conditions(
            SpaceParams(s=2.0, aniso=Anisotropy((1.0, 1.0, 2.0)),
                        p=(2.0, 2.0, 2.0), q=2.0, kind="F"), "bogus")
