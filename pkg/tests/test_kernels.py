import numpy as np
import pytest

from anisonorm import (Anisotropy, Grid, GridFunction, SpaceParams,
                       build_calderon_pair, build_generator,
                       build_partition, calderon_reconstruct, f_norm,
                       local_means_kernels, localized_norm,
                       verify_telescoping)
from anisonorm.errors import (ConditionNumberError, SupportSpilloverError,
                              UndersampledKernelError, ValidationError)
from anisonorm.kernels import load_family, reconstruction_symbol, save_family

from conftest import GEN_GRID, LINE, LINE_ANISO, gaussian, random_band_function


def test_generator_order1_dipole(gen_order1):
    # unit mass, first moment zero (quadrature oracle is recorded on build)
    assert gen_order1.mass == pytest.approx(1.0, abs=1e-12)
    assert max(gen_order1.residual_moments) <= 1e-10 * gen_order1.l1_mass
    # order-1 profile has one sign change: a dipole-corrected pair of bumps
    signs = np.sign(gen_order1.coeffs)
    assert set(signs) == {1.0, -1.0}


def test_generator_mass_always_one(gen_order2):
    assert gen_order2.mass == pytest.approx(1.0, abs=1e-12)


def test_generator_next_moment_recorded(gen_order1):
    # moments beyond l_max are not required to vanish, only recorded
    assert gen_order1.next_moment > 1e-3 * gen_order1.l1_mass


def test_generator_support(gen_order1):
    assert gen_order1.edge_leakage <= 1e-14


def test_generator_resolution_guards():
    with pytest.raises(ValidationError):
        build_generator(1, Grid(N=(64,), L=(13.0,)))  # too coarse
    with pytest.raises(ValidationError):
        build_generator(0, GEN_GRID)


def test_generator_condition_guard():
    # the moment system on [1,2] becomes numerically singular near order 10
    with pytest.raises(ConditionNumberError) as exc:
        build_generator(12, GEN_GRID)
    assert exc.value.condition > 1e12


def test_generator_l1_mass_growth(gen_order1, gen_order2):
    # vanishing moments about the origin on [1,2] are exponentially
    # expensive: the l1 mass must exceed the degree-l Chebyshev bound
    assert gen_order1.l1_mass >= 3.0
    assert gen_order2.l1_mass >= 17.0
    assert gen_order2.l1_mass > 4 * gen_order1.l1_mass


def test_family_support_sides(fam_minus, fam_plus):
    assert fam_minus.support_leakage <= 1e-13
    assert fam_plus.support_leakage <= 1e-13
    x = LINE.axis_points(0)
    # plus family lives at positive coordinates, minus mirrored
    peak_plus = np.abs(fam_plus.phi0.values)
    assert x[np.argmax(peak_plus)] > 0
    peak_minus = np.abs(fam_minus.phi0.values)
    assert x[np.argmax(peak_minus)] < 0


def test_family_spill_guard(gen_order1):
    with pytest.raises(SupportSpilloverError):
        build_calderon_pair(gen_order1, LINE_ANISO, Grid(N=(1024,), L=(8.0,)))


def test_phi_hat_vanishes_at_zero(fam_minus):
    assert abs(fam_minus.phi_hat_level(1).ravel()[0]) <= 1e-13
    # zeroth moment of the dilation difference vanishes identically
    h = np.prod(fam_minus.grid.h)
    assert abs(fam_minus.phi.values.sum() * h) <= 1e-10


def test_psi0_hat_at_zero_is_one(fam_minus):
    # base-dual transform at 0: 1 * (2 - 1) = 1
    assert fam_minus.psi_hat_level(0).ravel()[0] == pytest.approx(1.0,
                                                                  abs=1e-12)


def test_dual_pair_algebraic_identity(fam_minus):
    # psi_hat_j phi_hat_j == 2(A_j^2 - A_{j-1}^2) - (A_j^4 - A_{j-1}^4)
    for j in (1, 3):
        aj = fam_minus.base_hat(j)
        am = fam_minus.base_hat(j - 1)
        expected = 2.0 * (aj ** 2 - am ** 2) - (aj ** 4 - am ** 4)
        got = fam_minus.psi_hat_level(j) * fam_minus.phi_hat_level(j)
        assert np.abs(got - expected).max() <= 1e-12 * max(
            1.0, np.abs(expected).max())


def test_dual_pair_matches_physical_kernels(fam_minus):
    # the stored physical kernels transform back onto the algebraic symbols
    from anisonorm import dft
    a0 = fam_minus.base_hat(0)
    scale = np.abs(a0).max()
    assert np.abs(dft(fam_minus.phi0).coeffs - a0).max() <= 1e-10 * scale
    psi0 = a0 * (2.0 - a0 * a0)
    assert np.abs(dft(fam_minus.psi0).coeffs - psi0).max() <= 1e-10 * max(
        1.0, np.abs(psi0).max())


def test_telescoping_single_term(fam_minus):
    assert verify_telescoping(fam_minus, 1) <= 1e-12


def test_telescoping_all_levels(fam_minus, fam_plus):
    for fam in (fam_minus, fam_plus):
        for N in range(1, 10):
            assert verify_telescoping(fam, N) <= 1e-11


def test_telescoping_at_origin(fam_minus):
    # partial sums equal 1 at xi = 0 for every N >= 1
    for N in (1, 3, 6):
        acc = sum(fam_minus.psi_hat_level(j).ravel()[0]
                  * fam_minus.phi_hat_level(j).ravel()[0] for j in range(N))
        assert acc == pytest.approx(1.0, abs=1e-12)


def test_reconstruction_zero(fam_plus):
    z = GridFunction(LINE, np.zeros(LINE.shape))
    assert calderon_reconstruct(z, fam_plus, 3).sup_norm() == 0.0


def test_reconstruction_decay(fam_plus, line_partition):
    u = random_band_function(LINE, line_partition, coronas=range(6), seed=0,
                             weights=[2.0 ** (-3 * j) for j in range(6)])
    res = [(u - calderon_reconstruct(u, fam_plus, J)).sup_norm()
           for J in range(6)]
    for lo, hi in zip(res[1:], res[:-1]):
        assert lo <= 0.5 * hi
    assert res[-1] < res[0] * 1e-3


def test_reconstruction_spectral_cross_check(fam_plus, line_partition):
    u = random_band_function(LINE, line_partition, coronas=range(4), seed=1)
    J = 4
    rec = calderon_reconstruct(u, fam_plus, J)
    sym = reconstruction_symbol(fam_plus, J)
    spectral = np.fft.ifftn((1.0 - sym) * np.fft.fftn(u.values))
    assert np.abs((u.values - rec.values) - spectral).max() <= 1e-12 * max(
        1.0, np.abs(spectral).max())


def test_reconstruction_undersampling_guard(fam_plus):
    with pytest.raises(UndersampledKernelError):
        calderon_reconstruct(GridFunction(LINE, np.zeros(LINE.shape)),
                             fam_plus, 14)


def test_local_means_symbol():
    grid = Grid(N=(256,), L=(8.0,))
    k0 = gaussian(grid, (0.0,), (0.4,))
    _, k = local_means_kernels(k0, N=2)
    from anisonorm import dft
    xi = grid.axis_freqs(0)
    expected = (-xi ** 2) ** 2 * dft(k0).coeffs
    assert np.abs(dft(k).coeffs - expected).max() <= 1e-12 * np.abs(
        expected).max()
    # the mean is annihilated for every order >= 1
    assert abs(dft(k).coeffs[0]) <= 1e-12


def test_local_means_rejects_bad_input():
    grid = Grid(N=(64,), L=(4.0,))
    k0 = gaussian(grid, (0.0,), (0.3,))
    with pytest.raises(ValidationError):
        local_means_kernels(k0, N=0)
    odd = GridFunction(grid, grid.axis_points(0) * k0.values)  # zero mass
    with pytest.raises(ValidationError):
        local_means_kernels(odd, N=1)


def test_localized_norm_homogeneity_and_zero():
    grid = Grid(N=(256,), L=(8.0,))
    aniso = Anisotropy((1.0,))
    part = build_partition(aniso, None, grid)
    params = SpaceParams(s=0.7, aniso=aniso, p=(2.0,), q=2.0, kind="F")
    kernels = local_means_kernels(gaussian(grid, (0.0,), (0.35,)), N=1)
    z = GridFunction(grid, np.zeros(grid.shape))
    assert localized_norm(z, kernels, params, N=1, J=part.J) == 0.0
    f = random_band_function(grid, part, coronas=(0, 1, 2), seed=2)
    n1 = localized_norm(f, kernels, params, N=1, J=part.J)
    n3 = localized_norm(3.0 * f, kernels, params, N=1, J=part.J)
    assert n3 == pytest.approx(3.0 * n1, rel=1e-12)


def test_localized_norm_smoothness_guard():
    grid = Grid(N=(64,), L=(4.0,))
    aniso = Anisotropy((1.0,))
    params = SpaceParams(s=2.5, aniso=aniso, p=(2.0,), q=2.0, kind="F")
    kernels = local_means_kernels(gaussian(grid, (0.0,), (0.3,)), N=1)
    with pytest.raises(ValidationError):
        localized_norm(GridFunction(grid, np.zeros(64)), kernels, params, N=1)


def test_localized_norm_equivalence_bracket(line_partition):
    # two-sided comparability with the window-based quasi-norm
    aniso = Anisotropy((1.0,))
    params = SpaceParams(s=0.7, aniso=aniso, p=(2.0,), q=2.0, kind="F")
    grid = Grid(N=(512,), L=(8.0,))
    part = build_partition(aniso, None, grid)
    kernels = local_means_kernels(gaussian(grid, (0.0,), (0.35,)), N=1)
    ratios = []
    for seed in range(3):
        f = random_band_function(grid, part, coronas=(0, 1, 2, 3), seed=seed,
                                 weights=[2.0 ** (-1.5 * j) for j in range(4)])
        ratios.append(localized_norm(f, kernels, params, N=1, J=part.J)
                      / f_norm(f, params, part))
    assert max(ratios) / min(ratios) < 3.0


def test_family_serialization_roundtrip(tmp_path, fam_plus):
    prefix = tmp_path / "fam"
    save_family(fam_plus, prefix)
    loaded = load_family(prefix)
    assert loaded.support_side == fam_plus.support_side
    assert loaded.l_max == fam_plus.l_max
    assert loaded.grid == fam_plus.grid
    assert (loaded.phi0 - fam_plus.phi0).sup_norm() == 0.0
    assert (loaded.psi - fam_plus.psi).sup_norm() == 0.0
    # spectral levels reproduce exactly (generator is rebuilt from metadata)
    a3 = fam_plus.base_hat(3)
    assert np.abs(loaded.base_hat(3) - a3).max() <= 1e-13 * np.abs(a3).max()
