import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anisonorm import (Anisotropy, SpaceParams, aniso_distance, dilate,
                       rescale_params)
from anisonorm.errors import ValidationError

ANISO_2D = Anisotropy((1.0, 2.0))


def test_dilate_identity():
    x = np.array([0.3, -1.7])
    assert np.allclose(dilate(1.0, ANISO_2D, x), x)


def test_dilate_powers():
    assert np.allclose(dilate(2.0, ANISO_2D, (1.0, 1.0)), (2.0, 4.0))


def test_dilate_zero():
    assert np.allclose(dilate(0.0, ANISO_2D, (3.0, 5.0)), (0.0, 0.0))


def test_dilate_rejects_negative_t():
    with pytest.raises(ValidationError):
        dilate(-0.5, ANISO_2D, (1.0, 1.0))


def test_distance_isotropic_equals_euclidean():
    a = Anisotropy((1.0, 1.0))
    assert aniso_distance((3.0, 4.0), a) == pytest.approx(5.0, rel=1e-10)


def test_distance_closed_form():
    # single nonzero coordinate on the weight-2 axis: 16 / t^4 = 1
    assert aniso_distance((0.0, 4.0), ANISO_2D) == pytest.approx(2.0, rel=1e-10)


def test_distance_closed_form_bisection_oracle():
    # independent bracketing bisection on the defining equation
    x = (1.3, -0.7)

    def func(t):
        return x[0] ** 2 / t ** 2 + x[1] ** 2 / t ** 4 - 1.0

    lo, hi = 1e-8, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if func(mid) >= 0:
            lo = mid
        else:
            hi = mid
    assert aniso_distance(x, ANISO_2D) == pytest.approx(0.5 * (lo + hi),
                                                        rel=1e-9)


def test_distance_origin_is_zero():
    assert aniso_distance((0.0, 0.0), ANISO_2D) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=2, max_size=2),
    st.floats(0.1, 8.0),
)
def test_distance_homogeneity(xs, t):
    x = np.asarray(xs)
    lhs = aniso_distance(dilate(t, ANISO_2D, x), ANISO_2D)
    rhs = t * aniso_distance(x, ANISO_2D)
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_distance_sign_symmetry(xs):
    x = np.asarray(xs)
    base = aniso_distance(x, ANISO_2D)
    for flip in ((-1, 1), (1, -1), (-1, -1)):
        assert aniso_distance(x * flip, ANISO_2D) == pytest.approx(
            base, rel=1e-12, abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-4, 4), min_size=2, max_size=2),
    st.lists(st.floats(1.0, 2.5), min_size=2, max_size=2),
)
def test_distance_componentwise_monotonicity(xs, scale):
    x = np.asarray(xs)
    y = x * np.asarray(scale)  # |y_i| >= |x_i| componentwise
    assert aniso_distance(x, ANISO_2D) <= aniso_distance(y, ANISO_2D) * (1 + 1e-10) + 1e-12


def test_anisotropy_rejects_entries_below_one():
    with pytest.raises(ValidationError):
        Anisotropy((0.5, 2.0))


def test_anisotropy_total():
    assert Anisotropy((1.0, 1.5, 2.0)).total == 4.5


def test_rescale_identity():
    p = SpaceParams(s=1.0, aniso=ANISO_2D, p=(2.0, 2.0), q=2.0, kind="F")
    assert rescale_params(p, 1.0) == p


def test_rescale_componentwise():
    p = SpaceParams(s=1.0, aniso=ANISO_2D, p=(2.0, 2.0), q=2.0, kind="F")
    r = rescale_params(p, 2.0)
    assert r.s == 2.0 and r.aniso.a == (2.0, 4.0)
    assert r.p == p.p and r.q == p.q and r.kind == p.kind


def test_rescale_boundary():
    p = SpaceParams(s=3.0, aniso=Anisotropy((1.0, 1.0, 2.0)),
                    p=(2.0, 2.0, 2.0), q=2.0, kind="F")
    assert rescale_params(p, 1.0).aniso.a == (1.0, 1.0, 2.0)
    with pytest.raises(ValidationError):
        rescale_params(p, 0.5)


def test_space_params_f_scale_requires_finite_p():
    with pytest.raises(ValidationError):
        SpaceParams(s=0.0, aniso=ANISO_2D, p=(2.0, float("inf")), q=2.0,
                    kind="F")


def test_space_params_b_scale_allows_infinite_p():
    p = SpaceParams(s=0.0, aniso=ANISO_2D, p=(2.0, float("inf")), q=2.0,
                    kind="B")
    assert p.p[1] == float("inf")


def test_space_params_rejects_nonpositive_exponents():
    with pytest.raises(ValidationError):
        SpaceParams(s=0.0, aniso=ANISO_2D, p=(0.0, 2.0), q=2.0, kind="F")
    with pytest.raises(ValidationError):
        SpaceParams(s=0.0, aniso=ANISO_2D, p=(2.0, 2.0), q=-1.0, kind="F")


def test_space_params_dimension_mismatch():
    with pytest.raises(ValidationError):
        SpaceParams(s=0.0, aniso=ANISO_2D, p=(2.0,), q=2.0, kind="F")
