"""Corner traces in the half-space cylinder model and the heat-equation
data-compatibility checker.

The model: the spatial domain is the half-space {x_n > 0} inside the box,
its boundary the hyperplane {x_n = 0}, the cylinder adds a trailing time
axis.  Both corner traces are then plain slices (single chart, unit
partition of unity), and the order-l compatibility identity compares the
l-th time derivative of the lateral datum at the corner with Laplacians
of the initial datum plus source traces:

    (d/dt)^l phi |_{t=0, x_n=0}
        =  [ Delta^l u0 + sum_{j<l} Delta^j (d/dt)^{l-1-j} g |_{t=0} ] |_{x_n=0}
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .anisotropy import SpaceParams
from .errors import CylinderFormError, GridMismatchError, ValidationError
from .grid import Grid, GridFunction, apply_symbol, laplacian
from .traces import hyperplane_trace, time_trace_r0

__all__ = [
    "HeatData",
    "CompatibilityEntry",
    "CompatibilityReport",
    "admissible_l",
    "corner_trace_curved",
    "corner_trace_flat",
    "compatibility_check",
    "heat_residual",
    "make_heat_fixture",
]

DERIVATIVE_ORDER_CAP = 3  # spectral d/dt^l and Delta^l stay accurate to here


def _require_heat_aniso(params: SpaceParams) -> tuple[int, float, float]:
    a = params.aniso.a
    p = params.p
    if len(a) < 2 or any(x != 1.0 for x in a[:-1]) or a[-1] != 2.0:
        raise CylinderFormError(
            f"heat checker requires anisotropy (1,...,1,2), got {a}"
        )
    if len(set(p[:-1])) != 1:
        raise CylinderFormError(f"heat checker requires equal spatial p, got {p}")
    return len(a) - 1, p[0], p[-1]


@dataclass(frozen=True)
class HeatData:
    """Source g on the cylinder, lateral datum phi, initial datum u0."""

    g: GridFunction
    phi: GridFunction
    u0: GridFunction
    params: SpaceParams

    def __post_init__(self):
        n, _, _ = _require_heat_aniso(self.params)
        omega = self.u0.grid
        if n < 2:
            raise ValidationError(
                "the corner model needs at least two spatial axes"
            )
        if omega.d != n:
            raise GridMismatchError(
                f"u0 has {omega.d} axes but the parameters describe {n} spatial axes"
            )
        if self.g.grid.time_axis is None or self.phi.grid.time_axis is None:
            raise GridMismatchError("g and phi need a designated time axis")
        if self.g.grid.drop_axis(self.g.grid.d - 1) != omega:
            raise GridMismatchError("g must live on u0's grid times a time axis")
        if self.phi.grid.drop_axis(self.phi.grid.d - 1) != omega.drop_axis(omega.d - 1):
            raise GridMismatchError(
                "phi must live on the boundary of u0's grid times a time axis"
            )
        if self.g.grid.N[-1] != self.phi.grid.N[-1] or \
                self.g.grid.L[-1] != self.phi.grid.L[-1]:
            raise GridMismatchError("g and phi disagree on the time axis")

    @property
    def normal_axis(self) -> int:
        return self.u0.grid.d - 1


def admissible_l(params: SpaceParams) -> int:
    """Largest order l with 2l below both printed thresholds; -1 if none."""
    n, p0, pt = _require_heat_aniso(params)
    q = params.q
    a0, at = 1.0, 2.0

    def m(*vals):
        return min(1.0, *vals)

    thr1 = params.s - 1.0 / p0 - 2.0 / pt - (n - 1) * (1.0 / m(p0) - 1.0)
    thr2 = params.s - 1.0 / p0 \
        - (n - 1) * (a0 / m(p0, q) - a0) - (at / m(p0, pt, q) - at)
    bound = min(thr1, thr2)
    if bound <= 0.0:
        return -1
    return int(math.ceil(bound / 2.0)) - 1


def corner_trace_curved(phi: GridFunction, l: int,
                        params: SpaceParams | None = None) -> GridFunction:
    """(d/dt)^l of the lateral datum at t = 0 (spectral derivative, slice)."""
    if phi.grid.time_axis is None:
        raise ValidationError("phi needs a designated time axis")
    if l < 0:
        raise ValidationError("order must be >= 0")
    if params is not None and l > admissible_l(params):
        raise ValidationError(
            f"order l = {l} exceeds the admissible range "
            f"(max {admissible_l(params)})"
        )
    out = phi
    if l > 0:
        xi_t = phi.grid.freq_grids()[phi.grid.d - 1]
        out = apply_symbol(phi, (1j * xi_t) ** l)
    return time_trace_r0(out)


def corner_trace_flat(u0: GridFunction) -> GridFunction:
    """Boundary values of the initial datum: the x_n = 0 slice."""
    return hyperplane_trace(u0, u0.grid.d - 1)


def heat_residual(u: GridFunction, g: GridFunction) -> GridFunction:
    """d/dt u - Delta u - g with spectral derivatives (time axis last)."""
    if u.grid != g.grid:
        raise GridMismatchError("u and g live on different grids")
    if u.grid.time_axis is None:
        raise ValidationError("u needs a designated time axis")
    xi_t = u.grid.freq_grids()[u.grid.d - 1]
    dt_u = apply_symbol(u, 1j * xi_t)
    return dt_u - laplacian(u) - g


@dataclass(frozen=True)
class CompatibilityEntry:
    l: int
    admissible: bool
    lhs_sup: float
    rhs_sup: float
    residual_sup: float
    residual_l2: float


@dataclass(frozen=True)
class CompatibilityReport:
    entries: tuple[CompatibilityEntry, ...]
    l_admissible: int
    l_capped: int

    def entry(self, l: int) -> CompatibilityEntry:
        return self.entries[l]


def _time_derivative(u: GridFunction, order: int) -> GridFunction:
    if order == 0:
        return u
    xi_t = u.grid.freq_grids()[u.grid.d - 1]
    return apply_symbol(u, (1j * xi_t) ** order)


def compatibility_check(data: HeatData,
                        l_cap: int = DERIVATIVE_ORDER_CAP) -> CompatibilityReport:
    """Evaluate the corner identities for every admissible order.

    Orders above ``l_cap`` are reported as admissible but not evaluated
    (spectral high-order derivatives amplify rounding beyond usefulness).
    """
    lmax = admissible_l(data.params)
    l_eval = min(lmax, l_cap)
    naxis = data.normal_axis
    entries = []
    h = np.prod(data.phi.grid.drop_axis(data.phi.grid.d - 1).h) \
        if data.phi.grid.d > 1 else 1.0
    for l in range(l_eval + 1):
        lhs = corner_trace_curved(data.phi, l)
        rhs_field = laplacian(data.u0, power=l) if l > 0 else data.u0
        for j in range(l):
            term = time_trace_r0(_time_derivative(data.g, l - 1 - j))
            if j > 0:
                term = laplacian(term, axes=tuple(range(term.grid.d)), power=j)
            rhs_field = rhs_field + term
        rhs = corner_trace_flat(rhs_field)
        diff = lhs - rhs
        res_sup = diff.sup_norm()
        res_l2 = float(np.sqrt((np.abs(diff.values) ** 2).sum() * h))
        entries.append(CompatibilityEntry(
            l=l, admissible=True, lhs_sup=lhs.sup_norm(), rhs_sup=rhs.sup_norm(),
            residual_sup=res_sup, residual_l2=res_l2,
        ))
    return CompatibilityReport(entries=tuple(entries), l_admissible=lmax,
                               l_capped=l_eval)


def _smooth_step(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """C-infinity step T with T=0 for s<=0, T=1 for s>=1, and its derivative.

    T(s) = f(s) / (f(s) + f(1-s)) with f(s) = exp(-1/s); both T and T' have
    closed forms, so window derivatives are exact (no spectral error and
    exact zeros on the flat parts).
    """
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        f = np.where(s > 0.0, np.exp(-1.0 / np.where(s > 0.0, s, 1.0)), 0.0)
        fm = np.where(1.0 - s > 0.0,
                      np.exp(-1.0 / np.where(1.0 - s > 0.0, 1.0 - s, 1.0)), 0.0)
        df = np.where(s > 0.0, f / np.where(s > 0.0, s * s, 1.0), 0.0)
        dfm = np.where(1.0 - s > 0.0,
                       fm / np.where(1.0 - s > 0.0, (1.0 - s) ** 2, 1.0), 0.0)
    tot = f + fm
    T = f / tot
    dT = (df * fm + f * dfm) / (tot * tot)
    return T, dT


def make_heat_fixture(omega: Grid, time: Grid, params: SpaceParams,
                      band: float = 4.0, center=None, width: float = 0.9,
                      window_flat: float = 0.25,
                      window_support: tuple[float, float] = (-0.5, 1.4),
                      perturbation: float = 0.0) -> HeatData:
    """Data from a windowed free heat flow: u = w(t) exp(t Delta) u0.

    u0 is a smooth bump with a hard spectral cutoff at ``band`` (keeps the
    backward flow inside the time window bounded); w is a C-infinity window
    equal to 1 on [-window_flat, window_flat] with analytically evaluated
    derivative.  The source g = w'(t) v closes the balance, so
    (g, phi, u0) is exactly compatible; a nonzero ``perturbation`` adds an
    incompatible corner bump of that amplitude to phi.
    """
    n = omega.d
    if time.d != 1:
        raise ValidationError("time grid must be one-dimensional")
    if center is None:
        center = [0.15 * omega.L[i] for i in range(n)]
    mesh = np.meshgrid(*[omega.axis_points(i) for i in range(n)], indexing="ij")
    r2 = sum(((m - c) / width) ** 2 for m, c in zip(mesh, center))
    u0_raw = np.exp(-0.5 * r2)
    # hard spectral cutoff so the backward flow over the window stays bounded
    fg = omega.freq_grids()
    xi2 = sum(g ** 2 for g in fg)
    mask = xi2 <= band ** 2
    u0_hat = np.fft.fftn(u0_raw) * mask
    u0 = GridFunction(omega, np.fft.ifftn(u0_hat))

    t = time.axis_points(0)
    lo, hi = window_support
    if not (-time.L[0] < lo < -window_flat and window_flat < hi < time.L[0]):
        raise ValidationError("window must fit inside the time box around 0")
    T1, dT1 = _smooth_step((t - lo) / (-window_flat - lo))
    T2, dT2 = _smooth_step((hi - t) / (hi - window_flat))
    w = T1 * T2
    dw = dT1 * T2 / (-window_flat - lo) - T1 * dT2 / (hi - window_flat)

    # the flow factor only matters inside the spectral cutoff; clamping the
    # exponent outside it avoids inf * 0 at masked frequencies
    xi2m = np.where(mask, xi2, 0.0)
    flow = np.exp(-xi2m[..., None] * t.reshape((1,) * n + (-1,)))
    v = np.fft.ifftn(u0_hat[..., None] * flow, axes=tuple(range(n)))
    cyl = omega.with_time_axis(time)
    u = GridFunction(cyl, v * w)
    g = GridFunction(cyl, v * dw)
    phi = hyperplane_trace(u, n - 1)
    if perturbation != 0.0:
        bgrid = phi.grid
        bmesh = np.meshgrid(*[bgrid.axis_points(i) for i in range(bgrid.d)],
                            indexing="ij")
        bump = np.exp(-0.5 * (bmesh[-1] / 0.25) ** 2)
        for i, m in enumerate(bmesh[:-1]):
            bump = bump * np.exp(-0.5 * ((m - center[i]) / (0.7 * width)) ** 2)
        bump /= np.abs(bump).max()
        phi = GridFunction(bgrid, phi.values + perturbation * bump)
    return HeatData(g=g, phi=phi, u0=u0, params=params)
