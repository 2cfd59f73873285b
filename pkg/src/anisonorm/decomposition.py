"""Anisotropic dyadic partitions of unity and the F/B quasi-norms.

A partition is built from one radial ramp chi (C^2 quintic smoothstep by
default, configurable): psi(xi) = chi(|xi|_a), window 0 is psi itself and
window j >= 1 is psi(2^{-j a} xi) - psi(2^{(1-j) a} xi).  By quasi-
homogeneity of |.|_a the dilated evaluations reduce to chi(2^{-j} rho)
on the precomputed distance field rho, which keeps the telescoping sum
sum_j Phi_j = psi(2^{-J a} .) exact to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .anisotropy import Anisotropy, SpaceParams, aniso_distance_field
from .errors import (CylinderFormError, GridMismatchError, KindMismatchError,
                     ValidationError)
from .grid import (Grid, GridFunction, apply_symbol, mixed_lp_norm,
                   require_same_grid)

__all__ = [
    "DyadicPartition",
    "BandDecomposition",
    "quintic_ramp",
    "build_partition",
    "default_level",
    "lp_bands",
    "f_norm",
    "b_norm",
    "peetre_maximal",
    "pointwise_multiply_report",
    "validate_trace_conditions",
]


def quintic_ramp(r: np.ndarray) -> np.ndarray:
    """1 on [0,1], 0 on [3/2, inf), quintic smoothstep between (C^2)."""
    r = np.asarray(r, dtype=float)
    u = np.clip((r - 1.0) * 2.0, 0.0, 1.0)
    return 1.0 - u ** 3 * (10.0 + u * (-15.0 + 6.0 * u))


@dataclass(frozen=True)
class DyadicPartition:
    """Spectral windows Phi_0..Phi_J on a grid's frequency lattice."""

    grid: Grid
    aniso: Anisotropy
    J: int
    windows: tuple[np.ndarray, ...] = field(repr=False)
    rho: np.ndarray = field(repr=False)  # |xi|_a on the lattice

    @property
    def levels(self) -> int:
        return self.J + 1

    def window(self, j: int) -> np.ndarray:
        return self.windows[j]

    def partial_sum(self, J: int | None = None) -> np.ndarray:
        J = self.J if J is None else J
        acc = np.zeros_like(self.windows[0])
        for j in range(J + 1):
            acc = acc + self.windows[j]
        return acc


def default_level(grid: Grid, aniso: Anisotropy) -> int:
    """Smallest J with 2^J covering the lattice in |.|_a."""
    coords = [grid.axis_freqs(i) for i in range(grid.d)]
    rho = aniso_distance_field(coords, aniso)
    return max(0, int(math.ceil(math.log2(max(rho.max(), 1.0)))))


def build_partition(aniso: Anisotropy, J: int | None, grid: Grid,
                    ramp=quintic_ramp) -> DyadicPartition:
    """Windows Phi_j from psi = ramp(|xi|_a); sums to 1 on |xi|_a <= 2^J."""
    if aniso.d != grid.d:
        raise ValidationError("anisotropy dimension does not match grid")
    coords = [grid.axis_freqs(i) for i in range(grid.d)]
    rho = aniso_distance_field(coords, aniso)
    if J is None:
        J = max(0, int(math.ceil(math.log2(max(rho.max(), 1.0)))))
    J = int(J)
    if J < 0:
        raise ValidationError("level J must be >= 0")
    psi_prev = ramp(rho)  # psi(2^{-0 a} xi)
    windows = [psi_prev]
    for j in range(1, J + 1):
        psi_j = ramp(rho / 2.0 ** j)
        windows.append(psi_j - psi_prev)
        psi_prev = psi_j
    return DyadicPartition(grid=grid, aniso=aniso, J=J,
                           windows=tuple(windows), rho=rho)


@dataclass(frozen=True)
class BandDecomposition:
    source: GridFunction
    bands: tuple[GridFunction, ...]

    def resum(self) -> GridFunction:
        acc = self.bands[0]
        for b in self.bands[1:]:
            acc = acc + b
        return acc


def lp_bands(u: GridFunction, part: DyadicPartition) -> BandDecomposition:
    """u_j = F^{-1}(Phi_j F u); sums back to u on the resolved band."""
    if u.grid != part.grid:
        raise GridMismatchError("function and partition live on different grids")
    bands = tuple(apply_symbol(u, w) for w in part.windows)
    return BandDecomposition(source=u, bands=bands)


def _band_weights(params: SpaceParams, levels: int) -> np.ndarray:
    return 2.0 ** (params.s * np.arange(levels))


def f_norm(u: GridFunction, params: SpaceParams, part: DyadicPartition) -> float:
    """Inner l_q over levels (pointwise), outer mixed L_p."""
    if params.kind != "F":
        raise KindMismatchError("f_norm requires F-scale parameters")
    if params.d != u.grid.d:
        raise ValidationError("parameter dimension does not match grid")
    bands = lp_bands(u, part).bands
    w = _band_weights(params, len(bands))
    stack = np.abs(np.stack([b.values for b in bands]))
    stack *= w.reshape((-1,) + (1,) * u.grid.d)
    if np.isinf(params.q):
        inner = stack.max(axis=0)
    else:
        inner = (stack ** params.q).sum(axis=0) ** (1.0 / params.q)
    return mixed_lp_norm(GridFunction(u.grid, inner), params.p)


def b_norm(u: GridFunction, params: SpaceParams, part: DyadicPartition) -> float:
    """Inner mixed L_p per level, outer l_q over levels."""
    if params.kind != "B":
        raise KindMismatchError("b_norm requires B-scale parameters")
    if params.d != u.grid.d:
        raise ValidationError("parameter dimension does not match grid")
    bands = lp_bands(u, part).bands
    w = _band_weights(params, len(bands))
    per = np.array([mixed_lp_norm(b, params.p) for b in bands]) * w
    if np.isinf(params.q):
        return float(per.max())
    return float((per ** params.q).sum() ** (1.0 / params.q))


PEETRE_MAX_SIZE = 16384


def peetre_maximal(u_j: GridFunction, aniso: Anisotropy, r, j: int) -> GridFunction:
    """sup_y |u_j(y)| / prod_l (1 + 2^{j a_l} |x_l - y_l|)^{r_l}.

    |x_l - y_l| is the periodic axis distance.  Direct O(N^2) sup; guarded
    to diagnostic grid sizes.
    """
    grid = u_j.grid
    if grid.size > PEETRE_MAX_SIZE:
        raise ValidationError(
            f"peetre_maximal is restricted to grids with at most "
            f"{PEETRE_MAX_SIZE} samples, got {grid.size}"
        )
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if r.size != grid.d:
        raise ValidationError("r vector length does not match grid")
    if np.any(r <= 0):
        raise ValidationError("r entries must be positive")
    # per-axis weight matrices on the periodic circle
    mats = []
    for ax in range(grid.d):
        x = grid.axis_points(ax)
        diff = np.abs(x[:, None] - x[None, :])
        diff = np.minimum(diff, 2.0 * grid.L[ax] - diff)
        mats.append((1.0 + 2.0 ** (j * aniso.a[ax]) * diff) ** (-r[ax]))
    mag = np.abs(u_j.values).reshape(-1)
    nx = grid.size
    out = np.empty(nx)
    shape = grid.shape
    idx = np.unravel_index(np.arange(nx), shape)
    chunk = max(1, PEETRE_MAX_SIZE * 64 // max(1, nx))
    for start in range(0, nx, chunk):
        stop = min(nx, start + chunk)
        w = np.ones((stop - start, nx))
        for ax in range(grid.d):
            rows = mats[ax][idx[ax][start:stop]]  # (chunk, N_ax)
            cols = idx[ax]
            w *= rows[:, cols]
        out[start:stop] = (w * mag[None, :]).max(axis=1)
    return GridFunction(grid, out.reshape(shape))


@dataclass(frozen=True)
class MultiplierReport:
    ratio: float
    multiplier_proxy: float
    s1: float


def pointwise_multiply_report(m: GridFunction, v: GridFunction,
                              params: SpaceParams,
                              part: DyadicPartition) -> MultiplierReport:
    """Diagnostic: ||m v||_F / ||v||_F against a sup-type smoothness proxy of m.

    The proxy is max_j 2^{j s1} ||m_j||_inf with s1 the smallest admissible
    multiplier smoothness for ``params`` plus one.
    """
    require_same_grid(m, v)
    denom = f_norm(v, params, part)
    if denom == 0.0:
        raise ValidationError("reference function has zero norm")
    num = f_norm(m * v, params, part)
    a = params.aniso.array
    p = np.asarray(params.p)
    corr = 0.0
    for ell in range(params.d):
        dmin = min(1.0, params.q, *p[: ell + 1])
        corr += a[ell] / dmin - a[ell]
    s1 = max(params.s, corr - params.s) + 1.0
    bands = lp_bands(m, part).bands
    proxy = max(
        2.0 ** (j * s1) * b.sup_norm() for j, b in enumerate(bands)
    )
    return MultiplierReport(ratio=num / denom, multiplier_proxy=proxy, s1=s1)


def _cylinder_form(params: SpaceParams) -> tuple[int, float, float, float, float]:
    """Return (n, a0, at, p0, pt) or raise for non-cylinder parameters."""
    d = params.d
    if d < 2:
        raise CylinderFormError("cylinder form needs at least two axes")
    a = params.aniso.a
    p = params.p
    if len(set(a[:-1])) != 1 or len(set(p[:-1])) != 1:
        raise CylinderFormError(
            "cylinder form requires equal spatial anisotropy and integrability "
            f"entries, got a={a}, p={p}"
        )
    return d - 1, a[0], a[-1], p[0], p[-1]


def validate_trace_conditions(params: SpaceParams, which: str) -> dict:
    """Evaluate the printed lower bound on s for the requested trace.

    which: 'r0' (initial-time trace), 'gamma' (lateral trace),
    'corner_curved', 'corner_flat'.
    """
    n, a0, at, p0, pt = _cylinder_form(params)
    q = params.q

    def m(*vals):
        return min(1.0, *vals)

    if which == "r0":
        thr = at / pt + n * (a0 / m(p0) - a0)
    elif which == "gamma":
        thr = a0 / p0 + (n - 1) * (a0 / m(p0, q) - a0) + (at / m(p0, pt, q) - at)
    elif which == "corner_curved":
        thr = at / pt + (n - 1) * (a0 / m(p0) - a0)
    elif which == "corner_flat":
        thr = a0 / p0 + (n - 1) * (a0 / m(p0) - a0)
    else:
        raise ValidationError(
            "which must be one of 'r0', 'gamma', 'corner_curved', 'corner_flat'"
        )
    return {"ok": bool(params.s > thr), "threshold": float(thr)}
