"""Hyperplane and initial-time traces, modulated right-inverses, and the
support-preserving right-inverse built from one-sided reproducing kernels.

The modulated constructions place a copy of a 1-D profile eta (eta(0) = 1,
spectrum inside [1, 2]) at dyadic time scales on top of spectrally sliced
or kernel-filtered spatial bands:

    K v      = sum_j  psi(2^{j a_t} t) . band_j(v)          (flat trace)
    Q u      = sum_j  eta(2^{j a_t} t) . (psi_j * phi_j * u) (initial trace)

Evaluating the trace at the modulated axis origin collapses every factor
to 1, which is what makes these exact right-inverses on resolved bands.
Modulation levels whose spectra would cross the axis Nyquist are dropped
with a warning for the K constructions and rejected for Q.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .decomposition import DyadicPartition
from .errors import (GridMismatchError, NyquistCapError, ValidationError)
from .grid import (Grid, GridFunction, apply_symbol, mixed_lp_lq_norm,
                   mixed_lp_norm)
from .kernels import KernelFamily

__all__ = [
    "TraceProfile",
    "TruncationNotice",
    "build_eta",
    "hyperplane_trace",
    "time_trace_r0",
    "k_flat",
    "k_normal",
    "q_apply",
    "q_prop_bound_check",
    "support_report",
]


class TruncationNotice(UserWarning):
    """A modulation level was dropped at the axis Nyquist cap."""


class AliasingNotice(UserWarning):
    """Modulation levels exceed the axis Nyquist; the field's band
    structure is aliased (values, traces and supports stay exact)."""


@dataclass(frozen=True)
class TraceProfile:
    """Modulators with unit value at 0 and spectrum supported in [1, 2]."""

    grid: Grid
    eta: GridFunction = field(repr=False)
    psi_mod: GridFunction = field(repr=False)
    eta_bump: np.ndarray = field(repr=False)      # spectral coefficients
    psi_bump: np.ndarray = field(repr=False)

    def _modulation(self, bump: np.ndarray, scale: float,
                    tpoints: np.ndarray) -> np.ndarray:
        """Evaluate the profile's trigonometric interpolant at scale*t."""
        xi = self.grid.axis_freqs(0)
        nz = bump != 0.0
        phases = np.exp(1j * np.outer(scale * tpoints, xi[nz]))
        return phases @ bump[nz] / (2.0 * self.grid.L[0])

    def eta_at(self, scale: float, tpoints: np.ndarray) -> np.ndarray:
        return self._modulation(self.eta_bump, scale, tpoints)

    def psi_at(self, scale: float, tpoints: np.ndarray) -> np.ndarray:
        return self._modulation(self.psi_bump, scale, tpoints)


def _smooth_bump(s: np.ndarray) -> np.ndarray:
    """C-infinity bump on (-1, 1), peak value 1 at 0."""
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


def build_eta(grid1d: Grid) -> TraceProfile:
    """Profiles from smooth spectral bumps on [1, 2], normalized to 1 at t=0."""
    if grid1d.d != 1:
        raise ValidationError("profile grid must be one-dimensional")
    xi = grid1d.axis_freqs(0)
    inside = np.count_nonzero((xi > 1.0) & (xi < 2.0))
    if inside < 4:
        raise ValidationError(
            f"grid resolves ({inside} points in (1,2)); need finer spectral spacing"
        )
    eta_bump = _smooth_bump((xi - 1.5) / 0.5)
    psi_bump = _smooth_bump((xi - 1.5) / 0.35)
    out = []
    for bump in (eta_bump, psi_bump):
        bump = np.where((xi > 1.0) & (xi < 2.0), bump, 0.0)
        val0 = bump.sum() / (2.0 * grid1d.L[0])
        if abs(val0) < 1e-300:
            raise ValidationError("bump integral too small to normalize")
        out.append(bump / val0)
    eta_bump, psi_bump = out
    t = grid1d.axis_points(0)

    def synth(bump):
        nz = bump != 0.0
        vals = np.exp(1j * np.outer(t, xi[nz])) @ bump[nz] / (2.0 * grid1d.L[0])
        return GridFunction(grid1d, vals)

    return TraceProfile(grid=grid1d, eta=synth(eta_bump), psi_mod=synth(psi_bump),
                        eta_bump=eta_bump, psi_bump=psi_bump)


def hyperplane_trace(f: GridFunction, k: int) -> GridFunction:
    """Restrict to the hyperplane {x_k = 0} (one axis fewer)."""
    d = f.grid.d
    if not (-d <= k < d):
        raise ValidationError(f"axis {k} out of range")
    k = k % d
    if d == 1:
        raise ValidationError("cannot trace a one-axis function to a point grid")
    idx = f.grid.N[k] // 2  # x = 0 sits at index N/2
    sl = [slice(None)] * d
    sl[k] = idx
    return GridFunction(f.grid.drop_axis(k), f.values[tuple(sl)])


def time_trace_r0(u: GridFunction) -> GridFunction:
    """Initial-time trace: the t = 0 slice along the designated time axis."""
    if u.grid.time_axis is None:
        raise ValidationError("grid has no designated time axis")
    return hyperplane_trace(u, u.grid.time_axis)


def _level_cap(scale_base: float, nyquist: float, J: int, what: str,
               strict: bool) -> int:
    """Largest level whose modulated spectrum [2^{ja}, 2^{ja+1}] fits."""
    cap = J
    while cap >= 0 and 2.0 ** (cap * scale_base) * 2.0 > nyquist:
        cap -= 1
    if cap < J:
        msg = (f"{what}: levels {cap + 1}..{J} exceed the modulation-axis "
               f"Nyquist {nyquist:.3g} and were dropped")
        if strict:
            raise NyquistCapError(msg)
        warnings.warn(msg, TruncationNotice, stacklevel=3)
    return cap


def k_flat(v: GridFunction, profile: TraceProfile, part: DyadicPartition,
           a_t: float, J: int | None = None) -> GridFunction:
    """Right-inverse of the initial-time trace via modulated spectral bands.

    ``part`` lives on the target space-time grid (time axis last); band j of
    v uses the window sliced at time frequency zero and is modulated by
    psi(2^{j a_t} t).
    """
    out_grid = part.grid
    if out_grid.time_axis != out_grid.d - 1:
        raise ValidationError("partition grid needs a trailing time axis")
    if out_grid.drop_axis(out_grid.d - 1) != v.grid:
        raise GridMismatchError("v must live on the partition grid minus time")
    J = part.J if J is None else int(J)
    if J > part.J:
        raise ValidationError(f"J = {J} exceeds partition level {part.J}")
    t = out_grid.axis_points(out_grid.d - 1)
    cap = _level_cap(a_t, out_grid.nyquist(out_grid.d - 1), J, "k_flat",
                     strict=False)
    out = np.zeros(out_grid.shape, dtype=complex)
    for j in range(cap + 1):
        window = part.windows[j][..., 0]  # Phi_j(xi', 0)
        band = apply_symbol(v, window)
        mod = profile.psi_at(2.0 ** (j * a_t), t)
        out += band.values[..., None] * mod
    return GridFunction(out_grid, out)


def k_normal(v: GridFunction, profile: TraceProfile, part: DyadicPartition,
             a_n: float, J: int | None = None) -> GridFunction:
    """Right-inverse of the normal-axis hyperplane trace.

    The modulated axis is the last spatial axis of the partition grid;
    v lives on the remaining axes (including time).
    """
    out_grid = part.grid
    if out_grid.d < 2:
        raise ValidationError("need at least two axes")
    axis = out_grid.d - 2 if out_grid.time_axis is not None else out_grid.d - 1
    if out_grid.drop_axis(axis) != v.grid:
        raise GridMismatchError("v must live on the partition grid minus the "
                                "modulated axis")
    J = part.J if J is None else int(J)
    if J > part.J:
        raise ValidationError(f"J = {J} exceeds partition level {part.J}")
    xn = out_grid.axis_points(axis)
    cap = _level_cap(a_n, out_grid.nyquist(axis), J, "k_normal", strict=False)
    out = np.zeros(out_grid.shape, dtype=complex)
    sl = [slice(None)] * out_grid.d
    sl[axis] = 0  # frequency index 0 on the modulated axis
    for j in range(cap + 1):
        window = part.windows[j][tuple(sl)]
        band = apply_symbol(v, window)
        mod = profile.psi_at(2.0 ** (j * a_n), xn)
        shape = [1] * out_grid.d
        shape[axis] = xn.size
        out += np.expand_dims(band.values, axis) * mod.reshape(shape)
    return GridFunction(out_grid, out)


def q_apply(u: GridFunction, fam: KernelFamily, profile: TraceProfile,
            a_t: float, J: int) -> GridFunction:
    """Support-preserving right-inverse of the initial-time trace.

    Qu(x, t) = sum_{j<=J} eta(2^{j a_t} t) (psi_j * phi_j * u)(x); requires
    plus-half-space kernels so every term keeps supp u inside the closed
    plus half-space for each fixed t.
    """
    if fam.support_side != "+":
        raise ValidationError("q_apply needs a plus-half-space kernel family")
    if fam.grid != u.grid:
        raise GridMismatchError("u and the kernel family live on different grids")
    if J < 0:
        raise ValidationError("J must be >= 0")
    fam.check_level(J)
    out_grid = u.grid.with_time_axis(profile.grid)
    t = profile.grid.axis_points(0)
    nyq = profile.grid.nyquist(0)
    if 2.0 ** (J * a_t) * 2.0 > nyq:
        warnings.warn(
            f"q_apply: modulation bands above level "
            f"{int(np.floor(np.log2(nyq / 2.0) / a_t))} alias on the time "
            "axis; traces and supports remain exact",
            AliasingNotice, stacklevel=2,
        )
    out = np.zeros(out_grid.shape, dtype=complex)
    for j in range(J + 1):
        kj = fam.psi_hat_level(j) * fam.phi_hat_level(j)
        band = apply_symbol(u, kj)
        mod = profile.eta_at(2.0 ** (j * a_t), t)
        out += band.values[..., None] * mod
    return GridFunction(out_grid, out)


@dataclass(frozen=True)
class QPropReport:
    lhs: float
    rhs: float
    ratio: float
    decay_sup: float


def q_prop_bound_check(v_seq: list[GridFunction], f1d: GridFunction,
                       r: float, a: float, p, q: float,
                       N: int | None = None) -> QPropReport:
    """Evaluate both sides of the tensor-modulation estimate

        || { v_j (x) 2^{j a / r} f(2^{j a} t) } | L_p(l_q) ||
            <=  c ( sum_j || v_j | L_{p'} ||^r )^{1/r}.

    Requires r > 0 with N r > 1 for some N making t^N f(t) bounded; on a
    periodic box boundedness is automatic, so the check is the exponent
    condition plus a recorded decay proxy sup |t^N f|.
    """
    if not v_seq:
        raise ValidationError("sequence must be nonempty")
    if f1d.grid.d != 1:
        raise ValidationError("f must be one-dimensional")
    r = float(r)
    if r <= 0:
        raise ValidationError("r must be positive")
    p = [float(x) for x in p]
    if abs(p[-1] - r) > 1e-12:
        raise ValidationError("the last integral exponent must equal r")
    if N is None:
        N = int(np.ceil(1.0 / r)) + 1
    if N * r <= 1.0:
        raise ValidationError(f"need N r > 1, got N={N}, r={r}")
    t = f1d.grid.axis_points(0)
    decay_sup = float(np.abs(t ** N * f1d.values).max())

    g0 = v_seq[0].grid
    for v in v_seq[1:]:
        if v.grid != g0:
            raise GridMismatchError("sequence members live on different grids")
    out_grid = g0.with_time_axis(f1d.grid)
    tensors = []
    from .grid import evaluate_trig
    for j, v in enumerate(v_seq):
        scale = 2.0 ** (j * a)
        fvals = evaluate_trig(f1d, (scale * t)[:, None]) * scale ** (1.0 / r)
        tensors.append(GridFunction(out_grid, v.values[..., None] * fvals))
    lhs = mixed_lp_lq_norm(tensors, p, q)
    rhs = float(sum(mixed_lp_norm(v, p[:-1]) ** r for v in v_seq) ** (1.0 / r))
    ratio = lhs / rhs if rhs > 0 else 0.0
    return QPropReport(lhs=lhs, rhs=rhs, ratio=ratio, decay_sup=decay_sup)


@dataclass(frozen=True)
class SupportReport:
    applicable: bool
    max_leakage: float
    threshold: float
    ok: bool


def support_report(u: GridFunction, Qu: GridFunction, axis: int,
                   delta: float) -> SupportReport:
    """Max of |Qu| beyond distance delta on the forbidden side, over all t.

    Marked not-applicable when u itself violates the half-space premise.
    """
    axis = axis % Qu.grid.d
    if axis >= u.grid.d:
        raise ValidationError("axis must be a spatial axis of u")
    h = Qu.grid.h[axis]
    if delta < 2.0 * h:
        raise ValidationError(f"delta must be at least two spacings ({2 * h:.3g})")
    sup_u = u.sup_norm()
    xu = u.grid.axis_points(axis)
    premise = np.abs(
        u.values[tuple(xu < 0.0 if i == axis else slice(None)
                       for i in range(u.grid.d))]
    )
    if premise.size and premise.max() > 1e-14 * max(sup_u, 1e-300):
        return SupportReport(applicable=False, max_leakage=float("nan"),
                             threshold=float("nan"), ok=False)
    x = Qu.grid.axis_points(axis)
    sl = tuple(x <= -delta if i == axis else slice(None)
               for i in range(Qu.grid.d))
    region = np.abs(Qu.values[sl])
    leak = float(region.max()) if region.size else 0.0
    thr = 1e-10 * sup_u
    return SupportReport(applicable=True, max_leakage=leak, threshold=thr,
                         ok=leak <= thr)
