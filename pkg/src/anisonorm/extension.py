"""Universal extension from a half-space, built on the reproducing kernels.

The extension of f given on the closed side {x_axis >= offset} is

    sum_{j<=J}  psi_j * e_plus(phi_j * f),

with all kernels supported in the *opposite* half-space, so that the
convolutions only ever read samples on f's known side, and e_plus denotes
zero-extension from the known side.  Restricted back to the known side the
output reproduces f up to the level-J reconstruction residual.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, ValidationError
from .grid import GridFunction, apply_symbol, truncate_halfspace
from .kernels import KernelFamily

__all__ = [
    "HalfspaceFunction",
    "rychkov_extend",
    "rychkov_extend_below",
    "extension_bound_report",
    "reflect_axis",
]


@dataclass(frozen=True)
class HalfspaceFunction:
    """Samples of which only the closed side {x_axis >= / <= offset} is used."""

    u: GridFunction
    axis: int
    side: str  # '+' | '-'
    offset: float = 0.0

    def __post_init__(self):
        if self.side not in ("+", "-"):
            raise ValidationError(f"side must be '+' or '-', got {self.side!r}")
        d = self.u.grid.d
        if not (-d <= self.axis < d):
            raise ValidationError(f"axis {self.axis} out of range")
        object.__setattr__(self, "axis", self.axis % d)
        Lax = self.u.grid.L[self.axis]
        if not (-Lax <= self.offset < Lax):
            raise ValidationError("offset outside the box")

    def known(self) -> GridFunction:
        """Zero-extension: excluded-side samples are never read."""
        return truncate_halfspace(self.u, self.axis, self.side, self.offset)


def _check_orientation(f: HalfspaceFunction, fam: KernelFamily) -> None:
    if fam.grid != f.u.grid:
        raise GridMismatchError("kernel family and data live on different grids")
    if fam.axis != f.axis:
        raise ValidationError(
            f"kernel family is oriented along axis {fam.axis}, data along {f.axis}"
        )
    if fam.support_side == f.side:
        raise ValidationError(
            "kernel supports must lie in the half-space opposite to the data side "
            f"(kernels {fam.support_side!r}, data {f.side!r})"
        )


def rychkov_extend(f: HalfspaceFunction, fam: KernelFamily, J: int) -> GridFunction:
    """Extend f across the hyperplane; depends only on known-side samples."""
    _check_orientation(f, fam)
    if J < 0:
        raise ValidationError("J must be >= 0")
    fam.check_level(J)
    f0 = f.known()
    out = np.zeros(f0.grid.shape, dtype=complex)
    for j in range(J + 1):
        conv = apply_symbol(f0, fam.phi_hat_level(j))
        conv = truncate_halfspace(conv, f.axis, f.side, f.offset)
        out = out + apply_symbol(conv, fam.psi_hat_level(j)).values
    return GridFunction(f0.grid, out)


def reflect_axis(u: GridFunction, axis: int, center: float) -> GridFunction:
    """x_axis -> center - x_axis as an exact lattice permutation.

    ``center`` must sit on the lattice (an integer multiple of the spacing).
    """
    axis = axis % u.grid.d
    h = u.grid.h[axis]
    steps = center / h
    k = int(round(steps))
    if abs(steps - k) > 1e-9:
        raise ValidationError(
            f"reflection center {center} is not on the lattice (spacing {h})"
        )
    n = u.grid.N[axis]
    idx = (k - np.arange(n)) % n
    return GridFunction(u.grid, np.take(u.values, idx, axis=axis))


def rychkov_extend_below(f: HalfspaceFunction, C: float, fam: KernelFamily,
                         J: int) -> GridFunction:
    """Extension from {x_axis < C}, by conjugating with x -> (x', C - x)."""
    if f.side != "-":
        raise ValidationError("extend-below expects data on the minus side")
    Lax = f.u.grid.L[f.axis]
    if not (-Lax <= C < Lax):
        raise ValidationError(f"C = {C} outside the box")
    reflected = reflect_axis(f.u, f.axis, C)
    g = HalfspaceFunction(reflected, axis=f.axis, side="+", offset=0.0)
    ext = rychkov_extend(g, fam, J)
    return reflect_axis(ext, f.axis, C)


@dataclass(frozen=True)
class ExtensionBoundReport:
    ratios: tuple[float, ...]
    skipped: int
    max_ratio: float


def extension_bound_report(family_of_f: list[HalfspaceFunction], params,
                           fam: KernelFamily, part, J: int) -> ExtensionBoundReport:
    """Max of ||E f||_F / ||e_plus f||_F over a test family.

    The zero-extension norm is an upper bound for the quotient norm, so the
    reported constant is a lower bound for the true operator constant;
    diagnostic only.  Zero fixtures are reported as skipped.
    """
    from .decomposition import f_norm
    ratios = []
    skipped = 0
    for f in family_of_f:
        denom = f_norm(f.known(), params, part)
        if denom == 0.0:
            skipped += 1
            continue
        num = f_norm(rychkov_extend(f, fam, J), params, part)
        ratios.append(num / denom)
    return ExtensionBoundReport(
        ratios=tuple(ratios), skipped=skipped,
        max_ratio=max(ratios) if ratios else float("nan"),
    )
