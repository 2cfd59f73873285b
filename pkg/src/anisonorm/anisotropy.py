"""Quasi-homogeneous geometry: weight vectors, dilations, the anisotropic
distance, and smoothness/integrability parameter bundles.

The distance |x|_a of a point x under a weight vector a >= 1 is the unique
t > 0 with sum_i x_i^2 / t^(2 a_i) = 1 (and |0|_a = 0).  It replaces the
Euclidean norm in all dyadic corona geometry; for a = (1,...,1) the two
coincide.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = [
    "Anisotropy",
    "SpaceParams",
    "dilate",
    "aniso_distance",
    "aniso_distance_field",
    "rescale_params",
]

DEFAULT_ROOT_TOL = 1e-12


@dataclass(frozen=True)
class Anisotropy:
    """Per-axis dilation weights, all >= 1 by the standing normalization."""

    a: tuple[float, ...]
    total: float = field(init=False)

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if len(a) == 0:
            raise ValidationError("anisotropy needs at least one axis")
        if any(not np.isfinite(x) or x < 1.0 for x in a):
            raise ValidationError(
                f"anisotropy entries must be finite and >= 1, got {a}; "
                "rescale explicitly (rescale_params) instead of passing a < 1"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "total", float(sum(a)))

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.a, dtype=float)

    def __iter__(self):
        return iter(self.a)


@dataclass(frozen=True)
class SpaceParams:
    """Full smoothness/integrability signature (s, a, p, q, F|B)."""

    s: float
    aniso: Anisotropy
    p: tuple[float, ...]
    q: float
    kind: str  # "F" | "B"

    def __post_init__(self):
        if self.kind not in ("F", "B"):
            raise ValidationError(f"kind must be 'F' or 'B', got {self.kind!r}")
        p = tuple(float(x) for x in self.p)
        if len(p) != self.aniso.d:
            raise ValidationError(
                f"p has {len(p)} entries but anisotropy has {self.aniso.d}"
            )
        for x in p:
            if np.isnan(x) or x <= 0.0:
                raise ValidationError(f"p entries must lie in (0, inf], got {p}")
        if self.kind == "F" and any(np.isinf(x) for x in p):
            raise ValidationError("F-scale parameters require all p_i < inf")
        q = float(self.q)
        if np.isnan(q) or q <= 0.0:
            raise ValidationError(f"q must lie in (0, inf], got {q}")
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def d(self) -> int:
        return self.aniso.d

    @property
    def subadditivity_exponent(self) -> float:
        """min(1, p_1, ..., p_d, q); the quasi-norm is d-subadditive."""
        return min(1.0, min(self.p), self.q)


def dilate(t: float, aniso: Anisotropy, x) -> np.ndarray:
    """Quasi-homogeneous dilation t^a x = (t^a_1 x_1, ..., t^a_d x_d)."""
    if t < 0:
        raise ValidationError(f"dilation parameter must be >= 0, got {t}")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != aniso.d:
        raise ValidationError("point dimension does not match anisotropy")
    return (float(t) ** aniso.array) * x


def aniso_distance_field(coords: list[np.ndarray], aniso: Anisotropy,
                         tol: float = DEFAULT_ROOT_TOL) -> np.ndarray:
    """Anisotropic distance on a tensor lattice, vectorized.

    ``coords`` holds one 1-D coordinate array per axis; the result has shape
    (len(coords[0]), ..., len(coords[-1])).  Bisection on the strictly
    decreasing map t -> sum x_i^2 t^(-2 a_i) - 1, bracketed by
    [min_i |x_i|^(1/a_i), d * max_i |x_i|^(1/a_i)].
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    d = aniso.d
    if len(coords) != d:
        raise ValidationError("coordinate count does not match anisotropy")
    a = aniso.array
    shape = tuple(len(c) for c in coords)
    grids = np.meshgrid(*[np.abs(np.asarray(c, dtype=float)) for c in coords],
                        indexing="ij")
    roots = np.stack([g ** (1.0 / a[i]) for i, g in enumerate(grids)])
    lo = roots.min(axis=0)
    hi = d * roots.max(axis=0)
    nonzero = hi > 0.0

    sq = np.stack([g * g for g in grids])

    def overshoot(t):
        # sum x_i^2 / t^(2 a_i) >= 1; zero coordinates contribute nothing
        # even when t^(-2a) overflows
        acc = np.zeros(shape)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            for i in range(d):
                term = sq[i] * t ** (-2.0 * a[i])
                acc += np.where(sq[i] == 0.0, 0.0, term)
        return acc >= 1.0

    # double hi until it brackets (the analytic bracket suffices, but guard
    # against rounding at the boundary)
    hi = np.where(nonzero, hi, 1.0)
    lo = np.where(nonzero, lo, 0.0)
    for _ in range(4):
        bad = nonzero & overshoot(hi)
        if not bad.any():
            break
        hi = np.where(bad, 2.0 * hi, hi)

    n_iter = int(np.ceil(np.log2(1.0 / tol))) + 12
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        up = overshoot(np.where(nonzero, mid, 1.0))
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    out = 0.5 * (lo + hi)
    return np.where(nonzero, out, 0.0)


def aniso_distance(x, aniso: Anisotropy, tol: float = DEFAULT_ROOT_TOL) -> float:
    """Anisotropic distance of a single point; |0|_a = 0."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != aniso.d:
        raise ValidationError("point dimension does not match anisotropy")
    coords = [np.array([xi]) for xi in x]
    return float(aniso_distance_field(coords, aniso, tol=tol)[(0,) * aniso.d])


def rescale_params(params: SpaceParams, lam: float) -> SpaceParams:
    """Rescale (s, a) -> (lam*s, lam*a); the spaces coincide for lam*a >= 1."""
    lam = float(lam)
    if lam <= 0:
        raise ValidationError(f"rescaling factor must be positive, got {lam}")
    new_a = tuple(lam * x for x in params.aniso.a)
    if any(x < 1.0 for x in new_a):
        raise ValidationError(
            f"rescaling by {lam} drives an anisotropy entry below 1: {new_a}"
        )
    return SpaceParams(
        s=lam * params.s,
        aniso=Anisotropy(new_a),
        p=params.p,
        q=params.q,
        kind=params.kind,
    )
