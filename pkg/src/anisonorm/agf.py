"""Bit-exact grid-file format (AGF).

Layout, all little-endian:
  magic  "AGF1"
  u32    d (axis count)
  per axis: u32 N_i, f64 L_i, f64 a_i, u8 time-flag (at most one axis set)
  payload: prod(N_i) complex values as interleaved f64 (re, im),
           row-major, last axis fastest.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .anisotropy import Anisotropy
from .errors import FileFormatError
from .grid import Grid, GridFunction

__all__ = ["read_agf", "read_agf_full", "write_agf"]

MAGIC = b"AGF1"
_HEAD = struct.Struct("<I")
_AXIS = struct.Struct("<IddB")


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def write_agf(u: GridFunction, path, aniso: Anisotropy | None = None) -> None:
    grid = u.grid
    if aniso is None:
        aniso = Anisotropy((1.0,) * grid.d)
    if aniso.d != grid.d:
        raise FileFormatError("anisotropy dimension does not match grid")
    parts = [MAGIC, _HEAD.pack(grid.d)]
    for i in range(grid.d):
        flag = 1 if grid.time_axis == i else 0
        parts.append(_AXIS.pack(grid.N[i], grid.L[i], aniso.a[i], flag))
    payload = np.ascontiguousarray(u.values, dtype=np.complex128)
    parts.append(payload.astype("<c16").tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_agf_full(path) -> tuple[GridFunction, Anisotropy]:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + _HEAD.size or raw[: len(MAGIC)] != MAGIC:
        raise FileFormatError(f"{path}: not an AGF file (bad magic)")
    off = len(MAGIC)
    (d,) = _HEAD.unpack_from(raw, off)
    off += _HEAD.size
    if d == 0 or len(raw) < off + d * _AXIS.size:
        raise FileFormatError(f"{path}: truncated axis table")
    N, L, a, time_axis = [], [], [], None
    for i in range(d):
        n, ell, ai, flag = _AXIS.unpack_from(raw, off)
        off += _AXIS.size
        if n < 4 or not _is_pow2(n):
            raise FileFormatError(f"{path}: axis {i} size {n} is not a power of two >= 4")
        if flag:
            if time_axis is not None:
                raise FileFormatError(f"{path}: more than one time axis flagged")
            time_axis = i
        N.append(n)
        L.append(ell)
        a.append(ai)
    count = int(np.prod(N))
    need = off + 16 * count
    if len(raw) < need:
        raise FileFormatError(
            f"{path}: truncated payload ({len(raw) - off} bytes, need {16 * count})"
        )
    values = np.frombuffer(raw, dtype="<c16", count=count, offset=off)
    grid = Grid(N=tuple(N), L=tuple(L), time_axis=time_axis)
    return GridFunction(grid, values.reshape(grid.shape)), Anisotropy(tuple(a))


def read_agf(path) -> GridFunction:
    return read_agf_full(path)[0]
