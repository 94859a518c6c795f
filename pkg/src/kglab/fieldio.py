"""
Binary field files.

A file is one JSON header line followed by raw little-endian float64
(re, im) pairs in row-major lattice order.  Space-time files store their
slices consecutively.

    {"format": "kglab-field", "version": 1, "kind": "complex_field",
     "n": 3, "L": 16.0, "N": 32, "count": 32768}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from kglab.errors import FieldFormatError, FieldSizeError
from kglab.grid import ComplexField, Grid, SpaceTimeField

__all__ = ["write_field", "read_field"]

_MAGIC = "kglab-field"
_DTYPE = np.dtype("<f8")


def write_field(field: ComplexField | SpaceTimeField, path) -> None:
    g = field.grid
    header = {"format": _MAGIC, "version": 1, "n": g.n, "L": g.L, "N": g.N, "count": g.size}
    if isinstance(field, SpaceTimeField):
        header.update(kind="spacetime_field", t0=field.t0, dt=field.dt, slices=field.M + 1)
        data = field.slices
    else:
        header.update(kind="complex_field")
        data = field.values
    payload = np.ascontiguousarray(data).view(np.float64).astype(_DTYPE, copy=False)
    with open(Path(path), "wb") as fh:
        fh.write(json.dumps(header).encode("ascii") + b"\n")
        fh.write(payload.tobytes(order="C"))


def read_field(path) -> ComplexField | SpaceTimeField:
    raw = Path(path).read_bytes()
    nl = raw.find(b"\n")
    if nl < 0:
        raise FieldFormatError(f"{path}: missing header line")
    try:
        header = json.loads(raw[:nl].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FieldFormatError(f"{path}: malformed header ({exc})") from None
    if not isinstance(header, dict) or header.get("format") != _MAGIC:
        raise FieldFormatError(f"{path}: not a field file")
    try:
        grid = Grid(int(header["n"]), float(header["L"]), int(header["N"]))
        count = int(header["count"])
        kind = header["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldFormatError(f"{path}: malformed header ({exc})") from None
    if count != grid.size:
        raise FieldSizeError(f"{path}: header declares {count} values but N^n = {grid.size}")

    if kind == "complex_field":
        nslices = 1
    elif kind == "spacetime_field":
        nslices = int(header.get("slices", 0))
        if nslices < 2:
            raise FieldFormatError(f"{path}: space-time file needs >= 2 slices")
    else:
        raise FieldFormatError(f"{path}: unknown field kind {kind!r}")

    body = raw[nl + 1 :]
    expected = nslices * count * 2 * _DTYPE.itemsize
    if len(body) < expected:
        raise FieldFormatError(f"{path}: truncated payload ({len(body)} of {expected} bytes)")
    if len(body) > expected:
        raise FieldSizeError(f"{path}: payload has {len(body) - expected} trailing bytes")
    vals = np.frombuffer(body, dtype=_DTYPE).astype(np.float64).view(np.complex128)
    if kind == "complex_field":
        return ComplexField(grid, vals.reshape(grid.shape))
    return SpaceTimeField(grid, float(header["t0"]), float(header["dt"]), vals.reshape((nslices,) + grid.shape))
