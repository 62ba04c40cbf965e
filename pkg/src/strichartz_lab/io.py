"""STRZ field files, JSON reports and CSV tables.

STRZ layout (all little-endian)::

    bytes 0-3   b"STRZ"
    u32         version (1)
    u32         dimension (2)
    u32         n_points
    f64         half_width
    u8          space (0 physical, 1 frequency)
    n^2 x (f64 re, f64 im), row-major, second axis fastest
"""
from __future__ import annotations

import csv
import json
import math
import struct
from pathlib import Path

import numpy as np

from .grid import ComplexField2D, ContractError, Grid2D, Space

__all__ = ["StrzError", "MAGIC", "VERSION", "field_to_bytes", "field_from_bytes", "write_strz", "read_strz",
           "to_jsonable", "dumps_json", "write_json", "write_csv"]

MAGIC = b"STRZ"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdB")


class StrzError(IOError):
    """Malformed or unsupported STRZ data."""


def field_to_bytes(f: ComplexField2D) -> bytes:
    n = f.grid.n_points
    head = _HEADER.pack(MAGIC, VERSION, 2, n, float(f.grid.half_width), int(f.space))
    return head + np.ascontiguousarray(f.samples, dtype="<c16").tobytes()


def field_from_bytes(data: bytes) -> ComplexField2D:
    if len(data) < _HEADER.size:
        raise StrzError("truncated STRZ header")
    magic, version, dim, n, L, space = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise StrzError(f"bad magic {magic!r}")
    if version != VERSION:
        raise StrzError(f"unsupported STRZ version {version}")
    if dim != 2:
        raise StrzError(f"unsupported dimension {dim}")
    if space not in (0, 1):
        raise StrzError(f"bad space tag {space}")
    body = data[_HEADER.size:]
    if len(body) != 16 * n * n:
        raise StrzError(f"payload has {len(body)} bytes, expected {16 * n * n}")
    try:
        grid = Grid2D(int(n), float(L))
        samples = np.frombuffer(body, dtype="<c16").reshape(n, n).astype(np.complex128)
        return ComplexField2D(grid, Space(space), samples)
    except ContractError as exc:
        raise StrzError(str(exc)) from exc


def write_strz(path, f: ComplexField2D) -> Path:
    path = Path(path)
    path.write_bytes(field_to_bytes(f))
    return path


def read_strz(path) -> ComplexField2D:
    return field_from_bytes(Path(path).read_bytes())


def to_jsonable(obj):
    """Convert numpy scalars/arrays, complex numbers and dataclass reports to JSON types."""
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps_json(obj))
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path
