"""OWTF1 binary array format.

Layout (all little-endian)::

    b"OWTF" 0x01        magic, 5 bytes
    uint32              rank
    uint32 * rank       dims
    float64 * 2 * prod  row-major complex values, interleaved (re, im)

Signals are rank 1, phase fields / operators / weights rank 2, vector fields
rank 3.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError

__all__ = ["MAGIC", "dumps", "loads", "write_array", "read_array"]

MAGIC = b"OWTF\x01"


def dumps(arr) -> bytes:
    arr = np.asarray(arr)
    if arr.ndim < 1:
        raise FormatError("scalars cannot be serialized, use a rank >= 1 array")
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<I", arr.ndim))
    out.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
    out.write(np.ascontiguousarray(arr, dtype="<c16").tobytes())
    return out.getvalue()


def loads(buf: bytes) -> np.ndarray:
    if buf[:5] != MAGIC:
        raise FormatError("not an OWTF1 file (bad magic)")
    if len(buf) < 9:
        raise FormatError("truncated header")
    (rank,) = struct.unpack_from("<I", buf, 5)
    header = 9 + 4 * rank
    if len(buf) < header:
        raise FormatError("truncated dims")
    dims = struct.unpack_from(f"<{rank}I", buf, 9)
    count = int(np.prod(dims, dtype=np.int64))
    if len(buf) != header + 16 * count:
        raise FormatError(f"payload is {len(buf) - header} bytes, expected {16 * count} for dims {dims}")
    data = np.frombuffer(buf, dtype="<c16", count=count, offset=header)
    return data.astype(np.complex128).reshape(dims)


def write_array(path, arr) -> None:
    Path(path).write_bytes(dumps(arr))


def read_array(path) -> np.ndarray:
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return loads(buf)
