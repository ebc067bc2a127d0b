"""LRJS binary matrix files.

Layout (all little-endian)::

    offset  size  field
    0       4     magic b"LRJS"
    4       2     format version (uint16, currently 1)
    6       1     dtype code (0 = float64, 1 = complex128 interleaved re/im)
    7       8     rows (uint64)
    15      8     cols (uint64)
    23      ...   row-major payload

Round trips are bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"LRJS"
VERSION = 1
HEADER = struct.Struct("<4sHBQQ")
HEADER_SIZE = HEADER.size  # 23

_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<c16")}


class LrjsFormatError(ValueError):
    """Malformed LRJS file."""


class BadMagicError(LrjsFormatError):
    pass


class UnsupportedVersionError(LrjsFormatError):
    pass


class TruncatedPayloadError(LrjsFormatError):
    pass


def encode_matrix(m) -> bytes:
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if np.iscomplexobj(a):
        code, a = 1, a.astype("<c16")
    else:
        code, a = 0, a.astype("<f8")
    if not np.all(np.isfinite(a)):
        raise ValueError("refusing to write non-finite entries")
    rows, cols = a.shape
    return HEADER.pack(MAGIC, VERSION, code, rows, cols) + np.ascontiguousarray(a).tobytes()


def decode_matrix(buf: bytes) -> np.ndarray:
    if bytes(buf[:4]) != MAGIC:
        raise BadMagicError(f"bad magic {bytes(buf[:4])!r}, expected {MAGIC!r}")
    if len(buf) < HEADER_SIZE:
        raise TruncatedPayloadError(f"header truncated ({len(buf)} of {HEADER_SIZE} bytes)")
    _, version, code, rows, cols = HEADER.unpack_from(buf)
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported LRJS version {version}")
    if code not in _DTYPES:
        raise LrjsFormatError(f"unknown dtype code {code}")
    dtype = _DTYPES[code]
    need = rows * cols * dtype.itemsize
    have = len(buf) - HEADER_SIZE
    if have < need:
        raise TruncatedPayloadError(
            f"payload has {have} bytes, header ({rows}x{cols}) requires {need}"
        )
    if have > need:
        raise LrjsFormatError(f"{have - need} trailing bytes after payload")
    out = np.frombuffer(buf, dtype=dtype, count=rows * cols, offset=HEADER_SIZE)
    return out.reshape(rows, cols).astype(dtype.newbyteorder("="))


def write_matrix(path, m) -> None:
    data = encode_matrix(m)
    with open(path, "wb") as fh:
        fh.write(data)


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_matrix(fh.read())
