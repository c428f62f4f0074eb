"""Binary matrix dumps and plain-text spectra.

Matrix file layout (little-endian)::

    bytes 0-7    magic  b"HKLMAT\\0\\0"
    bytes 8-11   uint32 format version
    bytes 12-15  uint32 reserved (0)
    bytes 16-31  uint64 rows, uint64 cols
    then         rows*cols complex128 values, row-major
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from ..errors import InputError

MAGIC = b"HKLMAT\0\0"
VERSION = 1
_HEADER = struct.Struct("<8sII")
_DIMS = struct.Struct("<QQ")


def _atomic_write(path, data: bytes):
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def matrix_bytes(matrix) -> bytes:
    A = np.asarray(getattr(matrix, "matrix", matrix))
    if A.ndim != 2:
        raise InputError("only 2-d matrices can be dumped")
    body = np.ascontiguousarray(A, dtype="<c16").tobytes()
    return _HEADER.pack(MAGIC, VERSION, 0) + _DIMS.pack(*A.shape) + body


def write_matrix(path, matrix):
    _atomic_write(path, matrix_bytes(matrix))


def read_matrix(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size + _DIMS.size:
        raise InputError(f"{path}: truncated header")
    magic, version, _ = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise InputError(f"{path}: not a matrix dump")
    if version != VERSION:
        raise InputError(f"{path}: unsupported dump version {version}")
    rows, cols = _DIMS.unpack_from(data, _HEADER.size)
    offset = _HEADER.size + _DIMS.size
    if len(data) - offset != 16 * rows * cols:
        raise InputError(f"{path}: payload size does not match {rows}x{cols}")
    return np.frombuffer(data, dtype="<c16", offset=offset).reshape(rows, cols).copy()


def spectrum_text(values) -> str:
    return "".join(f"{float(v):.17g}\n" for v in np.asarray(values).ravel())


def write_spectrum(path, values):
    _atomic_write(path, spectrum_text(values).encode("ascii"))


def read_spectrum(path):
    with open(path, encoding="ascii") as fh:
        return np.array([float(line) for line in fh if line.strip()])
