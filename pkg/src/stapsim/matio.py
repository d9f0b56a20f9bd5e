"""Binary interchange format for complex matrices.

Layout: an 8-byte header of two little-endian uint32 values (rows, columns)
followed by row-major float64 pairs, one (real, imag) pair per element, also
little endian.
"""

import struct
from pathlib import Path

import numpy as np

_HEADER = struct.Struct("<II")


def write_complex_matrix(path, matrix) -> None:
    """Write a complex vector or matrix; 1-D input is stored as a column."""
    data = np.asarray(matrix, dtype=complex)
    if data.ndim == 1:
        data = data.reshape(-1, 1)
    if data.ndim != 2:
        raise ValueError(f"expected a 1-D or 2-D array, got shape {data.shape}")
    rows, cols = data.shape
    interleaved = np.empty(rows * cols * 2, dtype="<f8")
    interleaved[0::2] = data.real.ravel()
    interleaved[1::2] = data.imag.ravel()
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(rows, cols))
        handle.write(interleaved.tobytes())


def read_complex_matrix(path) -> np.ndarray:
    """Read a matrix written by :func:`write_complex_matrix` (always 2-D)."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    rows, cols = _HEADER.unpack_from(raw)
    expected = _HEADER.size + rows * cols * 2 * 8
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    interleaved = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    return (interleaved[0::2] + 1j * interleaved[1::2]).reshape(rows, cols)
