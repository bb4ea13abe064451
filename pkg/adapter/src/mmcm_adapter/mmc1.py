"""Standalone writer/reader for the MMC1 raster container.

The format is deliberately trivial so exporters need no shared library:
16-byte header (magic "MMC1", dtype byte, three zero bytes, width and
height as little-endian uint32) followed by the row-major payload.
dtype 0x01 is uint16 class labels, 0x02 is float32 scalars.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"MMC1"
DTYPE_LABELS = 0x01
DTYPE_SCALAR = 0x02

_HEADER = struct.Struct("<4sB3xII")


def write_labels(values: np.ndarray, path: Path | str) -> None:
    arr = np.ascontiguousarray(values, dtype="<u2")
    _write(arr, DTYPE_LABELS, path)


def write_scalars(values: np.ndarray, path: Path | str) -> None:
    arr = np.ascontiguousarray(values, dtype="<f4")
    _write(arr, DTYPE_SCALAR, path)


def _write(arr: np.ndarray, dtype_code: int, path: Path | str) -> None:
    if arr.ndim != 2:
        raise ValueError(f"raster must be 2-D, got shape {arr.shape}")
    height, width = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, dtype_code, width, height))
        fh.write(arr.tobytes())


def read(path: Path | str) -> np.ndarray:
    """Read any MMC1 file back as a 2-D array (used by the test suite)."""
    data = Path(path).read_bytes()
    magic, dtype_code, width, height = _HEADER.unpack(data[:16])
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    dtype = {DTYPE_LABELS: "<u2", DTYPE_SCALAR: "<f4"}[dtype_code]
    return np.frombuffer(data[16:], dtype=dtype).reshape(height, width)
