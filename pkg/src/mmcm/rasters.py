"""Raster value types and the MMC1 binary container.

MMC1 layout (all integers little-endian, independent of host byte order):

    bytes 0-3    magic "MMC1"
    byte  4      dtype code: 0x01 = uint16 labels, 0x02 = float32 scalar
    bytes 5-7    reserved, must be zero
    bytes 8-11   width,  uint32
    bytes 12-15  height, uint32
    bytes 16-    payload, width*height samples, row-major, top-left origin,
                 uncompressed

Conventional file names are ``*.labels.mmc1``, ``*.conf.mmc1`` and
``*.depth.mmc1``; the extension only hints at how a float32 payload should
be validated (confidence is range-checked, depth is not). The header always
governs the payload dtype.

In memory, scalar rasters preserve the float precision they were built
with (float32 when read from a file, float64 for arrays constructed in
code); all metric arithmetic upcasts to float64. Files store float32.
Writing quantizes to float32, therefore write-then-read is the identity
exactly for float32-representable values, which includes every raster the
toolkit itself reads or produces.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadMagic,
    DimensionMismatch,
    NonFiniteValue,
    OutOfRangeConfidence,
    TruncatedPayload,
    OversizedPayload,
    UnknownDtype,
)

MAGIC = b"MMC1"
DTYPE_LABELS = 0x01
DTYPE_SCALAR = 0x02
HEADER_SIZE = 16

_HEADER = struct.Struct("<4sB3xII")

# numpy dtypes pinned to little-endian so files are host-independent
_U16 = np.dtype("<u2")
_F32 = np.dtype("<f4")


def _check_2d(values: np.ndarray) -> None:
    if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
        raise ValueError(f"raster must be 2-D and non-empty, got shape {values.shape}")


def _as_float(values) -> np.ndarray:
    """Coerce to float32 or float64, keeping float32 input unconverted."""
    arr = np.asarray(values)
    if arr.dtype not in (np.float32, np.float64):
        arr = arr.astype(np.float64)
    return arr


@dataclass(eq=False)
class LabelMap:
    """Per-pixel class ids from one segmentation model, shape (height, width)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values)
        _check_2d(arr)
        if arr.dtype != _U16:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"labels must be integers, got {arr.dtype}")
            if arr.size and (arr.min() < 0 or arr.max() > 0xFFFF):
                raise ValueError("label ids must fit in unsigned 16 bits")
            arr = arr.astype(_U16)
        self.values = arr
        self.validate()

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def validate(self) -> None:
        _check_2d(self.values)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LabelMap)
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )


@dataclass(eq=False)
class ConfidenceMap:
    """Per-pixel model confidence in [0, 1], shape (height, width)."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_float(self.values)
        _check_2d(arr)
        self.values = arr
        self.validate()

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def validate(self) -> None:
        _check_2d(self.values)
        if not np.isfinite(self.values).all():
            raise NonFiniteValue("confidence map contains NaN or infinity")
        if self.values.min() < 0.0 or self.values.max() > 1.0:
            raise OutOfRangeConfidence("confidence values must lie in [0, 1]")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConfidenceMap)
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )


@dataclass(eq=False)
class DepthMap:
    """Per-pixel scalar depth (unit-agnostic), shape (height, width)."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_float(self.values)
        _check_2d(arr)
        self.values = arr
        self.validate()

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def validate(self) -> None:
        _check_2d(self.values)
        if not np.isfinite(self.values).all():
            raise NonFiniteValue("depth map contains NaN or infinity")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DepthMap)
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )


Raster = LabelMap | ConfidenceMap | DepthMap

_KIND_BY_SUFFIX = {
    ".labels.mmc1": "labels",
    ".conf.mmc1": "confidence",
    ".depth.mmc1": "depth",
}


def kind_from_path(path: str | os.PathLike) -> str | None:
    """Return 'labels' / 'confidence' / 'depth' from the conventional extension."""
    name = os.fspath(path).lower()
    for suffix, kind in _KIND_BY_SUFFIX.items():
        if name.endswith(suffix):
            return kind
    return None


def require_same_shape(*rasters: Raster) -> None:
    """Raise DimensionMismatch unless all rasters share one width x height."""
    shapes = {r.values.shape for r in rasters}
    if len(shapes) > 1:
        raise DimensionMismatch(f"aligned rasters differ in shape: {sorted(shapes)}")


def read_raster(path: str | os.PathLike, kind: str | None = None) -> Raster:
    """Read an MMC1 file and return the matching raster type.

    ``kind`` selects how a float32 payload is validated ('confidence' or
    'depth'); when omitted it is inferred from the conventional extension,
    falling back to depth (no range check). A uint16 payload is always a
    LabelMap. Requesting a kind the header's dtype cannot satisfy raises
    UnknownDtype.
    """
    if kind not in (None, "labels", "confidence", "depth"):
        raise ValueError(f"unknown raster kind {kind!r}")
    with open(path, "rb") as fh:
        header = fh.read(HEADER_SIZE)
        if len(header) < HEADER_SIZE:
            raise TruncatedPayload(f"{path}: file shorter than the 16-byte header")
        magic, dtype_code, width, height = _HEADER.unpack(header)
        if magic != MAGIC:
            raise BadMagic(f"{path}: bad magic {magic!r}")
        if dtype_code not in (DTYPE_LABELS, DTYPE_SCALAR):
            raise UnknownDtype(f"{path}: unknown dtype code {dtype_code:#04x}")
        if width < 1 or height < 1:
            raise TruncatedPayload(f"{path}: degenerate dimensions {width}x{height}")

        dtype = _U16 if dtype_code == DTYPE_LABELS else _F32
        expected = width * height * dtype.itemsize
        payload = fh.read(expected + 1)
        if len(payload) < expected:
            raise TruncatedPayload(
                f"{path}: payload has {len(payload)} bytes, expected {expected}"
            )
        if len(payload) > expected:
            raise OversizedPayload(f"{path}: trailing bytes after the payload")

    # read-only view over the payload bytes; rasters are value types, so no
    # copy is needed (mutation-minded callers can copy explicitly)
    raw = np.frombuffer(payload, dtype=dtype).reshape(height, width)

    if dtype_code == DTYPE_LABELS:
        if kind in ("confidence", "depth"):
            raise UnknownDtype(f"{path}: label payload cannot be read as {kind}")
        return LabelMap(raw)
    values = raw

    if kind == "labels":
        raise UnknownDtype(f"{path}: float payload cannot be read as labels")
    if kind is None:
        kind = kind_from_path(path) or "depth"
    if kind == "confidence":
        return ConfidenceMap(values)
    return DepthMap(values)


def write_raster(raster: Raster, path: str | os.PathLike) -> None:
    """Write a raster as MMC1.

    Scalar payloads are stored as float32; write-then-read is bit-exact
    whenever the in-memory values are float32-representable (always the
    case for rasters that came from a file). Values beyond float32 range
    are rejected rather than silently turned into infinities.
    """
    raster.validate()
    if isinstance(raster, LabelMap):
        dtype_code = DTYPE_LABELS
        payload_arr = np.ascontiguousarray(raster.values, dtype=_U16)
    elif isinstance(raster, (ConfidenceMap, DepthMap)):
        dtype_code = DTYPE_SCALAR
        with np.errstate(over="ignore"):
            payload_arr = np.ascontiguousarray(raster.values, dtype=_F32)
        if not np.isfinite(payload_arr).all():
            raise NonFiniteValue("depth value exceeds float32 range")
    else:
        raise TypeError(f"not a raster: {type(raster).__name__}")
    header = _HEADER.pack(MAGIC, dtype_code, raster.width, raster.height)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload_arr.tobytes())
