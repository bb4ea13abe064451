"""Depth-derived structural complexity metrics.

Covers the histogram entropy of depth values, Sobel gradient fields, and
the discontinuity ratio (fraction of pixels whose gradient magnitude
exceeds a threshold relative to the scene's depth range).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidBinCount, InvalidTau
from .rasters import DepthMap

# 3x3 gradient kernels, applied as cross-correlations with clamp-to-edge
# padding: SOBEL_X responds positively to depth increasing rightward,
# SOBEL_Y to depth increasing downward.
SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.float64)

DEFAULT_BINS = 256
DEFAULT_TAU = 0.1


@dataclass
class GradientField:
    """Per-pixel gradient components and magnitude of a depth map."""

    width: int
    height: int
    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray


@dataclass
class StructuralResult:
    """Structural complexity summary of one depth map."""

    frame_id: str
    depth_entropy: float
    depth_mean: float
    depth_min: float
    depth_max: float
    discontinuity_ratio: float
    bin_count: int
    tau: float


def _entropy_of(values: np.ndarray, bins: int, lo: float, hi: float) -> float:
    if hi == lo:
        return 0.0
    idx = np.floor((values - lo) / (hi - lo) * bins).astype(np.int64)
    np.clip(idx, 0, bins - 1, out=idx)
    counts = np.bincount(idx, minlength=bins)
    p = counts[counts > 0] / values.size
    return float(-np.sum(p * np.log(p)))


def _gradients_of(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    padded = np.pad(values, 1, mode="edge")
    smooth_v = padded[:-2, :] + 2.0 * padded[1:-1, :] + padded[2:, :]
    gx = smooth_v[:, 2:] - smooth_v[:, :-2]
    smooth_h = padded[:, :-2] + 2.0 * padded[:, 1:-1] + padded[:, 2:]
    gy = smooth_h[2:, :] - smooth_h[:-2, :]
    return gx, gy


def _ratio_of(values: np.ndarray, tau: float, lo: float, hi: float) -> float:
    if hi == lo:
        # gradients of a constant map are exactly zero and the strict
        # comparison against a zero threshold can never hold
        return 0.0
    gx, gy = _gradients_of(values)
    magnitude = np.hypot(gx, gy)
    return float(np.count_nonzero(magnitude > tau * (hi - lo))) / magnitude.size


def depth_entropy(d: DepthMap, bins: int = DEFAULT_BINS) -> float:
    """Shannon entropy (nats) of an equal-width depth histogram.

    Bin index is ``floor((v - min) / (max - min) * bins)`` clamped to the
    last bin, so the maximum falls in bin ``bins - 1``. A constant map has
    a single occupied bin and entropy exactly 0.
    """
    if bins < 1:
        raise InvalidBinCount(f"bins must be >= 1, got {bins}")
    values = np.asarray(d.values, dtype=np.float64).ravel()
    return _entropy_of(values, bins, float(values.min()), float(values.max()))


def sobel_gradients(d: DepthMap) -> GradientField:
    """Horizontal/vertical Sobel responses and their magnitude.

    The kernels are applied in separable form ([1,2,1] smoothing times a
    central difference), which is their exact factorization. Border pixels
    are handled by clamp-to-edge replication, so maps one pixel wide or
    tall get zero gradient along the missing axis.
    """
    values = np.asarray(d.values, dtype=np.float64)
    gx, gy = _gradients_of(values)
    return GradientField(
        width=d.width,
        height=d.height,
        gx=gx,
        gy=gy,
        magnitude=np.hypot(gx, gy),
    )


def discontinuity_ratio(d: DepthMap, tau: float = DEFAULT_TAU) -> float:
    """Fraction of pixels whose gradient magnitude exceeds tau * depth range.

    The comparison is strict, so a constant map (zero range, zero
    gradients) yields exactly 0.
    """
    if not tau > 0:
        raise InvalidTau(f"tau must be > 0, got {tau}")
    values = np.asarray(d.values, dtype=np.float64)
    return _ratio_of(values, tau, float(values.min()), float(values.max()))


def structural_metrics(
    d: DepthMap,
    bins: int = DEFAULT_BINS,
    tau: float = DEFAULT_TAU,
    frame_id: str = "",
) -> StructuralResult:
    """Bundle entropy, mean/min/max depth, and discontinuity ratio."""
    if bins < 1:
        raise InvalidBinCount(f"bins must be >= 1, got {bins}")
    if not tau > 0:
        raise InvalidTau(f"tau must be > 0, got {tau}")
    values = np.asarray(d.values, dtype=np.float64)
    lo = float(values.min())
    hi = float(values.max())
    return StructuralResult(
        frame_id=frame_id,
        depth_entropy=_entropy_of(values.ravel(), bins, lo, hi),
        depth_mean=float(values.mean()),
        depth_min=lo,
        depth_max=hi,
        discontinuity_ratio=_ratio_of(values, tau, lo, hi),
        bin_count=bins,
        tau=tau,
    )
