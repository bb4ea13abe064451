"""Naive reference implementations used as independent oracles.

Everything here is deliberately written as plain Python loops (or exact
rational arithmetic) and must stay independent of the library code paths
it checks.
"""

from __future__ import annotations

import math
from fractions import Fraction


def naive_pairwise_agreement(labels_a, conf_a, labels_b, conf_b) -> float:
    """Scalar per-pixel loop over the agreement sum."""
    h = len(labels_a)
    w = len(labels_a[0])
    total = 0.0
    for y in range(h):
        for x in range(w):
            if labels_a[y][x] == labels_b[y][x]:
                total += math.sqrt(float(conf_a[y][x]) * float(conf_b[y][x]))
    return total / (w * h)


def naive_consensus(predictions) -> tuple[float, float, float]:
    """(mean agreement, mean confidence, consensus score) via plain loops.

    ``predictions`` is a list of (labels, confidences) where each raster is
    a nested list indexed [y][x].
    """
    n = len(predictions)
    pair_scores = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            pair_scores.append(
                naive_pairwise_agreement(
                    predictions[i][0], predictions[i][1],
                    predictions[j][0], predictions[j][1],
                )
            )
    mean_agreement = sum(pair_scores) / len(pair_scores)

    conf_means = []
    for _, conf in predictions:
        total = 0.0
        count = 0
        for row in conf:
            for v in row:
                total += float(v)
                count += 1
        conf_means.append(total / count)
    mean_confidence = sum(conf_means) / n
    return mean_agreement, mean_confidence, mean_agreement * math.sqrt(mean_confidence)


SOBEL_X = ((-1, 0, 1), (-2, 0, 2), (-1, 0, 1))
SOBEL_Y = ((-1, -2, -1), (0, 0, 0), (1, 2, 1))


def naive_sobel(depth) -> tuple[list[list[float]], list[list[float]], list[list[float]]]:
    """Per-pixel 3x3 window correlation with clamped (replicated) indices."""
    h = len(depth)
    w = len(depth[0])
    gx = [[0.0] * w for _ in range(h)]
    gy = [[0.0] * w for _ in range(h)]
    mag = [[0.0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            sx = 0.0
            sy = 0.0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    v = float(depth[yy][xx])
                    sx += SOBEL_X[dy + 1][dx + 1] * v
                    sy += SOBEL_Y[dy + 1][dx + 1] * v
            gx[y][x] = sx
            gy[y][x] = sy
            mag[y][x] = math.sqrt(sx * sx + sy * sy)
    return gx, gy, mag


def naive_entropy(depth, bins: int) -> float:
    """Histogram entropy in nats with the closed-top-bin assignment."""
    values = [float(v) for row in depth for v in row]
    lo = min(values)
    hi = max(values)
    if hi == lo:
        return 0.0
    counts = [0] * bins
    for v in values:
        idx = int(math.floor((v - lo) / (hi - lo) * bins))
        counts[min(idx, bins - 1)] += 1
    total = len(values)
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log(p)
    return h


def naive_discontinuity_ratio(depth, tau: float) -> float:
    """Threshold count over the naive gradient magnitude."""
    values = [float(v) for row in depth for v in row]
    threshold = tau * (max(values) - min(values))
    _, _, mag = naive_sobel(depth)
    count = sum(1 for row in mag for m in row if m > threshold)
    return count / len(values)


def exact_trend_fit(points) -> tuple[Fraction, Fraction]:
    """Normal-equation slope and intercept in exact rational arithmetic."""
    n = len(points)
    sx = sum(Fraction(x) for x, _ in points)
    sy = sum(Fraction(y) for _, y in points)
    sxx = sum(Fraction(x) * Fraction(x) for x, _ in points)
    sxy = sum(Fraction(x) * Fraction(y) for x, y in points)
    denom = n * sxx - sx * sx
    slope = (n * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / n
    return slope, intercept


def exact_pearson_r(points) -> float:
    """Sample Pearson correlation via rational sums, returned as float."""
    n = len(points)
    sx = sum(Fraction(x) for x, _ in points)
    sy = sum(Fraction(y) for _, y in points)
    sxx = sum(Fraction(x) * Fraction(x) for x, _ in points)
    syy = sum(Fraction(y) * Fraction(y) for _, y in points)
    sxy = sum(Fraction(x) * Fraction(y) for x, y in points)
    num = n * sxy - sx * sy
    den2 = (n * sxx - sx * sx) * (n * syy - sy * sy)
    if den2 == 0:
        return 0.0
    return float(num) / math.sqrt(float(den2))
