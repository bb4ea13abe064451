"""Group aggregation, relative perceptual gaps, and linear trend fits.

The relative perceptual gap between two groups is the absolute difference
of their mean consensus scores normalized by the larger mean: a symmetric
value in [0, 1] that is 0 exactly when the means coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateX, EmptyGroup, OutOfRangeMean, TooFewPoints


@dataclass
class ScoreSet:
    """Per-frame consensus scores of one group (scene or dataset) plus their mean."""

    group_id: str
    frame_scores: list[tuple[str, float]]
    mean_mmcm: float


@dataclass
class GapMatrix:
    """Pairwise relative perceptual gaps between row groups and column groups."""

    row_ids: list[str]
    col_ids: list[str]
    values: np.ndarray

    @property
    def is_intra(self) -> bool:
        return self.row_ids == self.col_ids


@dataclass
class TrendFit:
    """Ordinary least squares line plus the sample Pearson correlation."""

    slope: float
    intercept: float
    pearson_r: float
    n: int


def group_mean(group_id: str, scores: list[tuple[str, float]]) -> ScoreSet:
    """Average per-frame scores into a ScoreSet, summing in input order."""
    if not scores:
        raise EmptyGroup(f"group {group_id!r} has no frames")
    total = 0.0
    for _, value in scores:
        total += value
    return ScoreSet(group_id=group_id, frame_scores=list(scores), mean_mmcm=total / len(scores))


def perceptual_gap(mu_a: float, mu_b: float) -> float:
    """Relative perceptual gap |a - b| / max(a, b) for means in [0, 1].

    Defined as 0 when both means are 0 (equal means signal zero gap).
    """
    for value in (mu_a, mu_b):
        if not 0.0 <= value <= 1.0:
            raise OutOfRangeMean(f"mean {value!r} outside [0, 1]")
    top = max(mu_a, mu_b)
    if top == 0.0:
        return 0.0
    return abs(mu_a - mu_b) / top


def gap_matrix(rows: list[ScoreSet], cols: list[ScoreSet]) -> GapMatrix:
    """Pairwise gaps between all row and column groups.

    With identical row and column groups the matrix is symmetric with a
    zero diagonal.
    """
    if not rows or not cols:
        raise EmptyGroup("gap matrix needs at least one row and one column group")
    values = np.zeros((len(rows), len(cols)))
    for i, row in enumerate(rows):
        for j, col in enumerate(cols):
            values[i, j] = perceptual_gap(row.mean_mmcm, col.mean_mmcm)
    return GapMatrix(
        row_ids=[r.group_id for r in rows],
        col_ids=[c.group_id for c in cols],
        values=values,
    )


def aggregate_gaps(matrix: GapMatrix) -> list[tuple[str, float]]:
    """Mean gap per row group, ranked most-dissimilar first.

    For an intra-domain matrix (rows == cols) the structural zero of the
    self pair is excluded from each row's mean. Rows with no off-diagonal
    entries (a 1x1 intra matrix) aggregate to 0. Ties are broken by group
    id, ascending.
    """
    means = []
    for i, row_id in enumerate(matrix.row_ids):
        entries = [
            matrix.values[i, j]
            for j in range(len(matrix.col_ids))
            if not (matrix.is_intra and i == j)
        ]
        means.append((row_id, float(np.mean(entries)) if entries else 0.0))
    return sorted(means, key=lambda item: (-item[1], item[0]))


def trend_fit(points: list[tuple[float, float]]) -> TrendFit:
    """Least-squares line through (x, y) points plus Pearson r.

    Points are sorted by (x, y) before summation so the result does not
    depend on input order. Raises TooFewPoints for n < 2 and DegenerateX
    when every x is equal; a constant y yields r == 0.
    """
    if len(points) < 2:
        raise TooFewPoints(f"trend fit needs >= 2 points, got {len(points)}")
    ordered = sorted(points)
    xs = np.array([p[0] for p in ordered], dtype=np.float64)
    ys = np.array([p[1] for p in ordered], dtype=np.float64)
    x_mean = float(xs.mean())
    y_mean = float(ys.mean())
    dx = xs - x_mean
    dy = ys - y_mean
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    sxy = float(np.dot(dx, dy))
    if sxx == 0.0:
        raise DegenerateX("all x values are equal")
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    pearson = sxy / math.sqrt(sxx * syy) if syy > 0.0 else 0.0
    # floating noise can push |r| a hair past 1 on exactly collinear data
    pearson = min(1.0, max(-1.0, pearson))
    return TrendFit(slope=slope, intercept=intercept, pearson_r=pearson, n=len(points))
