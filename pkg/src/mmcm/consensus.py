"""Multi-model consensus scoring for one ensemble frame.

The pairwise agreement between two models is the fraction of pixels on
which they predict the same class, each pixel weighted by the geometric
mean of the two confidences. The frame score combines the mean pairwise
agreement with the square root of the mean model confidence, yielding a
value in [0, 1]: 1 means every model agrees everywhere with confidence 1,
0 means total disagreement or zero confidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewModels
from .rasters import ConfidenceMap, DepthMap, LabelMap, require_same_shape

Prediction = tuple[LabelMap, ConfidenceMap]


@dataclass
class EnsembleFrame:
    """One image's aligned predictions from N models, plus optional depth."""

    frame_id: str
    predictions: list[Prediction]
    depth: DepthMap | None = None

    def validate(self) -> None:
        if len(self.predictions) < 2:
            raise TooFewModels(
                f"frame {self.frame_id!r}: consensus needs >= 2 models, "
                f"got {len(self.predictions)}"
            )
        rasters = [r for pair in self.predictions for r in pair]
        if self.depth is not None:
            rasters.append(self.depth)
        require_same_shape(*rasters)


@dataclass
class ConsensusResult:
    """Consensus scores for one frame.

    ``pairwise_agreement`` is the symmetric N x N matrix of pair scores with
    NaN on the (unused) diagonal; ``mmcm`` equals
    ``mean_agreement * sqrt(mean_confidence)``.
    """

    frame_id: str
    pairwise_agreement: np.ndarray
    mean_agreement: float
    mean_confidence: float
    per_model_mean_confidence: list[float] = field(default_factory=list)
    mmcm: float = 0.0


def pairwise_agreement(a: Prediction, b: Prediction) -> float:
    """Confidence-weighted agreement score between two model predictions.

    Returns ``mean(delta(Sa, Sb) * sqrt(Ca * Cb))`` over all pixels, where
    delta is 1 exactly when the predicted class ids coincide. The result
    lies in [0, 1].
    """
    labels_a, conf_a = a
    labels_b, conf_b = b
    require_same_shape(labels_a, conf_a, labels_b, conf_b)
    return _pair_score(labels_a.values, labels_b.values, conf_a.values, conf_b.values)


def _pair_score(labels_a, labels_b, conf_a, conf_b) -> float:
    # element math in float64 (upcast fused into the multiply), weights
    # zeroed by the agreement mask, then one fixed-order pairwise sum:
    # deterministic for a given frame regardless of worker parallelism
    weights = np.multiply(conf_a, conf_b, dtype=np.float64)
    np.sqrt(weights, out=weights)
    weights *= labels_a == labels_b
    return float(weights.sum()) / weights.size


def consensus(frame: EnsembleFrame) -> ConsensusResult:
    """Score one ensemble frame.

    Mean agreement averages the N*(N-1)/2 unordered pair scores; mean
    confidence averages each model's per-pixel mean confidence. Raises
    TooFewModels for N < 2 and DimensionMismatch for misaligned rasters.
    """
    frame.validate()
    n = len(frame.predictions)
    labels = [p[0].values for p in frame.predictions]
    confs = [p[1].values for p in frame.predictions]

    matrix = np.full((n, n), np.nan)
    pair_sum = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            score = _pair_score(labels[i], labels[j], confs[i], confs[j])
            matrix[i, j] = matrix[j, i] = score
            pair_sum += score

    mean_agreement = pair_sum / (n * (n - 1) / 2)
    per_model = [float(c.mean(dtype=np.float64)) for c in confs]
    mean_confidence = float(np.mean(per_model))
    mmcm = mean_agreement * np.sqrt(mean_confidence)
    return ConsensusResult(
        frame_id=frame.frame_id,
        pairwise_agreement=matrix,
        mean_agreement=mean_agreement,
        mean_confidence=mean_confidence,
        per_model_mean_confidence=per_model,
        mmcm=float(mmcm),
    )
