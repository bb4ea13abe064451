"""
Consensus scoring on in-memory predictions
==========================================

Builds a tiny two-model ensemble by hand and walks through the pairwise
agreement score and the combined consensus value.
"""

import numpy as np

from mmcm import ConfidenceMap, EnsembleFrame, LabelMap, consensus, pairwise_agreement

# Two 2x2 "segmentations" that agree on three of four pixels.
labels_a = LabelMap(np.array([[1, 1], [2, 3]], dtype=np.uint16))
labels_b = LabelMap(np.array([[1, 2], [2, 3]], dtype=np.uint16))

# Model A is fully confident; model B sits at 0.64 everywhere, so each
# agreeing pixel carries weight sqrt(1.0 * 0.64) = 0.8.
conf_a = ConfidenceMap(np.full((2, 2), 1.0))
conf_b = ConfidenceMap(np.full((2, 2), 0.64))

score = pairwise_agreement((labels_a, conf_a), (labels_b, conf_b))
print(f"pairwise agreement: {score:.6f}")  # 3/4 * 0.8 = 0.6

# The frame-level score folds in the mean confidence: with means 1.0 and
# 0.64 the confidence term is sqrt(0.82), giving 0.6 * sqrt(0.82).
frame = EnsembleFrame("demo", [(labels_a, conf_a), (labels_b, conf_b)])
result = consensus(frame)
print(f"mean agreement:  {result.mean_agreement:.6f}")
print(f"mean confidence: {result.mean_confidence:.6f}")
print(f"consensus score: {result.mmcm:.6f}")

# A third model that always disagrees drags the mean pair score down;
# scores near 0 read as "perceptually complex / models cannot agree".
labels_c = LabelMap(np.array([[9, 9], [9, 9]], dtype=np.uint16))
frame3 = EnsembleFrame(
    "demo3", [(labels_a, conf_a), (labels_b, conf_b), (labels_c, conf_a)]
)
print(f"with a dissenting third model: {consensus(frame3).mmcm:.6f}")
