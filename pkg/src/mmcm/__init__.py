"""Consensus-based perceptual complexity and depth-based structural metrics.

The package scores image corpora from pre-exported model predictions: no
ground-truth labels and no model inference happen here. See the README for
the file formats and the command-line interface.
"""

from .consensus import ConsensusResult, EnsembleFrame, consensus, pairwise_agreement
from .corpus import (
    CorpusScores,
    DatasetEntry,
    FrameEntry,
    FrameScores,
    Manifest,
    SceneEntry,
    ValidationReport,
    filter_manifest,
    load_manifest,
    score_corpus,
    validate_corpus,
)
from .gaps import (
    GapMatrix,
    ScoreSet,
    TrendFit,
    aggregate_gaps,
    gap_matrix,
    group_mean,
    perceptual_gap,
    trend_fit,
)
from .rasters import (
    ConfidenceMap,
    DepthMap,
    LabelMap,
    read_raster,
    write_raster,
)
from .report import ReportBundle, build_bundle, emit_csv, emit_json, render_heatmap, render_scatter
from .structural import (
    GradientField,
    StructuralResult,
    depth_entropy,
    discontinuity_ratio,
    sobel_gradients,
    structural_metrics,
)
from .synthgen import SynthSpec, generate

__version__ = "0.1.0"

__all__ = [
    "ConfidenceMap",
    "ConsensusResult",
    "CorpusScores",
    "DatasetEntry",
    "DepthMap",
    "EnsembleFrame",
    "FrameEntry",
    "FrameScores",
    "GapMatrix",
    "GradientField",
    "LabelMap",
    "Manifest",
    "ReportBundle",
    "SceneEntry",
    "ScoreSet",
    "StructuralResult",
    "SynthSpec",
    "TrendFit",
    "ValidationReport",
    "aggregate_gaps",
    "build_bundle",
    "consensus",
    "depth_entropy",
    "discontinuity_ratio",
    "emit_csv",
    "emit_json",
    "filter_manifest",
    "gap_matrix",
    "generate",
    "group_mean",
    "load_manifest",
    "pairwise_agreement",
    "perceptual_gap",
    "read_raster",
    "render_heatmap",
    "render_scatter",
    "score_corpus",
    "sobel_gradients",
    "structural_metrics",
    "trend_fit",
    "validate_corpus",
    "write_raster",
]
