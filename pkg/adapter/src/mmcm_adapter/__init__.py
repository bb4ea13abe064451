"""Prediction exporter producing MMC1 corpora from image folders."""

from .backends import ModelLoadFailure, make_depther, make_segmenter
from .pipeline import (
    AdapterConfig,
    DatasetInput,
    ExportReport,
    ImageDecodeFailure,
    SceneInput,
    discover_datasets,
    export_predictions,
)

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "DatasetInput",
    "ExportReport",
    "ImageDecodeFailure",
    "ModelLoadFailure",
    "SceneInput",
    "discover_datasets",
    "export_predictions",
    "make_depther",
    "make_segmenter",
]
