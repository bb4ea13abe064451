"""Manifest-driven corpus organization, validation, and batch scoring.

A manifest is a JSON document describing datasets -> scenes -> frames and
the per-model prediction files of each frame:

    {"version": "1",
     "models": ["model_a", "model_b"],
     "datasets": [
       {"dataset_id": "d", "domain_tag": "real",
        "scenes": [
          {"scene_id": "s",
           "frames": [
             {"frame_id": "f",
              "predictions": [{"labels": "p.labels.mmc1",
                               "confidence": "p.conf.mmc1"}, ...],
              "depth": "p.depth.mmc1"}]}]}]}

The "predictions" array order must match "models". Paths are resolved
relative to the manifest file's directory.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .consensus import ConsensusResult, EnsembleFrame, consensus
from .errors import (
    AllFramesFailed,
    DuplicateId,
    DimensionMismatch,
    MmcmError,
    ModelCountMismatch,
    ParseError,
    SchemaViolation,
)
from .rasters import read_raster, require_same_shape
from .structural import DEFAULT_BINS, DEFAULT_TAU, StructuralResult, structural_metrics

MANIFEST_VERSION = "1"


@dataclass
class PredictionPaths:
    labels: Path
    confidence: Path


@dataclass
class FrameEntry:
    frame_id: str
    predictions: list[PredictionPaths]
    depth: Path | None = None


@dataclass
class SceneEntry:
    scene_id: str
    frames: list[FrameEntry]


@dataclass
class DatasetEntry:
    dataset_id: str
    domain_tag: str
    scenes: list[SceneEntry]


@dataclass
class Manifest:
    version: str
    models: list[str]
    datasets: list[DatasetEntry]
    base_dir: Path

    def frame_count(self) -> int:
        return sum(len(s.frames) for d in self.datasets for s in d.scenes)


@dataclass
class FrameScores:
    """Scores of one frame; structural is present iff the frame had depth."""

    frame_id: str
    consensus: ConsensusResult
    structural: StructuralResult | None = None


@dataclass
class ValidationFailure:
    dataset_id: str
    scene_id: str
    frame_id: str
    model: str
    path: str
    message: str

    def __str__(self) -> str:
        where = f"{self.dataset_id}/{self.scene_id}/{self.frame_id}"
        model = f" model={self.model}" if self.model else ""
        path = f" path={self.path}" if self.path else ""
        return f"{where}{model}{path}: {self.message}"


@dataclass
class ValidationReport:
    frames_checked: int
    files_checked: int
    failures: list[ValidationFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class FrameFailure:
    dataset_id: str
    scene_id: str
    frame_id: str
    message: str


@dataclass
class CorpusScores:
    """Per-frame scores in manifest order, plus isolated per-frame failures."""

    rows: list[tuple[str, str, FrameScores]]
    failures: list[FrameFailure]
    bins: int
    tau: float


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaViolation(message)


def _string_field(obj: dict, key: str, where: str) -> str:
    value = obj.get(key)
    _require(isinstance(value, str) and value != "", f"{where}: {key!r} must be a non-empty string")
    return value


def load_manifest(path: str | os.PathLike) -> Manifest:
    """Parse and structurally validate a manifest; referenced files stay closed."""
    manifest_path = Path(path)
    try:
        text = manifest_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read manifest: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest is not valid JSON: {exc}") from exc

    _require(isinstance(doc, dict), "manifest root must be an object")
    version = doc.get("version")
    _require(version == MANIFEST_VERSION, f"unsupported manifest version {version!r}")

    models = doc.get("models")
    _require(
        isinstance(models, list) and all(isinstance(m, str) for m in models),
        "'models' must be a list of strings",
    )
    _require(len(models) >= 2, f"need >= 2 models, got {len(models)}")
    if len(set(models)) != len(models):
        raise DuplicateId("duplicate model names")

    base_dir = manifest_path.resolve().parent

    datasets_doc = doc.get("datasets")
    _require(isinstance(datasets_doc, list), "'datasets' must be a list")

    datasets: list[DatasetEntry] = []
    seen_datasets: set[str] = set()
    for d in datasets_doc:
        _require(isinstance(d, dict), "dataset entry must be an object")
        dataset_id = _string_field(d, "dataset_id", "dataset")
        if dataset_id in seen_datasets:
            raise DuplicateId(f"duplicate dataset_id {dataset_id!r}")
        seen_datasets.add(dataset_id)
        domain_tag = _string_field(d, "domain_tag", f"dataset {dataset_id!r}")

        scenes_doc = d.get("scenes")
        _require(isinstance(scenes_doc, list), f"dataset {dataset_id!r}: 'scenes' must be a list")
        scenes: list[SceneEntry] = []
        seen_scenes: set[str] = set()
        for s in scenes_doc:
            _require(isinstance(s, dict), "scene entry must be an object")
            scene_id = _string_field(s, "scene_id", f"dataset {dataset_id!r} scene")
            if scene_id in seen_scenes:
                raise DuplicateId(f"duplicate scene_id {scene_id!r} in dataset {dataset_id!r}")
            seen_scenes.add(scene_id)

            frames_doc = s.get("frames")
            where = f"scene {dataset_id}/{scene_id}"
            _require(isinstance(frames_doc, list) and frames_doc, f"{where}: 'frames' must be a non-empty list")
            frames: list[FrameEntry] = []
            seen_frames: set[str] = set()
            for f in frames_doc:
                _require(isinstance(f, dict), f"{where}: frame entry must be an object")
                frame_id = _string_field(f, "frame_id", where)
                if frame_id in seen_frames:
                    raise DuplicateId(f"duplicate frame_id {frame_id!r} in {where}")
                seen_frames.add(frame_id)

                predictions_doc = f.get("predictions")
                _require(
                    isinstance(predictions_doc, list),
                    f"{where}/{frame_id}: 'predictions' must be a list",
                )
                if len(predictions_doc) != len(models):
                    raise ModelCountMismatch(
                        f"{where}/{frame_id}: {len(predictions_doc)} predictions "
                        f"for {len(models)} models"
                    )
                predictions = []
                for p in predictions_doc:
                    _require(isinstance(p, dict), f"{where}/{frame_id}: prediction must be an object")
                    labels = _string_field(p, "labels", f"{where}/{frame_id}")
                    conf = _string_field(p, "confidence", f"{where}/{frame_id}")
                    predictions.append(
                        PredictionPaths(labels=base_dir / labels, confidence=base_dir / conf)
                    )
                depth_doc = f.get("depth")
                depth = None
                if depth_doc is not None:
                    _require(
                        isinstance(depth_doc, str) and depth_doc != "",
                        f"{where}/{frame_id}: 'depth' must be a non-empty string",
                    )
                    depth = base_dir / depth_doc
                frames.append(FrameEntry(frame_id=frame_id, predictions=predictions, depth=depth))
            scenes.append(SceneEntry(scene_id=scene_id, frames=frames))
        datasets.append(DatasetEntry(dataset_id=dataset_id, domain_tag=domain_tag, scenes=scenes))

    return Manifest(version=version, models=models, datasets=datasets, base_dir=base_dir)


def _iter_frames(manifest: Manifest):
    for dataset in manifest.datasets:
        for scene in dataset.scenes:
            for frame in scene.frames:
                yield dataset, scene, frame


def filter_manifest(
    manifest: Manifest,
    dataset_ids: list[str] | None = None,
    scene_ids: list[str] | None = None,
) -> Manifest:
    """Restrict a manifest to exactly matching dataset and/or scene ids.

    Ids must exist (no globbing); unknown ids raise UnknownDataset or
    SchemaViolation for scenes.
    """
    from .errors import UnknownDataset

    if dataset_ids is not None:
        known = {d.dataset_id for d in manifest.datasets}
        missing = set(dataset_ids) - known
        if missing:
            raise UnknownDataset(f"dataset ids not in manifest: {sorted(missing)}")
    if scene_ids is not None:
        known_scenes = {s.scene_id for d in manifest.datasets for s in d.scenes}
        missing = set(scene_ids) - known_scenes
        if missing:
            raise SchemaViolation(f"scene ids not in manifest: {sorted(missing)}")

    datasets = []
    for dataset in manifest.datasets:
        if dataset_ids is not None and dataset.dataset_id not in dataset_ids:
            continue
        scenes = [
            s for s in dataset.scenes if scene_ids is None or s.scene_id in scene_ids
        ]
        if scenes:
            datasets.append(
                DatasetEntry(
                    dataset_id=dataset.dataset_id,
                    domain_tag=dataset.domain_tag,
                    scenes=scenes,
                )
            )
    return Manifest(
        version=manifest.version,
        models=manifest.models,
        datasets=datasets,
        base_dir=manifest.base_dir,
    )


def validate_corpus(manifest: Manifest) -> ValidationReport:
    """Open every referenced raster, collecting all failures instead of stopping."""
    failures: list[ValidationFailure] = []
    frames = 0
    files = 0
    for dataset, scene, frame in _iter_frames(manifest):
        frames += 1
        loaded = []

        def check(kind: str, path: Path, model: str):
            nonlocal files
            files += 1
            try:
                raster = read_raster(path, kind=kind)
            except (MmcmError, OSError) as exc:
                failures.append(
                    ValidationFailure(
                        dataset_id=dataset.dataset_id,
                        scene_id=scene.scene_id,
                        frame_id=frame.frame_id,
                        model=model,
                        path=str(path),
                        message=f"{type(exc).__name__}: {exc}",
                    )
                )
                return
            loaded.append(raster)

        for model, pred in zip(manifest.models, frame.predictions):
            check("labels", pred.labels, model)
            check("confidence", pred.confidence, model)
        if frame.depth is not None:
            check("depth", frame.depth, "")

        try:
            require_same_shape(*loaded)
        except DimensionMismatch as exc:
            failures.append(
                ValidationFailure(
                    dataset_id=dataset.dataset_id,
                    scene_id=scene.scene_id,
                    frame_id=frame.frame_id,
                    model="",
                    path="",
                    message=f"DimensionMismatch: {exc}",
                )
            )
    return ValidationReport(frames_checked=frames, files_checked=files, failures=failures)


def _score_frame(frame: FrameEntry, bins: int, tau: float) -> FrameScores:
    predictions = [
        (read_raster(p.labels, kind="labels"), read_raster(p.confidence, kind="confidence"))
        for p in frame.predictions
    ]
    depth = read_raster(frame.depth, kind="depth") if frame.depth is not None else None
    ensemble = EnsembleFrame(frame_id=frame.frame_id, predictions=predictions, depth=depth)
    scores = consensus(ensemble)
    structural = None
    if depth is not None:
        structural = structural_metrics(depth, bins=bins, tau=tau, frame_id=frame.frame_id)
    return FrameScores(frame_id=frame.frame_id, consensus=scores, structural=structural)


def score_corpus(
    manifest: Manifest,
    bins: int = DEFAULT_BINS,
    tau: float = DEFAULT_TAU,
    workers: int | None = None,
) -> CorpusScores:
    """Score every frame, in parallel, returning rows in manifest order.

    A frame whose rasters are corrupt is recorded as a failure and never
    affects other frames; AllFramesFailed is raised only when no frame at
    all could be scored. The output is byte-for-byte independent of the
    worker count.
    """
    jobs = list(_iter_frames(manifest))
    if workers is None:
        workers = os.cpu_count() or 1
    workers = max(1, min(workers, max(1, len(jobs))))

    outcomes: list[FrameScores | Exception | None] = [None] * len(jobs)

    def run(index: int) -> None:
        _, _, frame = jobs[index]
        try:
            outcomes[index] = _score_frame(frame, bins, tau)
        except (MmcmError, OSError) as exc:
            outcomes[index] = exc

    if workers == 1:
        for i in range(len(jobs)):
            run(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(len(jobs))))

    rows: list[tuple[str, str, FrameScores]] = []
    failures: list[FrameFailure] = []
    for (dataset, scene, frame), outcome in zip(jobs, outcomes):
        if isinstance(outcome, FrameScores):
            rows.append((dataset.dataset_id, scene.scene_id, outcome))
        else:
            failures.append(
                FrameFailure(
                    dataset_id=dataset.dataset_id,
                    scene_id=scene.scene_id,
                    frame_id=frame.frame_id,
                    message=f"{type(outcome).__name__}: {outcome}",
                )
            )
    if jobs and not rows:
        raise AllFramesFailed(f"all {len(jobs)} frames failed to score")
    return CorpusScores(rows=rows, failures=failures, bins=bins, tau=tau)
