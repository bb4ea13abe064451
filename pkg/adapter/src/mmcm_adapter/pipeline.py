"""Export pipeline: image folders -> aligned MMC1 prediction corpus.

Per image and segmentation model the pipeline emits a class-id raster and
a confidence raster; per image it emits one raw depth raster. Images are
resized to the target resolution before inference (bilinear), model score
maps are resized to the target resolution (bilinear) and only then turned
into probabilities, so labels and confidences are derived after the
resize. Confidence is the probability of the predicted class, i.e. the
per-pixel max of the softmax.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image, UnidentifiedImageError

from . import mmc1
from .backends import DepthBackend, SegmentationBackend, make_depther, make_segmenter

# instrument trio used for aerial-corpus studies, plus a foundation depth model
DEFAULT_SEGMENTATION_MODELS = (
    "hf:facebook/mask2former-swin-large-cityscapes-semantic",
    "hf:shi-labs/oneformer_cityscapes_swin_large",
    "hf:nvidia/segformer-b2-finetuned-cityscapes-1024-1024",
)
DEFAULT_DEPTH_MODEL = "hf:depth-anything/Depth-Anything-V2-Small-hf"

DEFAULT_WIDTH = 960
DEFAULT_HEIGHT = 540

IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".webp", ".tif", ".tiff"}


class ImageDecodeFailure(Exception):
    """An input image could not be decoded."""


@dataclass
class SceneInput:
    scene_id: str
    image_dir: Path


@dataclass
class DatasetInput:
    dataset_id: str
    domain_tag: str
    scenes: list[SceneInput]


@dataclass
class AdapterConfig:
    datasets: list[DatasetInput]
    out_dir: Path
    segmentation_models: list[str] = field(
        default_factory=lambda: list(DEFAULT_SEGMENTATION_MODELS)
    )
    depth_model: str | None = DEFAULT_DEPTH_MODEL
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    device: str = "cpu"
    normalized_depth: bool = False

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"target resolution must be positive, got {self.width}x{self.height}")
        if len(self.segmentation_models) < 2:
            raise ValueError(
                f"need >= 2 segmentation models, got {len(self.segmentation_models)}"
            )
        if len(set(self.segmentation_models)) != len(self.segmentation_models):
            raise ValueError("segmentation model identifiers must be unique")
        if not self.datasets:
            raise ValueError("no input datasets")


@dataclass
class SkippedImage:
    path: str
    reason: str


@dataclass
class ExportReport:
    manifest_path: Path
    frames_exported: int
    files_written: int
    skipped: list[SkippedImage] = field(default_factory=list)


def load_image(path: Path) -> torch.Tensor:
    """Decode an image file into a CHW float tensor in [0, 1]."""
    try:
        with Image.open(path) as img:
            rgb = np.array(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageDecodeFailure(f"{path}: {exc}") from exc
    return torch.from_numpy(rgb).permute(2, 0, 1).to(torch.float32) / 255.0


def _resize(tensor: torch.Tensor, height: int, width: int) -> torch.Tensor:
    """Bilinear resize of a (C, h, w) tensor to (C, height, width)."""
    return F.interpolate(
        tensor.unsqueeze(0).to(torch.float32),
        size=(height, width),
        mode="bilinear",
        align_corners=False,
    )[0]


def predict_frame(
    image: torch.Tensor, backend: SegmentationBackend, height: int, width: int
) -> tuple[np.ndarray, np.ndarray]:
    """(labels uint16, confidence float32) for one model on a resized image."""
    scores = backend.predict_scores(image)
    scores = _resize(scores, height, width)
    if backend.scores_are_probabilities:
        probs = scores / scores.sum(dim=0, keepdim=True).clamp_min(1e-12)
    else:
        probs = F.softmax(scores, dim=0)
    confidence, labels = torch.max(probs, dim=0)
    return (
        labels.numpy().astype(np.uint16),
        confidence.to(torch.float32).numpy(),
    )


def predict_depth(
    image: torch.Tensor, backend: DepthBackend, height: int, width: int
) -> np.ndarray:
    """Raw (model-native units) float32 depth resized to the target."""
    depth = backend.predict_depth(image)
    depth = _resize(depth.unsqueeze(0), height, width)[0]
    return depth.to(torch.float32).numpy()


def _list_images(directory: Path) -> list[Path]:
    return sorted(
        p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )


def export_predictions(config: AdapterConfig) -> ExportReport:
    """Run all models over the configured folders and write the corpus.

    Undecodable images are skipped and recorded; model construction
    failures abort the export (ModelLoadFailure).
    """
    config.validate()
    segmenters = [make_segmenter(m, config.device) for m in config.segmentation_models]
    depther = make_depther(config.depth_model, config.device) if config.depth_model else None

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    skipped: list[SkippedImage] = []
    frames_exported = 0
    files_written = 0

    datasets_doc = []
    for dataset in config.datasets:
        scenes_doc = []
        for scene in dataset.scenes:
            scene_dir = out / dataset.dataset_id / scene.scene_id
            scene_dir.mkdir(parents=True, exist_ok=True)
            frames_doc = []
            seen_ids: set[str] = set()
            for image_path in _list_images(scene.image_dir):
                try:
                    image = load_image(image_path)
                except ImageDecodeFailure as exc:
                    skipped.append(SkippedImage(path=str(image_path), reason=str(exc)))
                    continue
                image = _resize(image, config.height, config.width)

                frame_id = image_path.stem
                if frame_id in seen_ids:
                    n = 2
                    while f"{frame_id}_{n}" in seen_ids:
                        n += 1
                    frame_id = f"{frame_id}_{n}"
                seen_ids.add(frame_id)

                predictions_doc = []
                for model_id, backend in zip(config.segmentation_models, segmenters):
                    labels, confidence = predict_frame(
                        image, backend, config.height, config.width
                    )
                    stem = f"{frame_id}.{_slug(model_id)}"
                    labels_path = scene_dir / f"{stem}.labels.mmc1"
                    conf_path = scene_dir / f"{stem}.conf.mmc1"
                    mmc1.write_labels(labels, labels_path)
                    mmc1.write_scalars(confidence, conf_path)
                    files_written += 2
                    predictions_doc.append(
                        {
                            "labels": labels_path.relative_to(out).as_posix(),
                            "confidence": conf_path.relative_to(out).as_posix(),
                        }
                    )

                frame_doc = {"frame_id": frame_id, "predictions": predictions_doc}
                if depther is not None:
                    depth = predict_depth(image, depther, config.height, config.width)
                    depth_path = scene_dir / f"{frame_id}.depth.mmc1"
                    mmc1.write_scalars(depth, depth_path)
                    files_written += 1
                    frame_doc["depth"] = depth_path.relative_to(out).as_posix()
                    if config.normalized_depth:
                        span = float(depth.max()) - float(depth.min())
                        norm = (
                            (depth - depth.min()) / span * 255.0
                            if span > 0
                            else np.zeros_like(depth)
                        )
                        mmc1.write_scalars(norm, scene_dir / f"{frame_id}.depthnorm.mmc1")
                        files_written += 1
                frames_doc.append(frame_doc)
                frames_exported += 1
            if frames_doc:
                scenes_doc.append({"scene_id": scene.scene_id, "frames": frames_doc})
            else:
                skipped.append(
                    SkippedImage(
                        path=str(scene.image_dir),
                        reason=f"scene {scene.scene_id!r} produced no frames",
                    )
                )
        if scenes_doc:
            datasets_doc.append(
                {
                    "dataset_id": dataset.dataset_id,
                    "domain_tag": dataset.domain_tag,
                    "scenes": scenes_doc,
                }
            )

    manifest_doc = {
        "version": "1",
        "models": list(config.segmentation_models),
        "datasets": datasets_doc,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    report = ExportReport(
        manifest_path=manifest_path,
        frames_exported=frames_exported,
        files_written=files_written,
        skipped=skipped,
    )
    (out / "export_report.json").write_text(
        json.dumps(
            {
                "frames_exported": report.frames_exported,
                "files_written": report.files_written,
                "skipped": [{"path": s.path, "reason": s.reason} for s in skipped],
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    return report


def _slug(text: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in text)


def discover_datasets(root: Path, domain_tag: str) -> list[DatasetInput]:
    """Interpret a two-level directory tree as dataset/scene image folders."""
    root = Path(root)
    if not root.is_dir():
        raise ValueError(f"{root}: not a directory")
    datasets = []
    for dataset_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        scenes = [
            SceneInput(scene_id=scene_dir.name, image_dir=scene_dir)
            for scene_dir in sorted(p for p in dataset_dir.iterdir() if p.is_dir())
        ]
        if scenes:
            datasets.append(
                DatasetInput(dataset_id=dataset_dir.name, domain_tag=domain_tag, scenes=scenes)
            )
    if not datasets:
        raise ValueError(
            f"{root}: expected <dataset>/<scene>/<images> directories with at least one scene"
        )
    return datasets
