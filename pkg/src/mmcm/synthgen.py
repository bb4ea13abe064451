"""Synthetic ensemble corpora with analytically known scores.

Generated corpora serve as ground truth for the scoring pipeline: every
model pair agrees on an exact, seed-chosen pixel subset, confidence is a
global constant, and the resulting consensus score has the closed form
``agreement * c * sqrt(c)``. The expectation is written next to the corpus
as ``expected.json``.

Randomness comes from numpy's PCG64 generator seeded through
``SeedSequence(entropy=seed, spawn_key=(scene_index, frame_index))``, so a
spec plus seed pins every output byte.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Manifest, load_manifest
from .errors import UnrealizableAgreement
from .rasters import ConfidenceMap, DepthMap, LabelMap, write_raster

DEPTH_PATTERNS = ("constant", "step-edge", "gradient-ramp", "uniform-random")

CONSTANT_DEPTH_VALUE = 1.0


@dataclass
class SynthSpec:
    """Parameters of a synthetic corpus."""

    width: int
    height: int
    n_models: int
    target_pair_agreement: float
    confidence_value: float
    depth_pattern: str
    seed: int
    n_scenes: int = 1
    frames_per_scene: int = 3
    class_count: int = 19
    dataset_id: str = "synthetic"
    domain_tag: str = "synthetic"

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"size must be >= 1x1, got {self.width}x{self.height}")
        if self.n_models < 2:
            raise ValueError(f"need >= 2 models, got {self.n_models}")
        if not 0.0 <= self.target_pair_agreement <= 1.0:
            raise ValueError(f"target_pair_agreement outside [0, 1]: {self.target_pair_agreement}")
        if not 0.0 <= self.confidence_value <= 1.0:
            raise ValueError(f"confidence_value outside [0, 1]: {self.confidence_value}")
        if self.depth_pattern not in DEPTH_PATTERNS:
            raise ValueError(f"depth_pattern must be one of {DEPTH_PATTERNS}")
        if self.seed < 0 or self.seed > 0xFFFFFFFFFFFFFFFF:
            raise ValueError("seed must fit in unsigned 64 bits")
        if self.n_scenes < 1 or self.frames_per_scene < 1:
            raise ValueError("need >= 1 scene and >= 1 frame per scene")
        if self.class_count < 1:
            raise ValueError(f"class_count must be >= 1, got {self.class_count}")
        if self.n_models > self.class_count:
            raise UnrealizableAgreement(
                f"{self.n_models} mutually disagreeing models need >= {self.n_models} "
                f"class ids, got {self.class_count}"
            )


def spec_from_dict(doc: dict) -> SynthSpec:
    """Build a SynthSpec from parsed JSON, rejecting unknown keys."""
    if not isinstance(doc, dict):
        raise ValueError("synth spec must be a JSON object")
    fields = {f for f in SynthSpec.__dataclass_fields__}
    unknown = set(doc) - fields
    if unknown:
        raise ValueError(f"unknown synth spec keys: {sorted(unknown)}")
    missing = {
        "width", "height", "n_models", "target_pair_agreement",
        "confidence_value", "depth_pattern", "seed",
    } - set(doc)
    if missing:
        raise ValueError(f"missing synth spec keys: {sorted(missing)}")
    try:
        spec = SynthSpec(**doc)
    except TypeError as exc:
        raise ValueError(f"bad synth spec: {exc}") from exc
    spec.validate()
    return spec


def _frame_rng(seed: int, scene_index: int, frame_index: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(scene_index, frame_index))
    return np.random.Generator(np.random.PCG64(sequence))


def _depth_values(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    h, w = spec.height, spec.width
    if spec.depth_pattern == "constant":
        return np.full((h, w), CONSTANT_DEPTH_VALUE, dtype=np.float32)
    if spec.depth_pattern == "step-edge":
        values = np.zeros((h, w), dtype=np.float32)
        values[:, w // 2 :] = 1.0
        return values
    if spec.depth_pattern == "gradient-ramp":
        return np.tile(np.arange(w, dtype=np.float32), (h, 1))
    return rng.random(size=(h, w), dtype=np.float32)


def expected_scores(spec: SynthSpec) -> dict:
    """Closed-form expectations for a spec, as stored in expected.json.

    The analytic confidence constant is the float32 value actually written
    to disk, so the expectation is exact for the generated files.
    """
    pixels = spec.width * spec.height
    agree_count = round(spec.target_pair_agreement * pixels)
    rho = agree_count / pixels
    c = float(np.float32(spec.confidence_value))
    expected = {
        "dataset_id": spec.dataset_id,
        "width": spec.width,
        "height": spec.height,
        "n_models": spec.n_models,
        "class_count": spec.class_count,
        "depth_pattern": spec.depth_pattern,
        "requested_pair_agreement": spec.target_pair_agreement,
        "realized_pair_agreement": rho,
        "confidence_value": c,
        "expected_mean_agreement": rho * c,
        "expected_mean_confidence": c,
        "expected_mmcm": rho * c * math.sqrt(c),
    }
    if spec.depth_pattern == "constant":
        expected["structural"] = {
            "depth_entropy": 0.0,
            "discontinuity_ratio": 0.0,
            "depth_mean": CONSTANT_DEPTH_VALUE,
        }
    elif spec.depth_pattern == "step-edge" and spec.width >= 2:
        p_low = (spec.width // 2) / spec.width
        p_high = 1.0 - p_low
        expected["structural"] = {
            "depth_entropy": -(p_low * math.log(p_low) + p_high * math.log(p_high)),
            # the two columns flanking the edge carry gradient magnitude 4
            "discontinuity_ratio": 2.0 / spec.width,
            "discontinuity_valid_below_tau": 4.0,
            "depth_mean": p_high,
        }
    return expected


def generate(spec: SynthSpec, out_dir: str | os.PathLike) -> Manifest:
    """Write a synthetic corpus (rasters, manifest.json, expected.json).

    Every unordered model pair agrees on exactly ``round(rho * pixels)``
    pixels per frame: disagreement positions come from a seeded shuffle, and
    disagreeing model ``i`` shifts the base class id by ``i`` modulo the
    class count, which keeps all models mutually distinct there.
    """
    spec.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    pixels = spec.width * spec.height
    agree_count = round(spec.target_pair_agreement * pixels)
    disagree_count = pixels - agree_count
    conf = ConfidenceMap(np.full((spec.height, spec.width), spec.confidence_value, dtype=np.float32))
    model_names = [f"model_{i:02d}" for i in range(spec.n_models)]

    datasets_doc = {
        "dataset_id": spec.dataset_id,
        "domain_tag": spec.domain_tag,
        "scenes": [],
    }
    for si in range(spec.n_scenes):
        scene_id = f"scene_{si:03d}"
        scene_dir = out / scene_id
        scene_dir.mkdir(exist_ok=True)
        frames_doc = []
        for fi in range(spec.frames_per_scene):
            frame_id = f"frame_{fi:04d}"
            rng = _frame_rng(spec.seed, si, fi)
            base = rng.integers(0, spec.class_count, size=(spec.height, spec.width), dtype=np.uint16)
            disagree = rng.permutation(pixels)[:disagree_count]

            predictions_doc = []
            for mi, model in enumerate(model_names):
                labels = base.copy()
                if mi > 0 and disagree_count:
                    flat = labels.ravel()
                    flat[disagree] = (flat[disagree] + mi) % spec.class_count
                stem = f"{frame_id}.{model}"
                labels_path = scene_dir / f"{stem}.labels.mmc1"
                conf_path = scene_dir / f"{stem}.conf.mmc1"
                write_raster(LabelMap(labels), labels_path)
                write_raster(conf, conf_path)
                predictions_doc.append(
                    {
                        "labels": labels_path.relative_to(out).as_posix(),
                        "confidence": conf_path.relative_to(out).as_posix(),
                    }
                )

            depth_path = scene_dir / f"{frame_id}.depth.mmc1"
            write_raster(DepthMap(_depth_values(spec, rng)), depth_path)
            frames_doc.append(
                {
                    "frame_id": frame_id,
                    "predictions": predictions_doc,
                    "depth": depth_path.relative_to(out).as_posix(),
                }
            )
        datasets_doc["scenes"].append({"scene_id": scene_id, "frames": frames_doc})

    manifest_doc = {"version": "1", "models": model_names, "datasets": [datasets_doc]}
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "expected.json").write_text(
        json.dumps(expected_scores(spec), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return load_manifest(manifest_path)
