"""Model backends: dense per-class scores and depth from an RGB image.

Backends are selected by identifier:

- ``conv:<name>``: a small randomly initialized convolutional network,
  seeded from the name. Untrained, but a real inference path with the
  same output contract as a pretrained checkpoint; useful for pipeline
  validation and tests without downloading weights.
- ``hf:<repo_id>``: a Hugging Face semantic segmentation checkpoint
  with dense logits (SegFormer-style heads), or a monocular depth
  checkpoint for the depth role. Requires the ``transformers`` extra and
  downloaded weights.
"""

from __future__ import annotations

import zlib

import torch
from torch import nn


class ModelLoadFailure(Exception):
    """A backend could not be constructed or its weights could not load."""


class SegmentationBackend:
    """Produces per-class score maps for an image.

    ``predict_scores`` returns a float32 tensor of shape (classes, h, w)
    at the model's native output resolution. ``scores_are_probabilities``
    tells the pipeline whether the maps are already normalized per pixel
    (True) or are logits to be softmaxed after resizing (False).
    """

    name: str
    scores_are_probabilities = False

    def predict_scores(self, image: torch.Tensor) -> torch.Tensor:
        raise NotImplementedError


class DepthBackend:
    """Produces a single-channel relative depth map for an image."""

    name: str

    def predict_depth(self, image: torch.Tensor) -> torch.Tensor:
        raise NotImplementedError


def _seed_for(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def _init(module: nn.Module, seed: int) -> None:
    generator = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for p in module.parameters():
            p.copy_(torch.randn(p.shape, generator=generator) * 0.4)


class ConvSegmenter(SegmentationBackend):
    """Seeded random conv net emitting class logits at 1/8 resolution."""

    def __init__(self, name: str, n_classes: int = 19):
        self.name = name
        self.n_classes = n_classes
        self.net = nn.Sequential(
            nn.Conv2d(3, 16, kernel_size=5, stride=4, padding=2),
            nn.Tanh(),
            nn.Conv2d(16, 32, kernel_size=3, stride=2, padding=1),
            nn.Tanh(),
            nn.Conv2d(32, n_classes, kernel_size=1),
        )
        _init(self.net, _seed_for(name))
        self.net.eval()

    @torch.no_grad()
    def predict_scores(self, image: torch.Tensor) -> torch.Tensor:
        return self.net(image.unsqueeze(0))[0]


class ConvDepther(DepthBackend):
    """Seeded random conv net emitting relative depth at 1/8 resolution."""

    def __init__(self, name: str):
        self.name = name
        self.net = nn.Sequential(
            nn.Conv2d(3, 8, kernel_size=7, stride=8, padding=3),
            nn.Tanh(),
            nn.Conv2d(8, 1, kernel_size=1),
        )
        _init(self.net, _seed_for(name))
        self.net.eval()

    @torch.no_grad()
    def predict_depth(self, image: torch.Tensor) -> torch.Tensor:
        return self.net(image.unsqueeze(0))[0, 0] * 100.0 + 150.0


class HfSegmenter(SegmentationBackend):
    """Hugging Face segmentation checkpoint.

    Dense-logits heads (SegFormer-style) yield logits that the pipeline
    softmaxes after resizing. Mask-query heads (Mask2Former, OneFormer)
    yield per-class probability maps composed from class and mask
    predictions, which the pipeline renormalizes per pixel instead.
    """

    def __init__(self, repo_id: str, device: str = "cpu"):
        self.name = f"hf:{repo_id}"
        self.device = device
        try:
            from transformers import AutoImageProcessor, AutoModelForSemanticSegmentation

            self.processor = AutoImageProcessor.from_pretrained(repo_id)
            try:
                self.model = AutoModelForSemanticSegmentation.from_pretrained(repo_id)
                self.scores_are_probabilities = False
            except ValueError:
                from transformers import AutoModelForUniversalSegmentation

                self.model = AutoModelForUniversalSegmentation.from_pretrained(repo_id)
                self.scores_are_probabilities = True
        except Exception as exc:
            raise ModelLoadFailure(f"cannot load segmentation model {repo_id!r}: {exc}") from exc
        self.model.to(device).eval()

    def _prepare(self, image: torch.Tensor):
        # processors expect HWC uint8-like input; OneFormer also needs a task
        pixels = (image.permute(1, 2, 0) * 255).to(torch.uint8).numpy()
        kwargs = {"images": pixels, "return_tensors": "pt"}
        if type(self.processor).__name__.startswith("OneFormer"):
            kwargs["task_inputs"] = ["semantic"]
        return self.processor(**kwargs).to(self.device)

    @torch.no_grad()
    def predict_scores(self, image: torch.Tensor) -> torch.Tensor:
        out = self.model(**self._prepare(image))
        if not self.scores_are_probabilities:
            return out.logits[0].cpu()
        # compose semantic class maps from query class and mask predictions
        class_probs = out.class_queries_logits.softmax(dim=-1)[..., :-1]  # (B, Q, K)
        mask_probs = out.masks_queries_logits.sigmoid()  # (B, Q, h, w)
        scores = torch.einsum("bqc,bqhw->bchw", class_probs, mask_probs)
        return scores[0].cpu()


class HfDepther(DepthBackend):
    """Hugging Face monocular depth checkpoint (raw relative output)."""

    def __init__(self, repo_id: str, device: str = "cpu"):
        self.name = f"hf:{repo_id}"
        self.device = device
        try:
            from transformers import AutoImageProcessor, AutoModelForDepthEstimation

            self.processor = AutoImageProcessor.from_pretrained(repo_id)
            self.model = AutoModelForDepthEstimation.from_pretrained(repo_id)
        except Exception as exc:
            raise ModelLoadFailure(f"cannot load depth model {repo_id!r}: {exc}") from exc
        self.model.to(device).eval()

    @torch.no_grad()
    def predict_depth(self, image: torch.Tensor) -> torch.Tensor:
        pixels = (image.permute(1, 2, 0) * 255).to(torch.uint8).numpy()
        inputs = self.processor(images=pixels, return_tensors="pt").to(self.device)
        return self.model(**inputs).predicted_depth[0].cpu()


def make_segmenter(identifier: str, device: str = "cpu") -> SegmentationBackend:
    if identifier.startswith("conv:"):
        return ConvSegmenter(identifier)
    if identifier.startswith("hf:"):
        return HfSegmenter(identifier[3:], device=device)
    raise ModelLoadFailure(f"unknown segmentation backend {identifier!r}")


def make_depther(identifier: str, device: str = "cpu") -> DepthBackend:
    if identifier.startswith("conv:"):
        return ConvDepther(identifier)
    if identifier.startswith("hf:"):
        return HfDepther(identifier[3:], device=device)
    raise ModelLoadFailure(f"unknown depth backend {identifier!r}")
