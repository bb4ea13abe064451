from pathlib import Path

import numpy as np
import pytest
from PIL import Image


def synth_photo(rng: np.random.Generator, width=128, height=96) -> Image.Image:
    """A procedurally generated photograph-like RGB image."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    base = np.stack(
        [
            120 + 80 * np.sin(xx / width * np.pi * rng.uniform(1, 3)),
            100 + 90 * (yy / height),
            90 + 60 * np.cos((xx + yy) / 37.0),
        ],
        axis=-1,
    )
    # scatter a few filled discs so scenes have object-like structure
    for _ in range(int(rng.integers(3, 8))):
        cx, cy = rng.uniform(0, width), rng.uniform(0, height)
        r = rng.uniform(5, 20)
        color = rng.uniform(0, 255, 3)
        mask = (xx - cx) ** 2 + (yy - cy) ** 2 < r**2
        base[mask] = color
    base += rng.normal(0, 6, base.shape)
    return Image.fromarray(np.clip(base, 0, 255).astype(np.uint8), "RGB")


@pytest.fixture
def photo_tree(tmp_path):
    """dataset/scene tree holding six photographs (mixed JPEG/PNG)."""
    rng = np.random.default_rng(2024)
    scene = tmp_path / "images" / "survey" / "riverbank"
    scene.mkdir(parents=True)
    for i in range(6):
        img = synth_photo(rng)
        if i % 2:
            img.save(scene / f"photo_{i:02d}.png")
        else:
            img.save(scene / f"photo_{i:02d}.jpg", quality=92)
    return tmp_path / "images"


CONV_MODELS = ["conv:alpha", "conv:beta", "conv:gamma"]
CONV_DEPTH = "conv:depth"
