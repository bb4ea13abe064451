import struct
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mmcm import ConfidenceMap, DepthMap, EnsembleFrame, LabelMap


def make_frame(labels, confs, depth=None, frame_id="frame"):
    """Build an EnsembleFrame from nested lists / arrays."""
    predictions = [
        (LabelMap(np.asarray(lab)), ConfidenceMap(np.asarray(cf)))
        for lab, cf in zip(labels, confs)
    ]
    depth_map = DepthMap(np.asarray(depth)) if depth is not None else None
    return EnsembleFrame(frame_id=frame_id, predictions=predictions, depth=depth_map)


def random_frame(rng, height, width, n_models, n_classes, depth=False):
    labels = [
        rng.integers(0, n_classes, (height, width)).astype(np.uint16)
        for _ in range(n_models)
    ]
    confs = [rng.random((height, width), dtype=np.float32) for _ in range(n_models)]
    depth_values = rng.normal(0.0, 10.0, (height, width)).astype(np.float32) if depth else None
    return make_frame(labels, confs, depth_values)


def write_mmc1(path, magic=b"MMC1", dtype_code=0x01, width=1, height=1, payload=b"",
               reserved=b"\x00\x00\x00"):
    """Write an arbitrary (possibly corrupt) MMC1 file byte by byte."""
    header = magic + struct.pack("<B", dtype_code) + reserved + struct.pack("<II", width, height)
    Path(path).write_bytes(header + payload)
    return Path(path)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
