"""Command-line entry point for the prediction exporter.

Exit codes: 0 success, 1 data-level failure (nothing exported), 2 usage
or model-loading failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .backends import ModelLoadFailure
from .pipeline import (
    DEFAULT_DEPTH_MODEL,
    DEFAULT_HEIGHT,
    DEFAULT_SEGMENTATION_MODELS,
    DEFAULT_WIDTH,
    AdapterConfig,
    discover_datasets,
    export_predictions,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmcm-adapter",
        description="Run segmentation and depth models over image folders and export an MMC1 corpus",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser(
        "export",
        help="export predictions for a <dataset>/<scene>/<images> tree",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--images", required=True, help="root directory: <dataset>/<scene>/<images>")
    p.add_argument("--out", required=True, help="output corpus directory")
    p.add_argument(
        "--models",
        nargs="+",
        default=list(DEFAULT_SEGMENTATION_MODELS),
        help="segmentation model identifiers (conv:<name> or hf:<repo_id>)",
    )
    p.add_argument(
        "--depth-model",
        default=DEFAULT_DEPTH_MODEL,
        help="depth model identifier, or 'none' to skip depth export",
    )
    p.add_argument("--width", type=int, default=DEFAULT_WIDTH, help="target raster width")
    p.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="target raster height")
    p.add_argument("--device", default="cpu", help="torch device for inference")
    p.add_argument("--domain-tag", default="real", help="domain tag recorded for every dataset")
    p.add_argument(
        "--normalized-depth",
        action="store_true",
        help="also export a [0,255]-normalized copy of each depth map",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        datasets = discover_datasets(Path(args.images), args.domain_tag)
        config = AdapterConfig(
            datasets=datasets,
            out_dir=Path(args.out),
            segmentation_models=list(args.models),
            depth_model=None if args.depth_model == "none" else args.depth_model,
            width=args.width,
            height=args.height,
            device=args.device,
            normalized_depth=args.normalized_depth,
        )
        config.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = export_predictions(config)
    except ModelLoadFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for item in report.skipped:
        print(f"skipped {item.path}: {item.reason}", file=sys.stderr)
    print(
        f"exported {report.frames_exported} frames, {report.files_written} raster files "
        f"-> {report.manifest_path}"
    )
    return 0 if report.frames_exported else 1


if __name__ == "__main__":
    sys.exit(main())
