"""Command-line interface: validate, score, gap, trend, synth.

Exit codes are a stable contract: 0 success, 1 data-level failure (corrupt
corpus, zero scorable frames, validation failures), 2 usage or
configuration failure (bad flags, malformed manifest or spec, unknown
dataset ids). The worker count never changes any emitted byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .corpus import (
    CorpusScores,
    Manifest,
    filter_manifest,
    load_manifest,
    score_corpus,
    validate_corpus,
)
from .errors import (
    AllFramesFailed,
    DegenerateX,
    EmptyGroup,
    ManifestError,
    MmcmError,
    TooFewPoints,
    UnknownDataset,
    UnrealizableAgreement,
)
from .gaps import aggregate_gaps, gap_matrix, group_mean, trend_fit
from .report import (
    FrameRow,
    TrendRow,
    build_bundle,
    emit_csv,
    emit_json,
    hash_file,
    load_frame_rows_csv,
    render_heatmap,
    render_scatter,
    write_gap_matrix_csv,
    write_rankings_csv,
    write_trend_csv,
)
from .structural import DEFAULT_BINS, DEFAULT_TAU
from .synthgen import generate, spec_from_dict

TREND_METRICS = ("depth_entropy", "depth_mean", "discontinuity_ratio")

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2


def _default_workers() -> int:
    env = os.environ.get("MMCM_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load(manifest_arg: str) -> Manifest:
    return load_manifest(manifest_arg)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _slug(text: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in text)


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        manifest = _load(args.manifest)
    except ManifestError as exc:
        return _fail(str(exc), EXIT_USAGE)
    report = validate_corpus(manifest)
    for failure in report.failures:
        print(failure)
    print(
        f"checked {report.frames_checked} frames, {report.files_checked} files, "
        f"{len(report.failures)} failures"
    )
    return EXIT_OK if report.ok else EXIT_DATA


def _score(manifest: Manifest, args: argparse.Namespace) -> CorpusScores:
    return score_corpus(manifest, bins=args.bins, tau=args.tau, workers=args.workers)


def cmd_score(args: argparse.Namespace) -> int:
    try:
        manifest = _load(args.manifest)
        if args.datasets or args.scenes:
            manifest = filter_manifest(manifest, args.datasets, args.scenes)
            if not manifest.datasets:
                return _fail("filters selected no frames", EXIT_USAGE)
    except (ManifestError, UnknownDataset) as exc:
        return _fail(str(exc), EXIT_USAGE)
    try:
        scores = _score(manifest, args)
    except AllFramesFailed as exc:
        return _fail(str(exc), EXIT_DATA)
    bundle = build_bundle(scores, timestamp=_timestamp(), manifest_hash=hash_file(args.manifest))
    out = Path(args.out)
    emit_csv(bundle, out)
    emit_json(bundle, out / "run.json")
    print(
        f"scored {len(bundle.frame_rows)} frames "
        f"({len(bundle.failures)} failed) -> {out}"
    )
    return EXIT_OK


def _dataset_by_id(manifest: Manifest, dataset_id: str):
    for dataset in manifest.datasets:
        if dataset.dataset_id == dataset_id:
            return dataset
    raise UnknownDataset(f"dataset {dataset_id!r} not in manifest")


def _frame_rows(manifest: Manifest, args: argparse.Namespace) -> list[FrameRow]:
    """Frame-level score rows, either recomputed or read from --scores-in."""
    if getattr(args, "scores_in", None):
        return load_frame_rows_csv(args.scores_in)
    scores = _score(manifest, args)
    return build_bundle(scores, timestamp="", manifest_hash="").frame_rows


def _group_sets(rows: list[FrameRow], dataset_id: str, level: str):
    """ScoreSets for one dataset at scene or dataset aggregation level."""
    if level == "dataset":
        scores = [(r.frame_id, r.mmcm) for r in rows if r.dataset_id == dataset_id]
        if not scores:
            raise EmptyGroup(f"no scored frames for dataset {dataset_id!r}")
        return [group_mean(dataset_id, scores)]
    order: list[str] = []
    grouped: dict[str, list[tuple[str, float]]] = {}
    for r in rows:
        if r.dataset_id != dataset_id:
            continue
        if r.scene_id not in grouped:
            grouped[r.scene_id] = []
            order.append(r.scene_id)
        grouped[r.scene_id].append((r.frame_id, r.mmcm))
    if not order:
        raise EmptyGroup(f"no scored frames for dataset {dataset_id!r}")
    return [group_mean(scene_id, grouped[scene_id]) for scene_id in order]


def cmd_gap(args: argparse.Namespace) -> int:
    try:
        manifest = _load(args.manifest)
        _dataset_by_id(manifest, args.rows)
        _dataset_by_id(manifest, args.cols)
    except (ManifestError, UnknownDataset) as exc:
        return _fail(str(exc), EXIT_USAGE)
    try:
        rows = _frame_rows(manifest, args)
        row_sets = _group_sets(rows, args.rows, args.level)
        col_sets = row_sets if args.cols == args.rows else _group_sets(rows, args.cols, args.level)
    except (AllFramesFailed, EmptyGroup, OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_DATA)

    matrix = gap_matrix(row_sets, col_sets)
    ranking = aggregate_gaps(matrix)
    name = _slug(f"{args.level}_{args.rows}_vs_{args.cols}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_gap_matrix_csv(matrix, out / f"gap_matrix_{name}.csv")
    write_rankings_csv(ranking, out / f"rankings_{name}.csv")
    if args.svg:
        render_heatmap(matrix, out / f"gap_matrix_{name}.svg", title=f"{args.rows} vs {args.cols}")
    print(f"gap matrix {matrix.values.shape[0]}x{matrix.values.shape[1]} -> {out}")
    return EXIT_OK


def cmd_trend(args: argparse.Namespace) -> int:
    try:
        manifest = _load(args.manifest)
    except ManifestError as exc:
        return _fail(str(exc), EXIT_USAGE)
    try:
        rows = _frame_rows(manifest, args)
    except (AllFramesFailed, OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_DATA)

    domain_by_dataset = {d.dataset_id: d.domain_tag for d in manifest.datasets}
    points: list[tuple[float, float, str]] = []
    skipped = 0
    for row in rows:
        x = getattr(row, args.x)
        if x is None:
            skipped += 1
            continue
        points.append((x, row.mmcm, domain_by_dataset.get(row.dataset_id, row.dataset_id)))

    tags = sorted({tag for _, _, tag in points})
    trend_rows: list[TrendRow] = []
    fits = {}
    for tag in tags:
        tagged = [(x, y) for x, y, t in points if t == tag]
        try:
            fit = trend_fit(tagged)
            trend_rows.append(
                TrendRow(tag, fit.n, fit.slope, fit.intercept, fit.pearson_r, "ok")
            )
            fits[tag] = fit
        except TooFewPoints:
            trend_rows.append(TrendRow(tag, len(tagged), None, None, None, "too_few_points"))
            fits[tag] = None
        except DegenerateX:
            trend_rows.append(TrendRow(tag, len(tagged), None, None, None, "degenerate_x"))
            fits[tag] = None

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trend_csv(trend_rows, out / f"trend_{args.x}.csv")
    if args.svg:
        render_scatter(
            points,
            fits,
            out / f"trend_{args.x}.svg",
            x_label=args.x,
            y_label="mmcm",
            title=f"mmcm vs {args.x}",
        )
    print(
        f"trend fits for {args.x}: {len(points)} frames used, "
        f"{skipped} without depth -> {out}"
    )
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        spec = spec_from_dict(doc)
    except (OSError, json.JSONDecodeError, ValueError, UnrealizableAgreement) as exc:
        return _fail(f"invalid synth spec: {exc}", EXIT_USAGE)
    try:
        manifest = generate(spec, args.out)
    except OSError as exc:
        return _fail(str(exc), EXIT_DATA)
    print(f"generated {manifest.frame_count()} frames -> {args.out}")
    return EXIT_OK


def _add_scoring_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bins", type=int, default=DEFAULT_BINS, help="depth histogram bin count")
    parser.add_argument("--tau", type=float, default=DEFAULT_TAU, help="discontinuity threshold factor")
    parser.add_argument(
        "--workers",
        type=int,
        default=_default_workers(),
        help="worker threads (MMCM_WORKERS env overrides the default)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmcm",
        description="Consensus and structural scene-complexity metrics over prediction corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "validate",
        help="check every referenced raster",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser(
        "score",
        help="score all frames and write report files",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--datasets", nargs="+", help="score only these dataset ids (exact match)")
    p.add_argument("--scenes", nargs="+", help="score only these scene ids (exact match)")
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser(
        "gap",
        help="pairwise relative perceptual gaps between two datasets",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--manifest", required=True)
    p.add_argument("--level", choices=("scene", "dataset"), default="scene")
    p.add_argument("--rows", required=True, help="dataset id for matrix rows")
    p.add_argument("--cols", required=True, help="dataset id for matrix columns")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--svg", action="store_true", help="also render an SVG heatmap")
    p.add_argument("--scores-in", help="reuse a frame_scores.csv instead of rescoring")
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser(
        "trend",
        help="linear trend of consensus vs a structural metric, per domain tag",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--manifest", required=True)
    p.add_argument("--x", choices=TREND_METRICS, required=True, help="structural metric on the x axis")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--svg", action="store_true", help="also render an SVG scatter plot")
    p.add_argument("--scores-in", help="reuse a frame_scores.csv instead of rescoring")
    _add_scoring_flags(p)
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser(
        "synth",
        help="generate a synthetic corpus with known scores",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--spec", required=True, help="synth spec JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "bins", 1) < 1:
        return _fail(f"--bins must be >= 1, got {args.bins}", EXIT_USAGE)
    if not getattr(args, "tau", 1.0) > 0:
        return _fail(f"--tau must be > 0, got {args.tau}", EXIT_USAGE)
    if getattr(args, "workers", 1) < 1:
        return _fail(f"--workers must be >= 1, got {args.workers}", EXIT_USAGE)
    try:
        return args.func(args)
    except MmcmError as exc:
        return _fail(str(exc), EXIT_DATA)


if __name__ == "__main__":
    sys.exit(main())
