"""Serialization of scores and gap analyses to CSV, JSON, and SVG.

All numeric CSV cells carry 6 significant digits; JSON keeps full double
precision. SVG plots are static, dependency-free documents: a colormapped
grid for gap matrices and a scatter-with-trend-lines chart for metric
correlations. Outputs are byte-deterministic for a fixed bundle (the
timestamp is ordinary run metadata, set by the caller).
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from .corpus import CorpusScores, FrameFailure
from .gaps import GapMatrix, ScoreSet, TrendFit, group_mean

TOOL_VERSION = "0.1.0"

# 5-stop monotone-luminance ramp (light to dark), sampled at t = 0, .25, .5, .75, 1
COLOR_STOPS = (
    (247, 251, 255),
    (198, 219, 239),
    (107, 174, 214),
    (33, 113, 181),
    (8, 48, 107),
)

SERIES_COLORS = ("#2171b5", "#d94801", "#238b45", "#6a51a3", "#b15928")

FRAME_CSV_COLUMNS = (
    "dataset_id",
    "scene_id",
    "frame_id",
    "mmcm",
    "mean_agreement",
    "mean_confidence",
    "depth_entropy",
    "depth_mean",
    "discontinuity_ratio",
)


@dataclass
class FrameRow:
    dataset_id: str
    scene_id: str
    frame_id: str
    mmcm: float
    mean_agreement: float
    mean_confidence: float
    depth_entropy: float | None = None
    depth_mean: float | None = None
    discontinuity_ratio: float | None = None


@dataclass
class SceneRow:
    dataset_id: str
    scene_id: str
    mean_mmcm: float
    frames: int


@dataclass
class TrendRow:
    domain_tag: str
    n: int
    slope: float | None
    intercept: float | None
    pearson_r: float | None
    status: str  # "ok", "degenerate_x", or "too_few_points"


@dataclass
class ReportBundle:
    """Everything one run emits: metadata, score tables, gaps, trends."""

    tool_version: str
    timestamp: str
    manifest_hash: str
    bins: int
    tau: float
    frame_rows: list[FrameRow] = field(default_factory=list)
    scene_rows: list[SceneRow] = field(default_factory=list)
    failures: list[FrameFailure] = field(default_factory=list)
    gap_matrices: dict[str, GapMatrix] = field(default_factory=dict)
    rankings: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    trends: dict[str, list[TrendRow]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "meta": {
                "tool_version": self.tool_version,
                "timestamp": self.timestamp,
                "manifest_hash": self.manifest_hash,
                "bins": self.bins,
                "tau": self.tau,
                "frames_scored": len(self.frame_rows),
                "frames_failed": len(self.failures),
            },
            "frame_scores": [dataclasses.asdict(r) for r in self.frame_rows],
            "scene_means": [dataclasses.asdict(r) for r in self.scene_rows],
            "failures": [dataclasses.asdict(f) for f in self.failures],
            "gap_matrices": {
                name: {
                    "row_ids": m.row_ids,
                    "col_ids": m.col_ids,
                    "values": [[float(v) for v in row] for row in m.values],
                }
                for name, m in self.gap_matrices.items()
            },
            "rankings": {
                name: [{"group_id": g, "mean_gap": v} for g, v in ranking]
                for name, ranking in self.rankings.items()
            },
            "trends": {
                name: [dataclasses.asdict(r) for r in rows]
                for name, rows in self.trends.items()
            },
        }


def scene_score_sets(scores: CorpusScores) -> list[ScoreSet]:
    """Per-scene mean consensus scores, keyed `dataset_id/scene_id`, in manifest order."""
    order: list[str] = []
    grouped: dict[str, list[tuple[str, float]]] = {}
    for dataset_id, scene_id, frame in scores.rows:
        key = f"{dataset_id}/{scene_id}"
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append((frame.frame_id, frame.consensus.mmcm))
    return [group_mean(key, grouped[key]) for key in order]


def build_bundle(
    scores: CorpusScores,
    timestamp: str,
    manifest_hash: str,
) -> ReportBundle:
    """Assemble the score tables of a bundle from one scoring run."""
    bundle = ReportBundle(
        tool_version=TOOL_VERSION,
        timestamp=timestamp,
        manifest_hash=manifest_hash,
        bins=scores.bins,
        tau=scores.tau,
        failures=list(scores.failures),
    )
    for dataset_id, scene_id, frame in scores.rows:
        row = FrameRow(
            dataset_id=dataset_id,
            scene_id=scene_id,
            frame_id=frame.frame_id,
            mmcm=frame.consensus.mmcm,
            mean_agreement=frame.consensus.mean_agreement,
            mean_confidence=frame.consensus.mean_confidence,
        )
        if frame.structural is not None:
            row.depth_entropy = frame.structural.depth_entropy
            row.depth_mean = frame.structural.depth_mean
            row.discontinuity_ratio = frame.structural.discontinuity_ratio
        bundle.frame_rows.append(row)
    for score_set in scene_score_sets(scores):
        dataset_id, scene_id = score_set.group_id.split("/", 1)
        bundle.scene_rows.append(
            SceneRow(
                dataset_id=dataset_id,
                scene_id=scene_id,
                mean_mmcm=score_set.mean_mmcm,
                frames=len(score_set.frame_scores),
            )
        )
    return bundle


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_frame_scores_csv(rows: list[FrameRow], path: Path) -> None:
    _write_csv(
        path,
        list(FRAME_CSV_COLUMNS),
        [
            [
                r.dataset_id, r.scene_id, r.frame_id, r.mmcm, r.mean_agreement,
                r.mean_confidence, r.depth_entropy, r.depth_mean, r.discontinuity_ratio,
            ]
            for r in rows
        ],
    )


def write_scene_means_csv(rows: list[SceneRow], path: Path) -> None:
    _write_csv(
        path,
        ["dataset_id", "scene_id", "mean_mmcm", "frames"],
        [[r.dataset_id, r.scene_id, r.mean_mmcm, r.frames] for r in rows],
    )


def write_gap_matrix_csv(matrix: GapMatrix, path: Path) -> None:
    _write_csv(
        path,
        ["group_id"] + list(matrix.col_ids),
        [
            [row_id] + [float(v) for v in matrix.values[i]]
            for i, row_id in enumerate(matrix.row_ids)
        ],
    )


def write_rankings_csv(ranking: list[tuple[str, float]], path: Path) -> None:
    _write_csv(path, ["group_id", "mean_gap"], [[g, v] for g, v in ranking])


def write_trend_csv(rows: list[TrendRow], path: Path) -> None:
    _write_csv(
        path,
        ["domain_tag", "n", "slope", "intercept", "pearson_r", "status"],
        [[r.domain_tag, r.n, r.slope, r.intercept, r.pearson_r, r.status] for r in rows],
    )


def emit_csv(bundle: ReportBundle, out_dir: str | os.PathLike) -> list[Path]:
    """Write the bundle's tables as CSV files; returns the written paths.

    Score tables are always written (headers even when empty); gap, ranking,
    and trend tables appear once per named section in the bundle.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    path = out / "frame_scores.csv"
    write_frame_scores_csv(bundle.frame_rows, path)
    written.append(path)

    path = out / "scene_means.csv"
    write_scene_means_csv(bundle.scene_rows, path)
    written.append(path)

    for name, matrix in bundle.gap_matrices.items():
        path = out / f"gap_matrix_{name}.csv"
        write_gap_matrix_csv(matrix, path)
        written.append(path)

    for name, ranking in bundle.rankings.items():
        path = out / f"rankings_{name}.csv"
        write_rankings_csv(ranking, path)
        written.append(path)

    for metric, rows in bundle.trends.items():
        path = out / f"trend_{metric}.csv"
        write_trend_csv(rows, path)
        written.append(path)

    return written


def emit_json(bundle: ReportBundle, path: str | os.PathLike) -> None:
    """Write the bundle as one JSON document (alphabetical keys, no NaN)."""
    doc = bundle.to_dict()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _lerp_color(t: float) -> str:
    t = min(1.0, max(0.0, t))
    scaled = t * (len(COLOR_STOPS) - 1)
    low = min(int(scaled), len(COLOR_STOPS) - 2)
    frac = scaled - low
    r, g, b = (
        round(a + (b_ - a) * frac)
        for a, b_ in zip(COLOR_STOPS[low], COLOR_STOPS[low + 1])
    )
    return f"#{r:02x}{g:02x}{b:02x}"


def render_heatmap(matrix: GapMatrix, path: str | os.PathLike, title: str = "") -> None:
    """Render a gap matrix as a colormapped SVG grid with a legend.

    Colors span [0, max entry] on the fixed 5-stop ramp; every cell is
    annotated with its value to 3 decimals.
    """
    cell_w, cell_h = 64, 30
    label_w = 16 + 8 * max((len(r) for r in matrix.row_ids), default=1)
    label_h = 16 + 8 * max((len(c) for c in matrix.col_ids), default=1)
    legend_w = 70
    n_rows, n_cols = matrix.values.shape
    top = label_h + (36 if title else 8)
    width = label_w + n_cols * cell_w + legend_w + 20
    height = top + n_rows * cell_h + 20

    vmax = float(matrix.values.max()) if matrix.values.size else 0.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
            f"{escape(title)}</text>"
        )
    for j, col_id in enumerate(matrix.col_ids):
        x = label_w + j * cell_w + cell_w / 2
        parts.append(
            f'<text x="{x:.1f}" y="{top - 6}" text-anchor="start" '
            f'transform="rotate(-45 {x:.1f} {top - 6})">{escape(col_id)}</text>'
        )
    for i, row_id in enumerate(matrix.row_ids):
        y = top + i * cell_h + cell_h / 2 + 4
        parts.append(f'<text x="{label_w - 6}" y="{y:.1f}" text-anchor="end">{escape(row_id)}</text>')
        for j in range(n_cols):
            value = float(matrix.values[i, j])
            t = value / vmax if vmax > 0 else 0.0
            x = label_w + j * cell_w
            y0 = top + i * cell_h
            fill = _lerp_color(t)
            text_fill = "#ffffff" if t > 0.55 else "#111111"
            parts.append(
                f'<rect x="{x}" y="{y0}" width="{cell_w}" height="{cell_h}" '
                f'fill="{fill}" stroke="#cccccc" stroke-width="0.5"/>'
            )
            parts.append(
                f'<text x="{x + cell_w / 2:.1f}" y="{y0 + cell_h / 2 + 4:.1f}" '
                f'text-anchor="middle" fill="{text_fill}">{value:.3f}</text>'
            )

    # vertical legend bar spanning 0 .. max
    lx = label_w + n_cols * cell_w + 24
    lh = max(n_rows * cell_h, 60)
    stops = "".join(
        f'<stop offset="{i / (len(COLOR_STOPS) - 1):.2f}" '
        f'stop-color="#{r:02x}{g:02x}{b:02x}"/>'
        for i, (r, g, b) in enumerate(reversed(COLOR_STOPS))
    )
    parts.append(f'<defs><linearGradient id="ramp" x1="0" y1="0" x2="0" y2="1">{stops}</linearGradient></defs>')
    parts.append(
        f'<rect x="{lx}" y="{top}" width="14" height="{lh}" fill="url(#ramp)" '
        f'stroke="#888888" stroke-width="0.5"/>'
    )
    parts.append(f'<text x="{lx + 18}" y="{top + 9}">{vmax:.3f}</text>')
    parts.append(f'<text x="{lx + 18}" y="{top + lh}">0.000</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def render_scatter(
    points: list[tuple[float, float, str]],
    fits: dict[str, TrendFit | None],
    path: str | os.PathLike,
    x_label: str = "x",
    y_label: str = "y",
    title: str = "",
) -> None:
    """Render (x, y, domain_tag) points with one dotted trend line per tag.

    Tags are colored in sorted order; tags without a fit (degenerate x)
    get points and a legend entry only.
    """
    width, height = 520, 380
    margin_l, margin_r, margin_t, margin_b = 64, 16, 36 if title else 16, 52
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b

    xs = [p[0] for p in points] or [0.0]
    ys = [p[1] for p in points] or [0.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_pad = (x_hi - x_lo) * 0.05 or 0.5
    y_pad = (y_hi - y_lo) * 0.05 or 0.5
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    def px(x: float) -> float:
        return margin_l + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return margin_t + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    tags = sorted({p[2] for p in points} | set(fits))
    colors = {tag: SERIES_COLORS[i % len(SERIES_COLORS)] for i, tag in enumerate(tags)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<defs><clipPath id="plot"><rect x="{margin_l}" y="{margin_t}" '
        f'width="{plot_w}" height="{plot_h}"/></clipPath></defs>',
        f'<rect x="{margin_l}" y="{margin_t}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#444444"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
            f"{escape(title)}</text>"
        )
    for tick in _ticks(x_lo, x_hi):
        x = px(tick)
        parts.append(f'<line x1="{x:.1f}" y1="{margin_t + plot_h}" x2="{x:.1f}" y2="{margin_t + plot_h + 4}" stroke="#444444"/>')
        parts.append(f'<text x="{x:.1f}" y="{margin_t + plot_h + 16}" text-anchor="middle">{tick:.3g}</text>')
    for tick in _ticks(y_lo, y_hi):
        y = py(tick)
        parts.append(f'<line x1="{margin_l - 4}" y1="{y:.1f}" x2="{margin_l}" y2="{y:.1f}" stroke="#444444"/>')
        parts.append(f'<text x="{margin_l - 6}" y="{y + 3:.1f}" text-anchor="end">{tick:.3g}</text>')
    parts.append(
        f'<text x="{margin_l + plot_w / 2:.1f}" y="{height - 12}" text-anchor="middle">'
        f"{escape(x_label)}</text>"
    )
    parts.append(
        f'<text x="16" y="{margin_t + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {margin_t + plot_h / 2:.1f})">{escape(y_label)}</text>'
    )

    for x, y, tag in points:
        parts.append(
            f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="{colors[tag]}" '
            f'fill-opacity="0.7"/>'
        )
    for tag in tags:
        fit = fits.get(tag)
        if fit is None:
            continue
        y1 = fit.intercept + fit.slope * x_lo
        y2 = fit.intercept + fit.slope * x_hi
        parts.append(
            f'<line x1="{px(x_lo):.1f}" y1="{py(y1):.1f}" x2="{px(x_hi):.1f}" y2="{py(y2):.1f}" '
            f'stroke="{colors[tag]}" stroke-width="1.5" stroke-dasharray="5 4" '
            f'clip-path="url(#plot)"/>'
        )

    for i, tag in enumerate(tags):
        y = margin_t + 12 + i * 16
        x = margin_l + plot_w - 130
        parts.append(f'<circle cx="{x}" cy="{y - 3}" r="4" fill="{colors[tag]}"/>')
        parts.append(f'<text x="{x + 10}" y="{y}">{escape(tag)}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def hash_file(path: str | os.PathLike) -> str:
    """Hex sha256 of a file's bytes (used to stamp reports with their manifest)."""
    import hashlib

    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def load_frame_rows_csv(path: str | os.PathLike) -> list[FrameRow]:
    """Read back a frame_scores.csv written by emit_csv."""
    rows: list[FrameRow] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(FRAME_CSV_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for rec in reader:
            rows.append(
                FrameRow(
                    dataset_id=rec["dataset_id"],
                    scene_id=rec["scene_id"],
                    frame_id=rec["frame_id"],
                    mmcm=float(rec["mmcm"]),
                    mean_agreement=float(rec["mean_agreement"]),
                    mean_confidence=float(rec["mean_confidence"]),
                    depth_entropy=float(rec["depth_entropy"]) if rec["depth_entropy"] else None,
                    depth_mean=float(rec["depth_mean"]) if rec["depth_mean"] else None,
                    discontinuity_ratio=(
                        float(rec["discontinuity_ratio"]) if rec["discontinuity_ratio"] else None
                    ),
                )
            )
    return rows
