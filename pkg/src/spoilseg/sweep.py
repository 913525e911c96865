"""Parameter sweeps with Hoover scoring, plus external-mask ingestion.

A sweep walks the full Cartesian product of a declared parameter grid, runs
the chosen segmenter per combination, normalises the result to connected
components and scores it against ground truth.  Reports are byte-stable:
identical configuration and inputs always produce identical CSV/JSON files.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

from .colorspace import rgb_to_lab
from .grids import GrayImage, LabelMap, RasterRGB
from .hoover import HooverScores, evaluate_segmentation
from .labels import drop_small_regions, relabel_connected
from .meanshift import MeanShiftParams, mean_shift_segment
from .raster_io import read_gray_pgm16, read_pgm16, read_ppm
from .slic import SlicParams, slic
from .voronoi import VoronoiParams, voronoi_pipeline

_ALGORITHM_PARAMS = {
    "meanshift": (
        "spatial_radius",
        "range_radius",
        "min_region_size",
        "convergence_eps",
        "max_iterations",
    ),
    "slic": ("superpixels", "compactness", "iterations", "min_region_size"),
    "voronoi": ("sigma", "peak_radius", "restrict_to_foreground", "invert_foreground"),
}

_SCORE_COLUMNS = (
    "correct_detection",
    "over_segmentation",
    "under_segmentation",
    "missed",
    "noise",
    "correct_plus_over",
)


@dataclass
class SweepConfig:
    """Declarative sweep: algorithm, inputs, threshold and parameter grid."""

    algorithm: str
    grid: dict[str, list]
    ground_truth: str
    image: str | None = None
    hillshade: str | None = None
    threshold: float = 0.5
    base_params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.algorithm not in _ALGORITHM_PARAMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not self.grid or any(len(v) == 0 for v in self.grid.values()):
            raise ValueError("parameter grid must be non-empty")
        known = _ALGORITHM_PARAMS[self.algorithm]
        for name in list(self.grid) + list(self.base_params):
            if name not in known:
                raise ValueError(f"unknown parameter {name!r} for {self.algorithm}")
        needs_image = self.algorithm in ("meanshift", "slic")
        if needs_image and self.image is None:
            raise ValueError(f"{self.algorithm} sweep needs an 'image' input")
        if self.algorithm == "voronoi" and self.hillshade is None:
            raise ValueError("voronoi sweep needs a 'hillshade' input")


def load_sweep_config(path: str | os.PathLike) -> SweepConfig:
    """Read a sweep configuration from its JSON file."""
    raw = json.loads(Path(path).read_text())
    inputs = raw.get("inputs", {})
    return SweepConfig(
        algorithm=raw["algorithm"],
        grid=raw["grid"],
        ground_truth=inputs["ground_truth"],
        image=inputs.get("image"),
        hillshade=inputs.get("hillshade"),
        threshold=raw.get("threshold", 0.5),
        base_params=raw.get("params", {}),
    )


@dataclass
class SweepRow:
    params: dict
    scores: HooverScores | None = None
    error: str | None = None


@dataclass
class SweepReport:
    algorithm: str
    threshold: float
    param_names: list[str]
    rows: list[SweepRow]
    optimum_index: int | None

    @property
    def optimum(self) -> SweepRow | None:
        return None if self.optimum_index is None else self.rows[self.optimum_index]


def _run_one(cfg: SweepConfig, params: dict, rgb, lab, gray) -> LabelMap:
    if cfg.algorithm == "meanshift":
        return mean_shift_segment(rgb, MeanShiftParams(**params))
    if cfg.algorithm == "slic":
        return slic(lab, SlicParams(**params))
    return voronoi_pipeline(gray, VoronoiParams(**params))


def run_sweep(cfg: SweepConfig) -> SweepReport:
    """Execute every combination of the grid in declared order.

    A failing combination is recorded with its error and excluded from the
    optimum, which maximises correct detection with earlier rows winning
    ties.
    """
    gt = relabel_connected(read_pgm16(cfg.ground_truth))
    if gt.region_count() == 0:
        raise ValueError("ground truth has no regions")
    rgb: RasterRGB | None = None
    lab = None
    gray: GrayImage | None = None
    if cfg.algorithm in ("meanshift", "slic"):
        rgb = read_ppm(cfg.image)
        if cfg.algorithm == "slic":
            lab = rgb_to_lab(rgb)
    else:
        gray = read_gray_pgm16(cfg.hillshade)

    names = list(cfg.grid)
    rows: list[SweepRow] = []
    for values in product(*(cfg.grid[name] for name in names)):
        params = dict(cfg.base_params)
        params.update(dict(zip(names, values)))
        row = SweepRow(params=dict(zip(names, values)))
        try:
            seg = _run_one(cfg, params, rgb, lab, gray)
            seg = relabel_connected(seg)
            row.scores = evaluate_segmentation(gt, seg, cfg.threshold)
        except Exception as exc:  # recorded, not fatal: one bad row must not kill the sweep
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)

    optimum_index = None
    best = None
    for i, row in enumerate(rows):
        if row.scores is None:
            continue
        if best is None or row.scores.correct_detection > best:
            best = row.scores.correct_detection
            optimum_index = i
    return SweepReport(
        algorithm=cfg.algorithm,
        threshold=cfg.threshold,
        param_names=names,
        rows=rows,
        optimum_index=optimum_index,
    )


def report_csv(report: SweepReport) -> str:
    """Render a report as CSV: parameter columns, six-decimal scores, error."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(report.param_names) + list(_SCORE_COLUMNS) + ["error"])
    for row in report.rows:
        cells = [str(row.params[name]) for name in report.param_names]
        if row.scores is not None:
            d = row.scores.to_dict()
            cells += [f"{d[col]:.6f}" for col in _SCORE_COLUMNS]
            cells.append("")
        else:
            cells += ["" for _ in _SCORE_COLUMNS]
            cells.append(row.error or "")
        writer.writerow(cells)
    return buf.getvalue()


def report_json(report: SweepReport) -> str:
    """Render a report as JSON, including raw counts and the optimum row."""
    payload = {
        "algorithm": report.algorithm,
        "threshold": report.threshold,
        "parameters": list(report.param_names),
        "rows": [
            {
                "params": row.params,
                "scores": None if row.scores is None else row.scores.to_dict(),
                "error": row.error,
            }
            for row in report.rows
        ],
        "optimum": None
        if report.optimum_index is None
        else {"row": report.optimum_index, "params": report.rows[report.optimum_index].params},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def emit_report(report: SweepReport, fmt: str, path: str | os.PathLike) -> None:
    """Write a report file; two identical runs produce identical bytes."""
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "json":
        text = report_json(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    Path(path).write_text(text)


@dataclass
class ExternalMaskMetadata:
    """Free-form provenance for a mask produced outside this toolkit."""

    source: str = ""
    parameters: dict[str, str] = field(default_factory=dict)


def ingest_external_mask(
    path: str | os.PathLike,
    metadata: ExternalMaskMetadata | None = None,
    min_region: int = 0,
) -> tuple[LabelMap, dict]:
    """Load and normalise an externally produced label mask.

    The mask is split into connected components; regions below ``min_region``
    pixels drop to background.  Returns the normalised map plus a report
    fragment carrying the metadata and region counts.
    """
    m = relabel_connected(read_pgm16(path))
    raw_regions = m.region_count()
    if min_region > 0:
        m = relabel_connected(drop_small_regions(m, min_region))
    meta = metadata if metadata is not None else ExternalMaskMetadata()
    info = {
        "source": meta.source,
        "parameters": dict(meta.parameters),
        "min_region": min_region,
        "regions_before_filter": raw_regions,
        "regions": m.region_count(),
    }
    return m, info
