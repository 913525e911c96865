"""Command-line interface.

Subcommands: hillshade, segment {meanshift,slic,voronoi}, evaluate, sweep,
ingest, synth.  Failures print a machine-readable JSON error to stderr and
exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .colorspace import rgb_to_lab
from .hoover import evaluate_segmentation, hoover_classify, overlap_table
from .labels import relabel_connected
from .meanshift import MeanShiftParams, mean_shift_segment
from .raster_io import (
    FormatError,
    read_asc_grid,
    read_gray_pgm16,
    read_pgm16,
    read_ppm,
    write_asc_grid,
    write_gray_pgm16,
    write_pgm16,
)
from .slic import SlicParams, slic
from .sweep import (
    ExternalMaskMetadata,
    emit_report,
    ingest_external_mask,
    load_sweep_config,
    run_sweep,
)
from .synth import synth_pilefield
from .terrain import HillshadeParams, StretchParams, hillshade, quantize8, sigmoidal_stretch
from .voronoi import VoronoiParams, voronoi_pipeline


def _cmd_hillshade(args: argparse.Namespace) -> int:
    dsm = read_asc_grid(args.dsm)
    shade = hillshade(dsm, HillshadeParams(args.azimuth, args.altitude, args.z_factor))
    stretched = sigmoidal_stretch(shade, StretchParams(args.strength, args.scale))
    out = Path(args.out)
    if out.suffix.lower() == ".asc":
        write_asc_grid(stretched, out)
    elif out.suffix.lower() == ".pgm":
        write_gray_pgm16(quantize8(stretched), out)
    else:
        raise ValueError(f"unsupported output extension {out.suffix!r} (use .asc or .pgm)")
    return 0


def _cmd_segment(args: argparse.Namespace) -> int:
    if args.method == "meanshift":
        img = read_ppm(args.input)
        params = MeanShiftParams(
            spatial_radius=args.hs,
            range_radius=args.hr,
            min_region_size=args.min_region,
        )
        seg = mean_shift_segment(img, params)
    elif args.method == "slic":
        img = read_ppm(args.input)
        seg = slic(rgb_to_lab(img), SlicParams(superpixels=args.k, compactness=args.m, iterations=args.iterations))
    else:
        gray = read_gray_pgm16(args.input)
        params = VoronoiParams(
            sigma=args.sigma,
            peak_radius=args.peak_radius,
            restrict_to_foreground=not args.no_restrict,
            invert_foreground=args.invert,
        )
        seg = voronoi_pipeline(gray, params)
    write_pgm16(relabel_connected(seg), args.out)
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    gt = read_pgm16(args.gt)
    pred = read_pgm16(args.pred)
    if not args.no_relabel:
        gt = relabel_connected(gt)
        pred = relabel_connected(pred)
    table = overlap_table(gt, pred)
    classification = hoover_classify(table, args.threshold)
    scores = evaluate_segmentation(gt, pred, args.threshold)
    payload = scores.to_dict()
    payload["instances"] = {
        "correct_pairs": [list(p) for p in classification.correct_pairs],
        "over": [{"gt": g, "ms": list(ms)} for g, ms in classification.over_instances],
        "under": [{"ms": m, "gt": list(gs)} for m, gs in classification.under_instances],
        "missed_gt": classification.missed_gt,
        "noise_ms": classification.noise_ms,
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_sweep_config(args.config)
    report = run_sweep(cfg)
    if args.csv:
        emit_report(report, "csv", args.csv)
    if args.json:
        emit_report(report, "json", args.json)
    if not args.csv and not args.json:
        from .sweep import report_json

        sys.stdout.write(report_json(report))
    return 0


def _cmd_ingest(args: argparse.Namespace) -> int:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise ValueError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key] = value
    meta = ExternalMaskMetadata(source=args.source or "", parameters=params)
    mask, info = ingest_external_mask(args.input, meta, args.min_region)
    write_pgm16(mask, args.out)
    if args.report:
        Path(args.report).write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    dsm, gt = synth_pilefield(args.rows, args.cols, args.bumps, args.bump_sigma, args.seed)
    write_asc_grid(dsm, args.dsm)
    write_pgm16(gt, args.gt)
    if args.out_stretched:
        stretched = sigmoidal_stretch(dsm, StretchParams(args.strength, args.scale))
        write_gray_pgm16(quantize8(stretched), args.out_stretched)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spoilseg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hillshade", help="stretched hillshade from an ASCII-grid DSM")
    p.add_argument("--dsm", required=True)
    p.add_argument("--azimuth", type=float, default=315.0)
    p.add_argument("--altitude", type=float, default=45.0)
    p.add_argument("--z-factor", dest="z_factor", type=float, default=1.0)
    p.add_argument("--strength", type=float, default=3.0)
    p.add_argument("--scale", type=float, default=2.0)
    p.add_argument("--out", required=True, help="output path (.asc or .pgm)")
    p.set_defaults(func=_cmd_hillshade)

    p = sub.add_parser("segment", help="run one segmentation algorithm")
    seg_sub = p.add_subparsers(dest="method", required=True)

    ms = seg_sub.add_parser("meanshift")
    ms.add_argument("--in", dest="input", required=True)
    ms.add_argument("--hs", type=float, default=5.0, help="spatial radius in pixels")
    ms.add_argument("--hr", type=float, default=20.0, help="range radius in digital numbers")
    ms.add_argument("--min-region", dest="min_region", type=int, default=10000)
    ms.add_argument("--out", required=True)
    ms.set_defaults(func=_cmd_segment)

    sl = seg_sub.add_parser("slic")
    sl.add_argument("--in", dest="input", required=True)
    sl.add_argument("--k", type=int, default=550, help="superpixel count")
    sl.add_argument("--m", type=float, default=30.0, help="compactness weight")
    sl.add_argument("--iterations", type=int, default=10)
    sl.add_argument("--out", required=True)
    sl.set_defaults(func=_cmd_segment)

    vo = seg_sub.add_parser("voronoi")
    vo.add_argument("--in", dest="input", required=True, help="8-bit gray PGM16")
    vo.add_argument("--sigma", type=float, default=12.0)
    vo.add_argument("--peak-radius", dest="peak_radius", type=int, default=None)
    vo.add_argument("--no-restrict", action="store_true", help="tessellate the full frame")
    vo.add_argument("--invert", action="store_true", help="foreground below the threshold")
    vo.add_argument("--out", required=True)
    vo.set_defaults(func=_cmd_segment)

    p = sub.add_parser("evaluate", help="Hoover scores of a prediction against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--no-relabel", action="store_true", help="skip connected-component normalisation")
    p.add_argument("--out", help="JSON report path (stdout when omitted)")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="run a parameter sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--csv", help="CSV report path")
    p.add_argument("--json", help="JSON report path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ingest", help="normalise an externally produced mask")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-region", dest="min_region", type=int, default=0)
    p.add_argument("--source", help="producer name recorded in the report")
    p.add_argument("--param", action="append", help="key=value metadata, repeatable")
    p.add_argument("--report", help="JSON metadata report path")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("synth", help="generate a synthetic pile field")
    p.add_argument("--rows", type=int, default=300)
    p.add_argument("--cols", type=int, default=300)
    p.add_argument("--bumps", type=int, default=9)
    p.add_argument("--bump-sigma", dest="bump_sigma", type=float, default=8.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dsm", required=True, help="output DSM path (.asc)")
    p.add_argument("--gt", required=True, help="output ground-truth path (.pgm)")
    p.add_argument("--out-stretched", dest="out_stretched", help="optional stretched 8-bit PGM")
    p.add_argument("--strength", type=float, default=3.0)
    p.add_argument("--scale", type=float, default=2.0)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ValueError, OSError, KeyError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
