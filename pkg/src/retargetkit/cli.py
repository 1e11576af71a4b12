"""Command-line front end: single-image retargeting, dataset evaluation sweeps
with CSV + figure reports, and per-stage timing.

Exit codes: 0 success, 1 runtime/pipeline failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import plots
from .errors import RetargetKitError
from .pipeline import (
    STAGES,
    PipelineConfig,
    decode_placement,
    retarget,
)
from .pso import PsoConfig
from .raster import TargetSize, load_image, load_mask, round_half_up, save_image
from .scoring import DEFAULT_WEIGHTS, FitnessReport

DEFAULT_RATIOS = "0.33,0.66,1.0,1.25,2.0"
_CSV_HEADER = [
    "image_id",
    "ratio_w",
    "ratio_h",
    "target_width",
    "target_height",
    "fitness_total",
    *DEFAULT_WEIGHTS,
    "wall_time",
]


@dataclass
class EvalRecord:
    """One retargeting run of the evaluation sweep."""

    image_id: str
    ratio_w: float
    ratio_h: float
    target_width: int
    target_height: int
    report: FitnessReport | None
    wall_time: float


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retargetkit",
        description="Content-aware image retargeting with foreground-aware placement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ret = sub.add_parser("retarget", help="retarget one image to a target size")
    ret.add_argument("--image", required=True, help="input image (PNG or PPM/PGM)")
    ret.add_argument("--mask", required=True, help="foreground mask image")
    ret.add_argument("--width", type=int, help="target width in pixels")
    ret.add_argument("--height", type=int, help="target height in pixels")
    ret.add_argument("--factor-w", type=float, help="target width as a factor of the source")
    ret.add_argument("--factor-h", type=float, help="target height as a factor of the source")
    ret.add_argument("--out", help="output PNG path (default: <image>_retargeted.png)")
    ret.add_argument("--config", help="JSON file with pipeline configuration")
    ret.add_argument("--seed", type=int, help="random seed for the placement search")
    ret.add_argument("--scorer", help="rule | external:CMD")
    ret.add_argument("--inpainter", help="diffusion | external:CMD")
    ret.add_argument("--dilation-radius", type=int, help="mask dilation radius in pixels")
    ret.add_argument(
        "--trace", help="write per-iteration best (CSV) here, plus a convergence figure"
    )
    ret.set_defaults(func=cmd_retarget, _parser=ret)

    ev = sub.add_parser("evaluate", help="batch-retarget a dataset over a ratio grid")
    ev.add_argument("--dataset", required=True, help="directory of image.png + image_mask.png pairs")
    ev.add_argument("--ratios", default=DEFAULT_RATIOS, help="comma-separated size factors")
    ev.add_argument("--out-csv", default="evaluation.csv", help="results CSV path")
    ev.add_argument("--seed", type=int, default=0, help="random seed for every run")
    ev.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    ev.set_defaults(func=cmd_evaluate, _parser=ev)

    bench = sub.add_parser("bench", help="time the pipeline stages")
    bench.add_argument("--image", required=True)
    bench.add_argument("--mask", required=True)
    bench.add_argument("--repeats", type=int, default=5)
    bench.set_defaults(func=cmd_bench, _parser=bench)

    return parser


def _resolve_target(args, parser, width: int, height: int) -> TargetSize:
    absolute = args.width is not None or args.height is not None
    relative = args.factor_w is not None or args.factor_h is not None
    if absolute == relative:
        parser.error("specify either --width/--height or --factor-w/--factor-h")
    if absolute:
        if args.width is None or args.height is None:
            parser.error("--width and --height must be given together")
        return TargetSize(width=args.width, height=args.height)
    if args.factor_w is None or args.factor_h is None:
        parser.error("--factor-w and --factor-h must be given together")
    return TargetSize(
        width=max(1, round_half_up(width * args.factor_w)),
        height=max(1, round_half_up(height * args.factor_h)),
    )


def _config_from_file(path: str) -> PipelineConfig:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    pso = PsoConfig(**data.pop("pso", {}))
    try:
        return PipelineConfig(pso=pso, **data)
    except TypeError as exc:
        raise ValueError(f"invalid config file {path}: {exc}") from exc


def _apply_overrides(cfg: PipelineConfig, args, parser) -> PipelineConfig:
    updates = {}
    if args.seed is not None:
        updates["pso"] = replace(cfg.pso, seed=args.seed)
    if args.dilation_radius is not None:
        updates["dilation_radius"] = args.dilation_radius
    if args.scorer is not None:
        if args.scorer == "rule":
            updates.update(scorer="rule_based", scorer_command=None)
        elif args.scorer.startswith("external:"):
            updates.update(scorer="external", scorer_command=args.scorer.split(":", 1)[1])
        else:
            parser.error("--scorer must be 'rule' or 'external:CMD'")
    if args.inpainter is not None:
        if args.inpainter == "diffusion":
            updates.update(inpainter="diffusion", inpainter_command=None)
        elif args.inpainter.startswith("external:"):
            updates.update(
                inpainter="external", inpainter_command=args.inpainter.split(":", 1)[1]
            )
        else:
            parser.error("--inpainter must be 'diffusion' or 'external:CMD'")
    return replace(cfg, **updates) if updates else cfg


def _write_trace(trace, target: TargetSize, mask, sr_factor: int, path: str) -> None:
    """Trace CSV of the per-iteration global best, decoded to (x, y, size)."""
    rows = []
    if trace is not None:
        bits = mask.bits
        mask_rows = np.flatnonzero(bits.any(axis=1))
        mask_cols = np.flatnonzero(bits.any(axis=0))
        sprite_h = (mask_rows[-1] - mask_rows[0] + 1) * sr_factor
        sprite_w = (mask_cols[-1] - mask_cols[0] + 1) * sr_factor
        for i in range(len(trace)):
            placement = decode_placement(
                trace.best_positions[i], target.height, target.width, sprite_h, sprite_w
            )
            rows.append(
                [i, f"{trace.best_fitness[i]:.9f}", placement.x, placement.y, placement.size]
            )
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "fitness", "x", "y", "size"])
        writer.writerows(rows)
    if rows:
        plots.save_trace_figure(
            [r[0] for r in rows], [float(r[1]) for r in rows], Path(path).with_suffix(".png")
        )


def cmd_retarget(args) -> int:
    image = load_image(args.image)
    mask = load_mask(args.mask)
    target = _resolve_target(args, args._parser, image.width, image.height)
    cfg = _config_from_file(args.config) if args.config else PipelineConfig()
    cfg = _apply_overrides(cfg, args, args._parser)

    output, report, trace = retarget(image, mask, target, cfg)

    out_path = args.out or f"{Path(args.image).stem}_retargeted.png"
    save_image(output, out_path)
    if args.trace:
        _write_trace(trace, target, mask, cfg.sr_factor, args.trace)
    if report is not None:
        print(f"wrote {out_path} ({target.width}x{target.height}, fitness {report.total:.4f})")
    else:
        print(f"wrote {out_path} ({target.width}x{target.height}, background only)")
    return 0


def _discover_pairs(dataset: Path) -> list[tuple[str, Path, Path]]:
    pairs = []
    for image_path in sorted(dataset.glob("*.png")):
        if image_path.stem.endswith("_mask"):
            continue
        mask_path = image_path.with_name(image_path.stem + "_mask.png")
        pairs.append((image_path.stem, image_path, mask_path))
    return pairs


def cmd_evaluate(args) -> int:
    dataset = Path(args.dataset)
    try:
        ratios = [float(r) for r in args.ratios.split(",") if r.strip()]
    except ValueError:
        args._parser.error(f"cannot parse --ratios {args.ratios!r}")
    if not ratios or any(r <= 0 for r in ratios):
        args._parser.error("--ratios must be positive numbers")

    pairs = _discover_pairs(dataset)
    records: list[EvalRecord] = []
    loaded_any = False
    for image_id, image_path, mask_path in pairs:
        try:
            image = load_image(image_path)
            mask = load_mask(mask_path)
        except (RetargetKitError, OSError) as exc:
            print(f"warning: skipping {image_id}: {exc}", file=sys.stderr)
            continue
        loaded_any = True
        for ratio_w, ratio_h in itertools.product(ratios, ratios):
            target = TargetSize(
                width=max(1, round_half_up(image.width * ratio_w)),
                height=max(1, round_half_up(image.height * ratio_h)),
            )
            cfg = PipelineConfig(pso=PsoConfig(seed=args.seed))
            start = time.perf_counter()
            _, report, _ = retarget(image, mask, target, cfg)
            wall = time.perf_counter() - start
            records.append(
                EvalRecord(image_id, ratio_w, ratio_h, target.width, target.height, report, wall)
            )
    if not loaded_any:
        print("error: no readable image/mask pairs in dataset", file=sys.stderr)
        return 1

    records.sort(key=lambda r: (r.image_id, r.target_width, r.target_height))
    _write_eval_csv(records, ratios, args.out_csv)
    if not args.no_plots:
        stem = Path(args.out_csv)
        plots.save_fitness_figure(records, stem.with_name(stem.stem + "_fitness.png"))
        plots.save_timing_figure(records, stem.with_name(stem.stem + "_times.png"))
    print(f"wrote {args.out_csv} ({len(records)} runs)")
    return 0


def _write_eval_csv(records: list[EvalRecord], ratios: list[float], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(_CSV_HEADER)
        for rec in records:
            fitness = f"{rec.report.total:.6f}" if rec.report else ""
            components = [
                f"{rec.report.components[name]:.6f}" if rec.report else ""
                for name in DEFAULT_WEIGHTS
            ]
            writer.writerow(
                [
                    rec.image_id,
                    rec.ratio_w,
                    rec.ratio_h,
                    rec.target_width,
                    rec.target_height,
                    fitness,
                    *components,
                    f"{rec.wall_time:.4f}",
                ]
            )
        for ratio_w, ratio_h in itertools.product(ratios, ratios):
            bucket = [r for r in records if (r.ratio_w, r.ratio_h) == (ratio_w, ratio_h)]
            if not bucket:
                continue
            scored = [r.report.total for r in bucket if r.report is not None]
            mean_fit = f"{sum(scored) / len(scored):.6f}" if scored else ""
            mean_wall = sum(r.wall_time for r in bucket) / len(bucket)
            writer.writerow(
                ["summary", ratio_w, ratio_h, "", "", mean_fit, "", "", "", "", f"{mean_wall:.4f}"]
            )


def cmd_bench(args) -> int:
    image = load_image(args.image)
    mask = load_mask(args.mask)
    if args.repeats < 1:
        args._parser.error("--repeats must be at least 1")
    # A fixed asymmetric target so both seam directions get exercised.
    target = TargetSize(
        width=max(1, round_half_up(image.width * 0.75)),
        height=max(1, round_half_up(image.height * 1.25)),
    )
    sums = {name: 0.0 for name in STAGES}
    total = 0.0
    for _ in range(args.repeats):
        times: dict = {}
        start = time.perf_counter()
        retarget(image, mask, target, PipelineConfig(), stage_times=times)
        total += time.perf_counter() - start
        for name in STAGES:
            sums[name] += times[name]
    for name in STAGES:
        print(f"{name}={sums[name] / args.repeats:.6f}")
    print(f"total={total / args.repeats:.6f}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RetargetKitError, OSError, ValueError) as exc:
        stage = getattr(exc, "stage", "pipeline")
        print(f"error [{stage}]: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
