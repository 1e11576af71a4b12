"""Composition fitness for candidate placements.

The built-in rule-based scorer blends four interpretable terms, each in
[0, 1]: closeness of the sprite centroid to a rule-of-thirds intersection,
how little busy background the footprint occludes, breathing room to the
canvas edges, and how far the footprint strays from the foreground's
original relative size. An external hook lets a learned assessor take over
as the objective instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from ._proc import run_tool, workdir
from .errors import FootprintOutOfBoundsError, UnparsableScoreError
from .raster import RasterImage, save_image
from .seams import EnergyMap

DEFAULT_WEIGHTS = {
    "thirds": 0.35,
    "occlusion": 0.30,
    "clearance": 0.15,
    "scale": 0.20,
}

_ENERGY_FLOOR = 1e-9


@dataclass(frozen=True)
class FitnessReport:
    """Weighted-mean fitness with its per-term breakdown."""

    total: float
    components: dict[str, float]
    weights: dict[str, float]

    def __post_init__(self):
        if not self.weights or any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be non-negative")
        if sum(self.weights.values()) <= 0:
            raise ValueError("weights must not all be zero")
        for name, value in self.components.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"component {name!r} out of [0, 1]: {value}")
        mean = sum(self.weights[k] * v for k, v in self.components.items()) / sum(
            self.weights.values()
        )
        if abs(self.total - mean) > 1e-9:
            raise ValueError("total must equal the weighted mean of the components")


@dataclass(frozen=True)
class CompositionContext:
    """Everything the rule-based scorer needs about one candidate placement.

    footprint is (row, col, height, width) in background pixel coordinates;
    original_area_ratio is the foreground bounding-box area divided by the
    original image area. Background and energy are shared across candidates
    so scoring never recomputes them per particle.
    """

    background: RasterImage
    background_energy: EnergyMap
    footprint: tuple[int, int, int, int]
    original_area_ratio: float

    def __post_init__(self):
        row, col, fh, fw = self.footprint
        if row + fh <= 0 or col + fw <= 0 or row >= self.background.height or col >= self.background.width:
            raise ValueError("footprint does not intersect the background canvas")
        if self.original_area_ratio <= 0.0:
            raise ValueError("original_area_ratio must be positive")


def score_rule_based(
    ctx: CompositionContext, weights: dict[str, float] | None = None
) -> FitnessReport:
    """Score one in-bounds placement; see module docstring for the four terms."""
    canvas_h, canvas_w = ctx.background.height, ctx.background.width
    row, col, fh, fw = ctx.footprint
    if fh < 1 or fw < 1 or row < 0 or col < 0 or row + fh > canvas_h or col + fw > canvas_w:
        raise FootprintOutOfBoundsError(
            f"footprint {(row, col, fh, fw)} not inside {canvas_h}x{canvas_w} canvas"
        )

    cy = row + fh / 2.0
    cx = col + fw / 2.0
    d = min(
        math.hypot(cy - canvas_h * fy, cx - canvas_w * fx)
        for fy in (1 / 3, 2 / 3)
        for fx in (1 / 3, 2 / 3)
    )
    d_max = math.hypot(canvas_h, canvas_w) / 3.0
    thirds = 1.0 - d / d_max

    energy = ctx.background_energy.values
    mean_under = float(energy[row : row + fh, col : col + fw].mean())
    mean_all = float(energy.mean())
    occlusion = min(1.0, max(0.0, 1.0 - mean_under / max(mean_all, _ENERGY_FLOOR)))

    margin = min(row, col, canvas_h - (row + fh), canvas_w - (col + fw))
    clearance = min(1.0, 2.0 * margin / min(canvas_h, canvas_w))

    area_ratio = (fh * fw) / (canvas_h * canvas_w)
    scale = math.exp(-abs(math.log(area_ratio / ctx.original_area_ratio)))

    components = {
        "thirds": thirds,
        "occlusion": occlusion,
        "clearance": clearance,
        "scale": scale,
    }
    w = DEFAULT_WEIGHTS if weights is None else weights
    total = sum(w[k] * components[k] for k in components) / sum(w.values())
    return FitnessReport(total=total, components=components, weights=dict(w))


def score_external(image: RasterImage, command: str) -> float:
    """Ask `command <image.png>` for a score and parse stdout as one decimal."""
    with workdir() as tmp:
        image_path = Path(tmp) / "candidate.png"
        save_image(image, image_path)
        stdout = run_tool(command, [image_path])
    text = stdout.strip()
    try:
        return float(text)
    except ValueError as exc:
        raise UnparsableScoreError(
            f"external scorer printed {text!r}, expected one decimal number"
        ) from exc
