"""End-to-end retargeting: background carving plus swarm-placed foreground.

The full run is: dilate the mask, inpaint the hole, seam-carve the background
to the target size, cut a super-resolved sprite from the original, then let
the particle swarm pick the sprite's offset and scale by maximizing the
composition fitness, and composite at the winning placement.

The swarm searches (x_hat, y_hat, size): size carries the sprite scale
directly, while the offsets are normalized to [0, 1] and decoded as
x = x_hat * (bg_height - size * sprite_height) (same for y), so the feasible
region stays a static box even though the raw offset range depends on size.
"""
from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, FootprintOutOfBoundsError, SpriteTooLargeError
from .foreground import (
    ForegroundSprite,
    extract_sprite,
    feather_alpha,
    super_resolve,
    upscale_mask,
)
from .inpaint import inpaint_diffusion, inpaint_external
from .pso import OptimizationTrace, PsoConfig, SearchBounds, pso_maximize
from .raster import BinaryMask, RasterImage, TargetSize, dilate, resample, round_half_up
from .scoring import CompositionContext, FitnessReport, score_external, score_rule_based
from .seams import energy_map, retarget_background

STAGES = ("dilate", "inpaint", "seam_carve", "super_resolve", "pso", "merge")


@dataclass(frozen=True)
class Placement:
    """Sprite placement: x is the top row offset, y the left column offset,
    size the uniform scale applied to the sprite's pixels."""

    x: float
    y: float
    size: float

    def __post_init__(self):
        if self.size <= 0.0:
            raise ValueError("placement size must be positive")


@dataclass(frozen=True)
class PipelineConfig:
    """Stage parameters for one retargeting run.

    size_min/size_max bound the sprite scale relative to its native scale
    (size == native_scale reproduces the original on-screen foreground size).
    dilation_radius None means max(3, round(0.02 * min(H, W))).
    """

    dilation_radius: int | None = None
    sr_factor: int = 4
    feather_radius: int = 2
    size_min: float = 0.5
    size_max: float = 1.5
    inpaint_tol: float = 1e-4
    inpaint_max_iters: int = 10_000
    pso: PsoConfig = field(default_factory=PsoConfig)
    scorer: str = "rule_based"
    scorer_command: str | None = None
    inpainter: str = "diffusion"
    inpainter_command: str | None = None

    def __post_init__(self):
        if self.dilation_radius is not None and self.dilation_radius < 0:
            raise ValueError("dilation_radius must be non-negative")
        if self.sr_factor < 1:
            raise ValueError("sr_factor must be at least 1")
        if self.feather_radius < 0:
            raise ValueError("feather_radius must be non-negative")
        if not 0.0 < self.size_min <= self.size_max:
            raise ValueError("need 0 < size_min <= size_max")
        if self.scorer not in ("rule_based", "external"):
            raise ValueError(f"unknown scorer {self.scorer!r}")
        if self.inpainter not in ("diffusion", "external"):
            raise ValueError(f"unknown inpainter {self.inpainter!r}")
        if self.scorer == "external" and not self.scorer_command:
            raise ValueError("external scorer requires a command")
        if self.inpainter == "external" and not self.inpainter_command:
            raise ValueError("external inpainter requires a command")


def default_dilation_radius(height: int, width: int) -> int:
    """Mask-boundary safety margin: 2% of the short side, at least 3 px."""
    return max(3, round_half_up(0.02 * min(height, width)))


def placement_footprint(
    placement: Placement,
    bg_height: int,
    bg_width: int,
    sprite_height: int,
    sprite_width: int,
) -> tuple[int, int, int, int]:
    """Integer footprint (row, col, height, width): round-half-up of x, y,
    size*h, size*w. Raises if the footprint leaves the canvas or has no area."""
    row = round_half_up(placement.x)
    col = round_half_up(placement.y)
    fh = round_half_up(placement.size * sprite_height)
    fw = round_half_up(placement.size * sprite_width)
    if fh < 1 or fw < 1 or row < 0 or col < 0 or row + fh > bg_height or col + fw > bg_width:
        raise FootprintOutOfBoundsError(
            f"footprint {(row, col, fh, fw)} not inside {bg_height}x{bg_width} canvas"
        )
    return row, col, fh, fw


def decode_placement(
    position: np.ndarray,
    bg_height: int,
    bg_width: int,
    sprite_height: int,
    sprite_width: int,
) -> Placement:
    """Map a swarm coordinate (x_hat, y_hat, size) to a concrete Placement.

    Offsets come out integer-valued: the rounded offset is clamped into
    [0, canvas - footprint] so the half-up rounding of offset and extent can
    never push the footprint one pixel past the edge.
    """
    x_hat, y_hat, size = (float(v) for v in position)
    if size <= 0.0:
        raise ValueError("decoded size must be positive")
    fh = min(max(round_half_up(size * sprite_height), 1), bg_height)
    fw = min(max(round_half_up(size * sprite_width), 1), bg_width)
    row = round_half_up(x_hat * (bg_height - size * sprite_height))
    col = round_half_up(y_hat * (bg_width - size * sprite_width))
    row = min(max(row, 0), bg_height - fh)
    col = min(max(col, 0), bg_width - fw)
    return Placement(x=float(row), y=float(col), size=size)


def placement_bounds(
    bg: RasterImage, sprite: ForegroundSprite, cfg: PipelineConfig
) -> SearchBounds:
    """Static search box for (x_hat, y_hat, size).

    size runs from size_min * native_scale up to the largest scale that both
    respects size_max and keeps the sprite inside the canvas. The lower end is
    floored so the rounded footprint always spans at least one pixel per axis.
    """
    size_low = max(
        cfg.size_min * sprite.native_scale,
        0.5 / sprite.height,
        0.5 / sprite.width,
    )
    size_high = min(
        cfg.size_max * sprite.native_scale,
        bg.height / sprite.height,
        bg.width / sprite.width,
    )
    if size_low > size_high:
        raise SpriteTooLargeError(
            f"sprite {sprite.height}x{sprite.width} cannot fit a "
            f"{bg.height}x{bg.width} canvas at minimum size"
        )
    return SearchBounds(
        lower=np.array([0.0, 0.0, size_low]),
        upper=np.array([1.0, 1.0, size_high]),
    )


def merge(bg: RasterImage, sprite: ForegroundSprite, placement: Placement) -> RasterImage:
    """Alpha-composite the sprite over the background at the placement.

    The sprite is bilinearly resampled to its rounded footprint, then blended
    as out = alpha * fg + (1 - alpha) * bg; pixels outside the footprint are
    untouched (an alpha channel on the background passes through unchanged).
    """
    row, col, fh, fw = placement_footprint(
        placement, bg.height, bg.width, sprite.height, sprite.width
    )
    scaled = resample(RasterImage(sprite.rgba), fw, fh, "bilinear").pixels
    alpha = scaled[..., 3:4]
    out = bg.pixels.copy()
    region = out[row : row + fh, col : col + fw, :3]
    out[row : row + fh, col : col + fw, :3] = alpha * scaled[..., :3] + (1.0 - alpha) * region
    return RasterImage(np.clip(out, 0.0, 1.0))


@contextmanager
def _stage(name: str, times: dict):
    start = time.perf_counter()
    try:
        yield
    except Exception as exc:
        exc.stage = name
        raise
    finally:
        times[name] += time.perf_counter() - start


def retarget(
    image: RasterImage,
    mask: BinaryMask,
    target: TargetSize,
    cfg: PipelineConfig | None = None,
    stage_times: dict | None = None,
) -> tuple[RasterImage, FitnessReport | None, OptimizationTrace | None]:
    """Run the full pipeline; returns (output, fitness report, search trace).

    An empty mask short-circuits to background-only retargeting and returns
    (output, None, None). The returned report is always the rule-based
    breakdown at the final placement, even when an external scorer drove the
    search (external scores are unbounded and live in the trace instead).
    When provided, stage_times is filled with seconds spent per stage.
    """
    if cfg is None:
        cfg = PipelineConfig()
    if (mask.height, mask.width) != (image.height, image.width):
        raise DimensionMismatchError(
            f"mask {mask.height}x{mask.width} does not match image "
            f"{image.height}x{image.width}"
        )
    times = {name: 0.0 for name in STAGES}
    if stage_times is not None:
        stage_times.clear()
        stage_times.update(times)
        times = stage_times

    has_foreground = bool(mask.bits.any())
    radius = (
        cfg.dilation_radius
        if cfg.dilation_radius is not None
        else default_dilation_radius(image.height, image.width)
    )

    with _stage("dilate", times):
        dilated = dilate(mask, radius)

    with _stage("inpaint", times):
        if not has_foreground:
            background = image
        elif cfg.inpainter == "external":
            background = inpaint_external(image, dilated, cfg.inpainter_command)
        else:
            background = inpaint_diffusion(
                image, dilated, tol=cfg.inpaint_tol, max_iters=cfg.inpaint_max_iters
            )

    with _stage("seam_carve", times):
        carved = retarget_background(background, target)

    if not has_foreground:
        return carved, None, None

    with _stage("super_resolve", times):
        sr_image = super_resolve(image, cfg.sr_factor)
        sr_mask = upscale_mask(mask, cfg.sr_factor)
        sprite = extract_sprite(sr_image, sr_mask, native_scale=1.0 / cfg.sr_factor)
        sprite = feather_alpha(sprite, cfg.feather_radius)

    with _stage("pso", times):
        bounds = placement_bounds(carved, sprite, cfg)
        energy = energy_map(carved)
        rows = np.flatnonzero(mask.bits.any(axis=1))
        cols = np.flatnonzero(mask.bits.any(axis=0))
        bbox_area = (rows[-1] - rows[0] + 1) * (cols[-1] - cols[0] + 1)
        area_ratio = bbox_area / (image.height * image.width)

        def fitness(position: np.ndarray) -> float:
            placement = decode_placement(
                position, carved.height, carved.width, sprite.height, sprite.width
            )
            if cfg.scorer == "external":
                return score_external(merge(carved, sprite, placement), cfg.scorer_command)
            footprint = placement_footprint(
                placement, carved.height, carved.width, sprite.height, sprite.width
            )
            ctx = CompositionContext(carved, energy, footprint, area_ratio)
            return score_rule_based(ctx).total

        best_position, _, trace = pso_maximize(fitness, bounds, cfg.pso)
        best = decode_placement(
            best_position, carved.height, carved.width, sprite.height, sprite.width
        )

    with _stage("merge", times):
        output = merge(carved, sprite, best)
        footprint = placement_footprint(
            best, carved.height, carved.width, sprite.height, sprite.width
        )
        report = score_rule_based(CompositionContext(carved, energy, footprint, area_ratio))

    return output, report, trace
