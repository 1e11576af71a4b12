"""Foreground sprite preparation: super-resolution, extraction, feathering.

The sprite is cut from a super-resolved copy of the input so that upscaled
placements have pixel headroom; its alpha comes from the (nearest-upscaled)
mask and can be feathered for softer compositing.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._proc import run_tool, workdir
from .errors import DimensionMismatchError, NoForegroundError
from .raster import BinaryMask, RasterImage, load_image, resample, save_image


@dataclass(frozen=True)
class ForegroundSprite:
    """RGBA cutout of the foreground, cropped to the tight alpha bounding box.

    native_scale is the scale at which the sprite reproduces the foreground's
    size in the original image (1 / super-resolution factor).
    """

    rgba: np.ndarray
    native_scale: float = 1.0

    def __post_init__(self):
        rgba = np.array(self.rgba, dtype=np.float64, copy=True)
        if rgba.ndim != 3 or rgba.shape[2] != 4:
            raise ValueError(f"expected (H, W, 4) sprite, got shape {rgba.shape}")
        if rgba.min() < 0.0 or rgba.max() > 1.0:
            raise ValueError("sprite values must lie in [0, 1]")
        alpha = rgba[..., 3]
        if not (alpha > 0).any():
            raise ValueError("sprite must contain at least one visible pixel")
        if (
            not alpha[0].any()
            or not alpha[-1].any()
            or not alpha[:, 0].any()
            or not alpha[:, -1].any()
        ):
            raise ValueError("sprite bounding box must be tight around its alpha")
        if self.native_scale <= 0.0:
            raise ValueError("native_scale must be positive")
        rgba.setflags(write=False)
        object.__setattr__(self, "rgba", rgba)

    @property
    def height(self) -> int:
        return self.rgba.shape[0]

    @property
    def width(self) -> int:
        return self.rgba.shape[1]


def super_resolve(image: RasterImage, factor: int) -> RasterImage:
    """Bicubic upscale by an integer factor on both axes; factor 1 is identity."""
    if factor < 1:
        raise ValueError("super-resolution factor must be at least 1")
    if factor == 1:
        return image
    return resample(image, image.width * factor, image.height * factor, "bicubic")


def upscale_mask(mask: BinaryMask, factor: int) -> BinaryMask:
    """Nearest-neighbor mask upscale (block replication keeps bits binary)."""
    if factor < 1:
        raise ValueError("super-resolution factor must be at least 1")
    if factor == 1:
        return BinaryMask(mask.bits)
    return BinaryMask(np.repeat(np.repeat(mask.bits, factor, axis=0), factor, axis=1))


def extract_sprite(
    sr_image: RasterImage, sr_mask: BinaryMask, native_scale: float = 1.0
) -> ForegroundSprite:
    """Crop to the mask's tight bounding box; alpha is 1 inside the mask, 0 outside."""
    if (sr_mask.height, sr_mask.width) != (sr_image.height, sr_image.width):
        raise DimensionMismatchError(
            f"mask {sr_mask.height}x{sr_mask.width} does not match image "
            f"{sr_image.height}x{sr_image.width}"
        )
    bits = sr_mask.bits
    if not bits.any():
        raise NoForegroundError("mask has no foreground pixels")
    rows = np.flatnonzero(bits.any(axis=1))
    cols = np.flatnonzero(bits.any(axis=0))
    r0, r1 = rows[0], rows[-1] + 1
    c0, c1 = cols[0], cols[-1] + 1
    rgb = sr_image.pixels[r0:r1, c0:c1, :3]
    alpha = bits[r0:r1, c0:c1].astype(np.float64)
    rgba = np.concatenate((rgb, alpha[..., None]), axis=2)
    return ForegroundSprite(rgba, native_scale=native_scale)


def feather_alpha(sprite: ForegroundSprite, radius: int) -> ForegroundSprite:
    """Soften the alpha channel with a normalized box filter of side 2*radius + 1.

    Borders are edge-clamped so a fully opaque sprite stays fully opaque.
    RGB is untouched; radius 0 returns the sprite unchanged.
    """
    if radius < 0:
        raise ValueError("feather radius must be non-negative")
    if radius == 0:
        return sprite
    side = 2 * radius + 1
    padded = np.pad(sprite.rgba[..., 3], radius, mode="edge")
    alpha = sliding_window_view(padded, (side, side)).mean(axis=(2, 3))
    rgba = np.concatenate((sprite.rgba[..., :3], alpha[..., None]), axis=2)
    return ForegroundSprite(rgba, native_scale=sprite.native_scale)


def super_resolve_external(image: RasterImage, factor: int, command: str) -> RasterImage:
    """Delegate upscaling to `command <in.png> <factor> <out.png>`.

    The tool's output must decode to exactly factor times the input size.
    """
    if factor < 1:
        raise ValueError("super-resolution factor must be at least 1")
    with workdir() as tmp:
        tmp = Path(tmp)
        in_path = tmp / "input.png"
        out_path = tmp / "output.png"
        save_image(image, in_path)
        run_tool(command, [in_path, factor, out_path])
        result = load_image(out_path)
    expected = (image.height * factor, image.width * factor)
    if (result.height, result.width) != expected:
        raise DimensionMismatchError(
            f"external upscaler returned {result.height}x{result.width}, "
            f"expected {expected[0]}x{expected[1]}"
        )
    return result
