"""Image and mask primitives: file I/O, resampling, and morphological dilation.

Pixels are carried as float64 intensities in [0, 1] end to end; quantization to
8 bits happens only when a file is written (round half up per channel).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from PIL import Image, UnidentifiedImageError

from .errors import CorruptDataError, UnsupportedFormatError

RESAMPLE_METHODS = ("nearest", "bilinear", "bicubic")

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_HIGH_DEPTH_MODES = ("I", "I;16", "I;16B", "I;16L", "I;16N", "F")


def round_half_up(value: float) -> int:
    """Round to the nearest integer, halves toward +inf."""
    return int(np.floor(value + 0.5))


@dataclass(frozen=True)
class RasterImage:
    """H×W×C grid of per-channel intensities in [0, 1]; C is 3 (RGB) or 4 (RGBA)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64, copy=True)
        if px.ndim != 3 or px.shape[2] not in (3, 4):
            raise ValueError(f"expected (H, W, 3|4) pixel grid, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image dimensions must be at least 1x1")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("pixel intensities must lie in [0, 1]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]


@dataclass(frozen=True)
class BinaryMask:
    """H×W boolean grid, True marking foreground pixels."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool, copy=True)
        if bits.ndim != 2:
            raise ValueError(f"expected (H, W) bit grid, got shape {bits.shape}")
        if bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ValueError("mask dimensions must be at least 1x1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]


@dataclass(frozen=True)
class TargetSize:
    """Requested output dimensions in pixels."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("target dimensions must be at least 1 pixel")


def _starts_with_supported_magic(path: Path) -> bool:
    try:
        head = path.open("rb").read(8)
    except OSError:
        return False
    return head.startswith(_PNG_MAGIC) or head[:2] in (b"P5", b"P6")


def load_image(path: str | Path) -> RasterImage:
    """Decode a PNG or binary PPM/PGM file into unit-interval intensities.

    Grayscale inputs are replicated to RGB; an alpha channel is preserved.
    """
    path = Path(path)
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "PPM"):
                raise UnsupportedFormatError(
                    f"{path}: format {im.format!r} not supported (PNG, PPM, PGM only)"
                )
            if im.mode in _HIGH_DEPTH_MODES:
                raise UnsupportedFormatError(f"{path}: only 8-bit depth is supported")
            wants_alpha = "A" in im.getbands() or "transparency" in im.info
            converted = im.convert("RGBA" if wants_alpha else "RGB")
            arr = np.asarray(converted, dtype=np.float64) / 255.0
    except FileNotFoundError:
        raise
    except UnidentifiedImageError as exc:
        if _starts_with_supported_magic(path):
            raise CorruptDataError(f"{path}: cannot decode file: {exc}") from exc
        raise UnsupportedFormatError(f"{path}: unrecognized image format") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        # Truncated or malformed pixel data surfaces here from Pillow.
        raise CorruptDataError(f"{path}: cannot decode file: {exc}") from exc
    return RasterImage(arr)


def save_image(image: RasterImage, path: str | Path) -> None:
    """Write an image as PNG or binary PPM, quantizing to 8 bits (round half up)."""
    path = Path(path)
    suffix = path.suffix.lower()
    quant = np.floor(image.pixels * 255.0 + 0.5).astype(np.uint8)
    if suffix == ".png":
        mode = "RGBA" if image.channels == 4 else "RGB"
        Image.fromarray(quant, mode).save(path, format="PNG")
    elif suffix == ".ppm":
        if image.channels != 3:
            raise UnsupportedFormatError("PPM cannot carry an alpha channel")
        Image.fromarray(quant, "RGB").save(path, format="PPM")
    else:
        raise UnsupportedFormatError(
            f"cannot infer a supported output format from suffix {suffix!r}"
        )


def load_mask(path: str | Path) -> BinaryMask:
    """Load a mask image; a pixel is foreground iff its mean intensity exceeds 0.5."""
    image = load_image(path)
    mean = image.pixels[..., :3].mean(axis=2)
    return BinaryMask(mean > 0.5)


def _window_any(bits: np.ndarray, radius: int, axis: int) -> np.ndarray:
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(bits, pad, mode="constant", constant_values=False)
    return sliding_window_view(padded, 2 * radius + 1, axis=axis).any(axis=-1)


def dilate(mask: BinaryMask, radius: int) -> BinaryMask:
    """Dilate with a square structuring element of side 2*radius + 1.

    Output pixel is True iff any input pixel within Chebyshev distance
    `radius` is True. Separable, so two 1-D max passes suffice.
    """
    if radius < 0:
        raise ValueError("dilation radius must be non-negative")
    if radius == 0:
        return BinaryMask(mask.bits)
    out = _window_any(mask.bits, radius, axis=0)
    out = _window_any(out, radius, axis=1)
    return BinaryMask(out)


def _cubic_kernel(t: np.ndarray) -> np.ndarray:
    # Keys bicubic with a = -0.5 (Catmull-Rom); support |t| < 2.
    t = np.abs(t)
    near = ((1.5 * t - 2.5) * t) * t + 1.0
    far = ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0
    return np.where(t <= 1.0, near, np.where(t < 2.0, far, 0.0))


def _resample_axis(px: np.ndarray, new_size: int, axis: int, method: str) -> np.ndarray:
    old = px.shape[axis]
    if new_size == old:
        return px
    coords = (np.arange(new_size) + 0.5) * (old / new_size) - 0.5
    np.clip(coords, 0.0, float(old - 1), out=coords)
    if method == "nearest":
        idx = np.minimum(np.floor(coords + 0.5).astype(np.intp), old - 1)
        return np.take(px, idx, axis=axis)
    anchor = np.floor(coords)
    frac = coords - anchor
    anchor = anchor.astype(np.intp)
    if method == "bilinear":
        offsets = (0, 1)
        weights = (1.0 - frac, frac)
    else:
        offsets = (-1, 0, 1, 2)
        weights = tuple(_cubic_kernel(frac - off) for off in offsets)
    shape = [1] * px.ndim
    shape[axis] = new_size
    acc = None
    for off, w in zip(offsets, weights):
        idx = np.clip(anchor + off, 0, old - 1)
        term = w.reshape(shape) * np.take(px, idx, axis=axis)
        acc = term if acc is None else acc + term
    return acc


def resample(
    image: RasterImage, new_width: int, new_height: int, method: str = "bilinear"
) -> RasterImage:
    """Resize with pixel-center alignment: src = (dst + 0.5) * (old/new) - 0.5.

    Source coordinates are clamped to the valid range (edge replication) and
    the output is clamped to [0, 1]. Axes with unchanged size are passed
    through untouched, so same-size resampling is the identity.
    """
    if method not in RESAMPLE_METHODS:
        raise ValueError(f"unknown resampling method {method!r}")
    if new_width < 1 or new_height < 1:
        raise ValueError("resample target dimensions must be at least 1 pixel")
    out = _resample_axis(image.pixels, new_height, 0, method)
    out = _resample_axis(out, new_width, 1, method)
    return RasterImage(np.clip(out, 0.0, 1.0))
