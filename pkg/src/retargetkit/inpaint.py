"""Fill the foreground hole in a background image.

The built-in method is harmonic (diffusion) fill: hole pixels are Jacobi-
averaged from their 4-neighborhoods until the update stalls, which converges
to the discrete Laplace solution with the surrounding pixels as Dirichlet
boundary. An external-process hook accepts drop-in replacements.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from ._proc import run_tool, workdir
from .errors import DimensionMismatchError, EmptyImageError
from .raster import BinaryMask, RasterImage, load_image, save_image


def inpaint_diffusion(
    image: RasterImage,
    hole: BinaryMask,
    tol: float = 1e-4,
    max_iters: int = 10_000,
) -> RasterImage:
    """Jacobi-average hole pixels from their in-bounds 4-neighbors.

    Hole pixels start at the per-channel mean of all non-hole pixels and
    iterate until the largest per-channel change in one sweep drops below
    `tol` (or `max_iters` sweeps). Pixels outside the hole are returned
    bit-identical.
    """
    if (hole.height, hole.width) != (image.height, image.width):
        raise DimensionMismatchError(
            f"hole {hole.height}x{hole.width} does not match image "
            f"{image.height}x{image.width}"
        )
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    bits = hole.bits
    if not bits.any():
        return image
    if bits.all():
        raise EmptyImageError("hole covers every pixel; nothing to diffuse from")

    px = image.pixels.copy()
    px[bits] = px[~bits].mean(axis=0)

    # Updates only touch hole pixels, so iterate over the hole's bounding box
    # (plus a 1-pixel ring of fixed boundary values where available).
    rows = np.flatnonzero(bits.any(axis=1))
    cols = np.flatnonzero(bits.any(axis=0))
    r0 = max(rows[0] - 1, 0)
    r1 = min(rows[-1] + 2, image.height)
    c0 = max(cols[0] - 1, 0)
    c1 = min(cols[-1] + 2, image.width)
    sub = px[r0:r1, c0:c1]
    smask = bits[r0:r1, c0:c1]

    h, w, _ = sub.shape
    counts = np.zeros((h, w), dtype=np.float64)
    counts[1:] += 1
    counts[:-1] += 1
    counts[:, 1:] += 1
    counts[:, :-1] += 1
    hole_counts = counts[smask][:, None]

    for _ in range(max_iters):
        nb = np.zeros_like(sub)
        nb[1:] += sub[:-1]
        nb[:-1] += sub[1:]
        nb[:, 1:] += sub[:, :-1]
        nb[:, :-1] += sub[:, 1:]
        new_vals = nb[smask] / hole_counts
        delta = np.abs(new_vals - sub[smask]).max()
        sub[smask] = new_vals
        if delta < tol:
            break
    return RasterImage(np.clip(px, 0.0, 1.0))


def inpaint_external(image: RasterImage, hole: BinaryMask, command: str) -> RasterImage:
    """Delegate inpainting to `command <image.png> <mask.png> <out.png>`.

    The mask is written as 8-bit gray with 255 marking the hole. The tool's
    output must decode to the input's dimensions.
    """
    with workdir() as tmp:
        tmp = Path(tmp)
        image_path = tmp / "input.png"
        mask_path = tmp / "mask.png"
        out_path = tmp / "output.png"
        save_image(image, image_path)
        Image.fromarray(hole.bits.astype(np.uint8) * 255, "L").save(mask_path)
        run_tool(command, [image_path, mask_path, out_path])
        result = load_image(out_path)
    if (result.height, result.width) != (image.height, image.width):
        raise DimensionMismatchError(
            f"external inpainter returned {result.height}x{result.width}, "
            f"expected {image.height}x{image.width}"
        )
    return result
