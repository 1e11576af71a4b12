"""Content-aware background resizing via seam carving.

Energy is the L1 gradient magnitude of luminance. Seams are found by the
classic dynamic program and removed or duplicated one dimension at a time;
horizontal seams reuse the vertical code on transposed data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EnlargementTooLargeError, SeamOutOfBoundsError
from .raster import RasterImage, TargetSize


@dataclass(frozen=True)
class EnergyMap:
    """Per-pixel non-negative importance estimate, same shape as the image."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise ValueError(f"expected (H, W) energy grid, got shape {values.shape}")
        if values.min() < 0.0:
            raise ValueError("energy values must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Seam:
    """Monotone 8-connected path: one column per row (vertical) or vice versa."""

    orientation: str
    coords: np.ndarray

    def __post_init__(self):
        if self.orientation not in ("vertical", "horizontal"):
            raise ValueError(f"unknown seam orientation {self.orientation!r}")
        coords = np.array(self.coords, dtype=np.intp, copy=True)
        if coords.ndim != 1 or coords.size < 1:
            raise ValueError("seam coordinates must be a non-empty 1-D sequence")
        if coords.size > 1 and np.abs(np.diff(coords)).max() > 1:
            raise ValueError("successive seam entries may differ by at most 1")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)


def energy_map(image: RasterImage) -> EnergyMap:
    """|dL/dx| + |dL/dy| of mean-RGB luminance; central differences inside,
    one-sided at the borders. Alpha, if present, is ignored."""
    lum = image.pixels[..., :3].mean(axis=2)
    h, w = lum.shape
    gy = np.gradient(lum, axis=0) if h >= 2 else np.zeros_like(lum)
    gx = np.gradient(lum, axis=1) if w >= 2 else np.zeros_like(lum)
    return EnergyMap(np.abs(gx) + np.abs(gy))


def find_vertical_seam(energy: EnergyMap) -> Seam:
    """Minimum-energy top-to-bottom path via the DP recurrence
    M(r,c) = e(r,c) + min(M(r-1,c-1), M(r-1,c), M(r-1,c+1)).

    Every tie is broken toward the smallest column index, which makes the
    result fully deterministic.
    """
    e = energy.values
    h, w = e.shape
    cost = e[0].copy()
    parent = np.empty((h, w), dtype=np.intp)
    cols = np.arange(w)
    for r in range(1, h):
        left = np.concatenate(([np.inf], cost[:-1]))
        right = np.concatenate((cost[1:], [np.inf]))
        stacked = np.stack((left, cost, right))
        pick = np.argmin(stacked, axis=0)  # first minimum = leftmost parent
        parent[r] = cols + pick - 1
        cost = e[r] + stacked[pick, cols]
    col = int(np.argmin(cost))
    coords = np.empty(h, dtype=np.intp)
    coords[h - 1] = col
    for r in range(h - 1, 0, -1):
        col = parent[r, col]
        coords[r - 1] = col
    return Seam("vertical", coords)


def find_horizontal_seam(energy: EnergyMap) -> Seam:
    """Horizontal analogue, realized on the transposed energy map."""
    seam = find_vertical_seam(EnergyMap(energy.values.T))
    return Seam("horizontal", seam.coords)


def _transposed(image: RasterImage) -> RasterImage:
    return RasterImage(image.pixels.transpose(1, 0, 2))


def remove_seam(image: RasterImage, seam: Seam) -> RasterImage:
    """Drop the seam's pixel from every row (or column), shrinking one axis by 1."""
    if seam.orientation == "horizontal":
        flipped = remove_seam(_transposed(image), Seam("vertical", seam.coords))
        return _transposed(flipped)
    px = image.pixels
    h, w, c = px.shape
    if w < 2:
        raise ValueError("cannot remove a seam from a 1-pixel-wide image")
    coords = seam.coords
    if coords.size != h or coords.min() < 0 or coords.max() >= w:
        raise SeamOutOfBoundsError(
            f"vertical seam of length {coords.size} does not fit a {h}x{w} image"
        )
    keep = np.ones((h, w), dtype=bool)
    keep[np.arange(h), coords] = False
    return RasterImage(px[keep].reshape(h, w - 1, c))


def insert_seams(image: RasterImage, orientation: str, k: int) -> RasterImage:
    """Duplicate the k lowest-energy disjoint seams, growing one axis by k.

    Seams are located on the original image by iteratively finding and
    virtually removing them; each duplicate pixel is the average of its two
    neighbors across the seam. k is capped at 50% of the current dimension
    per call (a 1-pixel axis may still be doubled).
    """
    if orientation == "horizontal":
        grown = insert_seams(_transposed(image), "vertical", k)
        return _transposed(grown)
    if orientation != "vertical":
        raise ValueError(f"unknown seam orientation {orientation!r}")
    if k < 1:
        raise ValueError("seam insertion count must be at least 1")
    px = image.pixels
    h, w, c = px.shape
    if k > max(1, w // 2):
        raise EnlargementTooLargeError(
            f"cannot insert {k} seams into width {w} in one pass (50% cap)"
        )
    if w == 1:
        seam_cols = [np.zeros(h, dtype=np.intp)]
    else:
        seam_cols = []
        work = image
        index_map = np.tile(np.arange(w, dtype=np.intp), (h, 1))
        rows = np.arange(h)
        for i in range(k):
            seam = find_vertical_seam(energy_map(work))
            seam_cols.append(index_map[rows, seam.coords].copy())
            if i < k - 1:
                keep = np.ones(index_map.shape, dtype=bool)
                keep[rows, seam.coords] = False
                index_map = index_map[keep].reshape(h, index_map.shape[1] - 1)
                work = remove_seam(work, seam)
    cols_per_row = np.sort(np.stack(seam_cols, axis=1), axis=1)
    out = np.empty((h, w + k, c), dtype=np.float64)
    for r in range(h):
        cols = cols_per_row[r]
        vals = (px[r, cols] + px[r, np.minimum(cols + 1, w - 1)]) / 2.0
        out[r] = np.insert(px[r], cols + 1, vals, axis=0)
    return RasterImage(out)


def retarget_background(image: RasterImage, target: TargetSize) -> RasterImage:
    """Seam-carve to the exact target size: width first, then height.

    Removal re-finds the seam after every carve; enlargement proceeds in
    passes of at most 50% so energy is recomputed as the image grows.
    """
    out = image
    while out.width > target.width:
        out = remove_seam(out, find_vertical_seam(energy_map(out)))
    while out.width < target.width:
        k = min(target.width - out.width, max(1, out.width // 2))
        out = insert_seams(out, "vertical", k)
    while out.height > target.height:
        out = remove_seam(out, find_horizontal_seam(energy_map(out)))
    while out.height < target.height:
        k = min(target.height - out.height, max(1, out.height // 2))
        out = insert_seams(out, "horizontal", k)
    return out
