"""Shared fixtures and independent reference implementations (test oracles).

Every oracle here is written as a direct, per-pixel evaluation of the stated
definition, deliberately sharing no code with the library paths it checks.
"""
from __future__ import annotations

import itertools
import math
import struct
import sys
import zlib

import numpy as np
import pytest


def reference_png_bytes(rgb: np.ndarray) -> bytes:
    """Minimal independent PNG encoder: 8-bit truecolor, filter 0 rows."""
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    height, width, _ = rgb.shape

    def chunk(tag: bytes, data: bytes) -> bytes:
        crc = zlib.crc32(data, zlib.crc32(tag))
        return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", crc)

    raw = b"".join(b"\x00" + rgb[r].tobytes() for r in range(height))
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0))
        + chunk(b"IDAT", zlib.compress(raw))
        + chunk(b"IEND", b"")
    )


def bilinear_reference(px: np.ndarray, new_width: int, new_height: int) -> np.ndarray:
    """Per-pixel bilinear resample with src = (dst + 0.5) * (old/new) - 0.5."""
    height, width, channels = px.shape
    out = np.empty((new_height, new_width, channels))
    for r in range(new_height):
        sy = min(max((r + 0.5) * height / new_height - 0.5, 0.0), height - 1.0)
        y0 = math.floor(sy)
        ty = sy - y0
        y1 = min(y0 + 1, height - 1)
        for c in range(new_width):
            sx = min(max((c + 0.5) * width / new_width - 0.5, 0.0), width - 1.0)
            x0 = math.floor(sx)
            tx = sx - x0
            x1 = min(x0 + 1, width - 1)
            top = (1 - tx) * px[y0, x0] + tx * px[y0, x1]
            bottom = (1 - tx) * px[y1, x0] + tx * px[y1, x1]
            out[r, c] = (1 - ty) * top + ty * bottom
    return np.clip(out, 0.0, 1.0)


def dilate_reference(bits: np.ndarray, radius: int) -> np.ndarray:
    """Brute-force per-pixel Chebyshev neighborhood scan."""
    height, width = bits.shape
    out = np.zeros_like(bits)
    for r in range(height):
        for c in range(width):
            r0, r1 = max(0, r - radius), min(height, r + radius + 1)
            c0, c1 = max(0, c - radius), min(width, c + radius + 1)
            out[r, c] = bits[r0:r1, c0:c1].any()
    return out


def energy_reference(px: np.ndarray) -> np.ndarray:
    """Pixel-by-pixel |dL/dx| + |dL/dy| with central/one-sided differences."""
    lum = px[..., :3].mean(axis=2)
    height, width = lum.shape
    out = np.zeros((height, width))
    for r in range(height):
        for c in range(width):
            if width == 1:
                gx = 0.0
            elif c == 0:
                gx = lum[r, 1] - lum[r, 0]
            elif c == width - 1:
                gx = lum[r, -1] - lum[r, -2]
            else:
                gx = (lum[r, c + 1] - lum[r, c - 1]) / 2.0
            if height == 1:
                gy = 0.0
            elif r == 0:
                gy = lum[1, c] - lum[0, c]
            elif r == height - 1:
                gy = lum[-1, c] - lum[-2, c]
            else:
                gy = (lum[r + 1, c] - lum[r - 1, c]) / 2.0
            out[r, c] = abs(gx) + abs(gy)
    return out


def min_seam_energy_reference(energy: np.ndarray) -> float:
    """Exhaustive enumeration of every monotone top-to-bottom path."""
    height, width = energy.shape
    if height == 1:
        return float(energy[0].min())
    moves = np.array(list(itertools.product((-1, 0, 1), repeat=height - 1)))
    steps = np.concatenate(
        (np.zeros((moves.shape[0], 1), dtype=int), np.cumsum(moves, axis=1)), axis=1
    )
    cols = np.arange(width)[:, None, None] + steps[None]  # (starts, paths, rows)
    valid = ((cols >= 0) & (cols < width)).all(axis=2)
    clipped = np.clip(cols, 0, width - 1)
    totals = energy[np.arange(height), clipped].sum(axis=2)
    return float(totals[valid].min())


def remove_seam_reference(px: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Naive copy-skipping removal of one vertical seam."""
    height, width, channels = px.shape
    out = np.empty((height, width - 1, channels))
    for r in range(height):
        k = 0
        for c in range(width):
            if c == coords[r]:
                continue
            out[r, k] = px[r, c]
            k += 1
    return out


def harmonic_reference(px: np.ndarray, hole: np.ndarray) -> np.ndarray:
    """Dense linear solve of the discrete Laplace system with Dirichlet boundary."""
    height, width, channels = px.shape
    coords = np.argwhere(hole)
    index = {tuple(rc): i for i, rc in enumerate(coords)}
    n = len(coords)
    matrix = np.zeros((n, n))
    rhs = np.zeros((n, channels))
    for i, (r, c) in enumerate(coords):
        neighbors = [
            (rr, cc)
            for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
            if 0 <= rr < height and 0 <= cc < width
        ]
        matrix[i, i] = len(neighbors)
        for rr, cc in neighbors:
            if hole[rr, cc]:
                matrix[i, index[(rr, cc)]] -= 1
            else:
                rhs[i] += px[rr, cc]
    solution = np.linalg.solve(matrix, rhs)
    out = px.copy()
    out[hole] = solution
    return out


def composite_reference(
    bg: np.ndarray, rgba: np.ndarray, row: int, col: int, fh: int, fw: int
) -> np.ndarray:
    """Naive merge oracle: independent bilinear scale, then per-pixel blend."""
    scaled = bilinear_reference(rgba, fw, fh)
    out = bg.copy()
    for r in range(fh):
        for c in range(fw):
            alpha = scaled[r, c, 3]
            out[row + r, col + c, :3] = (
                alpha * scaled[r, c, :3] + (1 - alpha) * out[row + r, col + c, :3]
            )
    return out


@pytest.fixture
def tool_factory(tmp_path):
    """Write a standalone python script and return the command string to run it."""

    def make(name: str, body: str) -> str:
        script = tmp_path / f"{name}_tool.py"
        script.write_text(body)
        return f"{sys.executable} {script}"

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
