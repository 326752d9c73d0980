"""Shared fixtures helpers: synthetic images and drawing measurements."""
from __future__ import annotations

import numpy as np
from scipy import ndimage


def step_image(h: int = 48, w: int = 48, edge_col: int | None = None) -> np.ndarray:
    """Vertical step edge, dark left half, bright right half."""
    edge_col = w // 2 if edge_col is None else edge_col
    img = np.zeros((h, w), dtype=np.float64)
    img[:, edge_col:] = 1.0
    return img


def disk_image(n: int = 64, radius: float = 20.0) -> np.ndarray:
    """Dark filled disk on a bright background."""
    yy, xx = np.mgrid[0:n, 0:n]
    c = (n - 1) / 2.0
    img = np.ones((n, n), dtype=np.float64)
    img[(yy - c) ** 2 + (xx - c) ** 2 <= radius * radius] = 0.0
    return img


def textured_image(n: int = 64) -> np.ndarray:
    """Checkerboard texture on the left, flat field with one dark stripe right.

    Cell size and contrast are chosen so that fine detail kernels
    resolve individual cells while coarse ones wash the texture out.
    """
    img = np.full((n, n), 0.9, dtype=np.float64)
    cell = 2
    yy, xx = np.mgrid[0:n, 0 : n // 2]
    img[:, : n // 2] = np.where(((yy // cell) + (xx // cell)) % 2 == 0, 0.3, 0.7)
    stripe = 3 * n // 4
    img[:, stripe : stripe + 2] = 0.1
    return img


def two_stripe_image(n: int = 64) -> np.ndarray:
    """Two dark vertical stripes on a bright field, one per half."""
    img = np.full((n, n), 0.9, dtype=np.float64)
    img[:, n // 4 : n // 4 + 2] = 0.1
    img[:, 3 * n // 4 : 3 * n // 4 + 2] = 0.1
    return img


def mean_stroke_width(drawing: np.ndarray, cols: slice | None = None) -> float:
    """Mean length of horizontal ink runs (per row), optionally within a column range."""
    ink = drawing == 0.0
    if cols is not None:
        ink = ink[:, cols]
    widths = []
    for row in ink:
        padded = np.concatenate(([False], row, [False]))
        edges = np.flatnonzero(padded[1:] != padded[:-1])
        starts, stops = edges[::2], edges[1::2]
        widths.extend(stops - starts)
    return float(np.mean(widths)) if widths else 0.0


def ink_row_coverage(drawing: np.ndarray) -> float:
    """Fraction of rows containing at least one ink pixel."""
    ink = drawing == 0.0
    return float(ink.any(axis=1).mean())


def count_ink_components(drawing: np.ndarray) -> int:
    """8-connected components of the ink mask."""
    _, count = ndimage.label(drawing == 0.0, structure=np.ones((3, 3), dtype=int))
    return int(count)


def random_unit_field(rng: np.random.Generator, h: int, w: int, zero_frac: float = 0.0):
    """Random unit tangents plus magnitudes; a fraction of pixels set to zero."""
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(h, w))
    t = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    if zero_frac > 0.0:
        t[rng.random((h, w)) < zero_frac] = 0.0
    mag = rng.random((h, w))
    peak = mag.max()
    if peak > 0:
        mag = mag / peak
    return t, mag
